#include <rhg/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

using rhg::cplx;
using rhg::integrate_path;
using rhg::Path;

namespace
{
const double kEps = std::numeric_limits<double>::epsilon();

Path square(int panels)
{
    return Path{{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}, panels};
}
} // namespace

TEST(Quadrature, ConstantIntegrand)
{
    for (int panels : {1, 3, 8}) {
        auto r = integrate_path([](cplx) { return cplx(1.0); }, Path{{0.0, 1.0}, panels});
        EXPECT_NEAR(r.value.real(), 1.0, 4 * kEps);
        EXPECT_NEAR(r.value.imag(), 0.0, 4 * kEps);
    }
}

TEST(Quadrature, QuarticExactOnOnePanel)
{
    auto r = integrate_path([](cplx z) { return z * z * z * z; }, Path{{0.0, 1.0}, 1});
    EXPECT_NEAR(r.value.real(), 0.2, 4 * kEps);
}

TEST(Quadrature, RandomQuarticsExact)
{
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        cplx coef[5];
        for (auto &c : coef) c = {u(gen), u(gen)};
        const cplx a{u(gen), u(gen)}, b{u(gen), u(gen)};
        auto p = [&](cplx z) { return coef[0] + z * (coef[1] + z * (coef[2] + z * (coef[3] + z * coef[4]))); };
        auto prim = [&](cplx z) {
            return z * (coef[0] + z * (coef[1] / 2.0 + z * (coef[2] / 3.0 + z * (coef[3] / 4.0 + z * coef[4] / 5.0))));
        };
        double scale = 0;
        for (int k = 0; k <= 16; ++k) scale = std::max(scale, std::abs(p(a + (b - a) * (k / 16.0))));
        auto r = integrate_path(p, Path{{a, b}, 1});
        EXPECT_LE(std::abs(r.value - (prim(b) - prim(a))), 100 * kEps * scale * std::max(1.0, std::abs(b - a)));
    }
}

TEST(Quadrature, PartialWeightsAreExactForQuartics)
{
    // Running integrals inside a panel come from the same interpolant.
    std::vector<cplx> f(9);
    const cplx h = 0.25;
    for (int k = 0; k < 9; ++k) {
        const double x = k * 0.25;
        f[k] = x * x * x * x - 2 * x;
    }
    auto cum = rhg::quad::cumulative_on_samples(f, h);
    for (int k = 0; k < 9; ++k) {
        const double x = k * 0.25;
        EXPECT_NEAR(cum[k].real(), std::pow(x, 5) / 5 - x * x, 1e-14);
    }
}

TEST(Quadrature, ResidueOnSquare)
{
    auto r = integrate_path([](cplx z) { return 1.0 / z; }, square(64));
    EXPECT_NEAR(r.value.real(), 0.0, 1e-10);
    EXPECT_NEAR(r.value.imag(), 2 * std::numbers::pi, 1e-10);
}

TEST(Quadrature, RefinementShrinksChange)
{
    auto f = [](cplx z) { return 1.0 / z; };
    double prev_change = INFINITY;
    cplx prev = integrate_path(f, square(2)).value;
    for (int panels : {4, 8, 16}) {
        const cplx v = integrate_path(f, square(panels)).value;
        const double change = std::abs(v - prev);
        EXPECT_LT(change, prev_change);
        prev_change = change;
        prev = v;
    }
}

TEST(Quadrature, ReversalAntisymmetry)
{
    auto f = [](cplx z) { return std::exp(z) / (z + cplx(3, 1)); };
    Path p{{{0, 0}, {1, 0.5}, {0.2, 2}, {-1, 1}}, 8};
    const cplx fwd = integrate_path(f, p).value;
    const cplx bwd = integrate_path(f, p.reversed()).value;
    EXPECT_LE(std::abs(fwd + bwd), 1e-12 * std::abs(fwd));
}

TEST(Quadrature, CumulativeEndpointsAndAdditivity)
{
    auto f = [](cplx z) { return std::sin(z); };
    Path p{{{0, 0}, {1, 0}, {1, 1}, {0, 2}}, 8};
    auto r = integrate_path(f, p);
    ASSERT_EQ(r.cumulative.size(), p.nodes.size());
    EXPECT_EQ(r.cumulative.front(), cplx(0.0));
    EXPECT_EQ(r.cumulative.back(), r.value);
    auto head = integrate_path(f, Path{{p.nodes[0], p.nodes[1], p.nodes[2]}, 8});
    auto tail = integrate_path(f, Path{{p.nodes[2], p.nodes[3]}, 8});
    EXPECT_NEAR(std::abs(head.value + tail.value - r.value), 0.0, 1e-15);
    // sin has primitive -cos
    EXPECT_NEAR(std::abs(r.value - (1.0 - std::cos(cplx(0, 2)))), 0.0, 1e-9);
}

TEST(Quadrature, BatchMatchesIndividual)
{
    auto f = [](cplx z) { return z * z * z * z; };
    EXPECT_TRUE(rhg::integrate_segment_sequence(f, std::span<const Path>{}).empty());

    std::vector<Path> ones{Path{{0.0, 1.0}, 4}, Path{{0.0, 1.0}, 4}};
    auto r1 = rhg::integrate_segment_sequence([](cplx) { return cplx(1.0); }, ones);
    ASSERT_EQ(r1.size(), 2u);
    EXPECT_NEAR(r1[0].value.real(), 1.0, 1e-15);
    EXPECT_NEAR(r1[1].value.real(), 1.0, 1e-15);

    auto g = [](cplx z) { return 1.0 / z; };
    std::vector<Path> mixed{Path{{0.0, 1.0}, 1}, square(64)};
    // z^4 on the unit interval, 1/z elsewhere; they agree at z = 1, the only shared point
    auto h = [](cplx z) { return z.imag() == 0.0 && z.real() >= 0.0 && z.real() <= 1.0 ? z * z * z * z : 1.0 / z; };
    auto rb = rhg::integrate_segment_sequence(h, mixed);
    EXPECT_EQ(rb[0].value, integrate_path(f, mixed[0]).value);
    EXPECT_EQ(rb[1].value, integrate_path(g, mixed[1]).value);
}

TEST(Quadrature, NonFiniteSampleReportsLocation)
{
    try {
        integrate_path([](cplx z) { return 1.0 / z; }, Path{{-1.0, 1.0}, 1});
        FAIL() << "expected QuadratureError";
    } catch (const rhg::QuadratureError &e) {
        EXPECT_EQ(e.location(), cplx(0.0));
    }
    std::vector<Path> paths{Path{{1.0, 2.0}, 2}, Path{{-1.0, 1.0}, 1}};
    try {
        rhg::integrate_segment_sequence([](cplx z) { return 1.0 / z; }, paths);
        FAIL() << "expected QuadratureError";
    } catch (const rhg::QuadratureError &e) {
        EXPECT_EQ(e.path_index(), 1u);
    }
}

TEST(Quadrature, InvalidPathsRejected)
{
    auto f = [](cplx) { return cplx(1.0); };
    EXPECT_THROW(integrate_path(f, Path{{0.0}, 8}), std::invalid_argument);
    EXPECT_THROW(integrate_path(f, Path{{0.0, 0.0}, 8}), std::invalid_argument);
    EXPECT_THROW(integrate_path(f, Path{{0.0, 1.0}, 0}), std::invalid_argument);
}
