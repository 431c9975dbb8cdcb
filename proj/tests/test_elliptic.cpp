#include <rhg/elliptic.hpp>
#include <rhg/mesh.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using rhg::cplx;

namespace
{

// Independent reference values at rho = 1/2 (high-order lattice sums).
const cplx kE1{0.02276260374349128, 0.125};
const cplx kE3{-0.04552520748698256, 0.0};
const cplx kG2{-0.05628236644980157, 0.0};
const cplx kG3{-0.002939678487086678, 0.0};

struct Half {
    rhg::TorusParams p = rhg::torus_from_rho(0.5);
    rhg::EllipticConstants e = rhg::invariants(p);
};

const Half &half()
{
    static const Half h;
    return h;
}

} // namespace

TEST(Invariants, ReferenceValuesAtHalf)
{
    const auto &e = half().e;
    EXPECT_NEAR(std::abs(e.g2 - kG2), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e.g3 - kG3), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e.e1 - kE1), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e.e2 - std::conj(kE1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e.e3 - kE3), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(e.c - cplx(0, -1 / (8 * std::cos(0.5)))), 0.0, 1e-14);
}

// The published constant is four times ours: the same function, scaled.
TEST(Invariants, PublishedConstantIsFourfold)
{
    EXPECT_NEAR(std::abs(4.0 * half().e.c - cplx(0, -0.5697)), 0.0, 1e-3);
}

TEST(Invariants, BranchConventionAndRootSum)
{
    for (double rho : {-1.0, -0.6, -0.2, 0.0, 0.3, 0.5, 0.8, std::numbers::pi / 3}) {
        auto p = rhg::torus_from_rho(rho);
        auto e = rhg::invariants(p);
        EXPECT_NEAR(std::abs(e.e1 + e.e2 + e.e3), 0.0, 1e-10) << rho;
        EXPECT_LT(e.c.imag(), 0.0) << rho;
        EXPECT_LT(std::abs(e.c.real()), 1e-12) << rho;
        EXPECT_LT(std::abs(rhg::branch_residual(p, e)), 1e-12) << rho;
        EXPECT_LT(e.last_row_change, 1e-10);
    }
}

TEST(Invariants, HalfPeriodPairing)
{
    for (double rho : {-std::numbers::pi / 3, -0.5, 0.0, 0.5, std::numbers::pi / 3}) {
        auto p = rhg::torus_from_rho(rho);
        auto e = rhg::invariants(p);
        const double tol = 1e-10;
        EXPECT_NEAR(std::abs(rhg::wp_lattice_sum_extrapolated(p.omega1, p, 50) - e.e1), 0.0, tol) << rho;
        EXPECT_NEAR(std::abs(rhg::wp_lattice_sum_extrapolated(p.omega2, p, 50) - e.e2), 0.0, tol) << rho;
        EXPECT_NEAR(std::abs(rhg::wp_lattice_sum_extrapolated(p.omega1 + p.omega2, p, 50) - e.e3), 0.0, tol) << rho;
    }
}

TEST(LatticeSum, EvenAndPeriodic)
{
    const auto &p = half().p;
    for (cplx z : {cplx(0.3, 0.7), cplx(-1.1, 0.4), cplx(2.0, -1.5)}) {
        EXPECT_NEAR(std::abs(rhg::wp_lattice_sum(-z, p, 50) - rhg::wp_lattice_sum(z, p, 50)), 0.0, 1e-12);
    }
    const cplx z{0.4, 0.3};
    const cplx shift = 2.0 * p.omega1;
    double prev = INFINITY;
    for (int cutoff : {50, 100, 200}) {
        const double r = std::abs(rhg::wp_lattice_sum(z + shift, p, cutoff) - rhg::wp_lattice_sum(z, p, cutoff));
        EXPECT_LT(r, prev) << cutoff;
        prev = r;
    }
}

TEST(LatticeSum, HalfPeriodValueAtCutoff200)
{
    const auto &h = half();
    // plain truncation converges like cutoff^-2
    EXPECT_NEAR(std::abs(rhg::wp_lattice_sum(h.p.omega1, h.p, 200) - h.e.e1), 0.0, 1e-5);
}

TEST(LatticeSum, PoleError)
{
    const auto &p = half().p;
    EXPECT_THROW(rhg::wp_lattice_sum(0.0, p, 10), rhg::PoleError);
    EXPECT_THROW(rhg::wp_lattice_sum(2.0 * p.omega1 + 2.0 * p.omega2, p, 10), rhg::PoleError);
    EXPECT_THROW(rhg::wp_lattice_sum(0.5, p, 0), std::invalid_argument);
}

TEST(Symmetric, Landmarks)
{
    const auto &h = half();
    EXPECT_NEAR(std::abs(*rhg::wp_symmetric(0.0, h.p, h.e)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(*rhg::wp_symmetric(h.p.omega1, h.p, h.e) - std::polar(1.0, 0.5)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(*rhg::wp_symmetric(h.p.a, h.p, h.e) - rhg::kI), 0.0, 1e-8);
    EXPECT_FALSE(rhg::wp_symmetric(2.0 * h.p.a, h.p, h.e).has_value());
}

TEST(Maps, MobiusAndSubstitutionExamples)
{
    for (double rho : {0.0, 0.5, -0.7}) {
        auto p = rhg::torus_from_rho(rho);
        const double st = std::sqrt(std::tan(p.alpha)), sc = std::sqrt(1 / std::tan(p.alpha));
        EXPECT_NEAR(std::abs(*rhg::mobius_to_quadrant({0, -1}, p)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(*rhg::mobius_to_quadrant(1.0, p) - sc), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(*rhg::mobius_to_quadrant(0.0, p) - cplx(0, sc)), 0.0, 1e-15);
        EXPECT_FALSE(rhg::mobius_to_quadrant(rhg::kI, p).has_value());
        const cplx inner = -std::sqrt(cplx(st, -sc));
        EXPECT_NEAR(std::abs(rhg::desingularizing_substitution(std::sqrt(inner), p) - st), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(rhg::desingularizing_substitution(0.0, p) - cplx(0, sc)), 0.0, 1e-14);
    }
}

namespace
{

const rhg::QuarterMesh &std_mesh()
{
    static const rhg::QuarterMesh m = rhg::build_quarter_mesh(half().p, half().e);
    return m;
}

} // namespace

TEST(Mesh, BoundaryIntegralsReproducePeriods)
{
    for (double rho : {-1.0, 0.0, 0.5, std::numbers::pi / 3}) {
        auto p = rhg::torus_from_rho(rho);
        auto m = rhg::build_quarter_mesh(p, rhg::invariants(p));
        EXPECT_NEAR(m.a_mesh, p.a, 1e-8) << rho;
        EXPECT_NEAR(m.b_mesh, p.b, 1e-8) << rho;
        EXPECT_NEAR(std::abs(m.z_branch - p.omega1), 0.0, 1e-8) << rho;
    }
}

TEST(Mesh, BranchPointValue)
{
    const auto &m = std_mesh();
    EXPECT_NEAR(std::abs(m.chart.P_of_Z(m.chart.Z_branch()) - std::polar(1.0, 0.5)), 0.0, 1e-12);
    // the lattice-sum function at the mesh image of the branch point
    const auto P = rhg::wp_symmetric(m.z_branch, m.params, m.consts);
    ASSERT_TRUE(P.has_value());
    EXPECT_NEAR(std::abs(*P - std::polar(1.0, 0.5)), 0.0, 1e-5);
}

TEST(Mesh, MirrorSheetInvolution)
{
    const auto &m = std_mesh();
    EXPECT_LT(m.mirror_consistency, 1e-8);
    for (int j = 0; j < m.mirror.rows; ++j) {
        for (int c = 0; c < m.mirror.cols; ++c) {
            const auto idx = m.mirror.index(j, c);
            EXPECT_EQ(m.mirror.domain[idx], 1.0 / std::conj(m.mirror_base[idx]));
        }
    }
}

// P(-conj z) = -conj P(z) and P(2a - conj z) = 1/conj P(z), checked against
// the lattice sum at sampled mesh nodes.
TEST(Mesh, InvolutionsAgainstLatticeSum)
{
    const auto &m = std_mesh();
    const auto &p = m.params;
    int checked = 0;
    for (int j = 1; j < m.lower.rows; j += 7) {
        for (int i = 3; i < m.lower.cols; i += 11) {
            const cplx z = m.lower.at(j, i), P = m.lower.dom(j, i);
            const auto reflected = rhg::wp_symmetric(-std::conj(z), p, m.consts);
            ASSERT_TRUE(reflected.has_value());
            EXPECT_NEAR(std::abs(*reflected + std::conj(P)), 0.0, 1e-8) << j << "," << i;
            const auto mirrored = rhg::wp_symmetric(2.0 * p.a - std::conj(z), p, m.consts);
            ASSERT_TRUE(mirrored.has_value());
            EXPECT_NEAR(std::abs(*mirrored - 1.0 / std::conj(P)), 0.0, 1e-8 * std::max(1.0, 1 / std::norm(P)));
            ++checked;
        }
    }
    EXPECT_GE(checked, 12);
}

TEST(Mesh, NoFlippedQuads)
{
    for (double rho : {-std::numbers::pi / 3, 0.5}) {
        auto p = rhg::torus_from_rho(rho);
        auto m = rhg::build_quarter_mesh(p, rhg::invariants(p), {.rows = 81, .cols = 73});
        EXPECT_EQ(rhg::count_flipped_quads(m.lower), 0) << rho;
        EXPECT_EQ(rhg::count_flipped_quads(m.mirror), 0) << rho;
        EXPECT_LE(m.max_jump_ratio, 10.0);
    }
}

TEST(Mesh, NormalizationDetectorPicksIdentity)
{
    const auto fit = rhg::detect_normalization(std_mesh(), 30);
    EXPECT_EQ(fit.s, 1.0);
    EXPECT_EQ(fit.r, 1.0);
    EXPECT_LT(fit.residual, 1e-6);
    EXPECT_GT(fit.rejected_residual, 1e-2);
    EXPECT_EQ(fit.samples, 30);
}

TEST(Mesh, InvalidSpecs)
{
    const auto &h = half();
    EXPECT_THROW(rhg::build_quarter_mesh(h.p, h.e, {.rows = 5}), std::invalid_argument);
    EXPECT_THROW(rhg::build_quarter_mesh(h.p, h.e, {.detour_origin = 0.0}), std::invalid_argument);
    EXPECT_THROW(rhg::build_quarter_mesh(h.p, h.e, {.detour_i = 0.7}), std::invalid_argument);
    EXPECT_THROW(rhg::build_quarter_mesh(h.p, h.e, {.sector_levels = 1}), std::invalid_argument);
}

TEST(Mesh, FoldOutsideValidatedRangeIsReported)
{
    auto p = rhg::torus_from_rho(1.55);
    auto e = rhg::invariants(p);
    EXPECT_THROW(rhg::build_quarter_mesh(p, e, {.rows = 143, .cols = 321}), rhg::MeshQualityError);
}
