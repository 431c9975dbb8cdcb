#include <rhg/pipeline.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

using rhg::cplx;

namespace
{

const rhg::Pipeline &pipe(double rho)
{
    static std::map<double, rhg::Pipeline> cache;
    auto it = cache.find(rho);
    if (it == cache.end()) it = cache.emplace(rho, rhg::run_pipeline(rho, {41, 37})).first;
    return it->second;
}

} // namespace

TEST(Correction, ClosedFormsAndMeshDifferencesAgree)
{
    for (double rho : {-0.5, 0.0, 0.5}) {
        const auto &g = pipe(rho).correction;
        EXPECT_EQ(g.C, 0.0);
        EXPECT_NEAR(g.area_identity, 1.0, 1e-12) << rho;
        EXPECT_NEAR(g.A, g.A_mesh, 1e-10) << rho;
        EXPECT_NEAR(g.B, g.B_mesh, 1e-10) << rho;
    }
}

TEST(Correction, SquareTorusHasEqualCoefficients)
{
    const auto &g = pipe(0.0).correction;
    EXPECT_NEAR(g.A, g.B, 1e-12);
}

// A and B swap under rho -> -rho (a and b swap).
TEST(Correction, ReflectionSwapsCoefficients)
{
    EXPECT_NEAR(pipe(0.5).correction.A, pipe(-0.5).correction.B, 1e-12);
    EXPECT_NEAR(pipe(0.5).correction.B, pipe(-0.5).correction.A, 1e-12);
}

TEST(Correction, TamperedFieldIsRejected)
{
    const auto &pl = pipe(0.5);
    auto bz = pl.bigz;
    bz.mirror.value[bz.mirror.index(0, bz.mirror.cols - 1)].bigz += 1e-3;
    EXPECT_THROW(rhg::correction_constants(pl.zc, pl.params, pl.consts, bz), rhg::InconsistencyError);
}

TEST(Assembly, OriginIsZeroAndMinimum)
{
    const auto &r = pipe(0.5).green;
    for (int j = 0; j < r.lower.rows; ++j) EXPECT_EQ(r.lower.at(j, 0), 0.0);
    EXPECT_GE(r.diagnostics.min_value, -1e-9);
    EXPECT_NO_THROW(rhg::check_minimum(r));
    EXPECT_EQ(rhg::extend_periodic(r, 0.0), 0.0);
}

TEST(Assembly, RejectsRescaledNormalization)
{
    const auto &pl = pipe(0.5);
    rhg::NormalizationFit fit = pl.fit;
    fit.s = 2.0;
    EXPECT_THROW(rhg::assemble_green(pl.mesh, pl.bigz, pl.correction, pl.zc, fit), rhg::AssemblyError);
}

// Near the hexagonal shape the quadratic coefficient along one axis turns
// negative, so the origin is a saddle and G dips below zero beside it.
TEST(Assembly, OriginBecomesSaddleNearHexagonal)
{
    const auto &pl = pipe(std::numbers::pi / 3);
    EXPECT_LT(pl.correction.A, 0.0);
    EXPECT_LT(pl.green.diagnostics.min_value, -1e-3);
    EXPECT_NEAR(pl.green.diagnostics.min_location.imag(), 0.0, 1e-12);
    EXPECT_THROW(rhg::check_minimum(pl.green), rhg::AssemblyError);
    // the same threshold from the other side
    EXPECT_LT(pipe(-std::numbers::pi / 3).correction.B, 0.0);
}

TEST(Assembly, BottomEdgePeriodicityAndFittingGap)
{
    for (double rho : {-0.5, 0.0, 0.5}) {
        const auto &dg = pipe(rho).green.diagnostics;
        EXPECT_LT(dg.periodicity_residual, 1e-8) << rho;
        EXPECT_LT(dg.fitting_gap, 1e-8) << rho;
    }
}

// Zhat(w1) vanishes only when w1 is a lattice image of the origin.
TEST(Assembly, HalfPeriodValue)
{
    EXPECT_GT(pipe(0.0).green.diagnostics.zhat_at_w1, 1e-2);
    EXPECT_GT(pipe(0.5).green.diagnostics.zhat_at_w1, 1e-2);
}

// At rho = 0 the P grid is symmetric under conjugation, which is the
// diagonal reflection z -> -i conj z of the square torus on the lower sheet
// (w -> i conj w about 2a on the mirror sheet). Zhat is invariant and, since
// P(-i conj z) = conj P(z), zeta(-i conj z) = -i conj zeta(z).
TEST(Assembly, DiagonalReflectionOfSquareTorus)
{
    const auto &pl = pipe(0.0);
    auto zhat = [&](const rhg::ZetaZ &v, cplx z) { return v.bigz + rhg::detail::quad_form(pl.correction, z); };
    const cplx I = rhg::kI;
    int checked = 0;
    for (const bool lower : {true, false}) {
        const auto &f = lower ? pl.bigz.lower : pl.bigz.mirror;
        const auto &geo = lower ? pl.mesh.lower : pl.mesh.mirror;
        const cplx centre = lower ? 0.0 : 2.0 * pl.params.a;
        const cplx rot = lower ? -I : I;
        for (int j = 0; j < f.rows; ++j) {
            const int jj = f.rows - 1 - j;
            for (int i = 1; i < f.cols; ++i) {
                if (std::abs(geo.dom(jj, i) - std::conj(geo.dom(j, i))) > 1e-12) continue;
                const cplx z = f.dom(j, i), zz = f.dom(jj, i);
                EXPECT_NEAR(std::abs(zz - centre - rot * std::conj(z - centre)), 0.0, 1e-8);
                EXPECT_NEAR(zhat(f.at(jj, i), zz), zhat(f.at(j, i), z), 1e-8) << lower << " " << j << "," << i;
                if (lower) EXPECT_NEAR(std::abs(f.at(jj, i).zeta + I * std::conj(f.at(j, i).zeta)), 0.0, 1e-8);
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Extension, ReproducesNodeValues)
{
    const auto &r = pipe(0.5).green;
    for (const auto *f : {&r.lower, &r.mirror}) {
        for (std::size_t i = 0; i < f->value.size(); i += 7) {
            const double g = rhg::extend_periodic(r, f->domain[i]);
            if (!std::isfinite(g)) continue;
            EXPECT_NEAR(g, f->value[i], 1e-12);
        }
    }
}

TEST(Extension, FoldToQuarter)
{
    const auto &p = pipe(0.5).params;
    const cplx z{1.1, -0.7};
    EXPECT_EQ(rhg::fold_to_quarter(z, p), z);
    for (int m = -2; m <= 2; ++m) {
        for (int n = -2; n <= 2; ++n) {
            const cplx s = z + 2.0 * double(m) * p.omega1 + 2.0 * double(n) * p.omega2;
            EXPECT_NEAR(std::abs(rhg::fold_to_quarter(s, p) - z), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(rhg::fold_to_quarter(-s, p) - z), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(rhg::fold_to_quarter(std::conj(s), p) - z), 0.0, 1e-12);
        }
    }
}

TEST(Extension, SourceIsSingular)
{
    const auto &r = pipe(0.5).green;
    const cplx src = 2.0 * r.params.a / r.k;
    EXPECT_TRUE(std::isinf(rhg::extend_periodic(r, src)));
    EXPECT_TRUE(std::isinf(rhg::extend_periodic(r, src + 2.0 * r.params.omega2 / r.k)));
    EXPECT_TRUE(std::isfinite(rhg::extend_periodic(r, src + 0.1)));
}

// G ~ -(1/2 pi) ln r at the source: slope over the last decade of radii.
TEST(Extension, LogarithmicSingularity)
{
    const auto &r = pipe(0.5).green;
    const cplx src = 2.0 * r.params.a / r.k;
    const double r0 = 1.01 * r.source_detour / r.k;
    for (double ang : {0.3, 1.2, 2.5}) {
        const cplx dir = std::polar(1.0, ang);
        const double g0 = rhg::extend_periodic(r, src + r0 * dir);
        const double g1 = rhg::extend_periodic(r, src + 10 * r0 * dir);
        const double slope = (g1 - g0) / std::log(10.0);
        EXPECT_NEAR(slope, -1 / (2 * std::numbers::pi), 0.05 / (2 * std::numbers::pi)) << ang;
    }
}
