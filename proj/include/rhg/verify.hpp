#ifndef RHG_VERIFY_HPP
#define RHG_VERIFY_HPP

// Accuracy protocol: refinement comparison, residuals, identities and the
// theta cross-check, collected into one report with pass flags.

#include "pipeline.hpp"
#include "theta.hpp"

#include <cmath>
#include <complex>
#include <future>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rhg
{

struct Check {
    std::string name;
    double value = 0;
    std::string bound; // human-readable tolerance
    bool pass = false;
};

struct RefinementResult {
    double max_error = 0;  // max |G_refined - G_standard| at standard nodes
    int nested_nodes = 0;  // compared node to node
    int interpolated = 0;  // refined side evaluated off its nodes
};

struct VerificationReport {
    double rho = 0;
    Profile profile = Profile::rh;
    bool informational = false; // |rho| beyond the validated range
    MeshDims mesh_standard, mesh_refined;
    double legendre_value = 0; // Im 2 (eta1 w2 - eta2 w1) on the standard mesh
    cplx branch_residual{};
    double max_refinement_error = 0;
    double fitting_gap = 0;
    double nonneg_min = 0;
    cplx nonneg_argmin{};
    double theta_max_diff = 0;
    double area_identity = 0;
    double periodicity_residual = 0;
    double lattice_residual = 0;
    double laplacian_error = 0; // max |Delta G - 1| away from the source
    ZetaConstants zeta;
    GreenCorrection correction;
    std::vector<Check> checks;

    bool all_pass() const
    {
        for (const auto &c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
};

// Values printed for one reference implementation, with the bands allowed
// around them.
struct PublishedValues {
    std::optional<double> legendre;
    std::optional<cplx> branch_residual;
    std::optional<double> refinement;
    double refinement_band = 0.2;
};

inline PublishedValues published_values(double rho, Profile prof)
{
    PublishedValues pv;
    const auto near = [&](double v) { return std::abs(rho - v) < 1e-12; };
    if (near(0.5) && prof == Profile::rh) {
        pv.legendre = 3.14620;
        pv.branch_residual = cplx(2.3362e-6, -4.2764e-6);
        pv.refinement = 0.001467;
    }
    if (near(0.0) && prof == Profile::rh) pv.refinement = 0.001813;
    if (near(0.5) && prof == Profile::rh4) {
        pv.refinement = 4.3e-5;
        pv.refinement_band = 0.5;
    }
    return pv;
}

inline constexpr double kLegendreBand = 5e-4;
inline constexpr double kBranchBound = 1e-5;
inline constexpr double kFittingGapBound = 1e-8;
inline constexpr double kNonnegBound = -1e-9;
inline constexpr double kAreaBound = 1e-6;
inline constexpr double kPeriodicityBound = 1e-6;
inline constexpr double kLatticeBound = 1e-6;

inline constexpr double kLaplacianBound = 0.02;

inline double refinement_bound(Profile p) { return p == Profile::rh ? 0.002 : 1e-4; }
inline double theta_bound(Profile p) { return p == Profile::rh ? 2e-3 : 1e-3; }

// G of the refined pipeline at every node of the standard one. Nodes with the
// same P value are the same point; other nodes (the polar sector) are
// evaluated through the refined field's interpolation.
inline RefinementResult refinement_compare(const Pipeline &standard, const Pipeline &refined)
{
    RefinementResult rr;
    const auto &gs = standard.green, &gr = refined.green;
    for (const bool lower : {true, false}) {
        const auto &fs = lower ? gs.lower : gs.mirror;
        const auto &fr = lower ? gr.lower : gr.mirror;
        const auto &ms = lower ? standard.mesh.lower : standard.mesh.mirror;
        const auto &mr = lower ? refined.mesh.lower : refined.mesh.mirror;
        const int fy = (mr.rows - 1) / (ms.rows - 1);
        for (int j = 0; j < fs.rows; ++j) {
            for (int i = 0; i < fs.cols; ++i) {
                const double g = fs.at(j, i);
                if (!std::isfinite(g)) continue;
                // candidate partner column
                int ii = -1;
                if (lower) {
                    ii = 2 * i;
                } else {
                    const int lc = standard.mesh.lower_col_of_mirror(i);
                    if (lc >= 0) {
                        const int mc = 2 * lc - refined.mesh.first_mirror_col + refined.mesh.levels();
                        if (mc >= refined.mesh.levels()) ii = mc;
                    }
                }
                const bool nested = ii >= 0 && ii < fr.cols && fy * j < fr.rows &&
                                    std::abs(mr.dom(fy * j, ii) - ms.dom(j, i)) <= 1e-12 * (1 + std::abs(ms.dom(j, i)));
                double h;
                if (nested) {
                    h = fr.at(fy * j, ii);
                    ++rr.nested_nodes;
                } else {
                    h = extend_periodic(gr, fs.dom(j, i));
                    ++rr.interpolated;
                }
                if (std::isfinite(h)) rr.max_error = std::max(rr.max_error, std::abs(h - g));
            }
        }
    }
    return rr;
}

// max |G_theta - G_mesh| over a grid on the fundamental rectangle of basis 4a
// and height 2b centred at the origin (unit coordinates).
inline double theta_max_difference(const GreenResult &g, const ThetaParams &tp, int nx = 160, int ny = 80)
{
    const double ua = g.params.a / g.k, ub = g.params.b / g.k;
    double worst = 0;
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= ny; ++j) {
            const cplx u{-2 * ua + 4 * ua * i / nx, -ub + 2 * ub * j / ny};
            const double gm = extend_periodic(g, u);
            if (!std::isfinite(gm)) continue;
            worst = std::max(worst, std::abs(gm - green_theta(u, tp)));
        }
    }
    return worst;
}

struct LaplacianResult {
    double max_rel_error = 0; // max |Delta G - 1| in unit coordinates
    int points = 0;
};

// Five-point Laplacian of G in unit coordinates on a grid over the
// fundamental rectangle, skipping points within `exclusion` of a source.
inline LaplacianResult discrete_laplacian(const GreenResult &g, double h = 0.005, double exclusion = 0.15, int n = 24)
{
    const double ua = g.params.a / g.k, ub = g.params.b / g.k;
    const cplx P1 = 2.0 * g.params.omega1 / g.k, P2 = 2.0 * g.params.omega2 / g.k;
    const cplx src = 2.0 * g.params.a / g.k;
    auto near_source = [&](cplx u) {
        for (int m = -2; m <= 2; ++m)
            for (int k = -2; k <= 2; ++k)
                if (std::abs(u - src - double(m) * P1 - double(k) * P2) < exclusion) return true;
        return false;
    };
    LaplacianResult lr;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n / 2; ++j) {
            const cplx u{-2 * ua + 4 * ua * i / n, -ub + 2 * ub * j / (n / 2)};
            if (near_source(u)) continue;
            const double lap = (extend_periodic(g, u + h) + extend_periodic(g, u - h) +
                                extend_periodic(g, u + cplx(0, h)) + extend_periodic(g, u - cplx(0, h)) -
                                4 * extend_periodic(g, u)) /
                               (h * h);
            lr.max_rel_error = std::max(lr.max_rel_error, std::abs(lap - 1.0));
            ++lr.points;
        }
    }
    return lr;
}

inline VerificationReport full_report(double rho, Profile profile)
{
    const auto [sd, rd] = profile_dims(profile);
    auto fut = std::async(std::launch::async, [&] { return run_pipeline(rho, rd); });
    const Pipeline st = run_pipeline(rho, sd);
    const Pipeline rf = fut.get();

    VerificationReport r;
    r.rho = rho;
    r.profile = profile;
    r.informational = std::abs(rho) > kValidatedRho + 1e-12;
    r.mesh_standard = sd;
    r.mesh_refined = rd;
    r.zeta = st.zc;
    r.correction = st.correction;
    r.legendre_value = quasi_pi(st.zc, st.params).imag();
    r.branch_residual = branch_residual(st.params, st.consts);
    r.max_refinement_error = refinement_compare(st, rf).max_error;
    r.fitting_gap = st.green.diagnostics.fitting_gap;
    r.nonneg_min = st.green.diagnostics.min_value;
    r.nonneg_argmin = st.green.diagnostics.min_location;
    r.area_identity = st.correction.area_identity;
    r.periodicity_residual = st.green.diagnostics.periodicity_residual;
    r.lattice_residual = st.fit.residual;
    r.theta_max_diff = theta_max_difference(st.green, calibrate(st.params).params);
    r.laplacian_error = discrete_laplacian(st.green).max_rel_error;

    const auto pv = published_values(rho, profile);
    auto g = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    auto add = [&](std::string name, double value, std::string bound, bool pass) {
        r.checks.push_back({std::move(name), value, std::move(bound), pass});
    };
    if (pv.legendre) {
        add("legendre", r.legendre_value, "published " + g(*pv.legendre) + " +- 5e-4",
            std::abs(r.legendre_value - *pv.legendre) <= kLegendreBand);
    } else {
        add("legendre", r.legendre_value, "pi +- 5e-4", std::abs(r.legendre_value - std::numbers::pi) <= kLegendreBand);
    }
    const double br = std::abs(r.branch_residual);
    bool br_pass = br < kBranchBound;
    std::string br_bound = "< 1e-5";
    if (pv.branch_residual) {
        const cplx ref = *pv.branch_residual;
        br_pass = br_pass && std::abs(r.branch_residual.real() - ref.real()) <= 0.5 * std::abs(ref.real()) &&
                  std::abs(r.branch_residual.imag() - ref.imag()) <= 0.5 * std::abs(ref.imag());
        br_bound += ", components within 50% of published";
    }
    add("branch_residual", br, br_bound, br_pass);

    const double rb = refinement_bound(profile);
    bool rf_pass = r.max_refinement_error < rb;
    std::string rf_bound = "< " + g(rb);
    if (pv.refinement) {
        rf_pass = rf_pass && std::abs(r.max_refinement_error - *pv.refinement) <= pv.refinement_band * *pv.refinement;
        rf_bound += ", published " + g(*pv.refinement) + " +- " + g(pv.refinement_band * 100) + "%";
    }
    add("refinement", r.max_refinement_error, rf_bound, rf_pass);
    add("fitting_gap", r.fitting_gap, "<= 1e-8", r.fitting_gap <= kFittingGapBound);
    add("nonnegativity", r.nonneg_min, ">= -1e-9", r.nonneg_min >= kNonnegBound);
    add("theta_agreement", r.theta_max_diff, "<= " + g(theta_bound(profile)),
        r.theta_max_diff <= theta_bound(profile));
    add("area_identity", std::abs(r.area_identity - 1), "< 1e-6", std::abs(r.area_identity - 1) < kAreaBound);
    add("double_periodicity", r.periodicity_residual, "< 1e-6", r.periodicity_residual < kPeriodicityBound);
    add("lattice_oracle", r.lattice_residual, "<= 1e-6", r.lattice_residual <= kLatticeBound);
    add("laplacian", r.laplacian_error, "<= 0.02", r.laplacian_error <= kLaplacianBound);
    return r;
}

} // namespace rhg

#endif
