#ifndef RHG_GREEN_HPP
#define RHG_GREEN_HPP

// Green's function of the rhombic torus with the source at 2a:
//
//   Zhat(z) = -(1/2 pi) Re int_0^z c zeta  +  A x^2 + B y^2
//   G       = 2 Zhat,          Delta G = 1/|T| - delta(z - 2a),   G(0) = 0.
//
// Zhat is doubly periodic, even and symmetric under z -> conj z, so the
// quarter mesh [0, 2a] x [-b, 0] determines G everywhere. Results are
// reported in unit-area coordinates z / k; G itself is scale invariant.

#include "mesh.hpp"
#include "zeta.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rhg
{

class AssemblyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ZetaZ {
    cplx zeta{};
    double bigz = 0;
};

struct BigZField {
    MeshField<ZetaZ> lower;  // domain: torus coordinate
    MeshField<ZetaZ> mirror;
    ZetaZ at_branch{};
};

struct GreenCorrection {
    double A = 0, B = 0, C = 0;
    // the same constants from field values at i b, 2a + i b and w2
    double A_mesh = 0, B_mesh = 0;
    double area_identity = 0; // 4 (A + B) |T|
};

struct GreenDiagnostics {
    NormalizationFit normalization;
    double periodicity_residual = 0; // max |Zhat(x - ib) - Zhat(2a - x - ib)| on the bottom edge
    double fitting_gap = 0;          // spatial curves B->N and rotated S->N, unit coordinates
    double zhat_at_w1 = 0;           // Zhat(w1) = Zhat(w2); 0 only when w1 is equivalent to 0
    double min_value = 0;
    cplx min_location{}; // unit coordinates
    double min_cell = 0; // diameter of the mesh cell at the origin, unit coordinates
};

struct GreenNode {
    cplx z;      // torus coordinate on the quarter
    double bigz; // Zfrak
    cplx zeta;
    cplx P;
    cplx dP{};  // P'
    cplx d2P{}; // P''
};

namespace detail
{

// Uniform buckets over the quarter rectangle for nearest-node queries.
class NodeGrid
{
public:
    NodeGrid() = default;
    NodeGrid(const std::vector<GreenNode> &nodes, double width, double height) : x0_(0.0), y0_(-height)
    {
        const double n = std::max(4.0, std::sqrt(double(nodes.size()) / 4.0));
        cell_ = std::max(width, height) / n;
        nx_ = int(std::ceil(width / cell_)) + 1;
        ny_ = int(std::ceil(height / cell_)) + 1;
        buckets_.assign(std::size_t(nx_) * ny_, {});
        for (std::size_t i = 0; i < nodes.size(); ++i) buckets_[bucket(nodes[i].z)].push_back(int(i));
    }

    int nearest(const std::vector<GreenNode> &nodes, cplx z) const
    {
        const auto [cx, cy] = coords(z);
        int best = -1;
        double bd = INFINITY;
        for (int ring = 0; ring < std::max(nx_, ny_); ++ring) {
            for (int ix = cx - ring; ix <= cx + ring; ++ix) {
                for (int iy = cy - ring; iy <= cy + ring; ++iy) {
                    if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
                    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) continue;
                    for (int k : buckets_[std::size_t(iy) * nx_ + ix]) {
                        const double d = std::abs(nodes[k].z - z);
                        if (d < bd) {
                            bd = d;
                            best = k;
                        }
                    }
                }
            }
            // every unvisited bucket is at least ring * cell away
            if (best >= 0 && bd <= ring * cell_) break;
        }
        return best;
    }

private:
    std::pair<int, int> coords(cplx z) const
    {
        const int ix = std::clamp(int((z.real() - x0_) / cell_), 0, nx_ - 1);
        const int iy = std::clamp(int((z.imag() - y0_) / cell_), 0, ny_ - 1);
        return {ix, iy};
    }
    std::size_t bucket(cplx z) const
    {
        const auto [ix, iy] = coords(z);
        return std::size_t(iy) * nx_ + ix;
    }

    double x0_ = 0, y0_ = 0, cell_ = 1;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

// One Z chord carrying (zeta, Zfrak). zeta at the inner samples comes from the
// running integral, then c zeta is integrated over the same samples.
inline ZetaZ green_chord(const ChordSamples &cs, Sheet sh, cplx c, const ZetaZ &A)
{
    const std::size_t n = cs.Z.size();
    std::vector<cplx> f(n), g(n);
    if (sh == Sheet::lower) {
        for (std::size_t k = 0; k < n; ++k) f[k] = -kZetaScale * cs.P[k] * cs.dz[k];
        const auto run = quad::cumulative_on_samples(f, cs.h);
        for (std::size_t k = 0; k < n; ++k) g[k] = c * (A.zeta + run[k]) * cs.dz[k];
        const cplx F = quad::composite(g, cs.h);
        return {A.zeta + run.back(), A.bigz - F.real() / (2 * std::numbers::pi)};
    }
    // z' = 2a - conj z: zeta' = zeta'_A + (1/2) conj int dz/P and dz' = -conj dz
    for (std::size_t k = 0; k < n; ++k) f[k] = cs.dz[k] / cs.P[k];
    const auto run = quad::cumulative_on_samples(f, cs.h);
    for (std::size_t k = 0; k < n; ++k) g[k] = std::conj(c * (A.zeta + kZetaScale * std::conj(run[k]))) * cs.dz[k];
    const cplx F = -std::conj(quad::composite(g, cs.h));
    return {A.zeta + kZetaScale * std::conj(run.back()), A.bigz - F.real() / (2 * std::numbers::pi)};
}

} // namespace detail

inline BigZField bigz_field(const QuarterMesh &m)
{
    const int panels = m.spec.panels;
    const cplx c = m.consts.c;
    auto step = [&](Sheet sh, cplx ZA, cplx ZB, const ZetaZ &v) {
        return detail::green_chord(sample_chord(m.chart, ZA, ZB, panels), sh, c, v);
    };
    std::vector<ZetaZ> lo, mi;
    walk_mesh(m, lo, mi, ZetaZ{}, step);
    BigZField f;
    f.at_branch = walk_to_branch(m, lo, step);
    f.lower = m.lower.with_values(std::move(lo));
    f.lower.domain = m.lower.value;
    f.mirror = m.mirror.with_values(std::move(mi));
    f.mirror.domain = m.mirror.value;
    return f;
}

inline constexpr double kCorrectionAgreement = 1e-5;

// A = |c| Im eta2 / (4 pi a), B = |c| Re eta2 / (4 pi b), C = 0, checked
// against the boundary values of Zfrak:
//   A = (Z(ib) - Z(2a + ib)) / 4a^2
//   B = (Z(2a + ib) - Z(ib) - 2 Z2 + Re(c eta2 w2) / 2 pi) / 4b^2,
//   Z2 = -Re(c eta2 w2) / 4 pi.
// Z2 stands in for Z(w2) only through Z(2 w2) = 2 Z2 - Re(c eta2 w2) / 2 pi,
// which holds; the mesh value Z(w2) itself differs from Z2 unless Zhat(w2)
// happens to vanish, so it is reported, not used. Zfrak is symmetric under
// conjugation: Z(ib) is the lower node at -ib, Z(2a + ib) the mirror node at
// 2a - ib.
inline GreenCorrection correction_constants(const ZetaConstants &zc, const TorusParams &p, const EllipticConstants &ec,
                                            const BigZField &bz)
{
    const double cabs = std::abs(ec.c);
    const double pi = std::numbers::pi;
    GreenCorrection g;
    g.A = cabs * zc.eta2.imag() / (4 * pi * p.a);
    g.B = cabs * zc.eta2.real() / (4 * pi * p.b);
    g.C = 0.0;
    g.area_identity = 4 * (g.A + g.B) * p.area;

    const double zb = bz.lower.at(0, bz.lower.cols - 1).bigz;
    const double zs = bz.mirror.at(0, bz.mirror.cols - 1).bigz;
    const double R = (ec.c * zc.eta2 * p.omega2).real();
    const double z2 = -R / (4 * pi);
    g.A_mesh = (zb - zs) / (4 * p.a * p.a);
    g.B_mesh = (zs - zb - 2 * z2 + R / (2 * pi)) / (4 * p.b * p.b);
    if (std::abs(g.A - g.A_mesh) > kCorrectionAgreement || std::abs(g.B - g.B_mesh) > kCorrectionAgreement) {
        std::ostringstream os;
        os.precision(12);
        os << "correction constants disagree: A = " << g.A << " vs " << g.A_mesh << ", B = " << g.B << " vs "
           << g.B_mesh;
        throw InconsistencyError(os.str());
    }
    return g;
}

struct GreenResult {
    TorusParams params;
    GreenCorrection correction;
    GreenDiagnostics diagnostics;
    double k = 1;
    cplx c{};
    double e3 = 0;
    double d = 0;
    // domain: unit-area coordinate, value: G
    MeshField<double> lower;
    MeshField<double> mirror;

    std::vector<GreenNode> nodes;
    detail::NodeGrid grid;
    double source_detour = 0; // torus units; G is +inf closer than this to the source
    double model_radius = 0;  // torus units; the pole expansion is used inside
    double g2 = 0, g3 = 0;
};

namespace detail
{

inline double quad_form(const GreenCorrection &g, cplx z) { return g.A * z.real() * z.real() + g.B * z.imag() * z.imag(); }

// Zfrak at a point of the closed quarter from the nearest node: Taylor
// expansion of F = int c zeta to fourth order (F' = c zeta, F'' = -(1/2) c P),
// or near z = 2a the pole expansion
//   F = (1/2) log w + d w + (e3/4) w^2 - (g2/480) w^4 - (g3/1680) w^6 + K.
inline double bigz_at(const GreenResult &r, cplx q)
{
    const cplx w = q - 2.0 * r.params.a;
    if (std::abs(w) < r.source_detour) return INFINITY;
    const GreenNode &n = r.nodes[r.grid.nearest(r.nodes, q)];
    const double two_pi = 2 * std::numbers::pi;
    if (std::abs(w) < r.model_radius) {
        auto model = [&](cplx v) {
            const cplx v2 = v * v, v4 = v2 * v2;
            return 0.5 * std::log(std::abs(v)) +
                   (r.d * v + 0.25 * r.e3 * v2 - r.g2 / 480 * v4 - r.g3 / 1680 * v4 * v2).real();
        };
        const cplx wn = n.z - 2.0 * r.params.a;
        const double K = -two_pi * n.bigz - model(wn);
        return -(model(w) + K) / two_pi;
    }
    const cplx dz = q - n.z, dz2 = dz * dz;
    const cplx incr = r.c * (n.zeta * dz - 0.25 * n.P * dz2 - n.dP * dz2 * dz / 12.0 - n.d2P * dz2 * dz2 / 48.0);
    return n.bigz - incr.real() / two_pi;
}

// P' and P'' at every node of a sheet from wp'^2 = 4 wp^3 - g2 wp - g3 and
// wp'' = 6 wp^2 - g2/2 with wp = c P + e3; the sign of P' is the one that
// best predicts a neighbouring node.
inline void node_derivatives(std::vector<GreenNode> &nodes, std::size_t first, int rows, int cols, cplx c, cplx e3,
                             cplx g2, cplx g3)
{
    auto at = [&](int j, int i) -> GreenNode & { return nodes[first + std::size_t(j) * cols + i]; };
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            GreenNode &n = at(j, i);
            const cplx wp = c * n.P + e3;
            n.d2P = (6.0 * wp * wp - 0.5 * g2) / c;
            const cplx dP = std::sqrt(4.0 * wp * wp * wp - g2 * wp - g3) / c;
            const GreenNode &nb = i + 1 < cols ? at(j, i + 1) : at(j, i - 1);
            const cplx h = nb.z - n.z;
            auto miss = [&](cplx d) { return std::abs(nb.P - (n.P + d * h + 0.5 * n.d2P * h * h)); };
            n.dP = miss(dP) <= miss(-dP) ? dP : -dP;
        }
    }
}

} // namespace detail

inline GreenResult assemble_green(const QuarterMesh &m, const BigZField &bz, const GreenCorrection &corr,
                                  const ZetaConstants &zc, const NormalizationFit &fit)
{
    if (fit.s != 1.0 || fit.r != 1.0) {
        std::ostringstream os;
        os << "mesh function matches the lattice function only after rescaling (s = " << fit.s << ", r = " << fit.r
           << "); the chart constants are inconsistent";
        throw AssemblyError(os.str());
    }
    GreenResult r;
    r.params = m.params;
    r.correction = corr;
    r.k = m.params.k;
    r.c = m.consts.c;
    r.e3 = m.consts.e3.real();
    r.d = zc.d.real();
    r.diagnostics.normalization = fit;

    auto G_of = [&](cplx z, double bigz) { return 2.0 * (bigz + detail::quad_form(corr, z)); };
    auto build = [&](const MeshField<ZetaZ> &src, const MeshField<cplx> &geo) {
        std::vector<double> g(src.value.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = G_of(src.domain[i], src.value[i].bigz);
            r.nodes.push_back({src.domain[i], src.value[i].bigz, src.value[i].zeta, geo.domain[i]});
        }
        MeshField<double> f = src.with_values(std::move(g));
        for (auto &z : f.domain) z /= r.k;
        return f;
    };
    r.g2 = m.consts.g2.real();
    r.g3 = m.consts.g3.real();
    r.lower = build(bz.lower, m.lower);
    r.mirror = build(bz.mirror, m.mirror);
    detail::node_derivatives(r.nodes, 0, r.lower.rows, r.lower.cols, r.c, m.consts.e3, m.consts.g2, m.consts.g3);
    detail::node_derivatives(r.nodes, r.lower.value.size(), r.mirror.rows, r.mirror.cols, r.c, m.consts.e3,
                             m.consts.g2, m.consts.g3);
    r.grid = detail::NodeGrid(r.nodes, 2 * m.params.a, m.params.b);
    r.source_detour = m.mirror.detour_radius_corner;
    double ring = 0;
    for (int j = 0; j < m.mirror.rows; ++j)
        ring = std::max(ring, std::abs(m.mirror.at(j, m.levels() - 1) - 2.0 * m.params.a));
    r.model_radius = ring;

    auto &dg = r.diagnostics;
    dg.min_value = INFINITY;
    for (const auto *f : {&r.lower, &r.mirror}) {
        for (std::size_t i = 0; i < f->value.size(); ++i) {
            if (f->value[i] < dg.min_value) {
                dg.min_value = f->value[i];
                dg.min_location = f->domain[i];
            }
        }
    }
    dg.min_cell = 0;
    for (int j = 0; j < r.lower.rows; ++j) dg.min_cell = std::max(dg.min_cell, std::abs(r.lower.dom(j, 1)));

    // bottom edge: lower outer nodes from -ib to w1, mirror outer nodes from
    // 2a - ib to w1; rotation by 180 degrees about w1 pairs them
    const cplx N = m.z_branch / r.k;
    const int ol = r.lower.cols - 1, om = r.mirror.cols - 1;
    for (int j = 0; j <= m.branch_row; ++j) {
        if (m.theta[j] > m.params.rho) break;
        const cplx zl = r.lower.dom(j, ol), zm = r.mirror.dom(j, om);
        const double gl = r.lower.at(j, ol), gm = r.mirror.at(j, om);
        dg.periodicity_residual = std::max(dg.periodicity_residual, 0.5 * std::abs(gl - gm));
        const cplx rot = 2.0 * N - zm;
        dg.fitting_gap = std::max(dg.fitting_gap, std::hypot(std::abs(zl - rot), gl - gm));
    }
    dg.zhat_at_w1 = bz.at_branch.bigz + detail::quad_form(corr, m.z_branch);
    return r;
}

// Fails when the assembled field is not the non-negative representative.
inline void check_minimum(const GreenResult &r, double tol = 1e-6)
{
    const auto &dg = r.diagnostics;
    if (dg.min_value < -tol) {
        std::ostringstream os;
        os << "G takes the negative value " << dg.min_value << " at (" << dg.min_location.real() << ", "
           << dg.min_location.imag() << ")";
        throw AssemblyError(os.str());
    }
    if (std::abs(dg.min_location) > dg.min_cell) {
        std::ostringstream os;
        os << "minimum of G lies at (" << dg.min_location.real() << ", " << dg.min_location.imag()
           << "), away from the origin";
        throw AssemblyError(os.str());
    }
}

// Folds a torus coordinate into the quarter [0, 2a] x [-b, 0] using the
// lattice {2 m w1 + 2 n w2}, evenness and conjugation symmetry.
inline cplx fold_to_quarter(cplx z, const TorusParams &p)
{
    double x = z.real(), y = z.imag();
    const double n = std::round(y / (2 * p.b));
    x -= 2 * p.a * n;
    y -= 2 * p.b * n;
    x -= 4 * p.a * std::round(x / (4 * p.a));
    return {std::abs(x), -std::abs(y)};
}

// G at a unit-area coordinate; +inf within the source detour.
inline double extend_periodic(const GreenResult &r, cplx u)
{
    const cplx q = fold_to_quarter(u * r.k, r.params);
    const double bigz = detail::bigz_at(r, q);
    if (!std::isfinite(bigz)) return INFINITY;
    return 2.0 * (bigz + detail::quad_form(r.correction, q));
}

} // namespace rhg

#endif
