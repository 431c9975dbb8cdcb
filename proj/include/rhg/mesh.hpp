#ifndef RHG_MESH_HPP
#define RHG_MESH_HPP

// Structured mesh of the quarter torus [0, 2a] x [-b, 0].
//
// The lower sheet is a polar grid over the right half-disk |P| <= 1 of the
// value plane of P; its torus image is the rectangle [0, a] x [-b, 0] with
// z(P = 0) = 0. The mirror sheet covers [a, 2a] x [-b, 0] through the
// symmetry z' = 2a - conj(z), P(z') = 1 / conj(P(z)); there the origin of the
// value plane becomes the pole at 2a, which is approached by a geometric
// polar sector and never reached.
//
// Rows index the angle theta in [-pi/2, pi/2], graded toward the branch value
// e^{i rho}; columns index the radius. Torus coordinates are integrated along
// straight chords in the Z variable of ConformalChart.

#include "conformal.hpp"
#include "elliptic.hpp"
#include "lattice.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rhg
{

class MeshQualityError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct MeshSpec {
    int rows = 41;
    int cols = 37;
    double detour_origin = 0.05;
    double detour_i = 0.05;
    int sector_levels = 8;
    int panels = kDefaultPanels;
    double grading_ratio = 1.2;
    int grading_steps = 40;
    double grading_cap = 12.0;
};

template <class T>
struct MeshField {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> domain;
    std::vector<T> value;
    double detour_radius_origin = 0;
    double detour_radius_i = 0;
    double detour_radius_corner = 0;

    MeshField() = default;
    MeshField(int r, int c) : rows(r), cols(c), domain(std::size_t(r) * c), value(std::size_t(r) * c) {}

    std::size_t index(int r, int c) const { return std::size_t(r) * cols + c; }
    T &at(int r, int c) { return value[index(r, c)]; }
    const T &at(int r, int c) const { return value[index(r, c)]; }
    cplx &dom(int r, int c) { return domain[index(r, c)]; }
    const cplx &dom(int r, int c) const { return domain[index(r, c)]; }

    template <class U>
    MeshField<U> with_values(std::vector<U> v) const
    {
        MeshField<U> out;
        out.rows = rows;
        out.cols = cols;
        out.domain = domain;
        out.value = std::move(v);
        out.detour_radius_origin = detour_radius_origin;
        out.detour_radius_i = detour_radius_i;
        out.detour_radius_corner = detour_radius_corner;
        return out;
    }
};

enum class Sheet : std::uint8_t { lower, mirror };

struct NormalizationFit {
    double s = 1.0;
    double r = 1.0;
    double residual = INFINITY;
    double rejected_residual = INFINITY;
    int samples = 0;
};

struct QuarterMesh {
    TorusParams params;
    EllipticConstants consts;
    ConformalChart chart;
    MeshSpec spec;

    std::vector<double> theta; // per row
    std::vector<double> rmax;  // per row, < 1 where the ray meets the detour at i
    std::vector<double> t;     // radial parameter per lower column

    int first_mirror_col = 0; // lower column where the mirror base grid starts
    int anchor_row = 0;       // mirror sheet is anchored at this row's outer node
    int branch_row = 0;       // outer node nearest e^{i rho}

    // value = torus coordinate; domain = value of P there
    MeshField<cplx> lower;
    MeshField<cplx> mirror;
    std::vector<cplx> lower_Z;
    std::vector<cplx> mirror_Z;    // Z of the half-disk point mirrored to each node
    std::vector<cplx> mirror_base; // that half-disk point

    cplx z_branch{}; // torus coordinate where P = e^{i rho}; equals w1
    double a_mesh = 0;
    double b_mesh = 0;
    double mirror_consistency = 0; // max |z' - (2a - conj z)| on shared nodes
    double max_jump_ratio = 0;

    int levels() const { return spec.sector_levels; }
    int outer_lower() const { return lower.cols - 1; }
    int outer_mirror() const { return mirror.cols - 1; }
    // lower column matching a mirror column, or -1 inside the polar sector
    int lower_col_of_mirror(int c) const { return c < levels() ? -1 : c - levels() + first_mirror_col; }
};

namespace detail
{

// Angle as a fixed function of u in [0, 1], so grids with (rows - 1)
// doubled contain the coarse rays. Spacing grows geometrically away from
// u0 (the branch angle) and saturates at `cap` times the finest spacing.
inline double graded_angle(double u, double rho, double lambda, double cap)
{
    const double pi2 = std::numbers::pi / 2;
    // rows split between the two sides of the branch angle; pulled toward
    // the middle so the short side keeps enough rows when |rho| is large
    const double u0 = 0.5 + 0.75 * rho / std::numbers::pi;
    auto H = [&](double d) { return std::log1p(std::expm1(lambda * d) / cap); };
    if (u >= u0) {
        return rho + (pi2 - rho) * H(u - u0) / H(1.0 - u0);
    }
    return rho - (rho + pi2) * H(u0 - u) / H(u0);
}

// Largest radius along the ray at angle theta outside |P - i| < eps.
inline double ray_limit(double theta, double eps)
{
    const double s = std::sin(theta);
    if (2.0 - 2.0 * s >= eps * eps) return 1.0;
    return s - std::sqrt(s * s - 1.0 + eps * eps);
}

// r = sin^2(pi t / 2): quadratic clustering at both ends of each ray, where
// z behaves like the square root of P.
inline double radial_profile(double t)
{
    const double s = std::sin(std::numbers::pi * t / 2);
    return s * s;
}

} // namespace detail

struct ChordSamples {
    std::vector<cplx> Z;
    std::vector<cplx> dz; // dz/dZ
    std::vector<cplx> P;
    cplx h{};
};

inline ChordSamples sample_chord(const ConformalChart &ch, cplx ZA, cplx ZB, int panels)
{
    ChordSamples cs;
    cs.Z = quad::segment_samples(ZA, ZB, panels);
    cs.h = (ZB - ZA) / static_cast<double>(cs.Z.size() - 1);
    cs.dz.resize(cs.Z.size());
    cs.P.resize(cs.Z.size());
    for (std::size_t k = 0; k < cs.Z.size(); ++k) {
        cs.dz[k] = ch.dz_dZ(cs.Z[k]);
        cs.P[k] = ch.P_of_Z(cs.Z[k]);
        if (!quad::finite(cs.dz[k]) || !quad::finite(cs.P[k])) {
            std::ostringstream os;
            os << "non-finite mesh integrand at Z = (" << cs.Z[k].real() << ", " << cs.Z[k].imag() << ")";
            throw QuadratureError(os.str(), cs.Z[k]);
        }
    }
    return cs;
}

namespace detail
{

inline constexpr double kMaxChordTurn = 0.02; // radians of theta per Z chord

// Calls step along the grid curve between two half-disk points, split into
// Z chords no longer than kMaxChordTurn in angle. Intermediate points follow
// linear interpolation in polar coordinates, which is exact on rays and arcs.
template <class T, class Step>
T advance(const QuarterMesh &m, Sheet sh, cplx PA, cplx ZA, cplx PB, cplx ZB, T value, Step &step)
{
    const double ta = std::arg(PA), tb = std::arg(PB);
    const int n = (PA == 0.0 || PB == 0.0) ? 1 : std::max(1, int(std::ceil(std::abs(tb - ta) / kMaxChordTurn)));
    cplx Zprev = ZA;
    for (int k = 1; k <= n; ++k) {
        cplx Zk = ZB;
        if (k < n) {
            const double f = double(k) / n;
            const cplx P = std::polar(std::abs(PA) + f * (std::abs(PB) - std::abs(PA)), ta + f * (tb - ta));
            Zk = *m.chart.Z_of_P(P);
        }
        value = step(sh, Zprev, Zk, value);
        Zprev = Zk;
    }
    return value;
}

} // namespace detail

// Visits every mesh node in an order where each node's predecessor is
// known: lower rays outward from P = 0, then the mirror sheet from the
// shared outer node of anchor_row, along the outer boundary, and inward
// along each mirror ray.
//
//   step(sheet, ZA, ZB, value_at_A) -> value_at_B   for one straight Z chord
template <class T, class Step>
void walk_mesh(const QuarterMesh &m, std::vector<T> &lower, std::vector<T> &mirror, const T &origin, Step &&step)
{
    const int R = m.lower.rows;
    const int C = m.lower.cols;
    const int CM = m.mirror.cols;
    lower.assign(std::size_t(R) * C, T{});
    mirror.assign(std::size_t(R) * CM, T{});
    auto lo = [&](std::size_t a, std::size_t b) {
        lower[b] = detail::advance(m, Sheet::lower, m.lower.domain[a], m.lower_Z[a], m.lower.domain[b], m.lower_Z[b],
                                   lower[a], step);
    };
    auto mi = [&](std::size_t a, std::size_t b) {
        mirror[b] = detail::advance(m, Sheet::mirror, m.mirror_base[a], m.mirror_Z[a], m.mirror_base[b],
                                    m.mirror_Z[b], mirror[a], step);
    };
    for (int j = 0; j < R; ++j) {
        lower[m.lower.index(j, 0)] = origin;
        for (int i = 1; i < C; ++i) lo(m.lower.index(j, i - 1), m.lower.index(j, i));
    }
    const int om = CM - 1;
    mirror[m.mirror.index(m.anchor_row, om)] = lower[m.lower.index(m.anchor_row, C - 1)];
    for (int j = m.anchor_row - 1; j >= 0; --j) mi(m.mirror.index(j + 1, om), m.mirror.index(j, om));
    for (int j = m.anchor_row + 1; j < R; ++j) mi(m.mirror.index(j - 1, om), m.mirror.index(j, om));
    for (int j = 0; j < R; ++j) {
        for (int c = om - 1; c >= 0; --c) mi(m.mirror.index(j, c + 1), m.mirror.index(j, c));
    }
}

// Value at the branch point P = e^{i rho}, continued from the outer lower
// node of branch_row.
template <class T, class Step>
T walk_to_branch(const QuarterMesh &m, const std::vector<T> &lower, Step &&step)
{
    const auto a = m.lower.index(m.branch_row, m.outer_lower());
    if (m.lower_Z[a] == m.chart.Z_branch()) return lower[a];
    return detail::advance(m, Sheet::lower, m.lower.domain[a], m.lower_Z[a], std::polar(1.0, m.params.rho),
                           m.chart.Z_branch(), lower[a], step);
}

namespace detail
{

// A fold shows up as one step along a grid line that is far larger than the
// typical step of the same line.
inline void check_jumps(QuarterMesh &m)
{
    double worst = 0;
    const char *where = "";
    int wrow = 0, wcol = 0;
    auto line = [&](const std::vector<cplx> &pts, const char *name, int row, int col0, int dcol) {
        std::vector<double> d(pts.size() - 1);
        for (std::size_t k = 1; k < pts.size(); ++k) d[k - 1] = std::abs(pts[k] - pts[k - 1]);
        std::vector<double> sorted = d;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double ratio = d[k] / median;
            if (!(ratio <= worst)) {
                worst = ratio;
                where = name;
                wrow = dcol ? row : int(k) + 1;
                wcol = dcol ? col0 + dcol * (int(k) + 1) : col0;
            }
        }
    };
    for (int j = 0; j < m.lower.rows; ++j) {
        const auto row = m.lower.value.begin() + m.lower.index(j, 0);
        line(std::vector<cplx>(row, row + m.lower.cols), "lower", j, 0, 1);
    }
    // mirror rays: the geometric polar sector and the base grid separately
    const int L = m.levels();
    for (int j = 0; j < m.mirror.rows; ++j) {
        const auto row = m.mirror.value.begin() + m.mirror.index(j, 0);
        line(std::vector<cplx>(row, row + L + 1), "mirror", j, 0, 1);
        line(std::vector<cplx>(row + L, row + m.mirror.cols), "mirror", j, L, 1);
    }
    std::vector<cplx> boundary(m.mirror.rows);
    for (int j = 0; j < m.mirror.rows; ++j) boundary[j] = m.mirror.at(j, m.outer_mirror());
    line(boundary, "mirror boundary", 0, m.outer_mirror(), 0);
    m.max_jump_ratio = worst;
    if (!(worst <= 10.0)) {
        std::ostringstream os;
        os << "mesh folds: grid-line jump " << worst << " times the line median on the " << where << " sheet at row "
           << wrow << ", column " << wcol;
        throw MeshQualityError(os.str());
    }
}

} // namespace detail

inline QuarterMesh build_quarter_mesh(const TorusParams &params, const EllipticConstants &consts,
                                      const MeshSpec &spec = {})
{
    if (spec.rows < 9 || spec.cols < 9) {
        throw std::invalid_argument("mesh dimensions must be at least 9 x 9");
    }
    if (!(spec.detour_origin > 0 && spec.detour_origin < 0.5 && spec.detour_i > 0 && spec.detour_i < 0.5)) {
        throw std::invalid_argument("detour radii must be small and positive");
    }
    if (spec.sector_levels < 3 || spec.panels < 1) {
        throw std::invalid_argument("need at least 3 sector levels and 1 panel");
    }

    QuarterMesh m;
    m.params = params;
    m.consts = consts;
    m.chart = ConformalChart(params.rho);
    m.spec = spec;
    const int R = spec.rows, C = spec.cols, L = spec.sector_levels;
    // For |rho| near pi/2 the branch value e^{i rho} approaches i; keep the
    // detour well clear of it (inactive for |rho| <= pi/3).
    const double detour_i = std::min(spec.detour_i, 0.25 * std::abs(std::polar(1.0, params.rho) - kI));
    const double lambda = spec.grading_steps * std::log(spec.grading_ratio);

    m.theta.resize(R);
    m.rmax.resize(R);
    for (int j = 0; j < R; ++j) {
        m.theta[j] = detail::graded_angle(double(j) / (R - 1), params.rho, lambda, spec.grading_cap);
        m.rmax[j] = detail::ray_limit(m.theta[j], detour_i);
    }
    m.theta.front() = -std::numbers::pi / 2;
    m.theta.back() = std::numbers::pi / 2;
    m.rmax.back() = detail::ray_limit(m.theta.back(), detour_i);
    m.t.resize(C);
    for (int i = 0; i < C; ++i) m.t[i] = double(i) / (C - 1);

    const double rmin = *std::min_element(m.rmax.begin(), m.rmax.end());
    m.first_mirror_col = -1;
    for (int i = 1; i < C; ++i) {
        if (detail::radial_profile(m.t[i]) * rmin >= spec.detour_origin) {
            m.first_mirror_col = i;
            break;
        }
    }
    if (m.first_mirror_col < 1 || m.first_mirror_col > C - 3) {
        throw std::invalid_argument("origin detour leaves too few radial nodes");
    }

    // anchor: first full-length ray at or above the branch angle
    m.anchor_row = -1;
    for (int j = 0; j < R; ++j) {
        if (m.theta[j] >= params.rho && m.rmax[j] == 1.0) {
            m.anchor_row = j;
            break;
        }
    }
    if (m.anchor_row < 0) throw std::invalid_argument("no full-length ray above the branch angle");
    double best = INFINITY;
    for (int j = 0; j < R; ++j) {
        if (m.rmax[j] == 1.0 && std::abs(m.theta[j] - params.rho) < best) {
            best = std::abs(m.theta[j] - params.rho);
            m.branch_row = j;
        }
    }

    // lower sheet
    m.lower = MeshField<cplx>(R, C);
    m.lower.detour_radius_origin = 0.0;
    m.lower.detour_radius_i = detour_i;
    m.lower_Z.resize(std::size_t(R) * C);
    for (int j = 0; j < R; ++j) {
        for (int i = 0; i < C; ++i) {
            const cplx P = std::polar(detail::radial_profile(m.t[i]) * m.rmax[j], m.theta[j]);
            const auto idx = m.lower.index(j, i);
            m.lower.domain[idx] = P;
            m.lower_Z[idx] = i == 0 ? cplx(0.0) : *m.chart.Z_of_P(P);
        }
        // the arc node at the branch angle would otherwise sit on the cut
        if (m.rmax[j] == 1.0 && m.theta[j] == params.rho) m.lower_Z[m.lower.index(j, C - 1)] = m.chart.Z_branch();
    }

    // mirror sheet: sector radii below the first base column, then the base grid
    const int CM = L + (C - m.first_mirror_col);
    m.mirror = MeshField<cplx>(R, CM);
    m.mirror.detour_radius_i = detour_i;
    m.mirror_Z.resize(std::size_t(R) * CM);
    m.mirror_base.resize(std::size_t(R) * CM);
    double innermost = INFINITY;
    for (int j = 0; j < R; ++j) {
        const double rdet = detail::radial_profile(m.t[m.first_mirror_col]) * m.rmax[j];
        for (int c = 0; c < CM; ++c) {
            const auto idx = m.mirror.index(j, c);
            cplx P;
            if (c < L) {
                P = std::polar(std::ldexp(rdet, -(L - c)), m.theta[j]);
                m.mirror_Z[idx] = *m.chart.Z_of_P(P);
            } else {
                const auto li = m.lower.index(j, m.lower_col_of_mirror(c));
                P = m.lower.domain[li];
                m.mirror_Z[idx] = m.lower_Z[li];
            }
            innermost = std::min(innermost, std::abs(P));
            m.mirror_base[idx] = P;
            m.mirror.domain[idx] = 1.0 / std::conj(P);
        }
    }
    m.mirror.detour_radius_origin = innermost;

    const int panels = spec.panels;
    const ConformalChart &ch = m.chart;
    auto step = [&](Sheet sh, cplx ZA, cplx ZB, cplx zA) {
        const auto cs = sample_chord(ch, ZA, ZB, panels);
        const cplx dz = quad::composite(cs.dz, cs.h);
        return sh == Sheet::lower ? zA + dz : zA - std::conj(dz);
    };
    walk_mesh(m, m.lower.value, m.mirror.value, cplx(0.0), step);
    m.z_branch = walk_to_branch(m, m.lower.value, step);
    m.a_mesh = m.z_branch.real();
    m.b_mesh = -m.lower.at(0, C - 1).imag();

    const cplx two_a = 2.0 * params.a;
    double corner = INFINITY;
    for (int j = 0; j < R; ++j) {
        corner = std::min(corner, std::abs(m.mirror.at(j, 0) - two_a));
        for (int c = L; c < CM; ++c) {
            const cplx zl = m.lower.at(j, m.lower_col_of_mirror(c));
            m.mirror_consistency = std::max(m.mirror_consistency, std::abs(m.mirror.at(j, c) - (two_a - std::conj(zl))));
        }
    }
    m.mirror.detour_radius_corner = corner;
    m.lower.detour_radius_corner = corner;

    detail::check_jumps(m);
    return m;
}

// Number of grid quads whose image is oriented opposite to the domain quad,
// judged by the cross product of the diagonals. Quads touching a degenerate
// edge (all nodes of a column equal) are skipped.
inline int count_flipped_quads(const MeshField<cplx> &f)
{
    auto cross = [](cplx u, cplx v) { return (std::conj(u) * v).imag(); };
    int flipped = 0;
    for (int j = 0; j + 1 < f.rows; ++j) {
        for (int i = 0; i + 1 < f.cols; ++i) {
            const double dom = cross(f.dom(j + 1, i + 1) - f.dom(j, i), f.dom(j + 1, i) - f.dom(j, i + 1));
            const double img = cross(f.at(j + 1, i + 1) - f.at(j, i), f.at(j + 1, i) - f.at(j, i + 1));
            if (dom == 0.0 || img == 0.0) continue;
            if ((dom > 0) != (img > 0)) ++flipped;
        }
    }
    return flipped;
}

// Fits P_mesh(z) = s * P_lattice(r z) over the two admissible normalizations
// (1, 1) and (1/2, 1/sqrt 2), using `samples` lower-sheet nodes.
inline NormalizationFit detect_normalization(const QuarterMesh &m, int samples = 50, int cutoff = 50)
{
    const std::array<std::pair<double, double>, 2> cand = {{{1.0, 1.0}, {0.5, 1.0 / std::numbers::sqrt2}}};
    std::array<double, 2> res{0.0, 0.0};
    // P = 0 on column 0 is exact by construction; sample the other nodes evenly
    std::vector<std::size_t> eligible;
    for (std::size_t idx = 0; idx < m.lower.value.size(); ++idx)
        if (idx % std::size_t(m.lower.cols) != 0) eligible.push_back(idx);
    const int used = std::min<int>(samples, int(eligible.size()));
    for (int s = 0; s < used; ++s) {
        const std::size_t idx = eligible[(2 * std::size_t(s) + 1) * eligible.size() / (2 * std::size_t(used))];
        const cplx z = m.lower.value[idx];
        const cplx P = m.lower.domain[idx];
        for (int k = 0; k < 2; ++k) {
            const auto w = wp_symmetric(z * cand[k].second, m.params, m.consts, cutoff);
            const double d = w ? std::abs(P - cand[k].first * *w) : INFINITY;
            res[k] = std::max(res[k], d);
        }
    }
    NormalizationFit fit;
    const int win = res[0] <= res[1] ? 0 : 1;
    fit.s = cand[win].first;
    fit.r = cand[win].second;
    fit.residual = res[win];
    fit.rejected_residual = res[1 - win];
    fit.samples = used;
    return fit;
}

} // namespace rhg

#endif
