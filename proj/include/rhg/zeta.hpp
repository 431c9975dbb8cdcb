#ifndef RHG_ZETA_HPP
#define RHG_ZETA_HPP

// zeta(z) = -(1/2) int_0^z P on the quarter-torus mesh, and the constants
// derived from it.
//
// The factor 1/2 is the normalization under which the Green's function is
// G = 2 Zhat (green.hpp) and Legendre's relation reads
// 4|c| (eta2 w1 - eta1 w2) = pi. Near the pole c zeta(z) = 1/(2w) + d + O(w)
// with w = z - 2a, and C - (e3/2) z + c zeta(z) with C = -d + e3 a equals
// half the classical zeta at w.

#include "mesh.hpp"
#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rhg
{

inline constexpr double kZetaScale = 0.5;

class InconsistencyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ZetaField {
    MeshField<cplx> lower;  // domain: torus coordinate, value: zeta
    MeshField<cplx> mirror;
    cplx at_branch{};       // zeta(w1) = eta1
};

struct ZetaConstants {
    cplx d{};
    cplx C_frak{};
    cplx eta1{}, eta2{};
    cplx eta1_classical{}, eta2_classical{};
    double d_ray = 0;    // horizontal-ray reading |c| Im zeta at the innermost node on x = 2a
    cplx d_over_c{};
};

namespace detail
{

inline MeshField<cplx> on_torus(const MeshField<cplx> &geometry, std::vector<cplx> values)
{
    MeshField<cplx> f = geometry.with_values(std::move(values));
    f.domain = geometry.value;
    return f;
}

// One Z chord of the zeta integration. Lower sheet: dzeta = -(1/2) P dz.
// Mirror sheet z' = 2a - conj z with P(z') = 1/conj P(z):
// dzeta' = -(1/2) P(z') dz' = (1/2) conj(dz / P).
inline cplx zeta_chord(const ChordSamples &cs, Sheet sh)
{
    std::vector<cplx> f(cs.Z.size());
    if (sh == Sheet::lower) {
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = -kZetaScale * cs.P[k] * cs.dz[k];
        return quad::composite(f, cs.h);
    }
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = cs.dz[k] / cs.P[k];
    return kZetaScale * std::conj(quad::composite(f, cs.h));
}

} // namespace detail

inline ZetaField zeta_mesh(const QuarterMesh &m)
{
    const int panels = m.spec.panels;
    auto step = [&](Sheet sh, cplx ZA, cplx ZB, cplx zeta) {
        return zeta + detail::zeta_chord(sample_chord(m.chart, ZA, ZB, panels), sh);
    };
    std::vector<cplx> lo, mi;
    walk_mesh(m, lo, mi, cplx(0.0), step);
    ZetaField zf;
    zf.at_branch = walk_to_branch(m, lo, step);
    zf.lower = detail::on_torus(m.lower, std::move(lo));
    zf.mirror = detail::on_torus(m.mirror, std::move(mi));
    return zf;
}

namespace detail
{

// Solve the 3x3 complex system A x = y by Gaussian elimination with pivoting.
inline std::array<cplx, 3> solve3(std::array<std::array<cplx, 3>, 3> A, std::array<cplx, 3> y)
{
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(y[col], y[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const cplx f = A[r][col] / A[col][col];
            for (int k = col; k < 3; ++k) A[r][k] -= f * A[col][k];
            y[r] -= f * y[col];
        }
    }
    std::array<cplx, 3> x{};
    for (int r = 2; r >= 0; --r) {
        cplx s = y[r];
        for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

} // namespace detail

inline constexpr double kDConsistency = 1e-5;

// d = lim (c zeta(z) - 1/(2w)), w = z - 2a. Along the mirror ray on the line
// x = 2a, f(w) = c zeta - 1/(2w) = d + beta w + gamma w^3 + O(w^5); the fit
// uses the three outermost sector radii (r, r/2, r/4 in the value plane).
inline cplx compute_d(const ZetaField &zf, const QuarterMesh &m, double *ray_reading = nullptr)
{
    const cplx c = m.consts.c;
    const cplx two_a = 2.0 * m.params.a;
    const int L = m.levels();
    std::array<std::array<cplx, 3>, 3> A{};
    std::array<cplx, 3> y{};
    for (int k = 0; k < 3; ++k) {
        const int col = L - 1 - k;
        const cplx w = zf.mirror.dom(0, col) - two_a;
        y[k] = c * zf.mirror.at(0, col) - kZetaScale / w;
        A[k] = {1.0, w, w * w * w};
    }
    const cplx fit = detail::solve3(A, y)[0];
    // The lattice is symmetric under conjugation, so d is real; Im fit only
    // measures how well the three-term model holds.
    const cplx d = fit.real();

    const double ray = std::abs(c) * zf.mirror.at(0, 0).imag();
    if (ray_reading) *ray_reading = ray;
    if (std::abs(fit - ray) > kDConsistency) {
        std::ostringstream os;
        os << "pole constant: extrapolated " << fit << " disagrees with ray level " << ray;
        throw InconsistencyError(os.str());
    }
    return d;
}

inline ZetaConstants zeta_constants(const ZetaField &zf, const QuarterMesh &m)
{
    const auto &p = m.params;
    const cplx c = m.consts.c;
    const cplx e3h = kZetaScale * m.consts.e3;
    ZetaConstants zc;
    zc.d = compute_d(zf, m, &zc.d_ray);
    zc.d_over_c = zc.d / c;
    zc.eta1 = zf.at_branch;
    // zeta(conj z) = -conj zeta(z) and w2 = conj w1
    zc.eta2 = -std::conj(zc.eta1);
    zc.C_frak = -zc.d + e3h * (p.omega1 + p.omega2);
    zc.eta1_classical = -2.0 * (-zc.d + e3h * p.omega1 + c * zc.eta2);
    zc.eta2_classical = -2.0 * (-zc.d + e3h * p.omega2 + c * zc.eta1);
    return zc;
}

// (1/2) zeta_classical(z - 2a), given the field value zeta(z).
inline cplx classical_zeta(cplx z, cplx zeta_value, const EllipticConstants &ec, const ZetaConstants &zc)
{
    return zc.C_frak - kZetaScale * ec.e3 * z + ec.c * zeta_value;
}

// 4|c| (eta2 w1 - eta1 w2); equals pi in exact arithmetic.
inline double legendre_value(const ZetaConstants &zc, const TorusParams &p, const EllipticConstants &ec)
{
    return (4.0 * std::abs(ec.c) * (zc.eta2 * p.omega1 - zc.eta1 * p.omega2)).real();
}

inline double legendre_residual(const ZetaConstants &zc, const TorusParams &p, const EllipticConstants &ec)
{
    return std::abs(legendre_value(zc, p, ec) - std::numbers::pi);
}

// 2 (eta1_cl w2 - eta2_cl w1); equals pi i.
inline cplx quasi_pi(const ZetaConstants &zc, const TorusParams &p)
{
    return 2.0 * (zc.eta1_classical * p.omega2 - zc.eta2_classical * p.omega1);
}

} // namespace rhg

#endif
