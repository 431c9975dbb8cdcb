#ifndef RHG_ELLIPTIC_HPP
#define RHG_ELLIPTIC_HPP

// Weierstrass constants of the rhombic lattice and the symmetric function
//
//   P(z) = (wp(z - w1 - w2) - e3) / c,   c = sqrt((e1 - e3)(e3 - e2)),  Im c < 0,
//
// which has a double zero at 0, a double pole at w1 + w2 = 2a, and takes the
// values e^{i rho} at w1 and i at a. The lattice sums here are reference
// implementations; the mesh route (mesh.hpp) never calls them.

#include "conformal.hpp"
#include "lattice.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace rhg
{

class PoleError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

class LabelingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct EllipticConstants {
    cplx e1{}, e2{}, e3{};
    cplx g2{}, g3{};
    cplx c{};
    int rows_used = 0;            // lattice rows summed for g2, g3
    double last_row_change = 0.0; // relative size of the final row
};

namespace detail
{

// Lattice point 2m w1 + 2n w2 nearest to z.
inline cplx nearest_lattice_point(cplx z, const TorusParams &p)
{
    // z = u (2 w1) + v (2 w2) with real u, v
    const cplx w1 = 2.0 * p.omega1, w2 = 2.0 * p.omega2;
    const double det = (std::conj(w1) * w2).imag();
    const double u = (std::conj(z) * w2).imag() / det;
    const double v = (std::conj(w1) * z).imag() / det;
    return std::round(u) * w1 + std::round(v) * w2;
}

} // namespace detail

// Reduce z into the period parallelogram centred at 0.
inline cplx reduce_mod_lattice(cplx z, const TorusParams &p) { return z - detail::nearest_lattice_point(z, p); }

// Truncated Weierstrass sum over the square shell max(|m|,|n|) <= cutoff of
// the lattice {2m w1 + 2n w2}.
inline cplx wp_lattice_sum(cplx z, const TorusParams &p, int cutoff)
{
    if (cutoff < 1) {
        throw std::invalid_argument("cutoff must be positive");
    }
    const cplx w1 = 2.0 * p.omega1, w2 = 2.0 * p.omega2;
    const cplx near = detail::nearest_lattice_point(z, p);
    if (std::abs(z - near) < 1e-12) {
        throw PoleError("wp evaluated at a lattice point");
    }
    cplx sum = 1.0 / (z * z);
    for (int m = -cutoff; m <= cutoff; ++m) {
        for (int n = -cutoff; n <= cutoff; ++n) {
            if (m == 0 && n == 0) continue;
            const cplx l = static_cast<double>(m) * w1 + static_cast<double>(n) * w2;
            const cplx d = z - l;
            sum += 1.0 / (d * d) - 1.0 / (l * l);
        }
    }
    return sum;
}

// Square-shell truncation leaves an error expanding in cutoff^-2,
// cutoff^-3, ...; two Richardson steps over shells N, 2N, 4N remove both
// (about 1e-11 at N = 50 for moderate z).
inline cplx wp_lattice_sum_extrapolated(cplx z, const TorusParams &p, int cutoff)
{
    const cplx zr = reduce_mod_lattice(z, p);
    const cplx s1 = wp_lattice_sum(zr, p, cutoff);
    const cplx s2 = wp_lattice_sum(zr, p, 2 * cutoff);
    const cplx s4 = wp_lattice_sum(zr, p, 4 * cutoff);
    const cplx r1 = (4.0 * s2 - s1) / 3.0, r2 = (4.0 * s4 - s2) / 3.0;
    return (8.0 * r2 - r1) / 7.0;
}

namespace detail
{

// sum over (m,n) != 0 of (m + n tau)^-k for even k, using the Lipschitz
// formula for each row n != 0.
inline cplx eisenstein(int k, cplx tau, int max_rows, int &rows_used, double &last_change)
{
    const double pi = std::numbers::pi;
    const double zeta_k = k == 4 ? std::pow(pi, 4) / 90.0 : std::pow(pi, 6) / 945.0;
    double fact = 1.0;
    for (int j = 2; j < k; ++j) fact *= j;
    // (-2 pi i)^k / (k-1)!
    const cplx pref = std::pow(cplx(0.0, -2.0 * pi), k) / fact;

    cplx rows = 0.0;
    last_change = 1.0;
    rows_used = 0;
    for (int n = 1; n <= max_rows; ++n) {
        const cplx q = std::exp(cplx(0.0, 2.0 * pi * n) * tau);
        cplx row = 0.0;
        cplx qr = q;
        for (int r = 1; r < 200; ++r) {
            const cplx term = std::pow(static_cast<double>(r), k - 1) * qr;
            row += term;
            if (std::abs(term) < 1e-18 * std::abs(row)) break;
            qr *= q;
        }
        rows += row;
        rows_used = n;
        last_change = std::abs(row) / std::abs(rows);
        if (last_change < 1e-17) break;
    }
    return 2.0 * zeta_k + 2.0 * pref * rows;
}

inline cplx wp_cubic(cplx t, cplx g2, cplx g3) { return 4.0 * t * t * t - g2 * t - g3; }

// Roots of 4t^3 - g2 t - g3 by the trigonometric formula for the depressed
// cubic t^3 + pt + q, then Newton polish.
inline std::array<cplx, 3> cubic_roots(cplx g2, cplx g3)
{
    const cplx p = -g2 / 4.0, q = -g3 / 4.0;
    std::array<cplx, 3> t{};
    if (std::abs(p) < 1e-300) {
        // t^3 = -q
        const cplx r = std::pow(-q, 1.0 / 3.0);
        for (int k = 0; k < 3; ++k) t[k] = r * std::polar(1.0, 2 * std::numbers::pi * k / 3);
    } else {
        const cplx amp = 2.0 * std::sqrt(-p / 3.0);
        const cplx arg = std::acos((3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p)) / 3.0;
        for (int k = 0; k < 3; ++k) t[k] = amp * std::cos(arg - 2.0 * std::numbers::pi * k / 3.0);
    }
    for (auto &r : t) {
        for (int it = 0; it < 8; ++it) {
            const cplx f = wp_cubic(r, g2, g3);
            const cplx df = 12.0 * r * r - g2;
            if (df == 0.0) break;
            const cplx step = f / df;
            r -= step;
            if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(r))) break;
        }
    }
    return t;
}

} // namespace detail

// g2, g3, roots labelled by the half-period values they take:
// e1 = wp(w1), e2 = wp(w2), e3 = wp(w1 + w2), and c with Im c < 0.
inline EllipticConstants invariants(const TorusParams &p, int max_rows = 64)
{
    EllipticConstants ec;
    int rows4 = 0, rows6 = 0;
    double ch4 = 0, ch6 = 0;
    const cplx G4 = detail::eisenstein(4, p.tau, max_rows, rows4, ch4);
    const cplx G6 = detail::eisenstein(6, p.tau, max_rows, rows6, ch6);
    ec.rows_used = std::max(rows4, rows6);
    ec.last_row_change = std::max(ch4, ch6);
    if (ec.last_row_change > 1e-10) {
        throw std::runtime_error("lattice sums for g2, g3 did not converge within the row cutoff");
    }
    // sum over (m w1 + n w2)^-k = w1^-k G_k(tau)
    ec.g2 = 15.0 / 4.0 * G4 / std::pow(p.omega1, 4);
    ec.g3 = 35.0 / 16.0 * G6 / std::pow(p.omega1, 6);

    const auto roots = detail::cubic_roots(ec.g2, ec.g3);
    const std::array<cplx, 3> targets = {wp_lattice_sum_extrapolated(p.omega1, p, 20),
                                         wp_lattice_sum_extrapolated(p.omega2, p, 20),
                                         wp_lattice_sum_extrapolated(p.omega1 + p.omega2, p, 20)};
    double scale = 0;
    for (auto r : roots) scale = std::max(scale, std::abs(r));
    std::array<int, 3> pick{-1, -1, -1};
    for (int t = 0; t < 3; ++t) {
        double best = INFINITY;
        for (int r = 0; r < 3; ++r) {
            const double d = std::abs(roots[r] - targets[t]);
            if (d < best) {
                best = d;
                pick[t] = r;
            }
        }
        if (best > 1e-6 * scale) {
            std::ostringstream os;
            os << "no cubic root within tolerance of half-period value " << t + 1 << " (distance " << best << ")";
            throw LabelingError(os.str());
        }
    }
    if (pick[0] == pick[1] || pick[1] == pick[2] || pick[0] == pick[2]) {
        throw LabelingError("half-period values do not select distinct roots");
    }
    ec.e1 = roots[pick[0]];
    ec.e2 = roots[pick[1]];
    ec.e3 = roots[pick[2]];
    ec.c = std::sqrt((ec.e1 - ec.e3) * (ec.e3 - ec.e2));
    if (ec.c.imag() > 0) ec.c = -ec.c;
    return ec;
}

// Symmetric P through the lattice sum; nullopt at the poles 2a + lattice.
inline std::optional<cplx> wp_symmetric(cplx z, const TorusParams &p, const EllipticConstants &ec, int cutoff = 50)
{
    const cplx zh = reduce_mod_lattice(z - p.omega1 - p.omega2, p);
    if (std::abs(zh) < 1e-12) {
        return std::nullopt;
    }
    return (wp_lattice_sum_extrapolated(zh, p, cutoff) - ec.e3) / ec.c;
}

// |e^{i rho} - (e2 - e3)/c|, the value P(w1) must take.
inline cplx branch_residual(const TorusParams &p, const EllipticConstants &ec)
{
    return std::polar(1.0, p.rho) - (ec.e2 - ec.e3) / ec.c;
}

inline std::optional<cplx> mobius_to_quadrant(cplx frak_z, const TorusParams &p)
{
    return ConformalChart(p.rho).frakz_of_P(frak_z);
}

inline cplx desingularizing_substitution(cplx Z, const TorusParams &p) { return ConformalChart(p.rho).frakz_of_Z(Z); }

} // namespace rhg

#endif
