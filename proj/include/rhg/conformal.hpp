#ifndef RHG_CONFORMAL_HPP
#define RHG_CONFORMAL_HPP

// The chain of maps between the value plane of the symmetric P-function and
// the torus:
//
//   P  (right half-disk)  --Moebius-->  frak_z (first quadrant)
//   frak_z = sqrt(tan a) - (s - Z^2)^2  with  s = -sqrt(sqrt(tan a) - i sqrt(cot a))
//
// In the Z variable the torus coordinate z has a bounded derivative
//
//   dz/dZ = sigma * 8 / ( sqrt(frak_z + i sqrt(cot a)) sqrt(frak_z + sqrt(tan a)) sqrt(2s - Z^2) )
//
// so straight chords in Z can be integrated without endpoint singularities.
// Landmarks: Z = 0 <-> P = 0 <-> z = 0,  Z^2 = s <-> P = e^{i rho},  Z = oo <-> P = i.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace rhg
{

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

struct ConformalChart {
    double rho = 0.0;
    double alpha = std::numbers::pi / 4;
    double st = 1.0; // sqrt(tan alpha)
    double sc = 1.0; // sqrt(cot alpha)
    cplx s{};        // inner root of the substitution
    cplx half_turn{}; // e^{i arg(s)/2}, used to pick the Z branch near sqrt(s)
    double sigma = 1.0;

    ConformalChart() : ConformalChart(0.0) {}

    explicit ConformalChart(double rho_) : rho(rho_)
    {
        if (!(std::abs(rho) < std::numbers::pi / 2)) {
            throw std::domain_error("rho must lie in (-pi/2, pi/2)");
        }
        alpha = std::numbers::pi / 4 + rho / 2;
        st = std::sqrt(std::tan(alpha));
        sc = std::sqrt(1.0 / std::tan(alpha));
        s = -std::sqrt(cplx(st, -sc));
        half_turn = std::polar(1.0, std::arg(s) / 2);
        // Orientation: along the real frak_z axis the torus coordinate must
        // increase, i.e. dz/dfrak_z > 0 there.
        const cplx probe = Z_of_frakz(0.5 * st);
        const cplx ratio = raw_dz_dZ(probe) / dfrakz_dZ(probe);
        sigma = ratio.real() > 0 ? 1.0 : -1.0;
    }

    // Moebius map of the half-disk onto the first quadrant; nullopt at P = i.
    std::optional<cplx> frakz_of_P(cplx P) const
    {
        if (P == kI) {
            return std::nullopt;
        }
        return sc * (1.0 - kI * P) / (P - kI);
    }

    cplx P_of_frakz(cplx fz) const { return (sc + kI * fz) / (fz + kI * sc); }

    cplx frakz_of_Z(cplx Z) const
    {
        const cplx w = s - Z * Z;
        return st - w * w;
    }

    // Inverse of the substitution on the closed first quadrant. The real axis
    // beyond sqrt(tan a) lies on the cut of the inner root; rounding noise in
    // Im frak_z is clamped so boundary points take the interior side.
    cplx Z_of_frakz(cplx fz) const
    {
        // Im v must be -0.0 (not +0.0) on the real axis, matching the interior.
        // (std::max would let -0.0 through.)
        const double x = fz.real() > 0.0 ? fz.real() : 0.0;
        const double y = fz.imag() > 0.0 ? fz.imag() : 0.0;
        const cplx v{st - x, -y};
        const cplx W = -std::conj(std::sqrt(std::conj(v)));
        const cplx Z2 = s - W;
        return std::sqrt(Z2 * std::conj(half_turn * half_turn)) * half_turn;
    }

    cplx P_of_Z(cplx Z) const { return P_of_frakz(frakz_of_Z(Z)); }

    std::optional<cplx> Z_of_P(cplx P) const
    {
        if (P == 0.0) {
            return cplx(0.0);
        }
        const auto fz = frakz_of_P(P);
        if (!fz) {
            return std::nullopt;
        }
        return Z_of_frakz(*fz);
    }

    cplx dfrakz_dZ(cplx Z) const { return 4.0 * Z * (s - Z * Z); }

    cplx dz_dZ(cplx Z) const { return sigma * raw_dz_dZ(Z); }

    // Z at the branch point P = e^{i rho}.
    cplx Z_branch() const { return Z_of_frakz(st); }

private:
    cplx raw_dz_dZ(cplx Z) const
    {
        const cplx fz = frakz_of_Z(Z);
        return 8.0 / (std::sqrt(fz + kI * sc) * std::sqrt(fz + st) * std::sqrt(2.0 * s - Z * Z));
    }
};

} // namespace rhg

#endif
