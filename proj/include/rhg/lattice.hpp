#ifndef RHG_LATTICE_HPP
#define RHG_LATTICE_HPP

// Torus scalars derived from the shape parameter rho. The rhombic lattice is
// spanned by 2*omega1, 2*omega2 with omega1 = a - ib, omega2 = a + ib, where
//
//   a = 2 int_0^{sqrt(tan al)}   dfz / sqrt((fz^2 + cot al)(tan al - fz^2))
//   b = 2 int_0^{sqrt(cot al)}   dt  / sqrt((cot al - t^2)(tan al + t^2))
//
// and al = pi/4 + rho/2. Both integrals are taken in the Z variable of
// ConformalChart, where the integrand is bounded.

#include "conformal.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rhg
{

inline constexpr double kValidatedRho = std::numbers::pi / 3;

struct TorusParams {
    double rho = 0;
    double alpha = 0;
    double a = 0;
    double b = 0;
    cplx omega1{};
    cplx omega2{};
    double area = 0;
    double k = 0;
    cplx tau{};
    bool validated_range = true; // |rho| <= pi/3, where accuracy is established
};

namespace detail
{

// Z-polyline following the image of the frak_z segment t -> f(t), t in [0,1].
// The parametrization squares the distance to the far end so that Z moves
// roughly uniformly where the substitution is square-root like.
template <class Seg>
std::vector<cplx> chart_polyline(const ConformalChart &ch, Seg &&seg, int chords)
{
    std::vector<cplx> nodes(static_cast<std::size_t>(chords) + 1);
    for (int k = 0; k <= chords; ++k) {
        const double t = static_cast<double>(k) / chords;
        nodes[static_cast<std::size_t>(k)] = ch.Z_of_frakz(seg(1.0 - (1.0 - t) * (1.0 - t)));
    }
    return nodes;
}

} // namespace detail

inline TorusParams torus_from_rho(double rho, int panels = kDefaultPanels, int chords = 32)
{
    if (!(std::abs(rho) < std::numbers::pi / 2)) {
        throw std::domain_error("rho must lie in the open interval (-pi/2, pi/2)");
    }
    const ConformalChart ch(rho);
    auto f = [&](cplx Z) { return ch.dz_dZ(Z); };

    Path pa{detail::chart_polyline(ch, [&](double t) { return cplx(t * ch.st, 0.0); }, chords), panels};
    Path pb{detail::chart_polyline(ch, [&](double t) { return cplx(0.0, t * ch.sc); }, chords), panels};
    pa.nodes.back() = ch.Z_branch();
    pb.nodes.back() = 0.0;

    const cplx ia = integrate_path(f, pa).value;
    const cplx ib = -kI * integrate_path(f, pb).value;

    TorusParams p;
    p.rho = rho;
    p.alpha = ch.alpha;
    p.a = ia.real();
    p.b = ib.real();
    if (!(p.a > 0 && p.b > 0)) {
        throw std::runtime_error("period integrals did not produce positive half-periods");
    }
    p.omega1 = {p.a, -p.b};
    p.omega2 = {p.a, p.b};
    p.area = 8.0 * p.a * p.b;
    p.k = std::sqrt(p.area);
    p.tau = p.omega2 / p.omega1;
    p.validated_range = std::abs(rho) <= kValidatedRho + 1e-12;
    return p;
}

inline cplx scale_to_unit_area(const TorusParams &p, cplx z) { return z / p.k; }

} // namespace rhg

#endif
