#ifndef RHG_THETA_HPP
#define RHG_THETA_HPP

// Closed-form Green's function through the Jacobi theta function, used only
// to cross-check the mesh route:
//
//   G(z) = f * ( -(1/2 pi) ln|theta1(zh)| + (Im zh)^2 / (2 Im tau) ) + C0,
//   zh = s (z - 2a),  tau = w2 / w1,
//
// with the scale s and factor f picked by calibrate() and C0 fixing G(0) = 0.

#include "lattice.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhg
{

class CalibrationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ThetaParams {
    cplx tau{0.0, 1.0};
    int truncation = 12;
    cplx half_period_scale{1.0}; // s in zh = s (z - 2a)
    double factor = 1.0;
    double C0 = 0.0;
    bool calibrated = false;

    // context for torus coordinates
    double k = 1.0;
    double two_a = 0.0;
    std::string label;
};

namespace detail
{

inline void check_theta_params(const ThetaParams &tp)
{
    if (!(tp.tau.imag() > 0)) throw std::domain_error("theta series diverges: Im tau must be positive");
    if (tp.truncation < 1) throw std::domain_error("theta truncation must be positive");
}

// Series for theta1 and its derivative; the last pair of terms must be
// negligible against the sum of magnitudes.
inline std::pair<cplx, cplx> theta1_series(cplx z, const ThetaParams &tp)
{
    check_theta_params(tp);
    const double pi = std::numbers::pi;
    const cplx ipt = cplx(0, pi) * tp.tau;
    cplx sum = 0.0, dsum = 0.0;
    double mag = 0.0, last = 0.0;
    for (int n = -tp.truncation; n <= tp.truncation; ++n) {
        const double h = n + 0.5;
        const cplx t = (n % 2 == 0 ? 1.0 : -1.0) * std::exp(ipt * (h * h) + cplx(0, (2 * n + 1) * pi) * z);
        sum += t;
        dsum += t * cplx(0, (2 * n + 1) * pi);
        mag += std::abs(t);
        if (std::abs(n) == tp.truncation) last += std::abs(t);
    }
    if (!(last <= 1e-16 * mag)) {
        std::ostringstream os;
        os << "theta series truncated too early at N = " << tp.truncation << " (tail " << last / mag << ")";
        throw std::runtime_error(os.str());
    }
    return {cplx(0, -1) * sum, cplx(0, -1) * dsum};
}

} // namespace detail

inline cplx theta1(cplx z, const ThetaParams &tp) { return detail::theta1_series(z, tp).first; }

inline cplx theta1_prime(cplx z, const ThetaParams &tp) { return detail::theta1_series(z, tp).second; }

namespace detail
{

inline cplx theta_arg(cplx u, const ThetaParams &tp) { return tp.half_period_scale * (u * tp.k - tp.two_a); }

inline double theta_green_raw(cplx u, const ThetaParams &tp)
{
    const cplx zh = theta_arg(u, tp);
    const double y = zh.imag();
    return tp.factor * (-std::log(std::abs(theta1(zh, tp))) / (2 * std::numbers::pi) + y * y / (2 * tp.tau.imag()));
}

} // namespace detail

// G at a unit-area coordinate u.
inline double green_theta(cplx u, const ThetaParams &tp)
{
    if (!tp.calibrated) throw std::logic_error("theta parameters are not calibrated");
    return detail::theta_green_raw(u, tp) + tp.C0;
}

// Wirtinger derivative dG/du, for gradient checks.
inline cplx green_theta_du(cplx u, const ThetaParams &tp)
{
    if (!tp.calibrated) throw std::logic_error("theta parameters are not calibrated");
    const cplx zh = detail::theta_arg(u, tp);
    const auto [th, dth] = detail::theta1_series(zh, tp);
    const cplx dG = -(dth / th) / (4 * std::numbers::pi) - cplx(0, 1) * zh.imag() / (2 * tp.tau.imag());
    return tp.factor * dG * tp.half_period_scale * tp.k;
}

struct CalibrationCandidate {
    std::string label;
    double periodicity = 0;
    double evenness = 0;
    double laplacian = 0; // relative error of the 5-point Laplacian against 1
    bool passed = false;
};

struct Calibration {
    ThetaParams params;
    std::vector<CalibrationCandidate> candidates;
    int chosen = -1;
};

inline constexpr double kCalibrationTol = 1e-8;
inline constexpr double kLaplacianTol = 1e-4; // limited by the finite-difference stencil

// Tries zh = s (z - 2a) for s in {1/(2 w1), 1/w1, 1/(2 w1 k)}, each with
// factor 1 and 2. Periodicity and evenness are measured at fixed sample
// points; the unit-area Laplacian must equal 1 away from the sources.
inline Calibration calibrate(const TorusParams &p, int truncation = 12)
{
    struct Cand {
        const char *label;
        cplx s;
        double f;
    };
    const cplx w1 = p.omega1;
    const std::array<Cand, 6> cands = {{{"1/(2 w1)", 1.0 / (2.0 * w1), 1.0},
                                        {"1/(2 w1), factor 2", 1.0 / (2.0 * w1), 2.0},
                                        {"1/w1", 1.0 / w1, 1.0},
                                        {"1/w1, factor 2", 1.0 / w1, 2.0},
                                        {"1/(2 w1 k)", 1.0 / (2.0 * w1 * p.k), 1.0},
                                        {"1/(2 w1 k), factor 2", 1.0 / (2.0 * w1 * p.k), 2.0}}};
    // sample points in unit coordinates, away from the source at 2a/k
    std::vector<cplx> pts;
    const double ua = p.a / p.k, ub = p.b / p.k;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) pts.emplace_back(ua * (0.15 + 0.4 * i), ub * (-0.8 + 0.55 * j));
    const cplx P1 = 2.0 * p.omega1 / p.k, P2 = 2.0 * p.omega2 / p.k;

    Calibration cal;
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        ThetaParams tp;
        tp.tau = p.tau;
        tp.truncation = truncation;
        tp.half_period_scale = cands[ci].s;
        tp.factor = cands[ci].f;
        tp.k = p.k;
        tp.two_a = 2 * p.a;
        tp.label = cands[ci].label;
        tp.C0 = -detail::theta_green_raw(0.0, tp);
        tp.calibrated = true;

        CalibrationCandidate cc;
        cc.label = tp.label;
        for (cplx u : pts) {
            const double g = green_theta(u, tp);
            cc.periodicity = std::max({cc.periodicity, std::abs(green_theta(u + P1, tp) - g),
                                       std::abs(green_theta(u + P2, tp) - g)});
            cc.evenness = std::max(cc.evenness, std::abs(green_theta(-u, tp) - g));
            const double h = 1e-3;
            const double lap = (green_theta(u + h, tp) + green_theta(u - h, tp) + green_theta(u + cplx(0, h), tp) +
                                green_theta(u - cplx(0, h), tp) - 4 * g) /
                               (h * h);
            cc.laplacian = std::max(cc.laplacian, std::abs(lap - 1.0));
        }
        cc.passed = cc.periodicity < kCalibrationTol && cc.evenness < kCalibrationTol && cc.laplacian < kLaplacianTol;
        if (cc.passed) {
            if (cal.chosen < 0) {
                cal.chosen = int(ci);
                cal.params = tp;
            } else {
                cal.chosen = -2;
            }
        }
        cal.candidates.push_back(cc);
    }
    if (cal.chosen < 0) {
        std::ostringstream os;
        os << (cal.chosen == -1 ? "no theta normalization passes" : "theta normalization is ambiguous") << ":";
        for (const auto &c : cal.candidates)
            os << " [" << c.label << ": periodic " << c.periodicity << ", even " << c.evenness << ", laplacian "
               << c.laplacian << "]";
        throw CalibrationError(os.str());
    }
    return cal;
}

} // namespace rhg

#endif
