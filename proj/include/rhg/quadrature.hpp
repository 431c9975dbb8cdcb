#ifndef RHG_QUADRATURE_HPP
#define RHG_QUADRATURE_HPP

// Complex path integration with composite degree-4 (closed 5-point
// Newton-Cotes) panels. Every straight segment of a path is split into
// equal panels; each panel interpolates the integrand by a quartic through
// five equally spaced samples and integrates the interpolant exactly.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rhg
{

using cplx = std::complex<double>;

inline constexpr int kDefaultPanels = 8;

class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string &what, cplx location, std::size_t path_index = 0)
        : std::runtime_error(what), m_location(location), m_path_index(path_index)
    {
    }
    cplx location() const noexcept { return m_location; }
    std::size_t path_index() const noexcept { return m_path_index; }

private:
    cplx m_location;
    std::size_t m_path_index;
};

struct Path {
    std::vector<cplx> nodes;
    int panels_per_segment = kDefaultPanels;

    // Throws std::invalid_argument when the path cannot be integrated.
    void validate() const
    {
        if (nodes.size() < 2) {
            throw std::invalid_argument("path needs at least two nodes");
        }
        if (panels_per_segment < 1) {
            throw std::invalid_argument("panel count must be positive");
        }
        for (std::size_t k = 1; k < nodes.size(); ++k) {
            if (nodes[k] == nodes[k - 1]) {
                std::ostringstream os;
                os << "consecutive path nodes coincide at index " << k;
                throw std::invalid_argument(os.str());
            }
        }
    }

    Path reversed() const
    {
        return Path{std::vector<cplx>(nodes.rbegin(), nodes.rend()), panels_per_segment};
    }
};

struct QuadratureResult {
    cplx value{};
    std::vector<cplx> cumulative;
};

namespace quad
{

// Weights of the closed 5-point rule on [x0, x4] with unit spacing, and the
// partial integrals of the same quartic interpolant from x0 to x1, x2, x3.
inline constexpr std::array<double, 5> kBoole = {14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0,
                                                 14.0 / 45.0};
inline constexpr std::array<std::array<double, 5>, 4> kPartial = {{
    {251.0 / 720.0, 646.0 / 720.0, -264.0 / 720.0, 106.0 / 720.0, -19.0 / 720.0},
    {29.0 / 90.0, 124.0 / 90.0, 24.0 / 90.0, 4.0 / 90.0, -1.0 / 90.0},
    {27.0 / 80.0, 102.0 / 80.0, 72.0 / 80.0, 42.0 / 80.0, -3.0 / 80.0},
    {14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0, 14.0 / 45.0},
}};

inline std::size_t sample_count(int panels) { return 4 * static_cast<std::size_t>(panels) + 1; }

// Equally spaced samples on the straight segment [a, b], endpoints included.
inline std::vector<cplx> segment_samples(cplx a, cplx b, int panels)
{
    const std::size_t n = sample_count(panels);
    std::vector<cplx> out(n);
    const cplx h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = a + h * static_cast<double>(k);
    }
    out.back() = b;
    return out;
}

// Running integral at every sample of a composite panel rule, given the
// integrand values at the samples and the (complex) sample spacing h.
// Result[0] = 0 and result.back() is the composite integral.
inline std::vector<cplx> cumulative_on_samples(std::span<const cplx> f, cplx h)
{
    if (f.size() < 5 || (f.size() - 1) % 4 != 0) {
        throw std::invalid_argument("sample count must be 4*panels + 1");
    }
    std::vector<cplx> out(f.size());
    out[0] = 0.0;
    cplx base = 0.0;
    for (std::size_t p = 0; p + 4 < f.size(); p += 4) {
        for (std::size_t k = 0; k < 4; ++k) {
            cplx s = 0.0;
            for (std::size_t m = 0; m < 5; ++m) {
                s += kPartial[k][m] * f[p + m];
            }
            out[p + k + 1] = base + h * s;
        }
        base = out[p + 4];
    }
    return out;
}

inline cplx composite(std::span<const cplx> f, cplx h)
{
    if (f.size() < 5 || (f.size() - 1) % 4 != 0) {
        throw std::invalid_argument("sample count must be 4*panels + 1");
    }
    cplx total = 0.0;
    for (std::size_t p = 0; p + 4 < f.size(); p += 4) {
        cplx s = 0.0;
        for (std::size_t m = 0; m < 5; ++m) {
            s += kBoole[m] * f[p + m];
        }
        total += s;
    }
    return h * total;
}

inline bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <class F>
std::vector<cplx> evaluate_checked(F &&f, std::span<const cplx> points)
{
    std::vector<cplx> values(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        values[k] = f(points[k]);
        if (!finite(values[k])) {
            std::ostringstream os;
            os << "non-finite integrand at z = (" << points[k].real() << ", " << points[k].imag() << ")";
            throw QuadratureError(os.str(), points[k]);
        }
    }
    return values;
}

} // namespace quad

// Integral of f(z) dz along the polyline `path`, with partial integrals
// recorded at every node.
template <class F>
QuadratureResult integrate_path(F &&f, const Path &path)
{
    path.validate();
    QuadratureResult res;
    res.cumulative.reserve(path.nodes.size());
    res.cumulative.push_back(0.0);
    cplx acc = 0.0;
    for (std::size_t s = 0; s + 1 < path.nodes.size(); ++s) {
        const cplx a = path.nodes[s];
        const cplx b = path.nodes[s + 1];
        const auto pts = quad::segment_samples(a, b, path.panels_per_segment);
        const auto vals = quad::evaluate_checked(f, pts);
        acc += quad::composite(vals, (b - a) / static_cast<double>(pts.size() - 1));
        res.cumulative.push_back(acc);
    }
    res.value = acc;
    return res;
}

template <class F>
std::vector<QuadratureResult> integrate_segment_sequence(F &&f, std::span<const Path> paths)
{
    std::vector<QuadratureResult> out;
    out.reserve(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) {
        try {
            out.push_back(integrate_path(f, paths[k]));
        } catch (const QuadratureError &e) {
            std::ostringstream os;
            os << "path " << k << ": " << e.what();
            throw QuadratureError(os.str(), e.location(), k);
        }
    }
    return out;
}

} // namespace rhg

#endif
