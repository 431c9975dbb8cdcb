#ifndef RHG_IO_HPP
#define RHG_IO_HPP

// Grid sampling and export: CSV, JSON, 16-bit PGM with a JSON sidecar, and
// serialization of constants and verification reports.

#include "verify.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rhg
{

using json = nlohmann::ordered_json;

struct SurfaceGrid {
    int nx = 0, ny = 0;
    std::vector<double> x, y; // unit coordinates
    std::vector<double> G;    // row-major, y index outer; +inf at sources
    double at(int j, int i) const { return G[std::size_t(j) * nx + i]; }
};

// G on an nx by ny grid over the 3 x 3 tiling of the fundamental rectangle
// (basis 4a, height 2b) centred at the origin. Odd counts put a node at 0.
inline SurfaceGrid sample_surface(const GreenResult &g, int nx, int ny)
{
    if (nx < 3 || ny < 3) throw std::invalid_argument("surface grid needs at least 3 x 3 points");
    const double X = 6 * g.params.a / g.k, Y = 3 * g.params.b / g.k;
    SurfaceGrid s;
    s.nx = nx;
    s.ny = ny;
    for (int i = 0; i < nx; ++i) s.x.push_back(X * (2 * i - (nx - 1)) / double(nx - 1));
    for (int j = 0; j < ny; ++j) s.y.push_back(Y * (2 * j - (ny - 1)) / double(ny - 1));
    s.G.resize(std::size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) s.G[std::size_t(j) * nx + i] = extend_periodic(g, {s.x[i], s.y[j]});
    return s;
}

namespace detail
{

inline std::ostream &full_precision(std::ostream &os)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    return os;
}

inline json cplx_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace detail

inline void write_surface_csv(std::ostream &os, const SurfaceGrid &s)
{
    detail::full_precision(os);
    os << "x,y,G\n";
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) os << s.x[i] << ',' << s.y[j] << ',' << s.at(j, i) << '\n';
}

inline json surface_json(const SurfaceGrid &s, const GreenResult &g)
{
    json G = json::array();
    for (int j = 0; j < s.ny; ++j) {
        json row = json::array();
        for (int i = 0; i < s.nx; ++i) row.push_back(detail::finite_or_null(s.at(j, i)));
        G.push_back(std::move(row));
    }
    return json{{"rho", g.params.rho}, {"k", g.k},      {"A", g.correction.A}, {"B", g.correction.B},
                {"area", g.params.area}, {"x", s.x}, {"y", s.y},            {"G", std::move(G)}};
}

struct PgmRange {
    double min = 0, max = 0;
    int clamped = 0; // samples above max (the source points)
};

// 16-bit binary PGM, top row at the largest y. Values are mapped linearly
// from [min, max] of the finite samples; infinite samples become 65535.
inline PgmRange write_surface_pgm(std::ostream &os, const SurfaceGrid &s)
{
    PgmRange r{INFINITY, -INFINITY, 0};
    for (double v : s.G) {
        if (!std::isfinite(v)) continue;
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
    }
    if (!(r.max > r.min)) r.max = r.min + 1;
    os << "P5\n" << s.nx << ' ' << s.ny << "\n65535\n";
    for (int j = s.ny - 1; j >= 0; --j) {
        for (int i = 0; i < s.nx; ++i) {
            const double v = s.at(j, i);
            std::uint16_t q = 65535;
            if (std::isfinite(v))
                q = std::uint16_t(std::lround(65535.0 * (v - r.min) / (r.max - r.min)));
            else
                ++r.clamped;
            const char bytes[2] = {char(q >> 8), char(q & 0xff)};
            os.write(bytes, 2);
        }
    }
    return r;
}

inline json pgm_sidecar(const SurfaceGrid &s, const PgmRange &r)
{
    return json{{"width", s.nx},
                {"height", s.ny},
                {"maxval", 65535},
                {"min", r.min},
                {"max", r.max},
                {"clamped_samples", r.clamped},
                {"row_order", "first row is the largest y"},
                {"x_range", {s.x.front(), s.x.back()}},
                {"y_range", {s.y.front(), s.y.back()}}};
}

inline json constants_json(const Pipeline &pl)
{
    using detail::cplx_json;
    const auto &p = pl.params;
    const auto &e = pl.consts;
    const auto &zc = pl.zc;
    const auto &g = pl.correction;
    return json{{"rho", p.rho},
                {"a", p.a},
                {"b", p.b},
                {"omega1", cplx_json(p.omega1)},
                {"omega2", cplx_json(p.omega2)},
                {"tau", cplx_json(p.tau)},
                {"area", p.area},
                {"k", p.k},
                {"g2", cplx_json(e.g2)},
                {"g3", cplx_json(e.g3)},
                {"e1", cplx_json(e.e1)},
                {"e2", cplx_json(e.e2)},
                {"e3", cplx_json(e.e3)},
                {"c", cplx_json(e.c)},
                {"d", cplx_json(zc.d)},
                {"d_over_c", cplx_json(zc.d_over_c)},
                {"eta1", cplx_json(zc.eta1)},
                {"eta2", cplx_json(zc.eta2)},
                {"eta1_classical", cplx_json(zc.eta1_classical)},
                {"eta2_classical", cplx_json(zc.eta2_classical)},
                {"A", g.A},
                {"B", g.B},
                {"C", g.C},
                {"fitting_gap", pl.green.diagnostics.fitting_gap},
                {"mesh", {pl.mesh.spec.rows, pl.mesh.spec.cols}}};
}

inline std::string format_cplx(cplx z, int prec = 12)
{
    std::ostringstream os;
    os << std::setprecision(prec) << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? " - " : " + ")
       << std::abs(z.imag()) << "i";
    return os.str();
}

inline void write_constants_text(std::ostream &os, const Pipeline &pl)
{
    const auto &p = pl.params;
    const auto &e = pl.consts;
    const auto &zc = pl.zc;
    const auto &g = pl.correction;
    auto line = [&](const char *name, const std::string &v) { os << std::left << std::setw(16) << name << v << '\n'; };
    auto real = [](double v) {
        std::ostringstream s;
        s << std::setprecision(12) << v;
        return s.str();
    };
    line("rho", real(p.rho));
    line("a", real(p.a));
    line("b", real(p.b));
    line("omega1", format_cplx(p.omega1));
    line("omega2", format_cplx(p.omega2));
    line("e1", format_cplx(e.e1));
    line("e2", format_cplx(e.e2));
    line("e3", format_cplx(e.e3));
    line("c", format_cplx(e.c));
    line("d", format_cplx(zc.d));
    line("d/c", format_cplx(zc.d_over_c));
    line("eta1", format_cplx(zc.eta1));
    line("eta2", format_cplx(zc.eta2));
    line("eta1 (classic)", format_cplx(zc.eta1_classical));
    line("eta2 (classic)", format_cplx(zc.eta2_classical));
    line("A", real(g.A));
    line("B", real(g.B));
    line("C", real(g.C));
    line("k", real(p.k));
    line("|T|", real(p.area));
    line("fitting gap", real(pl.green.diagnostics.fitting_gap));
}

inline json report_json(const VerificationReport &r)
{
    using detail::cplx_json;
    json checks = json::array();
    for (const auto &c : r.checks)
        checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
    return json{{"rho", r.rho},
                {"profile", to_string(r.profile)},
                {"mesh_standard", {r.mesh_standard.rows, r.mesh_standard.cols}},
                {"mesh_refined", {r.mesh_refined.rows, r.mesh_refined.cols}},
                {"informational", r.informational},
                {"legendre_value", r.legendre_value},
                {"branch_residual", cplx_json(r.branch_residual)},
                {"max_refinement_error", r.max_refinement_error},
                {"fitting_gap", r.fitting_gap},
                {"nonneg_min", r.nonneg_min},
                {"nonneg_argmin", cplx_json(r.nonneg_argmin)},
                {"theta_max_diff", r.theta_max_diff},
                {"area_identity", r.area_identity},
                {"periodicity_residual", r.periodicity_residual},
                {"lattice_residual", r.lattice_residual},
                {"laplacian_error", r.laplacian_error},
                {"eta1", cplx_json(r.zeta.eta1)},
                {"eta2", cplx_json(r.zeta.eta2)},
                {"A", r.correction.A},
                {"B", r.correction.B},
                {"C", r.correction.C},
                {"checks", std::move(checks)},
                {"pass", r.all_pass()}};
}

inline void write_report_table(std::ostream &os, const VerificationReport &r)
{
    os << "rho = " << std::setprecision(12) << r.rho << ", profile " << to_string(r.profile) << ", meshes "
       << r.mesh_standard.rows << "x" << r.mesh_standard.cols << " / " << r.mesh_refined.rows << "x"
       << r.mesh_refined.cols << '\n';
    os << "eta1 = " << format_cplx(r.zeta.eta1) << ", eta2 = " << format_cplx(r.zeta.eta2) << '\n';
    if (r.informational) os << "|rho| > pi/3: results are informational\n";
    for (const auto &c : r.checks) {
        os << std::left << std::setw(20) << c.name << std::right << std::setw(16) << std::setprecision(6)
           << c.value << "  " << std::left << std::setw(48) << c.bound << (c.pass ? "pass" : "FAIL") << '\n';
    }
}

// Per-node dump of both sheets: P (the mesh variable), torus coordinate,
// zeta and G.
inline void write_mesh_csv(std::ostream &os, const Pipeline &pl)
{
    detail::full_precision(os);
    os << "sheet,row,col,P_re,P_im,z_re,z_im,zeta_re,zeta_im,G\n";
    for (const bool lower : {true, false}) {
        const auto &geo = lower ? pl.mesh.lower : pl.mesh.mirror;
        const auto &zf = lower ? pl.zeta.lower : pl.zeta.mirror;
        const auto &gf = lower ? pl.green.lower : pl.green.mirror;
        for (int j = 0; j < geo.rows; ++j) {
            for (int i = 0; i < geo.cols; ++i) {
                const cplx P = geo.dom(j, i), z = geo.at(j, i), ze = zf.at(j, i);
                os << (lower ? "lower" : "mirror") << ',' << j << ',' << i << ',' << P.real() << ',' << P.imag()
                   << ',' << z.real() << ',' << z.imag() << ',' << ze.real() << ',' << ze.imag() << ','
                   << gf.at(j, i) << '\n';
            }
        }
    }
}

inline json mesh_json(const Pipeline &pl)
{
    auto sheet = [&](bool lower) {
        const auto &geo = lower ? pl.mesh.lower : pl.mesh.mirror;
        const auto &zf = lower ? pl.zeta.lower : pl.zeta.mirror;
        const auto &gf = lower ? pl.green.lower : pl.green.mirror;
        json P = json::array(), z = json::array(), ze = json::array(), G = json::array();
        for (std::size_t i = 0; i < geo.value.size(); ++i) {
            P.push_back({geo.domain[i].real(), geo.domain[i].imag()});
            z.push_back({geo.value[i].real(), geo.value[i].imag()});
            ze.push_back({zf.value[i].real(), zf.value[i].imag()});
            G.push_back(detail::finite_or_null(gf.value[i]));
        }
        return json{{"rows", geo.rows},
                    {"cols", geo.cols},
                    {"detour_radius_origin", geo.detour_radius_origin},
                    {"detour_radius_i", geo.detour_radius_i},
                    {"detour_radius_corner", geo.detour_radius_corner},
                    {"P", std::move(P)},
                    {"z", std::move(z)},
                    {"zeta", std::move(ze)},
                    {"G", std::move(G)}};
    };
    return json{{"rho", pl.params.rho},
                {"z_branch", detail::cplx_json(pl.mesh.z_branch)},
                {"d_over_c", detail::cplx_json(pl.zc.d_over_c)},
                {"lower", sheet(true)},
                {"mirror", sheet(false)}};
}

} // namespace rhg

#endif
