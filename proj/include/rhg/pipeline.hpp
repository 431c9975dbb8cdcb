#ifndef RHG_PIPELINE_HPP
#define RHG_PIPELINE_HPP

// One call from rho to the assembled Green's function.

#include "green.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace rhg
{

enum class Profile { rh, rh4 };

struct MeshDims {
    int rows = 0, cols = 0;
};

// Standard and refinement-partner meshes. rh4 doubles only the radial count.
inline std::pair<MeshDims, MeshDims> profile_dims(Profile p)
{
    if (p == Profile::rh) return {{41, 37}, {81, 73}};
    return {{143, 321}, {143, 641}};
}

inline std::string to_string(Profile p) { return p == Profile::rh ? "rh" : "rh4"; }

inline Profile parse_profile(const std::string &s)
{
    if (s == "rh") return Profile::rh;
    if (s == "rh4") return Profile::rh4;
    throw std::invalid_argument("unknown profile '" + s + "' (expected rh or rh4)");
}

// Quadrature panels per chord, overridable through RHG_PANELS.
inline int panels_from_env(int fallback = kDefaultPanels)
{
    const char *v = std::getenv("RHG_PANELS");
    if (!v || !*v) return fallback;
    char *end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw std::invalid_argument(std::string("RHG_PANELS must be a positive integer, got '") + v + "'");
    return int(n);
}

inline void check_rho(double rho)
{
    if (!(std::abs(rho) < std::numbers::pi / 2))
        throw std::domain_error("give rho in [-pi/3,pi/3] (rho must lie in (-pi/2, pi/2))");
}

struct Pipeline {
    TorusParams params;
    EllipticConstants consts;
    QuarterMesh mesh;
    ZetaField zeta;
    ZetaConstants zc;
    BigZField bigz;
    GreenCorrection correction;
    NormalizationFit fit;
    GreenResult green;
};

inline Pipeline run_pipeline(double rho, MeshDims dims, std::optional<int> panels = std::nullopt)
{
    check_rho(rho);
    MeshSpec spec;
    spec.rows = dims.rows;
    spec.cols = dims.cols;
    spec.panels = panels ? *panels : panels_from_env();
    Pipeline pl;
    pl.params = torus_from_rho(rho);
    pl.consts = invariants(pl.params);
    pl.mesh = build_quarter_mesh(pl.params, pl.consts, spec);
    pl.zeta = zeta_mesh(pl.mesh);
    pl.zc = zeta_constants(pl.zeta, pl.mesh);
    pl.bigz = bigz_field(pl.mesh);
    pl.correction = correction_constants(pl.zc, pl.params, pl.consts, pl.bigz);
    pl.fit = detect_normalization(pl.mesh);
    pl.green = assemble_green(pl.mesh, pl.bigz, pl.correction, pl.zc, pl.fit);
    return pl;
}

} // namespace rhg

#endif
