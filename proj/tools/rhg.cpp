// rhg: Green's function of the rhombic flat torus.
//
//   rhg surface   --rho R [--format csv|json|pgm] [--out PATH] [--grid NX NY]
//   rhg constants --rho R [--format json]
//   rhg verify    --rho R [--profile rh|rh4] [--format json] [--out PATH]
//   rhg mesh-dump --rho R [--format csv|json] [--out PATH]
//
// Common: --mesh R C overrides the profile's standard mesh; RHG_PANELS sets
// the quadrature panels per chord.

#include <rhg/rhg.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{

struct RunConfig {
    double rho = 0.0;
    std::string profile = "rh";
    std::vector<int> mesh;
    std::string out;
    std::string format = "csv";
    std::vector<int> grid{181, 91};
};

rhg::MeshDims dims_of(const RunConfig &cfg)
{
    if (!cfg.mesh.empty()) return {cfg.mesh[0], cfg.mesh[1]};
    return rhg::profile_dims(rhg::parse_profile(cfg.profile)).first;
}

std::ofstream open_out(const std::string &path, bool binary = false)
{
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

std::string with_ext(const std::string &path, const std::string &fallback, const std::string &ext)
{
    return path.empty() ? fallback + "." + ext : path;
}

int cmd_surface(const RunConfig &cfg)
{
    const auto pl = rhg::run_pipeline(cfg.rho, dims_of(cfg));
    const auto grid = rhg::sample_surface(pl.green, cfg.grid[0], cfg.grid[1]);
    const auto &g = pl.correction;
    std::cout << std::setprecision(12) << "A = " << g.A << "\nB = " << g.B << "\nk = " << pl.params.k
              << "\n|T| = " << pl.params.area << '\n';
    if (cfg.format == "csv") {
        const auto path = with_ext(cfg.out, "surface", "csv");
        auto f = open_out(path);
        rhg::write_surface_csv(f, grid);
        std::cout << "wrote " << path << '\n';
    } else if (cfg.format == "json") {
        const auto path = with_ext(cfg.out, "surface", "json");
        auto f = open_out(path);
        f << rhg::surface_json(grid, pl.green).dump(1) << '\n';
        std::cout << "wrote " << path << '\n';
    } else {
        const auto path = with_ext(cfg.out, "surface", "pgm");
        auto f = open_out(path, true);
        const auto range = rhg::write_surface_pgm(f, grid);
        auto side = open_out(path + ".json");
        side << rhg::pgm_sidecar(grid, range).dump(1) << '\n';
        std::cout << "wrote " << path << " and " << path << ".json\n";
    }
    return 0;
}

int cmd_constants(const RunConfig &cfg)
{
    const auto pl = rhg::run_pipeline(cfg.rho, dims_of(cfg));
    if (cfg.format == "json") {
        const auto text = rhg::constants_json(pl).dump(1);
        if (cfg.out.empty()) {
            std::cout << text << '\n';
        } else {
            open_out(cfg.out) << text << '\n';
        }
    } else {
        rhg::write_constants_text(std::cout, pl);
    }
    return 0;
}

int cmd_verify(const RunConfig &cfg)
{
    if (!cfg.mesh.empty()) throw CLI::ValidationError("--mesh", "verify uses the profile's mesh pair; drop --mesh");
    const auto rep = rhg::full_report(cfg.rho, rhg::parse_profile(cfg.profile));
    const auto js = rhg::report_json(rep).dump(1);
    if (cfg.format == "json")
        std::cout << js << '\n';
    else
        rhg::write_report_table(std::cout, rep);
    if (!cfg.out.empty()) open_out(cfg.out) << js << '\n';
    if (rep.informational) return 0;
    return rep.all_pass() ? 0 : 1;
}

int cmd_mesh_dump(const RunConfig &cfg)
{
    const auto pl = rhg::run_pipeline(cfg.rho, dims_of(cfg));
    if (cfg.format == "json") {
        const auto path = with_ext(cfg.out, "mesh", "json");
        open_out(path) << rhg::mesh_json(pl).dump() << '\n';
        std::cout << "wrote " << path << '\n';
    } else if (cfg.format == "csv") {
        const auto path = with_ext(cfg.out, "mesh", "csv");
        auto f = open_out(path);
        rhg::write_mesh_csv(f, pl);
        std::cout << "wrote " << path << '\n';
    } else {
        throw CLI::ValidationError("--format", "mesh-dump writes csv or json");
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Green's function of the rhombic flat torus"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--rho", cfg.rho, "shape angle rho, |rho| < pi/2 (validated for |rho| <= pi/3)")
            ->required();
        sub->add_option("--profile", cfg.profile, "rh (41x37 standard) or rh4 (143x321 standard)")
            ->check(CLI::IsMember({"rh", "rh4"}));
        sub->add_option("--mesh", cfg.mesh, "mesh rows and columns")->expected(2);
        sub->add_option("--out", cfg.out, "output path");
    };
    auto *surface = app.add_subcommand("surface", "G over a 3x3 tiling of the fundamental rectangle");
    common(surface);
    surface->add_option("--format", cfg.format, "csv, json or pgm")->check(CLI::IsMember({"csv", "json", "pgm"}));
    surface->add_option("--grid", cfg.grid, "grid points in x and y")->expected(2);

    auto *constants = app.add_subcommand("constants", "print lattice, elliptic and correction constants");
    common(constants);
    constants->add_option("--format", cfg.format, "text (default) or json")
        ->check(CLI::IsMember({"csv", "text", "json"}));

    auto *verify = app.add_subcommand("verify", "run the accuracy protocol; nonzero exit if a check fails");
    common(verify);
    verify->add_option("--format", cfg.format, "table (default) or json")
        ->check(CLI::IsMember({"csv", "table", "json"}));

    auto *dump = app.add_subcommand("mesh-dump", "per-node P, z, zeta and G of both sheets");
    common(dump);
    dump->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
        rhg::check_rho(cfg.rho);
        if (!cfg.mesh.empty() && (cfg.mesh[0] < 7 || cfg.mesh[1] < 7))
            throw CLI::ValidationError("--mesh", "mesh dimensions must be at least 7");
        if (cfg.grid[0] < 3 || cfg.grid[1] < 3) throw CLI::ValidationError("--grid", "need at least 3 x 3 points");
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::domain_error &e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    try {
        if (*surface) return cmd_surface(cfg);
        if (*constants) return cmd_constants(cfg);
        if (*verify) return cmd_verify(cfg);
        return cmd_mesh_dump(cfg);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
