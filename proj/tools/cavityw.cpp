#include <iostream>

#include <CLI11.hpp>

#include "cavityw/commands.hpp"
#include "cavityw/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Quantum state transfer between cavity arrays: condition checks, master-equation runs, sweeps"};
    app.set_version_flag("--version", std::string("cavityw ") + cavityw::kVersion);
    cavityw::CliRequest req;
    std::string out_dir;
    int workers = 0;
    double tol = 0.0;
    app.add_option("command", req.command, "check | transfer | sweep-b | sweep-r | oracle")
        ->required()
        ->check(CLI::IsMember({"check", "transfer", "sweep-b", "sweep-r", "oracle"}));
    app.add_option("--config,-c", req.config_path, "JSON run configuration")->required();
    auto* out_opt = app.add_option("--out,-o", out_dir,
                                   std::string("output directory (default: $") + cavityw::kOutDirEnv +
                                       " or ./cavityw-out)");
    auto* workers_opt = app.add_option("--workers,-j", workers, "parallel sweep workers")->check(CLI::PositiveNumber);
    auto* tol_opt = app.add_option("--tol", tol, "integrator tolerance");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cavityw::kExitConfig;
    }
    if (*out_opt) req.out_dir = out_dir;
    if (*workers_opt) req.workers = workers;
    if (*tol_opt) req.tolerance = tol;
    return cavityw::run_command(req, std::cout, std::cerr);
}
