#include "cavityw/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "cavityw/config.hpp"
#include "cavityw/errors.hpp"
#include "cavityw/report.hpp"

namespace cavityw {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_out_dir(const CliRequest& request, const std::optional<std::string>& configured) {
    if (request.out_dir) return *request.out_dir;
    if (configured) return *configured;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "cavityw-out";
}

namespace {

struct Session {
    RunConfig cfg;
    fs::path dir;
    json manifest;
    std::ostream& out;

    std::string artifact(const std::string& name) {
        manifest["artifacts"].push_back(name);
        return (dir / name).string();
    }
};

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string level_tag(double x) { return "x" + format_number(x); }

TransferOptions transfer_options(const RunConfig& cfg) {
    TransferOptions o;
    o.evolve.control.tolerance = cfg.run.tolerance;
    o.evolve.samples = cfg.run.samples;
    o.evolve.keep_snapshots = cfg.run.keep_snapshots;
    o.horizon = cfg.run.horizon;
    return o;
}

json diagnostics(const TransferRecord& rec, double tol) {
    const double bound = 10.0 * tol * static_cast<double>(rec.stats.steps);
    return {{"trace_drift", rec.stats.max_trace_drift},
            {"trace_drift_bound", bound},
            {"trace_ok", rec.stats.max_trace_drift <= bound},
            {"min_eigenvalue", rec.stats.min_eigenvalue},
            {"min_eigenvalue_bound", -100.0 * tol},
            {"positivity_ok", !(rec.stats.min_eigenvalue < -100.0 * tol)}};
}

bool within_thresholds(const RunConfig& cfg, const TransferRecord& rec, std::ostream& out) {
    bool ok = true;
    if (cfg.run.min_fidelity && rec.fidelity < *cfg.run.min_fidelity) {
        out << "threshold: F = " << rec.fidelity << " below " << *cfg.run.min_fidelity << "\n";
        ok = false;
    }
    if (cfg.run.max_mean_photons && rec.max_mean_photons() > *cfg.run.max_mean_photons) {
        out << "threshold: mean photon number " << rec.max_mean_photons() << " above " << *cfg.run.max_mean_photons
            << "\n";
        ok = false;
    }
    return ok;
}

int cmd_check(Session& s) {
    const auto device = s.cfg.system.device();
    const auto report = check_conditions(device);
    s.out << format_conditions(report);
    json doc = to_json(report);
    try {
        const auto eff = effective_params(s.cfg.system.ideal_device());
        doc["effective"] = {{"chi_mhz", units::to_mhz(eff.chi)},
                            {"lambda_mhz", units::to_mhz(eff.lambda_common)},
                            {"Lambda_mhz", units::to_mhz(eff.Lambda)},
                            {"t_transfer_us", units::to_us(eff.t_transfer)}};
        s.out << "t_transfer = " << fixed(units::to_us(eff.t_transfer), 4) << " us\n";
    } catch (const ConditionViolation& e) {
        doc["effective"] = {{"error", e.what()}};
    }
    write_json(doc, s.artifact("conditions.json"));
    s.manifest["result"] = doc;
    return report.all_pass() ? kExitOk : kExitThreshold;
}

int cmd_transfer(Session& s) {
    const auto run = run_transfer(s.cfg.system, transfer_options(s.cfg));
    const auto& rec = run.record;
    s.manifest["result"] = to_json(rec);
    if (!rec.ok()) {
        s.manifest["error"] = {{"class", "numeric"}, {"message", rec.error}};
        s.out << "integration failed: " << rec.error << "\n";
        return kExitNumeric;
    }
    s.manifest["diagnostics"] = diagnostics(rec, s.cfg.run.tolerance);
    const auto traces = s.artifact("transfer_traces.csv");
    write_csv(trace_table(run), traces);
    plot_csv({{"F", traces, ""}}, "time_us", "F", "Transfer fidelity", s.artifact("transfer_fidelity.svg"));
    std::vector<PlotSeries> photons;
    for (const auto& c : rec.cavities) photons.push_back({c, traces, "n_" + c});
    plot_csv(photons, "time_us", "photon number", "Cavity photon numbers", s.artifact("transfer_photons.svg"));
    write_json(s.manifest["result"], s.artifact("transfer.json"));

    s.out << "conditions: " << (rec.conditions.all_pass() ? "all pass" : "some fail (see check)") << "\n";
    s.out << "mean photons:";
    for (std::size_t k = 0; k < rec.cavities.size(); ++k)
        s.out << " " << rec.cavities[k] << "=" << fixed(rec.mean_photons[k], 5);
    s.out << "\n";
    s.out << "steps " << rec.stats.steps << ", rejected " << rec.stats.rejected << ", min eigenvalue "
          << rec.stats.min_eigenvalue << ", trace drift " << rec.stats.max_trace_drift << "\n";
    s.out << "F = " << fixed(rec.fidelity, 4) << " (F^2 = " << fixed(rec.fidelity_squared, 4)
          << "), t_transfer = " << fixed(units::to_us(rec.t_transfer), 4) << " us\n";
    return within_thresholds(s.cfg, rec, s.out) ? kExitOk : kExitThreshold;
}

int cmd_sweep(Session& s, SweepVariable variable) {
    SweepPlan plan;
    plan.variable = variable;
    plan.base = s.cfg.system;
    plan.options = transfer_options(s.cfg);
    plan.options.evolve.keep_snapshots = false;
    plan.workers = s.cfg.run.workers;
    if (variable == SweepVariable::B) {
        plan.grid = s.cfg.run.b_grid.value_or(default_b_grid());
        plan.crosstalk_levels = s.cfg.run.crosstalk_levels.value_or(std::vector<double>{0.0, 0.01, 0.1});
    } else {
        plan.grid = s.cfg.run.r_grid.value_or(default_r_grid());
        plan.crosstalk_levels =
            s.cfg.run.crosstalk_levels.value_or(std::vector<double>{s.cfg.system.crosstalk_multiple});
    }
    const auto res = run_sweep(plan);
    const std::string var = to_string(variable);

    std::vector<PlotSeries> series;
    json records = json::array();
    bool failed = false, thresholds = true;
    for (const auto& ser : res.series) {
        const auto path = s.artifact("sweep_" + var + "_" + level_tag(ser.crosstalk_multiple) + ".csv");
        write_csv(sweep_table(ser, variable), path);
        series.push_back({"g_kl = " + format_number(ser.crosstalk_multiple) + " g_max", path, ""});
        for (const auto& rec : ser.records) {
            json j = to_json(rec);
            j["swept"] = rec.swept;
            records.push_back(j);
            failed |= !rec.ok();
            if (rec.ok()) thresholds &= within_thresholds(s.cfg, rec, s.out);
        }
    }
    plot_csv(series, var, "F", "Fidelity versus " + var, s.artifact("fidelity_vs_" + var + ".svg"));
    s.manifest["result"] = {{"plan_hash", res.plan_hash}, {"records", records}};

    s.out << std::left << std::setw(8) << var;
    for (const auto& ser : res.series) s.out << std::setw(14) << ("F@" + format_number(ser.crosstalk_multiple));
    s.out << "\n";
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        s.out << std::setw(8) << format_number(plan.grid[i]);
        for (const auto& ser : res.series) {
            const auto& rec = ser.records[i];
            s.out << std::setw(14) << (rec.ok() ? fixed(rec.fidelity, 5) : std::string("failed"));
        }
        s.out << "\n";
    }
    if (failed) {
        s.manifest["error"] = {{"class", "numeric"}, {"message", "one or more sweep points failed to integrate"}};
        return kExitNumeric;
    }
    return thresholds ? kExitOk : kExitThreshold;
}

int cmd_oracle(Session& s, const CliRequest& request) {
    OracleOptions opt;
    opt.micro_steps = s.cfg.run.oracle_micro_steps;
    if (request.tolerance) opt.tolerance = *request.tolerance;
    const auto rep = oracle_equivalence(s.cfg.system, opt);
    const json doc = to_json(rep);
    write_json(doc, s.artifact("oracle.json"));
    s.manifest["result"] = doc;
    s.out << "sector dimension " << rep.sector_dimension << ", full dimension " << rep.full_dimension << "\n";
    s.out << "sector vs full (closed):     " << rep.sector_vs_full_closed << "\n";
    s.out << "adaptive vs expm oracle:     " << rep.adaptive_vs_oracle << "\n";
    s.out << "sector vs full (Lindblad F): " << rep.sector_vs_full_lindblad << "\n";
    s.out << (rep.pass() ? "equivalence: pass" : "equivalence: FAIL") << "\n";
    return rep.pass() ? kExitOk : kExitThreshold;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int run_command(const CliRequest& request, std::ostream& out, std::ostream& err) {
    static const std::set<std::string> known{"check", "transfer", "sweep-b", "sweep-r", "oracle"};
    if (!known.count(request.command)) {
        err << "error[config]: unknown command '" << request.command << "'\n";
        return kExitConfig;
    }
    RunConfig cfg;
    try {
        cfg = parse_config_file(request.config_path);
        if (cfg.run.command && *cfg.run.command != request.command)
            throw ConfigError("run.command: config is for '" + *cfg.run.command + "', not '" + request.command + "'");
        if (request.tolerance) {
            if (!(*request.tolerance > 1e-14 && *request.tolerance < 1e-3))
                throw ConfigError("--tol: must lie in (1e-14, 1e-3)");
            cfg.run.tolerance = *request.tolerance;
            cfg.resolved["run"]["tolerance"] = *request.tolerance;
        }
        if (request.workers) {
            if (*request.workers < 1) throw ConfigError("--workers: must be at least 1");
            cfg.run.workers = *request.workers;
            cfg.resolved["run"]["workers"] = *request.workers;
        }
    } catch (const Error& e) {
        err << "error[" << e.kind() << "]: " << e.what() << "\n";
        return kExitConfig;
    }

    const fs::path dir = resolve_out_dir(request, cfg.run.out_dir);
    Session s{std::move(cfg), dir, json::object(), out};
    std::error_code ec;
    fs::create_directories(s.dir, ec);
    if (ec) {
        err << "error[config]: cannot create output directory " << s.dir.string() << ": " << ec.message() << "\n";
        return kExitConfig;
    }
    s.manifest = {{"tool", "cavityw"},
                  {"version", kVersion},
                  {"command", request.command},
                  {"config_path", request.config_path},
                  {"input_hash", fnv1a_hex(read_file(request.config_path))},
                  {"config_hash", fnv1a_hex(s.cfg.resolved.dump())},
                  {"resolved_config", s.cfg.resolved},
                  {"artifacts", json::array()}};

    int code = kExitOk;
    try {
        if (request.command == "check") code = cmd_check(s);
        else if (request.command == "transfer") code = cmd_transfer(s);
        else if (request.command == "sweep-b") code = cmd_sweep(s, SweepVariable::B);
        else if (request.command == "sweep-r") code = cmd_sweep(s, SweepVariable::R);
        else code = cmd_oracle(s, request);
    } catch (const NumericError& e) {
        s.manifest["error"] = {{"class", e.kind()}, {"message", e.what()}};
        err << "error[" << e.kind() << "]: " << e.what() << "\n";
        code = kExitNumeric;
    } catch (const Error& e) {
        s.manifest["error"] = {{"class", e.kind()}, {"message", e.what()}};
        err << "error[" << e.kind() << "]: " << e.what() << "\n";
        code = kExitConfig;
    } catch (const std::exception& e) {
        s.manifest["error"] = {{"class", "internal"}, {"message", e.what()}};
        err << "error[internal]: " << e.what() << "\n";
        code = kExitNumeric;
    }
    s.manifest["exit_code"] = code;
    try {
        write_json(s.manifest, (s.dir / "manifest.json").string());
    } catch (const Error& e) {
        err << "error[" << e.kind() << "]: " << e.what() << "\n";
        if (code == kExitOk) code = kExitConfig;
    }
    return code;
}

}  // namespace cavityw
