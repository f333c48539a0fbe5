#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cavityw/commands.hpp"
#include "cavityw/config.hpp"
#include "cavityw/errors.hpp"
#include "cavityw/experiments.hpp"

namespace py = pybind11;
using namespace cavityw;

namespace {

py::dict conditions_dict(const ConditionReport& rep) {
    py::dict d;
    for (const auto& e : rep.entries) {
        py::dict entry;
        entry["pass"] = e.pass;
        entry["measured"] = e.measured;
        entry["threshold"] = e.threshold;
        entry["detail"] = e.detail;
        d[py::str(to_string(e.id))] = entry;
    }
    return d;
}

TransferOptions transfer_options(double tolerance, std::size_t samples, std::optional<double> horizon_us) {
    TransferOptions o;
    o.evolve.control.tolerance = tolerance;
    o.evolve.samples = samples;
    if (horizon_us) o.horizon = units::us(*horizon_us);
    return o;
}

py::dict effective_dict(const SystemRecipe& r) {
    const auto e = effective_params(r.ideal_device());
    py::dict d;
    d["chi_mhz"] = units::to_mhz(e.chi);
    d["lambda_mhz"] = units::to_mhz(e.lambda_common);
    d["Lambda_mhz"] = units::to_mhz(e.Lambda);
    d["t_transfer_us"] = units::to_us(e.t_transfer);
    return d;
}

}  // namespace

PYBIND11_MODULE(_cavityw, m) {
    m.doc() = "Cavity W-state transfer simulator";
    m.attr("__version__") = kVersion;

    static py::exception<Error> base(m, "Error");
    static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
    static py::exception<NumericError> numeric_error(m, "NumericError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const NumericError& e) {
            py::set_error(numeric_error, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<SystemRecipe>(m, "System")
        .def(py::init<>())
        .def_readwrite("n", &SystemRecipe::n)
        .def_readwrite("b", &SystemRecipe::b)
        .def_readwrite("r", &SystemRecipe::r)
        .def_readwrite("crosstalk_multiple", &SystemRecipe::crosstalk_multiple)
        .def_readwrite("qutrit_levels", &SystemRecipe::qutrit_levels)
        .def_readwrite("cavity_levels", &SystemRecipe::cavity_levels)
        .def_readwrite("sector_emax", &SystemRecipe::sector_emax)
        .def_readwrite("dissipation", &SystemRecipe::dissipation)
        .def_property(
            "detunings_ghz",
            [](const SystemRecipe& r) {
                std::vector<double> out;
                for (double d : r.resolved_detunings()) out.push_back(units::to_ghz(d));
                return out;
            },
            [](SystemRecipe& r, const std::vector<double>& ghz) {
                r.detunings.clear();
                for (double f : ghz) r.detunings.push_back(units::ghz(f));
            })
        .def_property(
            "g1_mhz", [](const SystemRecipe& r) { return units::to_mhz(r.resolved_g1()); },
            [](SystemRecipe& r, std::optional<double> mhz) {
                if (mhz) r.g1 = units::mhz(*mhz);
                else r.g1.reset();
            })
        .def("dimension", [](const SystemRecipe& r) { return r.basis()->dimension(); })
        .def("effective", &effective_dict, "chi, lambda, Lambda (MHz) and the transfer time (us)")
        .def("conditions", [](const SystemRecipe& r) { return conditions_dict(check_conditions(r.device())); })
        .def("__repr__", [](const SystemRecipe& r) {
            std::ostringstream os;
            os << "System(n=" << r.n << ", b=" << r.b << ", r=" << r.r << ", crosstalk_multiple=" << r.crosstalk_multiple
               << ")";
            return os.str();
        });

    m.def("load_config", [](const std::string& path) { return parse_config_file(path).system; }, py::arg("path"),
          "System described by a JSON config file");

    py::class_<TransferRecord>(m, "TransferRecord")
        .def_readonly("fidelity", &TransferRecord::fidelity)
        .def_readonly("fidelity_squared", &TransferRecord::fidelity_squared)
        .def_readonly("swept", &TransferRecord::swept)
        .def_readonly("cavities", &TransferRecord::cavities)
        .def_readonly("mean_photons", &TransferRecord::mean_photons)
        .def_readonly("error", &TransferRecord::error)
        .def_readonly("param_hash", &TransferRecord::param_hash)
        .def_property_readonly("t_transfer_us", [](const TransferRecord& r) { return units::to_us(r.t_transfer); })
        .def_property_readonly("ok", &TransferRecord::ok)
        .def_property_readonly("conditions", [](const TransferRecord& r) { return conditions_dict(r.conditions); })
        .def("__repr__", [](const TransferRecord& r) {
            std::ostringstream os;
            os << "TransferRecord(F=" << r.fidelity << ", t_transfer_us=" << units::to_us(r.t_transfer) << ")";
            return os.str();
        });

    m.def(
        "transfer",
        [](const SystemRecipe& r, double tolerance, std::size_t samples, std::optional<double> horizon_us) {
            py::gil_scoped_release release;
            return run_transfer(r, transfer_options(tolerance, samples, horizon_us)).record;
        },
        py::arg("system"), py::arg("tolerance") = 1e-8, py::arg("samples") = 1000, py::arg("horizon_us") = py::none(),
        "Evolve the W state to the transfer time and score it against the target");

    m.def(
        "sweep",
        [](const std::string& variable, const SystemRecipe& base, const std::vector<double>& grid,
           const std::vector<double>& crosstalk_levels, int workers, double tolerance, std::size_t samples) {
            SweepPlan plan;
            if (variable == "b") plan.variable = SweepVariable::B;
            else if (variable == "r") plan.variable = SweepVariable::R;
            else throw ConfigError("sweep variable must be 'b' or 'r'");
            plan.base = base;
            plan.grid = grid;
            plan.crosstalk_levels = crosstalk_levels;
            plan.workers = workers;
            plan.options = transfer_options(tolerance, samples, std::nullopt);
            SweepResult res;
            {
                py::gil_scoped_release release;
                res = run_sweep(plan);
            }
            py::dict out;
            for (const auto& s : res.series) out[py::float_(s.crosstalk_multiple)] = s.records;
            return out;
        },
        py::arg("variable"), py::arg("system"), py::arg("grid"), py::arg("crosstalk_levels") = std::vector<double>{0.01},
        py::arg("workers") = 1, py::arg("tolerance") = 1e-8, py::arg("samples") = 1000,
        "Fidelity over a grid of b or r values; returns {crosstalk multiple: [TransferRecord]}");

    m.def(
        "oracle",
        [](const SystemRecipe& r, std::size_t micro_steps) {
            OracleOptions opt;
            opt.micro_steps = micro_steps;
            OracleReport rep;
            {
                py::gil_scoped_release release;
                rep = oracle_equivalence(r, opt);
            }
            py::dict d;
            d["sector_vs_full_closed"] = rep.sector_vs_full_closed;
            d["adaptive_vs_oracle"] = rep.adaptive_vs_oracle;
            d["sector_vs_full_lindblad"] = rep.sector_vs_full_lindblad;
            d["sector_dimension"] = rep.sector_dimension;
            d["full_dimension"] = rep.full_dimension;
            d["pass"] = rep.pass();
            return d;
        },
        py::arg("system") = SystemRecipe{}, py::arg("micro_steps") = 10000,
        "Single-pair equivalence checks against the unrestricted basis and a Magnus oracle");

    m.def(
        "run_cli",
        [](const std::string& command, const std::string& config, std::optional<std::string> out_dir) {
            std::ostringstream out, err;
            CliRequest req{command, config, std::move(out_dir), std::nullopt, std::nullopt};
            const int code = run_command(req, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir") = py::none(),
        "Run a CLI command in-process; returns (exit code, stdout, stderr)");
}
