#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavityw/experiments.hpp"

namespace cavityw {

struct RunBlock {
    std::optional<std::string> command;
    double tolerance = 1e-8;
    std::size_t samples = 1000;
    int workers = 1;
    std::optional<std::string> out_dir;
    bool keep_snapshots = false;
    std::optional<std::vector<double>> b_grid;
    std::optional<std::vector<double>> r_grid;
    std::optional<std::vector<double>> crosstalk_levels;
    std::optional<double> horizon;  // seconds
    std::size_t oracle_micro_steps = 10000;
    std::optional<double> min_fidelity;       // exit 4 when a run ends below
    std::optional<double> max_mean_photons;   // exit 4 when any cavity average exceeds
};

struct RunConfig {
    SystemRecipe system;
    RunBlock run;
    nlohmann::json resolved;  // every field, defaults filled, in input units
};

/// Accepts either {"system": {...}, "decoherence": {...}, "run": {...}} or
/// the system keys at top level next to optional "decoherence"/"run" blocks.
/// Physical quantities carry a unit suffix: _ghz/_mhz for frequencies,
/// _us/_ns for times, _inv_us/_inv_ns for lifetimes, _per_us for rates.
/// Errors are ConfigError messages starting with the JSON path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace cavityw
