#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cavityw/experiments.hpp"

namespace cavityw {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws LookupError
};

CsvTable read_csv(const std::string& path);
void write_csv(const CsvTable& table, const std::string& path);

/// Locale-independent shortest round-trip formatting ("nan" for NaN).
std::string format_number(double v);

/// One row per grid point: swept value, F, F2, t_transfer_us, n_<cavity>...,
/// cond_<condition>..., status, wall_ms.
CsvTable sweep_table(const SweepSeries& series, SweepVariable variable);

/// time_us, F, n_<cavity>... on the sample grid of a transfer run.
CsvTable trace_table(const TransferRun& run);

struct PlotSeries {
    std::string label;
    std::string csv_path;
    std::string column;  // y column override; empty uses the plot's y
};

/// Static SVG line plot of column `y` against column `x`, one line per
/// series. Data is read back from the files, never passed in memory.
void plot_csv(const std::vector<PlotSeries>& series, const std::string& x, const std::string& y,
              const std::string& title, const std::string& svg_path);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const TransferRecord& record);
nlohmann::json to_json(const OracleReport& report);
/// Human-readable fixed-width condition table.
std::string format_conditions(const ConditionReport& report);

void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace cavityw
