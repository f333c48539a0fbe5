#include "cavityw/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cavityw/errors.hpp"

namespace cavityw {

using nlohmann::json;

namespace {

const ConditionId kConditions[] = {ConditionId::CavityIsolation,     ConditionId::DetuningMatching,
                                   ConditionId::UniformShift,        ConditionId::CouplerShiftBalance,
                                   ConditionId::UniformExchange,     ConditionId::Dispersive};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(std::move(cell));
    return out;
}

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

double parse_number(const std::string& s) {
    if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc()) throw DomainError("not a number: " + s);
    return v;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// 1, 2 or 5 times a power of ten, roughly span / 5
double tick_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    const int decimals = std::max(0, -static_cast<int>(std::floor(std::log10(step))));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < 0.5 * step ? 0.0 : v);
    return buf;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw LookupError("no CSV column named " + name);
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LookupError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ShapeError(path + ": missing header row");
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_line(line);
        if (row.size() != t.header.size()) throw ShapeError(path + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LookupError("cannot write " + path);
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
        out << "\n";
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

CsvTable sweep_table(const SweepSeries& series, SweepVariable variable) {
    CsvTable t;
    t.header = {to_string(variable), "F", "F2", "t_transfer_us"};
    std::vector<std::string> cavities;
    for (const auto& rec : series.records)
        if (rec.ok()) {
            cavities = rec.cavities;
            break;
        }
    for (const auto& c : cavities) t.header.push_back("n_" + c);
    for (auto id : kConditions) t.header.push_back("cond_" + to_string(id));
    t.header.push_back("status");
    t.header.push_back("wall_ms");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& rec : series.records) {
        std::vector<std::string> row{format_number(rec.swept), format_number(rec.ok() ? rec.fidelity : nan),
                                     format_number(rec.ok() ? rec.fidelity_squared : nan),
                                     format_number(units::to_us(rec.t_transfer))};
        for (std::size_t k = 0; k < cavities.size(); ++k)
            row.push_back(format_number(rec.ok() ? rec.mean_photons.at(k) : nan));
        for (auto id : kConditions) row.push_back(rec.conditions.get(id).pass ? "1" : "0");
        row.push_back(rec.ok() ? "ok" : rec.error.substr(0, rec.error.find(':')));
        row.push_back(format_number(std::round(rec.wall_ms * 1000.0) / 1000.0));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable trace_table(const TransferRun& run) {
    const auto& res = run.result;
    CsvTable t;
    t.header = {"time_us", "F"};
    for (const auto& label : res.observable_labels) t.header.push_back("n_" + label);
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        std::vector<std::string> row{format_number(units::to_us(res.times[i])),
                                     format_number(res.fidelity.empty() ? 0.0 : res.fidelity[i])};
        for (const auto& obs : res.observables) row.push_back(format_number(obs[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void plot_csv(const std::vector<PlotSeries>& series, const std::string& x, const std::string& y,
              const std::string& title, const std::string& svg_path) {
    struct Line {
        std::string label;
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Line> lines;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        const auto table = read_csv(s.csv_path);
        const auto cx = table.column(x), cy = table.column(s.column.empty() ? y : s.column);
        Line line{s.label, {}};
        for (const auto& row : table.rows) {
            const double vx = parse_number(row[cx]), vy = parse_number(row[cy]);
            if (!std::isfinite(vx) || !std::isfinite(vy)) continue;
            line.pts.emplace_back(vx, vy);
            x0 = std::min(x0, vx), x1 = std::max(x1, vx), y0 = std::min(y0, vy), y1 = std::max(y1, vy);
        }
        lines.push_back(std::move(line));
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.005, y1 += 0.005;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad, y1 += pad;

    const double W = 720, H = 480, left = 80, right = 180, top = 50, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double sx = tick_step(x1 - x0), sy = tick_step(y1 - y0);
    for (double v = std::ceil(x0 / sx) * sx; v <= x1 + 1e-9 * sx; v += sx) {
        os << "<line x1=\"" << px(v) << "\" x2=\"" << px(v) << "\" y1=\"" << top + ph << "\" y2=\"" << top + ph + 5
           << "\" stroke=\"black\"/>";
        os << "<text x=\"" << px(v) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">"
           << tick_label(v, sx) << "</text>\n";
    }
    for (double v = std::ceil(y0 / sy) * sy; v <= y1 + 1e-9 * sy; v += sy) {
        os << "<line x1=\"" << left - 5 << "\" x2=\"" << left + pw << "\" y1=\"" << py(v) << "\" y2=\"" << py(v)
           << "\" stroke=\"#dddddd\"/>";
        os << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
           << tick_label(v, sy) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape_xml(x)
       << "</text>\n";
    os << "<text transform=\"translate(20 " << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape_xml(y) << "</text>\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const char* color = colors[i % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [vx, vy] : lines[i].pts) os << px(vx) << "," << py(vy) << " ";
        os << "\"/>\n";
        for (const auto& [vx, vy] : lines[i].pts)
            os << "<circle cx=\"" << px(vx) << "\" cy=\"" << py(vy) << "\" r=\"2.5\" fill=\"" << color << "\"/>";
        os << "\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(i);
        os << "<line x1=\"" << left + pw + 15 << "\" x2=\"" << left + pw + 40 << "\" y1=\"" << ly << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        os << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape_xml(lines[i].label)
           << "</text>\n";
    }
    os << "</svg>\n";
    std::ofstream out(svg_path, std::ios::binary);
    if (!out) throw LookupError("cannot write " + svg_path);
    out << os.str();
}

json to_json(const ConditionReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"condition", to_string(e.id)},
                           {"pass", e.pass},
                           {"measured", e.measured},
                           {"threshold", e.threshold},
                           {"kind", e.is_inequality ? "ratio >= threshold" : "mismatch <= threshold"},
                           {"detail", e.detail},
                           {"values", e.values}});
    }
    return {{"all_pass", report.all_pass()}, {"conditions", entries}};
}

json to_json(const TransferRecord& r) {
    json photons = json::object();
    for (std::size_t k = 0; k < r.cavities.size(); ++k) photons[r.cavities[k]] = r.mean_photons[k];
    json out = {{"b", r.b},
                {"r", r.r},
                {"crosstalk_multiple_of_gmax", r.crosstalk_multiple},
                {"g1_mhz", units::to_mhz(r.g1)},
                {"g_max_mhz", units::to_mhz(r.g_max)},
                {"t_transfer_us", units::to_us(r.t_transfer)},
                {"horizon_us", units::to_us(r.horizon)},
                {"fidelity", r.fidelity},
                {"fidelity_squared", r.fidelity_squared},
                {"mean_photons", photons},
                {"conditions_pass", r.conditions.all_pass()},
                {"steps", r.stats.steps},
                {"rejected_steps", r.stats.rejected},
                {"min_eigenvalue", r.stats.min_eigenvalue},
                {"max_trace_drift", r.stats.max_trace_drift},
                {"max_hermiticity_drift", r.stats.max_hermiticity_drift},
                {"param_hash", r.param_hash},
                {"wall_ms", r.wall_ms}};
    if (!r.ok()) out["error"] = r.error;
    return out;
}

json to_json(const OracleReport& r) {
    return {{"sector_dimension", r.sector_dimension},
            {"full_dimension", r.full_dimension},
            {"horizon_us", units::to_us(r.horizon)},
            {"micro_steps", r.options.micro_steps},
            {"tolerance", r.options.tolerance},
            {"sector_vs_full_closed", r.sector_vs_full_closed},
            {"adaptive_vs_oracle", r.adaptive_vs_oracle},
            {"sector_vs_full_lindblad", r.sector_vs_full_lindblad},
            {"state_threshold", r.options.state_threshold},
            {"lindblad_threshold", r.options.lindblad_threshold},
            {"pass", r.pass()}};
}

std::string format_conditions(const ConditionReport& report) {
    std::ostringstream os;
    os << std::left;
    os.width(24);
    os << "condition";
    os.width(8);
    os << "result";
    os.width(16);
    os << "measured";
    os.width(16);
    os << "threshold";
    os << "detail\n";
    for (const auto& e : report.entries) {
        os.width(24);
        os << to_string(e.id);
        os.width(8);
        os << (e.pass ? "pass" : "FAIL");
        os.width(16);
        os << format_number(e.measured);
        os.width(16);
        os << ((e.is_inequality ? ">= " : "<= ") + format_number(e.threshold));
        os << e.detail << "\n";
    }
    return os.str();
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LookupError("cannot write " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace cavityw
