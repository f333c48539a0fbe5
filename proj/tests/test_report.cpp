#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cavityw/errors.hpp"
#include "cavityw/report.hpp"

using namespace cavityw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "cavityw-report-test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv round trip") {
    CsvTable t{{"x", "y"}, {{"1", "2.5"}, {"2", "nan"}}};
    const auto path = scratch("table.csv").string();
    write_csv(t, path);
    const auto back = read_csv(path);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("y") == 1);
    CHECK_THROWS_AS(back.column("z"), LookupError);
}

TEST_CASE("svg plot reads its data from disk") {
    CsvTable a{{"b", "F"}, {{"5", "0.9"}, {"7", "0.95"}, {"9", "0.98"}}};
    CsvTable c{{"b", "F"}, {{"5", "0.88"}, {"7", "0.94"}, {"9", "0.97"}}};
    const auto pa = scratch("a.csv").string(), pc = scratch("c.csv").string();
    write_csv(a, pa);
    write_csv(c, pc);
    const auto svg = scratch("plot.svg");
    plot_csv({{"low", pa, ""}, {"high", pc, ""}}, "b", "F", "fidelity", svg.string());
    const auto text = slurp(svg);
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("low") != std::string::npos);
    CHECK(text.find("high") != std::string::npos);
    CHECK(text.find("polyline") != std::string::npos);
    CHECK_THROWS(plot_csv({{"x", scratch("missing.csv").string(), ""}}, "b", "F", "t", svg.string()));
}

TEST_CASE("sweep tables and json") {
    SystemRecipe r;
    SweepSeries s;
    s.crosstalk_multiple = 0.01;
    TransferRecord rec;
    rec.swept = 9.0;
    rec.fidelity = 0.98;
    rec.fidelity_squared = 0.9604;
    rec.t_transfer = 8.1e-8;
    rec.cavities = {"c1", "c1'"};
    rec.mean_photons = {0.005, 0.002};
    rec.conditions = check_conditions(r.ideal_device());
    s.records.push_back(rec);
    const auto t = sweep_table(s, SweepVariable::B);
    CHECK(t.header.front() == "b");
    CHECK(t.rows.size() == 1);
    CHECK(t.rows[0][t.column("F")] == "0.98");
    CHECK(t.rows[0][t.column("n_c1'")] == "0.002");
    CHECK(t.rows[0][t.column("cond_dispersive")] == "1");
    CHECK(t.rows[0][t.column("status")] == "ok");
    const auto j = to_json(rec);
    CHECK(j["fidelity"] == 0.98);
    CHECK(format_conditions(rec.conditions).find("detuning_matching") != std::string::npos);
}
