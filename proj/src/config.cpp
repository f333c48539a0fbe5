#include "cavityw/config.hpp"

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cavityw/errors.hpp"

namespace cavityw {

using nlohmann::json;

namespace {

enum class Dim { Frequency, Time, Rate };

struct Unit {
    const char* suffix;
    double (*convert)(double);
};

constexpr std::array<Unit, 2> kFrequencyUnits{{{"_ghz", units::ghz}, {"_mhz", units::mhz}}};
constexpr std::array<Unit, 2> kTimeUnits{{{"_us", units::us}, {"_ns", [](double t) { return t * 1e-9; }}}};
constexpr std::array<Unit, 2> kRateUnits{{{"_per_us", [](double v) { return v * 1e6; }},
                                          {"_per_ns", [](double v) { return v * 1e9; }}}};

std::span<const Unit> units_for(Dim d) {
    switch (d) {
        case Dim::Frequency: return kFrequencyUnits;
        case Dim::Time: return kTimeUnits;
        case Dim::Rate: return kRateUnits;
    }
    return {};
}

const char* unit_hint(Dim d) {
    switch (d) {
        case Dim::Frequency: return "_ghz or _mhz";
        case Dim::Time: return "_us or _ns";
        case Dim::Rate: return "_per_us or _per_ns";
    }
    return "";
}

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<long long>();
}

std::vector<double> as_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

struct Quantity {
    const json* value;
    std::string key;
    std::string where;
    double (*convert)(double);
};

class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    std::string at(const std::string& key) const { return join(path_, key); }

    const json* raw(const std::string& key) {
        const auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    std::optional<Quantity> quantity(const std::string& stem, Dim dim) {
        unit_stems_[stem] = dim;
        std::optional<Quantity> found;
        for (const auto& u : units_for(dim)) {
            const std::string key = stem + u.suffix;
            if (const json* v = raw(key)) {
                if (found) fail(at(key), "conflicts with " + found->key);
                found = Quantity{v, key, at(key), u.convert};
            }
        }
        return found;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (seen_.count(it.key())) continue;
            if (const auto u = unit_stems_.find(it.key()); u != unit_stems_.end())
                fail(at(it.key()), std::string("missing unit suffix (use ") + unit_hint(u->second) + ")");
            fail(at(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
    std::map<std::string, Dim> unit_stems_;
};

std::vector<double> parse_grid(const json& v, const std::string& where) {
    std::vector<double> grid;
    if (v.is_object()) {
        Block g(v, where);
        const json* start = g.raw("start");
        const json* stop = g.raw("stop");
        const json* step = g.raw("step");
        g.finish();
        if (!start || !stop || !step) fail(where, "a range needs start, stop and step");
        const double a = as_number(*start, g.at("start"));
        const double b = as_number(*stop, g.at("stop"));
        const double s = as_number(*step, g.at("step"));
        if (!(s > 0.0)) fail(g.at("step"), "must be positive");
        grid = linear_grid(a, b, s);
    } else {
        grid = as_numbers(v, where);
    }
    if (grid.empty()) fail(where, "grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) fail(where, "grid must be strictly increasing");
    return grid;
}

void parse_system(Block& s, RunConfig& cfg, json& out) {
    auto& sys = cfg.system;
    if (const json* v = s.raw("n")) {
        const auto n = as_integer(*v, s.at("n"));
        if (n < 1 || n > 6) fail(s.at("n"), "must lie in [1, 6]");
        sys.n = static_cast<int>(n);
    }
    out["n"] = sys.n;

    if (auto q = s.quantity("detunings", Dim::Frequency)) {
        const auto raw = as_numbers(*q->value, q->where);
        if (raw.size() != static_cast<std::size_t>(sys.n)) fail(q->where, "need exactly n values");
        sys.detunings.clear();
        for (double d : raw) {
            if (d == 0.0) fail(q->where, "detunings must be nonzero");
            sys.detunings.push_back(q->convert(d));
        }
        out[q->key] = *q->value;
    } else {
        json d = json::array();
        for (int j = 1; j <= sys.n; ++j) d.push_back(-0.5 * j);
        out["detunings_ghz"] = d;
    }

    if (auto q = s.quantity("omega10", Dim::Frequency)) {
        const double w = as_number(*q->value, q->where);
        if (!(w > 0.0)) fail(q->where, "must be positive");
        sys.omega10 = q->convert(w);
        out[q->key] = *q->value;
    } else {
        out["omega10_ghz"] = 6.5;
    }
    if (auto q = s.quantity("anharmonicity", Dim::Frequency)) {
        sys.anharmonicity = q->convert(as_number(*q->value, q->where));
        out[q->key] = *q->value;
    } else {
        out["anharmonicity_mhz"] = -400.0;
    }

    const json* b = s.raw("b");
    auto g1 = s.quantity("g1", Dim::Frequency);
    if (b && g1) fail(g1->where, "give either b or g1, not both");
    if (g1) {
        const double g = as_number(*g1->value, g1->where);
        if (!(g > 0.0)) fail(g1->where, "must be positive");
        sys.g1 = g1->convert(g);
        out[g1->key] = *g1->value;
    } else {
        if (b) {
            sys.b = as_number(*b, s.at("b"));
            if (!(sys.b > 0.0)) fail(s.at("b"), "must be positive");
        }
        out["b"] = sys.b;
    }

    if (const json* x = s.raw("crosstalk")) {
        Block c(*x, s.at("crosstalk"));
        const json* mult = c.raw("multiple_of_gmax");
        auto matrix = c.quantity("matrix", Dim::Frequency);
        c.finish();
        if (mult && matrix) fail(matrix->where, "give either multiple_of_gmax or a matrix, not both");
        if (!mult && !matrix) fail(c.path(), "needs multiple_of_gmax or a matrix");
        if (mult) {
            sys.crosstalk_multiple = as_number(*mult, c.at("multiple_of_gmax"));
            if (!(sys.crosstalk_multiple >= 0.0)) fail(c.at("multiple_of_gmax"), "must be non-negative");
            out["crosstalk"] = {{"multiple_of_gmax", *mult}};
        } else {
            const int sites = 2 * sys.n;
            if (!matrix->value->is_array() || matrix->value->size() != static_cast<std::size_t>(sites))
                fail(matrix->where, "expected a 2n x 2n array");
            Eigen::MatrixXd m(sites, sites);
            for (int k = 0; k < sites; ++k) {
                const auto row = as_numbers((*matrix->value)[k], matrix->where + "[" + std::to_string(k) + "]");
                if (row.size() != static_cast<std::size_t>(sites)) fail(matrix->where, "expected a 2n x 2n array");
                for (int l = 0; l < sites; ++l) m(k, l) = matrix->convert(row[l]);
            }
            if (!m.isApprox(m.transpose(), 0.0) || m.diagonal().cwiseAbs().maxCoeff() != 0.0)
                fail(matrix->where, "must be symmetric with a zero diagonal");
            sys.crosstalk = m;
            out["crosstalk"] = {{matrix->key, *matrix->value}};
        }
    } else {
        out["crosstalk"] = {{"multiple_of_gmax", sys.crosstalk_multiple}};
    }

    if (const json* v = s.raw("r")) {
        sys.r = as_number(*v, s.at("r"));
        if (!(sys.r > 0.0)) fail(s.at("r"), "must be positive");
    }
    out["r"] = sys.r;

    if (const json* v = s.raw("qutrit_levels")) {
        const auto l = as_integer(*v, s.at("qutrit_levels"));
        if (l != 2 && l != 3) fail(s.at("qutrit_levels"), "must be 2 or 3");
        sys.qutrit_levels = static_cast<int>(l);
    }
    out["qutrit_levels"] = sys.qutrit_levels;
    if (const json* v = s.raw("cavity_levels")) {
        const auto l = as_integer(*v, s.at("cavity_levels"));
        if (l < 2 || l > 8) fail(s.at("cavity_levels"), "must lie in [2, 8]");
        sys.cavity_levels = static_cast<int>(l);
    }
    out["cavity_levels"] = sys.cavity_levels;
    if (const json* v = s.raw("sector_emax")) {
        if (v->is_null()) {
            sys.sector_emax.reset();
        } else {
            const auto e = as_integer(*v, s.at("sector_emax"));
            if (e < 0) fail(s.at("sector_emax"), "must be non-negative or null");
            sys.sector_emax = static_cast<int>(e);
        }
    }
    out["sector_emax"] = sys.sector_emax ? json(*sys.sector_emax) : json(nullptr);
}

struct RateDefault {
    const char* name;
    double lifetime_us;
};

constexpr std::array<RateDefault, 6> kRateDefaults{{{"kappa", 5.0},
                                                    {"gamma", 10.0},
                                                    {"gamma21", 5.0},
                                                    {"gamma20", 25.0},
                                                    {"gamma_phi1", 5.0},
                                                    {"gamma_phi2", 5.0}}};

// Rates in 1/s, one per target: 2n cavities for kappa, 2n site qutrits plus
// the coupler for the others.
std::vector<double> parse_rate(Block& d, const RateDefault& def, std::size_t count, json& out) {
    auto life = d.quantity(std::string(def.name) + "_inv", Dim::Time);
    auto rate = d.quantity(def.name, Dim::Rate);
    if (life && rate) fail(rate->where, "conflicts with " + life->key);
    if (!life && !rate) {
        out[std::string(def.name) + "_inv_us"] = def.lifetime_us;
        return std::vector<double>(count, 1.0 / units::us(def.lifetime_us));
    }
    const Quantity& q = life ? *life : *rate;
    auto one = [&](const json& v, const std::string& where) -> double {
        if (life) {
            if (v.is_null()) return 0.0;
            const double t = as_number(v, where);
            if (!(t > 0.0)) fail(where, "lifetime must be positive (null disables the channel)");
            return 1.0 / q.convert(t);
        }
        const double g = as_number(v, where);
        if (!(g >= 0.0)) fail(where, "rate must be non-negative");
        return q.convert(g);
    };
    std::vector<double> values;
    if (q.value->is_array()) {
        if (q.value->size() != count) fail(q.where, "expected " + std::to_string(count) + " values");
        for (std::size_t i = 0; i < count; ++i) values.push_back(one((*q.value)[i], q.where + "[" + std::to_string(i) + "]"));
    } else {
        values.assign(count, one(*q.value, q.where));
    }
    out[q.key] = *q.value;
    return values;
}

void parse_decoherence(const json* block, RunConfig& cfg, json& out) {
    const int n = cfg.system.n;
    const std::size_t sites = static_cast<std::size_t>(2 * n);
    const json empty = json::object();
    Block d(block ? *block : empty, "decoherence");
    bool enabled = true;
    if (const json* v = d.raw("enabled")) {
        if (!v->is_boolean()) fail(d.at("enabled"), "expected true or false");
        enabled = v->get<bool>();
    }
    out["enabled"] = enabled;
    DecoherenceParams deco;
    deco.kappa = parse_rate(d, kRateDefaults[0], sites, out);
    deco.qutrits.assign(sites, QutritRates{});
    std::array<std::vector<double>, 5> q;
    for (std::size_t i = 0; i < 5; ++i) q[i] = parse_rate(d, kRateDefaults[i + 1], sites + 1, out);
    auto fill = [&](QutritRates& r, std::size_t k) {
        r = {q[0][k], q[1][k], q[2][k], q[3][k], q[4][k]};
    };
    for (std::size_t k = 0; k < sites; ++k) fill(deco.qutrits[k], k);
    fill(deco.coupler, sites);
    d.finish();
    cfg.system.dissipation = enabled;
    cfg.system.decoherence = deco;
}

void parse_run(const json* block, RunConfig& cfg, json& out) {
    const json empty = json::object();
    Block r(block ? *block : empty, "run");
    auto& run = cfg.run;
    if (const json* v = r.raw("command")) {
        static const std::set<std::string> known{"check", "transfer", "sweep-b", "sweep-r", "oracle"};
        if (!v->is_string() || !known.count(v->get<std::string>()))
            fail(r.at("command"), "expected one of check, transfer, sweep-b, sweep-r, oracle");
        run.command = v->get<std::string>();
        out["command"] = *v;
    }
    if (const json* v = r.raw("tolerance")) {
        run.tolerance = as_number(*v, r.at("tolerance"));
        if (!(run.tolerance > 1e-14 && run.tolerance < 1e-3)) fail(r.at("tolerance"), "must lie in (1e-14, 1e-3)");
    }
    out["tolerance"] = run.tolerance;
    if (const json* v = r.raw("samples")) {
        const auto s = as_integer(*v, r.at("samples"));
        if (s < 2) fail(r.at("samples"), "must be at least 2");
        run.samples = static_cast<std::size_t>(s);
    }
    out["samples"] = run.samples;
    if (const json* v = r.raw("workers")) {
        const auto w = as_integer(*v, r.at("workers"));
        if (w < 1) fail(r.at("workers"), "must be at least 1");
        run.workers = static_cast<int>(w);
    }
    out["workers"] = run.workers;
    if (const json* v = r.raw("out_dir")) {
        if (!v->is_string()) fail(r.at("out_dir"), "expected a string");
        run.out_dir = v->get<std::string>();
        out["out_dir"] = *v;
    }
    if (const json* v = r.raw("keep_snapshots")) {
        if (!v->is_boolean()) fail(r.at("keep_snapshots"), "expected true or false");
        run.keep_snapshots = v->get<bool>();
    }
    out["keep_snapshots"] = run.keep_snapshots;
    if (const json* v = r.raw("b_grid")) {
        run.b_grid = parse_grid(*v, r.at("b_grid"));
        out["b_grid"] = *run.b_grid;
    }
    if (const json* v = r.raw("r_grid")) {
        run.r_grid = parse_grid(*v, r.at("r_grid"));
        out["r_grid"] = *run.r_grid;
    }
    if (const json* v = r.raw("crosstalk_levels")) {
        run.crosstalk_levels = as_numbers(*v, r.at("crosstalk_levels"));
        if (run.crosstalk_levels->empty()) fail(r.at("crosstalk_levels"), "needs at least one level");
        for (double x : *run.crosstalk_levels)
            if (!(x >= 0.0)) fail(r.at("crosstalk_levels"), "multiples must be non-negative");
        out["crosstalk_levels"] = *v;
    }
    if (auto q = r.quantity("horizon", Dim::Time)) {
        const double t = as_number(*q->value, q->where);
        if (!(t > 0.0)) fail(q->where, "must be positive");
        run.horizon = q->convert(t);
        out[q->key] = *q->value;
    }
    if (const json* v = r.raw("oracle_micro_steps")) {
        const auto m = as_integer(*v, r.at("oracle_micro_steps"));
        if (m < 100 || m % 100 != 0) fail(r.at("oracle_micro_steps"), "must be a positive multiple of 100");
        run.oracle_micro_steps = static_cast<std::size_t>(m);
    }
    out["oracle_micro_steps"] = run.oracle_micro_steps;
    if (const json* v = r.raw("min_fidelity")) {
        run.min_fidelity = as_number(*v, r.at("min_fidelity"));
        if (!(*run.min_fidelity >= 0.0 && *run.min_fidelity <= 1.0)) fail(r.at("min_fidelity"), "must lie in [0, 1]");
        out["min_fidelity"] = *v;
    }
    if (const json* v = r.raw("max_mean_photons")) {
        run.max_mean_photons = as_number(*v, r.at("max_mean_photons"));
        if (!(*run.max_mean_photons >= 0.0)) fail(r.at("max_mean_photons"), "must be non-negative");
        out["max_mean_photons"] = *v;
    }
    r.finish();
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    RunConfig cfg;
    json resolved = {{"system", json::object()}, {"decoherence", json::object()}, {"run", json::object()}};
    const json* decoherence = nullptr;
    const json* run = nullptr;
    if (doc.contains("system")) {
        Block top(doc, "");
        Block s(*top.raw("system"), "system");
        decoherence = top.raw("decoherence");
        run = top.raw("run");
        top.raw("comment");
        top.finish();
        parse_system(s, cfg, resolved["system"]);
        s.finish();
    } else {
        Block s(doc, "");
        decoherence = s.raw("decoherence");
        run = s.raw("run");
        s.raw("comment");
        parse_system(s, cfg, resolved["system"]);
        s.finish();
    }
    parse_decoherence(decoherence, cfg, resolved["decoherence"]);
    parse_run(run, cfg, resolved["run"]);

    try {
        cfg.system.device();
        cfg.system.resolved_decoherence();
        cfg.system.basis();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail("system", e.what());
    }
    cfg.resolved = std::move(resolved);
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("<input>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace cavityw
