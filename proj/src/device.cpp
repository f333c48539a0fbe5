#include "cavityw/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cavityw/basis.hpp"
#include "cavityw/errors.hpp"

namespace cavityw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_site(const DeviceParams& p, int k) {
    if (k < 0 || k >= p.sites()) throw LookupError("site index out of range");
}

// |x - ref| / |ref| with the 0/0 case mapped to 0.
double relative_mismatch(double x, double ref) {
    const double diff = std::abs(x - ref);
    if (ref == 0.0) return diff == 0.0 ? 0.0 : kInf;
    return diff / std::abs(ref);
}

std::string site_name(const DeviceParams& p, int k) { return TransferLayout::site_suffix(p.n, k); }

ConditionEntry equality_entry(ConditionId id, const std::vector<std::pair<std::string, double>>& items,
                              double tol) {
    ConditionEntry e{id, {}, {}, 0.0, tol, false, false};
    for (const auto& [where, v] : items) {
        e.values.push_back(v);
        if (e.detail.empty() || v > e.measured) {
            e.measured = v;
            e.detail = where;
        }
    }
    e.pass = e.measured <= tol;
    return e;
}

}  // namespace

double DeviceParams::delta(int k) const {
    check_site(*this, k);
    return qutrits[k].omega10 - cavity_omega[k];
}

double DeviceParams::delta_coupler(int k) const {
    check_site(*this, k);
    return coupler.omega10 - cavity_omega[k];
}

double DeviceParams::delta_tilde(int k) const {
    check_site(*this, k);
    return qutrits[k].omega21 - cavity_omega[k];
}

double DeviceParams::delta_tilde_coupler(int k) const {
    check_site(*this, k);
    return coupler.omega21 - cavity_omega[k];
}

double DeviceParams::cavity_detuning(int k, int l) const {
    check_site(*this, k);
    check_site(*this, l);
    return cavity_omega[k] - cavity_omega[l];
}

double DeviceParams::g_max() const {
    return g_coupler.empty() ? 0.0 : *std::max_element(g_coupler.begin(), g_coupler.end());
}

void DeviceParams::validate() const {
    if (n < 1) throw ConfigError("number of cavity pairs must be at least 1");
    const auto s = static_cast<std::size_t>(sites());
    if (qutrits.size() != s || cavity_omega.size() != s || g.size() != s || g_coupler.size() != s ||
        g_tilde.size() != s || g_tilde_coupler.size() != s)
        throw ConfigError("device parameter lists must have one entry per site (2n)");
    if (crosstalk.rows() != sites() || crosstalk.cols() != sites())
        throw ConfigError("crosstalk matrix must be 2n x 2n");
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be a positive frequency");
    };
    auto nonneg = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be non-negative");
    };
    for (std::size_t k = 0; k < s; ++k) {
        positive(qutrits[k].omega10, "qutrit omega10");
        positive(qutrits[k].omega21, "qutrit omega21");
        positive(cavity_omega[k], "cavity frequency");
        nonneg(g[k], "coupling g");
        nonneg(g_coupler[k], "coupling g_A");
        nonneg(g_tilde[k], "coupling g~");
        nonneg(g_tilde_coupler[k], "coupling g~_A");
    }
    positive(coupler.omega10, "coupler omega10");
    positive(coupler.omega21, "coupler omega21");
    for (int k = 0; k < sites(); ++k)
        for (int l = 0; l < sites(); ++l) {
            nonneg(crosstalk(k, l), "crosstalk g_kl");
            if (k == l && crosstalk(k, l) != 0.0) throw DomainError("crosstalk diagonal must be zero");
            if (crosstalk(k, l) != crosstalk(l, k)) throw DomainError("crosstalk matrix must be symmetric");
        }
}

void DecoherenceParams::validate() const {
    auto nonneg = [](double v, const std::string& what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(what + " must be a non-negative rate");
    };
    if (kappa.empty() || kappa.size() != qutrits.size()) throw ConfigError("need one cavity rate and one qutrit rate set per site");
    for (double k : kappa) nonneg(k, "kappa");
    auto check = [&](const QutritRates& r) {
        nonneg(r.gamma, "gamma");
        nonneg(r.gamma21, "gamma21");
        nonneg(r.gamma20, "gamma20");
        nonneg(r.gamma_phi1, "gamma_phi1");
        nonneg(r.gamma_phi2, "gamma_phi2");
    };
    for (const auto& q : qutrits) check(q);
    check(coupler);
}

DecoherenceParams DecoherenceParams::none(int n) {
    return {std::vector<double>(2 * n, 0.0), std::vector<QutritRates>(2 * n), QutritRates{}};
}

DecoherenceParams DecoherenceParams::uniform(int n, double kappa_inv, const QutritRates& lifetimes) {
    auto rate = [](double life) { return life > 0.0 ? 1.0 / life : 0.0; };
    const QutritRates r{rate(lifetimes.gamma), rate(lifetimes.gamma21), rate(lifetimes.gamma20),
                        rate(lifetimes.gamma_phi1), rate(lifetimes.gamma_phi2)};
    return {std::vector<double>(2 * n, rate(kappa_inv)), std::vector<QutritRates>(2 * n, r), r};
}

DecoherenceParams reference_decoherence(int n) {
    using units::us;
    return DecoherenceParams::uniform(n, us(5), QutritRates{us(10), us(5), us(25), us(5), us(5)});
}

std::string to_string(ConditionId id) {
    switch (id) {
        case ConditionId::CavityIsolation: return "cavity_isolation";
        case ConditionId::DetuningMatching: return "detuning_matching";
        case ConditionId::UniformShift: return "uniform_shift";
        case ConditionId::CouplerShiftBalance: return "coupler_shift_balance";
        case ConditionId::UniformExchange: return "uniform_exchange";
        case ConditionId::Dispersive: return "dispersive";
    }
    return "unknown";
}

bool ConditionReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ConditionEntry& e) { return e.pass; });
}

const ConditionEntry& ConditionReport::get(ConditionId id) const {
    for (const auto& e : entries)
        if (e.id == id) return e;
    throw LookupError("condition not in report: " + to_string(id));
}

DeviceParams derive_params(const std::vector<double>& deltas, double g1, int n, double omega10,
                           double anharmonicity) {
    if (n < 1) throw ConfigError("number of cavity pairs must be at least 1");
    if (deltas.size() != static_cast<std::size_t>(n)) throw ConfigError("need one detuning per cavity pair");
    if (!(g1 > 0.0)) throw DomainError("g1 must be positive");
    for (double d : deltas) {
        if (d == 0.0 || !std::isfinite(d)) throw DomainError("detunings must be finite and nonzero");
        if ((d > 0.0) != (deltas.front() > 0.0))
            throw DomainError("invalid regime: detunings must all have the same sign");
    }

    DeviceParams p;
    p.n = n;
    const int s = 2 * n;
    const double inv_sqrt_2n = 1.0 / std::sqrt(static_cast<double>(s));
    const QutritFrequencies q{omega10, omega10 + anharmonicity};
    p.qutrits.assign(s, q);
    p.coupler = q;
    for (int k = 0; k < s; ++k) {
        const double d = deltas[k % n];
        const double gk = g1 * std::sqrt(d / deltas.front());
        p.cavity_omega.push_back(omega10 - d);
        p.g.push_back(gk);
        p.g_coupler.push_back(gk * inv_sqrt_2n);
        p.g_tilde.push_back(std::sqrt(2.0) * gk);
        p.g_tilde_coupler.push_back(std::sqrt(2.0) * gk * inv_sqrt_2n);
    }
    p.crosstalk = Eigen::MatrixXd::Zero(s, s);
    p.validate();
    return p;
}

EffectiveParams effective_params(const DeviceParams& params, double uniform_tolerance) {
    EffectiveParams e;
    e.n = params.n;
    const int s = params.sites();
    for (int k = 0; k < s; ++k) e.lambda.push_back(params.g[k] * params.g_coupler[k] / params.delta(k));
    for (int j = 0; j < params.n; ++j) e.mu.push_back(params.g[j] * params.g[j + params.n] / params.delta(j));
    for (int k = 1; k < s; ++k)
        if (relative_mismatch(e.lambda[k], e.lambda[0]) > uniform_tolerance)
            throw ConditionViolation(to_string(ConditionId::UniformExchange),
                                     "exchange rates lambda_k are not uniform (site " +
                                         TransferLayout::site_suffix(params.n, k) + ")");
    e.chi = params.g[0] * params.g[0] / params.delta(0);
    e.lambda_common = e.lambda[0];
    e.Lambda = std::sqrt(static_cast<double>(s)) * std::abs(e.lambda_common);
    e.t_transfer = e.Lambda > 0.0 ? std::numbers::pi / e.Lambda : kInf;
    return e;
}

ConditionReport check_conditions(const DeviceParams& params, const ConditionThresholds& th) {
    ConditionReport rep;
    const int n = params.n;
    const int s = params.sites();

    {
        ConditionEntry e{ConditionId::CavityIsolation, {}, {}, kInf, th.isolation_ratio, true, false};
        for (int side = 0; side < 2; ++side)
            for (int j = 0; j + 1 < n; ++j) {
                const int k = side * n + j;
                const int l = k + 1;
                const double da = params.delta_coupler(k);
                const double db = params.delta_coupler(l);
                const double denom =
                    std::abs(1.0 / da + 1.0 / db) * params.g_coupler[k] * params.g_coupler[l];
                const double ratio = denom == 0.0 ? kInf : std::abs(db - da) / denom;
                e.values.push_back(ratio);
                if (ratio < e.measured || e.detail.empty()) {
                    e.measured = std::min(e.measured, ratio);
                    e.detail = site_name(params, k) + "," + site_name(params, l);
                }
            }
        e.pass = e.measured >= e.threshold;
        rep.entries.push_back(std::move(e));
    }

    {
        std::vector<std::pair<std::string, double>> items;
        for (int j = 0; j < n; ++j) {
            const double ref = params.delta(j);
            const auto name = site_name(params, j);
            items.emplace_back("A" + name, relative_mismatch(params.delta_coupler(j), ref));
            items.emplace_back(site_name(params, j + n), relative_mismatch(params.delta(j + n), ref));
            items.emplace_back("A" + site_name(params, j + n), relative_mismatch(params.delta_coupler(j + n), ref));
        }
        rep.entries.push_back(equality_entry(ConditionId::DetuningMatching, items, th.equality_tolerance));
    }

    std::vector<double> shift(s), lambda(s);
    double coupler_shift = 0.0;
    for (int k = 0; k < s; ++k) {
        shift[k] = params.g[k] * params.g[k] / params.delta(k);
        lambda[k] = params.g[k] * params.g_coupler[k] / params.delta(k);
        coupler_shift += params.g_coupler[k] * params.g_coupler[k] / params.delta_coupler(k);
    }
    {
        std::vector<std::pair<std::string, double>> items;
        for (int k = 0; k < s; ++k) items.emplace_back(site_name(params, k), relative_mismatch(shift[k], shift[0]));
        rep.entries.push_back(equality_entry(ConditionId::UniformShift, items, th.equality_tolerance));
    }
    {
        std::vector<std::pair<std::string, double>> items;
        for (int k = 0; k < s; ++k) {
            const double v = shift[0] == 0.0 ? relative_mismatch(shift[k], coupler_shift)
                                             : std::abs(shift[k] - coupler_shift) / std::abs(shift[0]);
            items.emplace_back(site_name(params, k), v);
        }
        rep.entries.push_back(equality_entry(ConditionId::CouplerShiftBalance, items, th.equality_tolerance));
    }
    {
        std::vector<std::pair<std::string, double>> items;
        for (int k = 0; k < s; ++k) items.emplace_back(site_name(params, k), relative_mismatch(lambda[k], lambda[0]));
        rep.entries.push_back(equality_entry(ConditionId::UniformExchange, items, th.equality_tolerance));
    }

    {
        ConditionEntry e{ConditionId::Dispersive, {}, {}, kInf, th.dispersive_ratio, true, false};
        auto consider = [&](double delta, double g, const std::string& where) {
            const double ratio = g == 0.0 ? kInf : std::abs(delta) / g;
            e.values.push_back(ratio);
            if (ratio < e.measured || e.detail.empty()) {
                e.measured = std::min(e.measured, ratio);
                e.detail = where;
            }
        };
        for (int k = 0; k < s; ++k) {
            consider(params.delta(k), params.g[k], "q" + site_name(params, k));
            consider(params.delta_coupler(k), params.g_coupler[k], "A-c" + site_name(params, k));
        }
        e.pass = e.measured >= e.threshold;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

DeviceParams apply_breakage(const DeviceParams& params, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("breakage ratio r must be positive");
    if (r == 1.0) return params;
    DeviceParams out = params;
    const int n = params.n;
    for (int j = 0; j < n; ++j) {
        const int kp = j + n;
        const double target = r * params.delta(j);
        out.cavity_omega[kp] = params.coupler.omega10 - target;
        // keep the primed qutrit resonant with the coupler so delta_j' = delta_Aj'
        const double shift = params.coupler.omega10 - params.qutrits[kp].omega10;
        out.qutrits[kp].omega10 += shift;
        out.qutrits[kp].omega21 += shift;
    }
    out.validate();
    return out;
}

Eigen::MatrixXd crosstalk_estimate(const std::vector<double>& caps, double self_capacitance,
                                   const std::vector<double>& g_coupler) {
    if (caps.size() != g_coupler.size()) throw ShapeError("need one capacitance per coupler coupling");
    double total = self_capacitance;
    for (double c : caps) {
        if (!(c >= 0.0)) throw DomainError("capacitances must be non-negative");
        total += c;
    }
    if (!(self_capacitance >= 0.0) || !(total > 0.0)) throw DomainError("total capacitance must be positive");
    const auto s = static_cast<Eigen::Index>(caps.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s, s);
    for (Eigen::Index k = 0; k < s; ++k)
        for (Eigen::Index l = 0; l < s; ++l)
            if (k != l) out(k, l) = std::max(g_coupler[k] * caps[l], g_coupler[l] * caps[k]) / total;
    return out;
}

Eigen::MatrixXd uniform_crosstalk(int sites, double value) {
    if (!(value >= 0.0)) throw DomainError("crosstalk must be non-negative");
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(sites, sites, value);
    m.diagonal().setZero();
    return m;
}

MaybeInfinite cavity_lifetime(const std::vector<double>& kappa, int n) {
    if (n < 1) throw ConfigError("number of cavity pairs must be at least 1");
    double longest_rate = 0.0;
    for (double k : kappa) {
        if (!(k >= 0.0)) throw DomainError("kappa must be non-negative");
        longest_rate = std::max(longest_rate, k);
    }
    if (longest_rate == 0.0) return {kInf, true};
    // min over cavities of kappa^-1 is the inverse of the largest rate
    return {1.0 / longest_rate / (2.0 * n), false};
}

MaybeInfinite quality_factor(double omega_c, double kappa) {
    if (!(kappa >= 0.0)) throw DomainError("kappa must be non-negative");
    if (kappa == 0.0) return {kInf, true};
    return {omega_c / kappa, false};
}

}  // namespace cavityw
