#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cavityw {

/// Unit helpers. Internally every frequency is an angular frequency in rad/s
/// and every time is in seconds; ordinary frequencies are multiplied by 2 pi.
namespace units {
inline constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double ghz(double f) { return two_pi * f * 1e9; }
constexpr double mhz(double f) { return two_pi * f * 1e6; }
constexpr double us(double t) { return t * 1e-6; }
constexpr double to_ghz(double w) { return w / (two_pi * 1e9); }
constexpr double to_mhz(double w) { return w / (two_pi * 1e6); }
constexpr double to_us(double t) { return t * 1e6; }
}  // namespace units

struct QutritFrequencies {
    double omega10 = 0.0;
    double omega21 = 0.0;
};

/// Physical couplings and frequencies of the 2n-cavity device. Sites are
/// indexed k in [0, 2n): k < n is cavity/qubit j = k+1, k >= n is j' = k-n+1.
/// Detunings are always derived from the stored frequencies.
struct DeviceParams {
    int n = 0;
    std::vector<QutritFrequencies> qutrits;  // 2n site qutrits
    QutritFrequencies coupler;
    std::vector<double> cavity_omega;        // 2n
    std::vector<double> g;                   // qubit k <-> cavity k
    std::vector<double> g_coupler;           // coupler <-> cavity k
    std::vector<double> g_tilde;             // |1>-|2> of qutrit k <-> cavity k
    std::vector<double> g_tilde_coupler;     // |1>-|2> of coupler <-> cavity k
    Eigen::MatrixXd crosstalk;               // symmetric 2n x 2n, zero diagonal

    int sites() const noexcept { return 2 * n; }
    double delta(int k) const;              // omega10_k - omega_c_k
    double delta_coupler(int k) const;      // omega10_A - omega_c_k
    double delta_tilde(int k) const;        // omega21_k - omega_c_k
    double delta_tilde_coupler(int k) const;
    double cavity_detuning(int k, int l) const;  // omega_c_k - omega_c_l
    double g_max() const;                   // max over coupler couplings

    /// Throws ConfigError/DomainError on violated record invariants.
    void validate() const;
};

/// Decay and dephasing rates (rad/s) for each cavity and each qutrit.
struct QutritRates {
    double gamma = 0.0;       // |1> -> |0>
    double gamma21 = 0.0;     // |2> -> |1>
    double gamma20 = 0.0;     // |2> -> |0>
    double gamma_phi1 = 0.0;  // dephasing of |1>
    double gamma_phi2 = 0.0;  // dephasing of |2>
};

struct DecoherenceParams {
    std::vector<double> kappa;          // 2n cavities
    std::vector<QutritRates> qutrits;   // 2n site qutrits
    QutritRates coupler;

    void validate() const;
    static DecoherenceParams none(int n);
    /// Uniform rates given as lifetimes in seconds (0 means no decay).
    static DecoherenceParams uniform(int n, double kappa_inv, const QutritRates& rates);
};

/// kappa^-1 = 5 us, gamma^-1 = 10 us, gamma21^-1 = 5 us, gamma20^-1 = 25 us,
/// dephasing^-1 = 5 us for both excited levels.
DecoherenceParams reference_decoherence(int n);

struct EffectiveParams {
    std::vector<double> lambda;  // per site k (2n)
    std::vector<double> mu;      // per pair j (n)
    double chi = 0.0;            // signed common dispersive shift
    double lambda_common = 0.0;  // signed uniform exchange rate
    double Lambda = 0.0;         // sqrt(2n) |lambda|
    double t_transfer = 0.0;     // pi / Lambda
    int n = 0;
};

/// Identifiers of the design conditions the transfer protocol relies on.
enum class ConditionId {
    CavityIsolation,      // coupler-induced cavity-cavity coupling negligible
    DetuningMatching,     // delta_j = delta_Aj = delta_Aj' = delta_j'
    UniformShift,         // g_k^2/delta_k identical for every site
    CouplerShiftBalance,  // g_k^2/delta_k = sum over sites of g_A^2/delta_A
    UniformExchange,      // lambda_k identical for every site
    Dispersive,           // |delta| / g large for every coupling
};

std::string to_string(ConditionId id);

struct ConditionEntry {
    ConditionId id;
    std::string detail;          // which pair / site the worst value belongs to
    std::vector<double> values;  // ratios (inequalities) or mismatches (equalities)
    double measured = 0.0;       // worst-case value used for the verdict
    double threshold = 0.0;
    bool is_inequality = false;  // pass iff measured >= threshold, else measured <= threshold
    bool pass = false;
};

struct ConditionReport {
    std::vector<ConditionEntry> entries;
    bool all_pass() const;
    const ConditionEntry& get(ConditionId id) const;
};

struct ConditionThresholds {
    double equality_tolerance = 1e-9;
    double isolation_ratio = 10.0;
    double dispersive_ratio = 5.0;
};

/// Couplings from the matching conditions: g_k = g1 sqrt(delta_k/delta_1),
/// g_Ak = g_k/sqrt(2n), g~ = sqrt(2) g, primed sites mirror unprimed ones and
/// cavity frequencies are omega10 - delta_k. No crosstalk.
DeviceParams derive_params(const std::vector<double>& deltas, double g1, int n, double omega10,
                           double anharmonicity);

/// lambda_k, mu_j, chi, Lambda and the transfer time. Throws
/// ConditionViolation when the exchange rates are not uniform.
EffectiveParams effective_params(const DeviceParams& params, double uniform_tolerance = 1e-9);

ConditionReport check_conditions(const DeviceParams& params, const ConditionThresholds& thresholds = {});

/// Scales the primed detunings to r * delta_j by moving the primed cavity
/// frequencies. All couplings are kept. r == 1 returns the input unchanged.
DeviceParams apply_breakage(const DeviceParams& params, double r);

/// Capacitive crosstalk estimate g_kl = max(g_Ak C_l, g_Al C_k) / C_sum with
/// C_sum = sum(C) + C_q.
Eigen::MatrixXd crosstalk_estimate(const std::vector<double>& coupler_capacitances, double self_capacitance,
                                   const std::vector<double>& g_coupler);

/// Crosstalk matrix with `value` on every off-diagonal pair.
Eigen::MatrixXd uniform_crosstalk(int sites, double value);

/// A value that may be flagged infinite (zero decay rate).
struct MaybeInfinite {
    double value = 0.0;
    bool infinite = false;
};

/// (1/2n) * min over cavities of kappa^-1, in seconds.
MaybeInfinite cavity_lifetime(const std::vector<double>& kappa, int n);
/// omega_c / kappa; infinite when kappa is zero.
MaybeInfinite quality_factor(double omega_c, double kappa);

}  // namespace cavityw
