#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cavityw/analytic.hpp"
#include "cavityw/basis.hpp"
#include "cavityw/device.hpp"
#include "cavityw/dynamics.hpp"
#include "cavityw/hamiltonians.hpp"

namespace cavityw {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a, used to fingerprint resolved parameter sets.
std::uint64_t fnv1a(std::string_view data);
std::string fnv1a_hex(std::string_view data);

/// delta_j = -2 pi * 0.5 j GHz for j = 1..n.
std::vector<double> default_detunings(int n);

/// Everything needed to rebuild one device instance. Frequencies in rad/s.
struct SystemRecipe {
    int n = 3;
    std::vector<double> detunings;  // empty: default_detunings(n)
    double omega10 = units::ghz(6.5);
    double anharmonicity = units::mhz(-400.0);
    double b = 9.0;                 // |delta_1| / g_1, ignored when g1 is set
    std::optional<double> g1;
    double crosstalk_multiple = 0.01;           // uniform g_kl = multiple * g_max
    std::optional<Eigen::MatrixXd> crosstalk;   // explicit g_kl (rad/s), overrides the multiple
    double r = 1.0;
    int qutrit_levels = 3;
    int cavity_levels = 2;
    std::optional<int> sector_emax = 1;         // nullopt: unrestricted basis
    std::optional<DecoherenceParams> decoherence;  // nullopt: reference rates
    bool dissipation = true;

    std::vector<double> resolved_detunings() const;
    double resolved_g1() const;
    /// Device at r = 1 with crosstalk; the couplings every breakage keeps.
    DeviceParams ideal_device() const;
    /// ideal_device() moved to the breakage ratio r.
    DeviceParams device() const;
    DecoherenceParams resolved_decoherence() const;
    TransferLayout layout() const;
    BasisPtr basis() const;
    /// Canonical text form; equal recipes give equal strings.
    std::string canonical() const;
};

struct TransferOptions {
    EvolveOptions evolve;
    std::optional<double> horizon;  // fixed evolution time; default ideal t_transfer
};

struct TransferRecord {
    double swept = 0.0;
    double b = 0.0;
    double r = 1.0;
    double crosstalk_multiple = 0.0;
    double g1 = 0.0;
    double g_max = 0.0;
    double t_transfer = 0.0;
    double horizon = 0.0;
    double fidelity = 0.0;
    double fidelity_squared = 0.0;
    std::vector<std::string> cavities;
    std::vector<double> mean_photons;
    ConditionReport conditions;
    SimStats stats;
    double wall_ms = 0.0;
    std::string param_hash;
    std::string error;  // numeric failure message; empty on success

    bool ok() const { return error.empty(); }
    double max_mean_photons() const;
    double avg_mean_photons() const;
};

struct TransferRun {
    TransferRecord record;
    SimResult result;  // fidelity and per-cavity photon traces
};

/// One master-equation (or closed, with dissipation off) run from the W
/// state on the unprimed qubits to the ideal-transfer horizon.
TransferRun run_transfer(const SystemRecipe& recipe, const TransferOptions& options = {});

enum class SweepVariable { B, R };
std::string to_string(SweepVariable v);

struct SweepPlan {
    SweepVariable variable = SweepVariable::B;
    std::vector<double> grid;
    std::vector<double> crosstalk_levels{0.0, 0.01, 0.1};
    SystemRecipe base;
    TransferOptions options;
    int workers = 1;
};

struct SweepSeries {
    double crosstalk_multiple = 0.0;
    std::vector<TransferRecord> records;
};

struct SweepResult {
    SweepVariable variable = SweepVariable::B;
    std::vector<SweepSeries> series;
    std::string plan_hash;
};

/// b from 5 to 15 in steps of 0.5.
std::vector<double> default_b_grid();
/// r from 0.85 to 1.15 in steps of 0.01.
std::vector<double> default_r_grid();
/// start, start + step, ... up to stop (inclusive within a tenth of a step).
std::vector<double> linear_grid(double start, double stop, double step);

SweepResult sweep_b(const SweepPlan& plan);
SweepResult sweep_r(const SweepPlan& plan);
SweepResult run_sweep(const SweepPlan& plan);

/// Runs fn(0..count-1) on up to `workers` threads; results keep index order.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct EffectiveComparison {
    double max_deviation = 0.0;  // max_t | F_full(t) - F_closed_form(t) |
    double at_time = 0.0;
    double conjugation_residual = 0.0;
    double horizon = 0.0;
};

/// Closed evolution under the full interaction Hamiltonian against the
/// closed-form transfer amplitudes, both scored by overlap with the target.
EffectiveComparison compare_effective_vs_full(const DeviceParams& params, const BasisPtr& basis, double horizon,
                                              const EvolveOptions& options = {});
EffectiveComparison compare_effective_vs_full(const SystemRecipe& recipe, std::optional<double> horizon = {},
                                              const EvolveOptions& options = {});

/// Time-ordered propagation with 4th-order Magnus steps (two Gauss points,
/// dense matrix exponential per step). Returns the state after every
/// `stride` micro-steps, starting with psi0.
std::vector<DenseVector> magnus_propagate(const TermSet& h, const DenseVector& psi0, double t_final,
                                          std::size_t micro_steps, std::size_t stride);

struct OracleOptions {
    std::size_t micro_steps = 10000;
    std::size_t checkpoints = 100;      // comparison points along the horizon
    double tolerance = 1e-10;           // adaptive tolerance for the comparisons
    double state_threshold = 1e-6;
    double lindblad_threshold = 1e-8;
};

struct OracleReport {
    std::size_t sector_dimension = 0;
    std::size_t full_dimension = 0;
    double horizon = 0.0;
    double sector_vs_full_closed = 0.0;    // max state distance
    double adaptive_vs_oracle = 0.0;       // max state distance
    double sector_vs_full_lindblad = 0.0;  // max fidelity-trace distance
    OracleOptions options;

    bool pass() const;
};

/// Correctness harness on a small instance (recipe.n is forced to 1).
OracleReport oracle_equivalence(const SystemRecipe& recipe, const OracleOptions& options = {});

}  // namespace cavityw
