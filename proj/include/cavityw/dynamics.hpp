#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavityw/basis.hpp"
#include "cavityw/device.hpp"
#include "cavityw/dopri5.hpp"
#include "cavityw/hamiltonians.hpp"
#include "cavityw/operators.hpp"

namespace cavityw {

enum class DissipatorForm {
    Standard,   // L rho L^+ - L^+L rho/2 - rho L^+L/2
    Dephasing,  // s rho s - s rho/2 - rho s/2 with a projector s
};

struct Channel {
    double rate = 0.0;
    SparseOperator op;
    DissipatorForm form = DissipatorForm::Standard;
    std::string label;
};

struct LindbladSpec {
    std::vector<Channel> channels;
    std::vector<std::string> warnings;
};

/// Cavity decay per cavity; per qutrit relaxation |1>->|0>, |2>->|1>,
/// |2>->|0> and dephasing of |1> and |2>. Zero-rate channels are omitted;
/// |2> channels are skipped (with a warning) on 2-level qutrits.
LindbladSpec build_lindblad_spec(const DecoherenceParams& decoherence, int n, const BasisPtr& basis);

struct EvolveOptions {
    StepControl control;
    std::size_t samples = 1000;  // uniform grid points on [0, t_final], endpoints included
    bool keep_snapshots = false;
    bool check_positivity = true;
};

/// Observables recorded on the sample grid while integrating.
struct Probes {
    std::optional<StateVector> target;                            // fidelity reference
    std::vector<std::pair<std::string, SparseOperator>> observables;
};

struct SimStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    double min_eigenvalue = 0.0;       // smallest sampled eigenvalue of rho (Lindblad runs)
    double max_trace_drift = 0.0;      // |tr rho - 1| or | |psi|^2 - 1 |
    double max_hermiticity_drift = 0.0;// |rho - rho^+|_max before symmetrisation
};

struct SimResult {
    std::vector<double> times;
    std::vector<double> fidelity;   // sqrt(<psi|rho|psi>) when a target was given
    std::vector<std::string> observable_labels;
    std::vector<std::vector<double>> observables;  // [observable][sample]
    std::vector<DenseMatrix> rho_snapshots;
    std::vector<DenseVector> psi_snapshots;
    DenseMatrix final_rho;
    DenseVector final_psi;
    SimStats stats;
    std::string metadata;  // parameter hash or free-form provenance
    double tolerance = 0.0;

    /// Bound on |tr rho - 1| promised for this run: 10 * tol * steps.
    double trace_drift_bound() const { return 10.0 * tolerance * static_cast<double>(stats.steps); }
};

/// Integrates the master equation
///   d rho/dt = -i[h(t), rho] + sum_c rate_c D_c[rho]
/// on a uniform sample grid. rho is symmetrised after every accepted step.
SimResult evolve_lindblad(const TermSet& h, const LindbladSpec& lindblad, const DensityMatrix& rho0, double t_final,
                          const EvolveOptions& options = {}, const Probes& probes = {});

/// Schroedinger propagation with the same integrator.
SimResult evolve_closed(const TermSet& h, const StateVector& psi0, double t_final, const EvolveOptions& options = {},
                        const Probes& probes = {});

/// sqrt(<psi|rho|psi>)
double fidelity(const DensityMatrix& rho, const StateVector& target);
double fidelity(const DenseMatrix& rho, const DenseVector& target);
/// |<target|psi>|, the pure-state limit of the above.
double fidelity(const DenseVector& psi, const DenseVector& target);

struct PhotonObservables {
    std::vector<std::string> cavities;
    std::vector<std::vector<double>> traces;  // [cavity][sample]
    std::vector<double> time_average;         // trapezoidal mean over the sampled span
};

/// Mean photon number of every cavity mode in `basis`, from stored snapshots
/// (density matrices or state vectors).
PhotonObservables photon_observables(const SimResult& result, const BasisPtr& basis);

/// Trapezoidal time average of a uniformly or non-uniformly sampled trace.
double time_average(const std::vector<double>& times, const std::vector<double>& values);

/// Number operators a^+ a of every cavity in `basis`, labelled by cavity.
std::vector<std::pair<std::string, SparseOperator>> photon_number_operators(const BasisPtr& basis);

}  // namespace cavityw
