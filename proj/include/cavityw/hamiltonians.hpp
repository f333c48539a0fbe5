#pragma once

#include <string>
#include <vector>

#include "cavityw/basis.hpp"
#include "cavityw/device.hpp"
#include "cavityw/operators.hpp"

namespace cavityw {

enum class TermFamily {
    QubitCavity,
    CouplerCavity,
    PrimedQubitCavity,
    PrimedCouplerCavity,
    QubitCavity21,
    CouplerCavity21,
    PrimedQubitCavity21,
    PrimedCouplerCavity21,
    Crosstalk,
    Static,
};

std::string to_string(TermFamily f);

/// One summand coefficient * exp(i nu t) * op.
struct Term {
    cplx coefficient;
    SparseOperator op;
    double nu = 0.0;
    TermFamily family = TermFamily::Static;
    std::size_t partner = 0;  // index of the adjoint term (itself when Hermitian and static)
};

/// Time-dependent Hamiltonian as a list of constant sparse operators with
/// oscillating coefficients. Non-Hermitian terms are always stored next to
/// their adjoint at -nu, so evaluate(t) is Hermitian for every t.
class TermSet {
public:
    explicit TermSet(BasisPtr basis) : basis_(std::move(basis)) {}

    /// A single time-independent Hermitian operator.
    static TermSet constant(const SparseOperator& h);

    const BasisPtr& basis() const noexcept { return basis_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    std::size_t count(TermFamily f) const;
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Adds coefficient * e^{i nu t} * op together with its adjoint partner.
    void add_pair(cplx coefficient, const SparseOperator& op, double nu, TermFamily family);
    /// Adds a Hermitian time-independent term.
    void add_static(const SparseOperator& op, TermFamily family = TermFamily::Static);
    void append(const TermSet& other);
    void warn(std::string message) { warnings_.push_back(std::move(message)); }

    SparseOperator evaluate(double t) const;

private:
    BasisPtr basis_;
    std::vector<Term> terms_;
    std::vector<std::string> warnings_;
};

/// Evaluates scale * terms(t) + offset into a sparse matrix with a fixed
/// sparsity pattern; only the values are rewritten per call.
class TermSetEvaluator {
public:
    explicit TermSetEvaluator(const TermSet& terms, cplx scale = 1.0, const SparseOperator* offset = nullptr);
    const SparseMatrix& evaluate(double t);
    const SparseMatrix& pattern() const noexcept { return m_; }

private:
    struct Slot {
        Eigen::Index position;
        cplx value;
    };
    std::vector<cplx> coefficients_;
    std::vector<double> nus_;
    std::vector<std::vector<Slot>> slots_;
    std::vector<Slot> offset_;
    SparseMatrix m_;
};

/// Wanted qubit-cavity and coupler-cavity interaction in the interaction
/// picture, rotating-wave form: four families, 2 * 4n terms.
TermSet build_H_I(const DeviceParams& params, const BasisPtr& basis);

/// Unwanted |1>-|2> couplings of every qutrit plus inter-cavity crosstalk.
/// On 2-level qutrits the |1>-|2> families are skipped with a warning; zero
/// crosstalk pairs are omitted.
TermSet build_Theta_I(const DeviceParams& params, const BasisPtr& basis);

/// Full interaction Hamiltonian H_I + Theta_I.
TermSet build_h_I(const DeviceParams& params, const BasisPtr& basis);

/// Dispersive effective Hamiltonian: photon-number-conditioned shifts (with
/// the anti-normal a a^+ ordering on the excited branch), qubit-coupler
/// exchange lambda_k and the coupler-conditioned cavity-cavity exchange mu_j.
/// Throws ConditionViolation if the detunings are not matched.
SparseOperator build_H_eff(const DeviceParams& params, const BasisPtr& basis, double tolerance = 1e-9);

struct VacuumHamiltonians {
    SparseOperator H0;    // diagonal dispersive shifts
    SparseOperator Hint;  // qubit-coupler exchange
};

/// Vacuum-cavity reduction of H_eff into its diagonal and exchange parts.
VacuumHamiltonians build_H0_Hint(const DeviceParams& params, const BasisPtr& basis);

/// lambda (J+ s_A + J- s_A^+) + lambda (J'+ s_A + J'- s_A^+) with collective
/// raising/lowering operators over the unprimed and primed qubits.
SparseOperator build_collective_Hint(double lambda, int n, const BasisPtr& basis);

/// || e^{i H0 t} Hint e^{-i H0 t} - Hint ||_max / || Hint ||_max for diagonal H0.
double conjugation_residual(const SparseOperator& H0, const SparseOperator& Hint, double t);

bool is_hermitian(const SparseOperator& op, double tol = 1e-12);

}  // namespace cavityw
