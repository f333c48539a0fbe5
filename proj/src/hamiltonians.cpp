#include "cavityw/hamiltonians.hpp"

#include <algorithm>
#include <cmath>

#include "cavityw/errors.hpp"

namespace cavityw {

namespace {

struct Labels {
    TransferLayout layout;
    explicit Labels(int n) { layout.n = n; }
    std::string q(int k) const { return layout.qutrit(k); }
    std::string c(int k) const { return layout.cavity(k); }
    static std::string A() { return TransferLayout::coupler(); }
};

int levels_of(const BasisPtr& basis, const std::string& label) {
    return basis->mode(basis->mode_index(label)).levels;
}

void require_modes(const DeviceParams& params, const BasisPtr& basis) {
    const Labels lb(params.n);
    for (int k = 0; k < params.sites(); ++k) {
        basis->mode_index(lb.q(k));
        basis->mode_index(lb.c(k));
    }
    basis->mode_index(Labels::A());
}

DenseMatrix sigma_plus(int levels) { return local::transition(levels, 1, 0); }
DenseMatrix sigma_minus(int levels) { return local::transition(levels, 0, 1); }

}  // namespace

std::string to_string(TermFamily f) {
    switch (f) {
        case TermFamily::QubitCavity: return "qubit-cavity";
        case TermFamily::CouplerCavity: return "coupler-cavity";
        case TermFamily::PrimedQubitCavity: return "qubit-cavity'";
        case TermFamily::PrimedCouplerCavity: return "coupler-cavity'";
        case TermFamily::QubitCavity21: return "qubit21-cavity";
        case TermFamily::CouplerCavity21: return "coupler21-cavity";
        case TermFamily::PrimedQubitCavity21: return "qubit21-cavity'";
        case TermFamily::PrimedCouplerCavity21: return "coupler21-cavity'";
        case TermFamily::Crosstalk: return "crosstalk";
        case TermFamily::Static: return "static";
    }
    return "unknown";
}

TermSet TermSet::constant(const SparseOperator& h) {
    TermSet ts(h.basis());
    ts.add_static(h);
    return ts;
}

std::size_t TermSet::count(TermFamily f) const {
    return static_cast<std::size_t>(
        std::count_if(terms_.begin(), terms_.end(), [f](const Term& t) { return t.family == f; }));
}

void TermSet::add_pair(cplx coefficient, const SparseOperator& op, double nu, TermFamily family) {
    if (!basis_->same_as(*op.basis())) throw IncompatibleBasisError("term operator lives on another basis");
    const auto i = terms_.size();
    terms_.push_back({coefficient, op, nu, family, i + 1});
    terms_.push_back({std::conj(coefficient), op.adjoint(), -nu, family, i});
}

void TermSet::add_static(const SparseOperator& op, TermFamily family) {
    if (!basis_->same_as(*op.basis())) throw IncompatibleBasisError("term operator lives on another basis");
    terms_.push_back({cplx(1.0, 0.0), op, 0.0, family, terms_.size()});
}

void TermSet::append(const TermSet& other) {
    if (!basis_->same_as(*other.basis_)) throw IncompatibleBasisError("term sets live on different bases");
    const auto offset = terms_.size();
    for (auto t : other.terms_) {
        t.partner += offset;
        terms_.push_back(std::move(t));
    }
    warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
}

SparseOperator TermSet::evaluate(double t) const {
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    SparseMatrix acc(d, d);
    for (const auto& term : terms_) {
        const cplx phase = term.coefficient * std::exp(cplx(0.0, term.nu * t));
        acc += term.op.matrix() * phase;
    }
    return SparseOperator(basis_, std::move(acc));
}

TermSetEvaluator::TermSetEvaluator(const TermSet& terms, cplx scale, const SparseOperator* offset) {
    const auto d = static_cast<Eigen::Index>(terms.basis()->dimension());
    if (offset && !offset->basis()->same_as(*terms.basis()))
        throw IncompatibleBasisError("evaluator offset lives on another basis");
    std::vector<Eigen::Triplet<cplx>> trips;
    for (const auto& term : terms.terms())
        for (const auto& e : term.op.entries())
            trips.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), cplx(1.0, 0.0));
    if (offset)
        for (const auto& e : offset->entries())
            trips.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), cplx(1.0, 0.0));
    m_ = SparseMatrix(d, d);
    m_.setFromTriplets(trips.begin(), trips.end());
    m_.makeCompressed();

    const auto* outer = m_.outerIndexPtr();
    const auto* inner = m_.innerIndexPtr();
    auto locate = [&](const std::vector<Entry>& entries) {
        std::vector<Slot> slots;
        for (const auto& e : entries) {
            const auto* first = inner + outer[e.row];
            const auto* last = inner + outer[e.row + 1];
            const auto* it = std::lower_bound(first, last, static_cast<int>(e.col));
            slots.push_back({static_cast<Eigen::Index>(it - inner), e.value});
        }
        return slots;
    };
    for (const auto& term : terms.terms()) {
        coefficients_.push_back(scale * term.coefficient);
        nus_.push_back(term.nu);
        slots_.push_back(locate(term.op.entries()));
    }
    if (offset) offset_ = locate(offset->entries());
}

const SparseMatrix& TermSetEvaluator::evaluate(double t) {
    auto* values = m_.valuePtr();
    std::fill(values, values + m_.nonZeros(), cplx(0.0, 0.0));
    for (const auto& s : offset_) values[s.position] += s.value;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const cplx phase = nus_[i] == 0.0 ? coefficients_[i] : coefficients_[i] * std::exp(cplx(0.0, nus_[i] * t));
        for (const auto& s : slots_[i]) values[s.position] += phase * s.value;
    }
    return m_;
}

TermSet build_H_I(const DeviceParams& params, const BasisPtr& basis) {
    require_modes(params, basis);
    const Labels lb(params.n);
    const int n = params.n;
    TermSet ts(basis);
    auto qubit_family = [&](int k0, TermFamily fam) {
        for (int k = k0; k < k0 + n; ++k) {
            const auto a = local::annihilation(levels_of(basis, lb.c(k)));
            const auto op = embed_product({{lb.c(k), a}, {lb.q(k), sigma_plus(levels_of(basis, lb.q(k)))}}, basis);
            ts.add_pair(params.g[k], op, params.delta(k), fam);
        }
    };
    auto coupler_family = [&](int k0, TermFamily fam) {
        const auto sp = sigma_plus(levels_of(basis, Labels::A()));
        for (int k = k0; k < k0 + n; ++k) {
            const auto a = local::annihilation(levels_of(basis, lb.c(k)));
            const auto op = embed_product({{lb.c(k), a}, {Labels::A(), sp}}, basis);
            ts.add_pair(params.g_coupler[k], op, params.delta_coupler(k), fam);
        }
    };
    qubit_family(0, TermFamily::QubitCavity);
    coupler_family(0, TermFamily::CouplerCavity);
    qubit_family(n, TermFamily::PrimedQubitCavity);
    coupler_family(n, TermFamily::PrimedCouplerCavity);
    return ts;
}

TermSet build_Theta_I(const DeviceParams& params, const BasisPtr& basis) {
    require_modes(params, basis);
    const Labels lb(params.n);
    const int n = params.n;
    TermSet ts(basis);

    const int a_levels = levels_of(basis, Labels::A());
    bool skipped_qubits = false;
    for (int side = 0; side < 2; ++side) {
        const int k0 = side * n;
        const auto qfam = side == 0 ? TermFamily::QubitCavity21 : TermFamily::PrimedQubitCavity21;
        const auto afam = side == 0 ? TermFamily::CouplerCavity21 : TermFamily::PrimedCouplerCavity21;
        for (int k = k0; k < k0 + n; ++k) {
            const int ql = levels_of(basis, lb.q(k));
            if (ql < 3) {
                skipped_qubits = true;
                continue;
            }
            const auto a = local::annihilation(levels_of(basis, lb.c(k)));
            const auto op = embed_product({{lb.c(k), a}, {lb.q(k), local::transition(ql, 2, 1)}}, basis);
            ts.add_pair(params.g_tilde[k], op, params.delta_tilde(k), qfam);
        }
        if (a_levels >= 3) {
            for (int k = k0; k < k0 + n; ++k) {
                const auto a = local::annihilation(levels_of(basis, lb.c(k)));
                const auto op =
                    embed_product({{lb.c(k), a}, {Labels::A(), local::transition(a_levels, 2, 1)}}, basis);
                ts.add_pair(params.g_tilde_coupler[k], op, params.delta_tilde_coupler(k), afam);
            }
        }
    }
    if (skipped_qubits) ts.warn("site qutrits with 2 levels: |1>-|2> coupling terms skipped");
    if (a_levels < 3) ts.warn("coupler with 2 levels: |1>-|2> coupling terms skipped");

    for (int k = 0; k < params.sites(); ++k)
        for (int l = k + 1; l < params.sites(); ++l) {
            const double gkl = params.crosstalk(k, l);
            if (gkl == 0.0) continue;
            const auto op = embed_product({{lb.c(k), local::annihilation(levels_of(basis, lb.c(k)))},
                                           {lb.c(l), local::creation(levels_of(basis, lb.c(l)))}},
                                          basis);
            ts.add_pair(gkl, op, -params.cavity_detuning(k, l), TermFamily::Crosstalk);
        }
    return ts;
}

TermSet build_h_I(const DeviceParams& params, const BasisPtr& basis) {
    TermSet ts = build_H_I(params, basis);
    ts.append(build_Theta_I(params, basis));
    return ts;
}

SparseOperator build_H_eff(const DeviceParams& params, const BasisPtr& basis, double tolerance) {
    require_modes(params, basis);
    ConditionThresholds th;
    th.equality_tolerance = tolerance;
    const auto report = check_conditions(params, th);
    if (const auto& e = report.get(ConditionId::DetuningMatching); !e.pass)
        throw ConditionViolation(to_string(ConditionId::DetuningMatching),
                                 "effective Hamiltonian needs matched detunings (worst at " + e.detail + ")");

    const Labels lb(params.n);
    const auto A = Labels::A();
    const int al = levels_of(basis, A);
    auto out = SparseOperator::zero(basis);

    // Photon-number-conditioned shifts: -c (|0><0| a^+a - |1><1| a a^+).
    auto shift = [&](const std::string& qutrit, int k, double c) {
        const int ql = levels_of(basis, qutrit);
        const int cl = levels_of(basis, lb.c(k));
        const DenseMatrix a = local::annihilation(cl);
        const DenseMatrix ad = local::creation(cl);
        const auto ground = embed_product({{qutrit, local::projector(ql, 0)}, {lb.c(k), ad * a}}, basis);
        const auto excited = embed_product({{qutrit, local::projector(ql, 1)}, {lb.c(k), a * ad}}, basis);
        return (ground - excited) * cplx(-c, 0.0);
    };
    for (int k = 0; k < params.sites(); ++k) out = out + shift(lb.q(k), k, params.g[k] * params.g[k] / params.delta(k));
    for (int k = 0; k < params.sites(); ++k)
        out = out + shift(A, k, params.g_coupler[k] * params.g_coupler[k] / params.delta_coupler(k));

    for (int k = 0; k < params.sites(); ++k) {
        const double lambda = params.g[k] * params.g_coupler[k] / params.delta(k);
        const int ql = levels_of(basis, lb.q(k));
        const auto exch = embed_product({{lb.q(k), sigma_plus(ql)}, {A, sigma_minus(al)}}, basis);
        out = out + (exch + exch.adjoint()) * cplx(lambda, 0.0);
    }

    for (int j = 0; j < params.n; ++j) {
        const int jp = j + params.n;
        const double mu = params.g[j] * params.g[jp] / params.delta(j);
        const int cl = levels_of(basis, lb.c(j));
        const int cpl = levels_of(basis, lb.c(jp));
        for (const auto& [proj, sign] : {std::pair{1, 1.0}, std::pair{0, -1.0}}) {
            const auto hop = embed_product({{lb.c(j), local::creation(cl)},
                                            {lb.c(jp), local::annihilation(cpl)},
                                            {A, local::projector(al, proj)}},
                                           basis);
            out = out + (hop + hop.adjoint()) * cplx(sign * mu, 0.0);
        }
    }
    return out;
}

VacuumHamiltonians build_H0_Hint(const DeviceParams& params, const BasisPtr& basis) {
    require_modes(params, basis);
    const Labels lb(params.n);
    const auto A = Labels::A();
    const int al = levels_of(basis, A);
    auto h0 = SparseOperator::zero(basis);
    auto hint = SparseOperator::zero(basis);
    double coupler_shift = 0.0;
    for (int k = 0; k < params.sites(); ++k) {
        const int ql = levels_of(basis, lb.q(k));
        h0 = h0 + embed(local::projector(ql, 1), lb.q(k), basis) *
                      cplx(params.g[k] * params.g[k] / params.delta(k), 0.0);
        coupler_shift += params.g_coupler[k] * params.g_coupler[k] / params.delta_coupler(k);
        const double lambda = params.g[k] * params.g_coupler[k] / params.delta(k);
        const auto exch = embed_product({{lb.q(k), sigma_plus(ql)}, {A, sigma_minus(al)}}, basis);
        hint = hint + (exch + exch.adjoint()) * cplx(lambda, 0.0);
    }
    h0 = h0 + embed(local::projector(al, 1), A, basis) * cplx(coupler_shift, 0.0);
    return {h0, hint};
}

SparseOperator build_collective_Hint(double lambda, int n, const BasisPtr& basis) {
    const Labels lb(n);
    const auto A = Labels::A();
    const int al = levels_of(basis, A);
    const auto sA = embed(sigma_minus(al), A, basis);
    auto half = [&](int k0) {
        auto jplus = SparseOperator::zero(basis);
        for (int k = k0; k < k0 + n; ++k) jplus = jplus + embed(sigma_plus(levels_of(basis, lb.q(k))), lb.q(k), basis);
        // J- s_A^+ passes through two excitations, so take the adjoint of the product
        const auto raise = jplus * sA;
        return (raise + raise.adjoint()) * cplx(lambda, 0.0);
    };
    return half(0) + half(n);
}

double conjugation_residual(const SparseOperator& H0, const SparseOperator& Hint, double t) {
    const auto d = H0.dimension();
    std::vector<double> energy(d, 0.0);
    for (const auto& e : H0.entries()) {
        if (e.row != e.col) throw DomainError("conjugation_residual expects a diagonal H0");
        energy[e.row] = e.value.real();
    }
    const double scale = Hint.max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& e : Hint.entries()) {
        const cplx rotated = std::exp(cplx(0.0, (energy[e.row] - energy[e.col]) * t)) * e.value;
        worst = std::max(worst, std::abs(rotated - e.value));
    }
    return worst / scale;
}

bool is_hermitian(const SparseOperator& op, double tol) {
    const double scale = std::max(1.0, op.max_abs());
    return (op - op.adjoint()).max_abs() <= tol * scale;
}

}  // namespace cavityw
