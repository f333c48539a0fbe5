#include "cavityw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cavityw/errors.hpp"

namespace cavityw {

namespace {

std::vector<double> uniform_grid(double t_final, std::size_t samples) {
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw DomainError("final time must be finite and non-negative");
    if (t_final == 0.0) return {0.0};
    if (samples < 2) throw DomainError("need at least two sample points");
    std::vector<double> out(samples);
    for (std::size_t i = 0; i < samples; ++i)
        out[i] = t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.back() = t_final;
    return out;
}

void check_tolerance(double tol) {
    if (!(tol > 1e-14 && tol < 1e-3)) throw DomainError("tolerance must lie in (1e-14, 1e-3)");
}

void prepare_result(SimResult& res, const Probes& probes, std::size_t samples) {
    res.times.assign(samples, 0.0);
    if (probes.target) res.fidelity.assign(samples, 0.0);
    for (const auto& [label, op] : probes.observables) {
        res.observable_labels.push_back(label);
        res.observables.emplace_back(samples, 0.0);
    }
}

}  // namespace

LindbladSpec build_lindblad_spec(const DecoherenceParams& deco, int n, const BasisPtr& basis) {
    deco.validate();
    if (deco.kappa.size() != static_cast<std::size_t>(2 * n)) throw ConfigError("decoherence record does not match n");
    TransferLayout layout;
    layout.n = n;
    LindbladSpec spec;
    auto add = [&](double rate, const DenseMatrix& local, const std::string& mode, DissipatorForm form,
                   const std::string& label) {
        if (rate == 0.0) return;
        spec.channels.push_back({rate, embed(local, mode, basis), form, label});
    };
    for (int k = 0; k < layout.sites(); ++k) {
        const auto c = layout.cavity(k);
        const int lv = basis->mode(basis->mode_index(c)).levels;
        add(deco.kappa[k], local::annihilation(lv), c, DissipatorForm::Standard, "kappa " + c);
    }
    auto qutrit = [&](const std::string& q, const QutritRates& r) {
        const int lv = basis->mode(basis->mode_index(q)).levels;
        add(r.gamma, local::transition(lv, 0, 1), q, DissipatorForm::Standard, "gamma " + q);
        if (lv >= 3) {
            add(r.gamma21, local::transition(lv, 1, 2), q, DissipatorForm::Standard, "gamma21 " + q);
            add(r.gamma20, local::transition(lv, 0, 2), q, DissipatorForm::Standard, "gamma20 " + q);
        } else if (r.gamma21 != 0.0 || r.gamma20 != 0.0) {
            spec.warnings.push_back("qutrit " + q + " has 2 levels: |2> decay channels skipped");
        }
        add(r.gamma_phi1, local::projector(lv, 1), q, DissipatorForm::Dephasing, "gamma_phi1 " + q);
        if (lv >= 3) {
            add(r.gamma_phi2, local::projector(lv, 2), q, DissipatorForm::Dephasing, "gamma_phi2 " + q);
        } else if (r.gamma_phi2 != 0.0) {
            spec.warnings.push_back("qutrit " + q + " has 2 levels: |2> dephasing skipped");
        }
    };
    for (int k = 0; k < layout.sites(); ++k) qutrit(layout.qutrit(k), deco.qutrits[k]);
    qutrit(TransferLayout::coupler(), deco.coupler);
    return spec;
}

SimResult evolve_lindblad(const TermSet& h, const LindbladSpec& lindblad, const DensityMatrix& rho0, double t_final,
                          const EvolveOptions& options, const Probes& probes) {
    check_tolerance(options.control.tolerance);
    const auto& basis = rho0.basis();
    if (!basis->same_as(*h.basis())) throw IncompatibleBasisError("Hamiltonian and state bases differ");
    if (probes.target && !probes.target->basis()->same_as(*basis))
        throw IncompatibleBasisError("fidelity target lives on another basis");

    // d rho = M rho + rho M^+ + sum rate L rho L^+, with M = -i H - K/2 and
    // K the rate-weighted anticommutator operators.
    auto anticomm = SparseOperator::zero(basis);
    struct Jump {
        double rate;
        SparseMatrix op;
        SparseMatrix op_adj;
    };
    std::vector<Jump> jumps;
    for (const auto& ch : lindblad.channels) {
        if (ch.rate < 0.0) throw DomainError("negative dissipation rate in channel " + ch.label);
        if (!ch.op.basis()->same_as(*basis)) throw IncompatibleBasisError("channel " + ch.label + " on another basis");
        if (ch.op.is_zero() || ch.rate == 0.0) continue;
        const auto a = ch.form == DissipatorForm::Standard ? ch.op.adjoint() * ch.op : ch.op;
        anticomm = anticomm + a * cplx(ch.rate, 0.0);
        jumps.push_back({ch.rate, ch.op.matrix(), SparseMatrix(ch.op.matrix().adjoint())});
    }
    const auto offset = anticomm * cplx(-0.5, 0.0);
    TermSetEvaluator gen(h, cplx(0.0, -1.0), &offset);

    DenseMatrix tmp;
    auto rhs = [&](double t, const DenseMatrix& rho, DenseMatrix& drho) {
        const SparseMatrix& m = gen.evaluate(t);
        drho.noalias() = m * rho;
        drho.noalias() += rho * m.adjoint();
        for (const auto& j : jumps) {
            tmp.noalias() = rho * j.op_adj;
            drho.noalias() += j.rate * (j.op * tmp);
        }
    };

    SimResult res;
    res.tolerance = options.control.tolerance;
    const auto grid = uniform_grid(t_final, options.samples);
    prepare_result(res, probes, grid.size());
    res.stats.min_eigenvalue = std::numeric_limits<double>::infinity();

    auto post = [&](DenseMatrix& rho) {
        const double drift = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        res.stats.max_hermiticity_drift = std::max(res.stats.max_hermiticity_drift, drift);
        if (drift == 0.0) return false;
        rho = (0.5 * (rho + rho.adjoint())).eval();
        return true;
    };
    auto observe = [&](std::size_t i, double t, const DenseMatrix& rho) {
        res.times[i] = t;
        res.stats.max_trace_drift = std::max(res.stats.max_trace_drift, std::abs(rho.trace() - cplx(1.0, 0.0)));
        if (options.check_positivity) {
            Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
            res.stats.min_eigenvalue = std::min(res.stats.min_eigenvalue, es.eigenvalues().minCoeff());
        }
        if (probes.target) res.fidelity[i] = fidelity(rho, probes.target->amplitudes());
        for (std::size_t k = 0; k < probes.observables.size(); ++k)
            res.observables[k][i] = (probes.observables[k].second.matrix() * rho).trace().real();
        if (options.keep_snapshots) res.rho_snapshots.push_back(rho);
    };

    DenseMatrix rho = rho0.matrix();
    const auto st = dopri5(rhs, rho, 0.0, std::span<const double>(grid), options.control, post, observe);
    res.stats.steps = st.steps;
    res.stats.rejected = st.rejected;
    res.stats.rhs_evaluations = st.rhs_evaluations;
    if (!options.check_positivity) res.stats.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    res.final_rho = std::move(rho);
    return res;
}

SimResult evolve_closed(const TermSet& h, const StateVector& psi0, double t_final, const EvolveOptions& options,
                        const Probes& probes) {
    check_tolerance(options.control.tolerance);
    const auto& basis = psi0.basis();
    if (!basis->same_as(*h.basis())) throw IncompatibleBasisError("Hamiltonian and state bases differ");
    if (probes.target && !probes.target->basis()->same_as(*basis))
        throw IncompatibleBasisError("fidelity target lives on another basis");

    TermSetEvaluator gen(h, cplx(0.0, -1.0));
    auto rhs = [&](double t, const DenseVector& psi, DenseVector& dpsi) { dpsi.noalias() = gen.evaluate(t) * psi; };

    SimResult res;
    res.tolerance = options.control.tolerance;
    const auto grid = uniform_grid(t_final, options.samples);
    prepare_result(res, probes, grid.size());
    auto post = [](DenseVector&) { return false; };
    auto observe = [&](std::size_t i, double t, const DenseVector& psi) {
        res.times[i] = t;
        res.stats.max_trace_drift = std::max(res.stats.max_trace_drift, std::abs(psi.squaredNorm() - 1.0));
        if (probes.target) res.fidelity[i] = fidelity(psi, probes.target->amplitudes());
        for (std::size_t k = 0; k < probes.observables.size(); ++k)
            res.observables[k][i] = psi.dot(probes.observables[k].second.matrix() * psi).real();
        if (options.keep_snapshots) res.psi_snapshots.push_back(psi);
    };

    DenseVector psi = psi0.amplitudes();
    const auto st = dopri5(rhs, psi, 0.0, std::span<const double>(grid), options.control, post, observe);
    res.stats.steps = st.steps;
    res.stats.rejected = st.rejected;
    res.stats.rhs_evaluations = st.rhs_evaluations;
    res.final_psi = std::move(psi);
    return res;
}

double fidelity(const DenseMatrix& rho, const DenseVector& target) {
    const double overlap = target.dot(rho * target).real();
    return std::sqrt(std::max(0.0, overlap));
}

double fidelity(const DensityMatrix& rho, const StateVector& target) {
    if (!rho.basis()->same_as(*target.basis())) throw IncompatibleBasisError("state and target bases differ");
    return fidelity(rho.matrix(), target.amplitudes());
}

double fidelity(const DenseVector& psi, const DenseVector& target) { return std::abs(target.dot(psi)); }

std::vector<std::pair<std::string, SparseOperator>> photon_number_operators(const BasisPtr& basis) {
    std::vector<std::pair<std::string, SparseOperator>> out;
    for (const auto& m : basis->modes())
        if (m.kind == ModeKind::Cavity) out.emplace_back(m.label, embed(local::number(m.levels), m.label, basis));
    return out;
}

double time_average(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw ShapeError("time and value traces differ in length");
    if (times.empty()) return 0.0;
    if (times.size() == 1) return values.front();
    const double span = times.back() - times.front();
    if (span <= 0.0) return values.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    return acc / span;
}

PhotonObservables photon_observables(const SimResult& result, const BasisPtr& basis) {
    const bool mixed = !result.rho_snapshots.empty();
    const std::size_t count = mixed ? result.rho_snapshots.size() : result.psi_snapshots.size();
    if (count == 0) throw DomainError("photon observables need stored snapshots");
    if (count != result.times.size()) throw ShapeError("snapshot count does not match the time grid");
    PhotonObservables out;
    for (const auto& [label, op] : photon_number_operators(basis)) {
        std::vector<double> trace(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (mixed) {
                trace[i] = (op.matrix() * result.rho_snapshots[i]).trace().real();
            } else {
                const auto& psi = result.psi_snapshots[i];
                trace[i] = psi.dot(op.matrix() * psi).real();
            }
        }
        out.cavities.push_back(label);
        out.time_average.push_back(time_average(result.times, trace));
        out.traces.push_back(std::move(trace));
    }
    return out;
}

}  // namespace cavityw
