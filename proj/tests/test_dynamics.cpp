#include <doctest.h>

#include <cmath>

#include "cavityw/errors.hpp"
#include "cavityw/experiments.hpp"

using namespace cavityw;
using doctest::Approx;

namespace {

BasisPtr qubit() { return build_basis({{ModeKind::Qutrit, 2, "q"}}); }

LindbladSpec single(double rate, const SparseOperator& op, DissipatorForm form) {
    LindbladSpec s;
    s.channels.push_back({rate, op, form, "test"});
    return s;
}

DensityMatrix plus_state(const BasisPtr& b) {
    DenseVector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return DensityMatrix::pure(StateVector(b, v));
}

}  // namespace

TEST_CASE("relaxation of a single qubit") {
    const auto b = qubit();
    const double gamma = 1e5;
    const auto spec = single(gamma, embed(local::transition(2, 0, 1), "q", b), DissipatorForm::Standard);
    Probes probes;
    probes.observables.emplace_back("p1", embed(local::projector(2, 1), "q", b));
    EvolveOptions opt;
    opt.samples = 51;
    const auto res = evolve_lindblad(TermSet(b), spec, DensityMatrix::pure(StateVector::basis_state(b, 1)), 2e-5, opt, probes);
    double worst = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i)
        worst = std::max(worst, std::abs(res.observables[0][i] - std::exp(-gamma * res.times[i])));
    CHECK(worst < 1e-7);
    CHECK(res.stats.max_trace_drift <= res.trace_drift_bound());
    CHECK(res.stats.min_eigenvalue >= -100 * opt.control.tolerance);

    // a static level splitting does not change the populations
    const auto spin = TermSet::constant(embed(local::projector(2, 1), "q", b) * cplx(2e8, 0.0));
    const auto lab = evolve_lindblad(spin, spec, DensityMatrix::pure(StateVector::basis_state(b, 1)), 2e-5, opt, probes);
    for (std::size_t i = 0; i < lab.times.size(); ++i) CHECK(std::abs(lab.observables[0][i] - res.observables[0][i]) < 1e-7);
}

TEST_CASE("pure dephasing") {
    const auto b = qubit();
    const double gphi = 2e5;
    const auto spec = single(gphi, embed(local::projector(2, 1), "q", b), DissipatorForm::Dephasing);
    Probes probes;
    probes.observables.emplace_back("coh", embed(local::transition(2, 1, 0), "q", b) * cplx(2.0, 0.0));
    EvolveOptions opt;
    opt.samples = 41;
    const auto res = evolve_lindblad(TermSet(b), spec, plus_state(b), 1e-5, opt, probes);
    double worst = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i)
        worst = std::max(worst, std::abs(res.observables[0][i] - std::exp(-gphi * res.times[i] / 2)));
    CHECK(worst < 1e-7);
}

TEST_CASE("without dissipation the state stays pure") {
    SystemRecipe r;
    r.n = 1;
    const auto b = r.basis();
    const auto h = build_h_I(r.device(), b);
    EvolveOptions opt;
    opt.samples = 11;
    opt.keep_snapshots = true;
    opt.control.tolerance = 1e-10;
    const auto res = evolve_lindblad(h, LindbladSpec{}, DensityMatrix::pure(transfer_initial_state(1, b)), 5e-8, opt);
    for (const auto& rho : res.rho_snapshots) CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-8);
    const auto closed = evolve_closed(h, transfer_initial_state(1, b), 5e-8, opt);
    const DenseMatrix pure = closed.final_psi * closed.final_psi.adjoint();
    CHECK((pure - res.final_rho).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("zero Hamiltonian leaves the state unchanged") {
    SystemRecipe r;
    const auto b = r.basis();
    const auto psi = transfer_initial_state(3, b);
    const auto res = evolve_closed(TermSet(b), psi, 1e-7);
    CHECK((res.final_psi - psi.amplitudes()).norm() < 1e-14);
    CHECK(res.times.size() == 1000);
}

TEST_CASE("fidelity") {
    const auto b = qubit();
    const auto zero = StateVector::basis_state(b, 0);
    const auto one = StateVector::basis_state(b, 1);
    CHECK(fidelity(DensityMatrix::pure(zero), zero) == Approx(1.0));
    CHECK(fidelity(DensityMatrix::pure(one), zero) == 0.0);
    const DenseMatrix mixed = 0.5 * DensityMatrix::pure(zero).matrix() + 0.5 * DensityMatrix::pure(one).matrix();
    CHECK(fidelity(DensityMatrix(b, mixed), zero) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(fidelity(zero.amplitudes(), plus_state(b).matrix().col(0) * std::sqrt(2.0)) == Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("photon averages") {
    const auto b = build_basis({{ModeKind::Cavity, 2, "c"}});
    const double kappa = 2e5, T = 5e-6;
    const auto spec = single(kappa, embed(local::annihilation(2), "c", b), DissipatorForm::Standard);
    EvolveOptions opt;
    opt.keep_snapshots = true;
    const auto res = evolve_lindblad(TermSet(b), spec, DensityMatrix::pure(StateVector::basis_state(b, 1)), T, opt);
    const auto ph = photon_observables(res, b);
    REQUIRE(ph.cavities == std::vector<std::string>{"c"});
    CHECK(ph.time_average[0] == Approx((1 - std::exp(-kappa * T)) / (kappa * T)).epsilon(1e-6));

    const auto vac = evolve_closed(TermSet(b), StateVector::basis_state(b, 0), T, opt);
    CHECK(photon_observables(vac, b).time_average[0] == 0.0);
    CHECK(time_average({0.0, 1.0, 3.0}, {0.0, 2.0, 2.0}) == Approx(5.0 / 3.0));
}

TEST_CASE("reference channel list") {
    SystemRecipe r;
    const auto spec = build_lindblad_spec(r.resolved_decoherence(), 3, r.basis());
    CHECK(spec.channels.size() == 6 + 7 * 5);
    CHECK(spec.warnings.empty());
    CHECK(spec.channels.front().label == "kappa c1");
    auto two = r;
    two.qutrit_levels = 2;
    const auto s2 = build_lindblad_spec(two.resolved_decoherence(), 3, two.basis());
    CHECK(s2.channels.size() == 6 + 7 * 2);
    CHECK_FALSE(s2.warnings.empty());
    CHECK_THROWS_AS(build_lindblad_spec(DecoherenceParams::none(2), 3, r.basis()), ConfigError);
    CHECK(build_lindblad_spec(DecoherenceParams::none(3), 3, r.basis()).channels.empty());
}
