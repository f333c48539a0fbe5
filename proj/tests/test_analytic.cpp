#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavityw/errors.hpp"
#include "cavityw/experiments.hpp"

using namespace cavityw;
using doctest::Approx;

namespace {

EffectiveParams reference_effective() {
    SystemRecipe r;
    return effective_params(r.ideal_device());
}

}  // namespace

TEST_CASE("W states") {
    SystemRecipe r;
    const auto b = r.basis();
    const auto w = w_state(3, b, Side::Unprimed);
    CHECK(w.amplitudes().norm() == Approx(1.0).epsilon(1e-15));
    const std::pair<std::string, int> q2[] = {{"q2", 1}};
    const std::pair<std::string, int> q2p[] = {{"q2'", 1}};
    CHECK(std::abs(w.amplitudes()(static_cast<Eigen::Index>(b->index_with(q2).value())) - 1.0 / std::sqrt(3.0)) < 1e-15);
    const auto wp = ideal_target(3, b);
    CHECK(std::abs(wp.amplitudes()(static_cast<Eigen::Index>(b->index_with(q2p).value())) - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(w.amplitudes().dot(wp.amplitudes())) == 0.0);
    CHECK(transfer_initial_state(3, b).amplitudes() == w.amplitudes());
    CHECK_THROWS(w_state(1, b, Side::Unprimed));

    SystemRecipe one;
    one.n = 1;
    const auto psi = transfer_initial_state(1, one.basis());
    CHECK(psi.amplitudes().cwiseAbs().maxCoeff() == 1.0);
}

TEST_CASE("closed-form amplitudes") {
    const auto e = reference_effective();
    const auto at0 = closed_form_state(e, 0.0);
    CHECK(std::abs(at0.c_w - 1.0) < 1e-15);
    CHECK(std::abs(at0.c_w_primed) < 1e-15);
    CHECK(std::abs(at0.c_coupler) < 1e-15);

    const double T = transfer_time(e);
    CHECK(T == e.t_transfer);
    const auto done = closed_form_state(e, T);
    CHECK(std::abs(done.c_w) < 1e-14);
    CHECK(std::abs(done.c_w_primed) == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(done.c_coupler) < 1e-14);

    const auto half = closed_form_state(e, T / 2);
    CHECK(std::norm(half.c_coupler) == Approx(0.5).epsilon(1e-14));
    CHECK(std::norm(half.c_w) == Approx(0.25).epsilon(1e-14));

    for (double t : {0.1 * T, 0.77 * T, 1.3 * T}) {
        const auto s = closed_form_state(e, t);
        CHECK(s.norm_squared() == Approx(1.0).epsilon(1e-14));
        const auto later = closed_form_state(e, t + 2 * T);
        CHECK(std::abs(std::abs(later.c_coupler) - std::abs(s.c_coupler)) < 1e-12);
        CHECK(std::abs(std::abs(later.c_w) - std::abs(s.c_w)) < 1e-12);
    }
    EffectiveParams zero;
    CHECK_THROWS_AS(transfer_time(zero), DomainError);
}

TEST_CASE("collective exchange reproduces the closed form") {
    SystemRecipe r;
    const auto b = r.basis();
    const auto e = effective_params(r.ideal_device());
    const auto h = TermSet::constant(build_collective_Hint(e.lambda_common, 3, b));
    const auto w = w_state(3, b, Side::Unprimed).amplitudes();
    const auto wp = w_state(3, b, Side::Primed).amplitudes();
    const std::pair<std::string, int> ex[] = {{"qA", 1}};
    const auto a = static_cast<Eigen::Index>(b->index_with(ex).value());

    EvolveOptions opt;
    opt.control.tolerance = 1e-12;
    opt.samples = 201;
    opt.keep_snapshots = true;
    const double horizon = 2.0 * std::numbers::pi / e.Lambda;
    const auto res = evolve_closed(h, w_state(3, b, Side::Unprimed), horizon, opt);
    double worst = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const double t = res.times[i];
        const auto& psi = res.psi_snapshots[i];
        const cplx shift = std::exp(cplx(0.0, -e.chi * t));
        const cplx cw = w.dot(psi) * shift, cwp = wp.dot(psi) * shift, ca = psi(a) * shift * shift;
        const auto s = closed_form_state(e, t);
        worst = std::max({worst, std::abs(cw - s.c_w), std::abs(cwp - s.c_w_primed), std::abs(ca - s.c_coupler)});
        const DenseVector v = closed_form_vector(s, 3, b);
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
    CHECK(worst < 1e-8);

    const auto at_t = evolve_closed(h, w_state(3, b, Side::Unprimed), e.t_transfer, opt);
    CHECK(fidelity(at_t.final_psi, ideal_target(3, b).amplitudes()) == Approx(1.0).epsilon(1e-8));
}
