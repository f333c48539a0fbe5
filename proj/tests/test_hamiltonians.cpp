#include <doctest.h>

#include <cmath>

#include "cavityw/errors.hpp"
#include "cavityw/experiments.hpp"

using namespace cavityw;
using doctest::Approx;

namespace {

SystemRecipe recipe(double crosstalk = 0.0) {
    SystemRecipe r;
    r.crosstalk_multiple = crosstalk;
    return r;
}

std::size_t idx(const BasisPtr& b, const std::string& label) {
    const std::pair<std::string, int> e[] = {{label, 1}};
    return b->index_with(e).value();
}

}  // namespace

TEST_CASE("wanted interaction has four families of 2n terms") {
    const auto r = recipe();
    const auto h = build_H_I(r.device(), r.basis());
    CHECK(h.size() == 24);
    CHECK(h.count(TermFamily::QubitCavity) == 6);
    CHECK(h.count(TermFamily::PrimedCouplerCavity) == 6);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto& t = h.terms()[i];
        const auto& p = h.terms()[t.partner];
        CHECK(p.partner == i);
        CHECK(p.nu == -t.nu);
        CHECK(p.op == t.op.adjoint());
    }
}

TEST_CASE("unwanted terms") {
    const auto r = recipe(0.01);
    const auto th = build_Theta_I(r.device(), r.basis());
    CHECK(th.count(TermFamily::Crosstalk) == 30);
    CHECK(th.count(TermFamily::QubitCavity21) == 6);
    CHECK(th.count(TermFamily::CouplerCavity21) == 6);
    CHECK(th.warnings().empty());
    // |1>-|2> transitions need two excitations
    for (const auto& t : th.terms())
        if (t.family != TermFamily::Crosstalk) CHECK(t.op.is_zero());
    CHECK(build_h_I(r.device(), r.basis()).size() == 24 + th.size());

    auto two = recipe();
    two.qutrit_levels = 2;
    const auto th2 = build_Theta_I(two.device(), two.basis());
    CHECK(th2.size() == 0);
    CHECK(th2.warnings().size() == 2);
    CHECK(build_Theta_I(recipe().device(), recipe().basis()).count(TermFamily::Crosstalk) == 0);
}

TEST_CASE("interaction matrix elements and Hermiticity") {
    const auto r = recipe(0.1);
    const auto p = r.device();
    const auto b = r.basis();
    const auto h = build_h_I(p, b);
    for (double t : {0.0, 1e-9, 3.7e-8, 8.1e-8}) CHECK(is_hermitian(h.evaluate(t), 1e-6));
    const auto at0 = h.evaluate(0.0);
    CHECK(std::abs(at0.coeff(idx(b, "q1"), idx(b, "c1")) - cplx(p.g[0], 0.0)) < 1e-6);
    CHECK(std::abs(at0.coeff(idx(b, "qA"), idx(b, "c3'")) - cplx(p.g_coupler[5], 0.0)) < 1e-6);
    CHECK(std::abs(at0.coeff(idx(b, "c2"), idx(b, "c1")) - cplx(p.crosstalk(0, 1), 0.0)) < 1e-6);
    const double t = 2.5e-9;
    const auto ht = h.evaluate(t);
    const cplx phase = std::exp(cplx(0.0, p.delta(0) * t));
    CHECK(std::abs(ht.coeff(idx(b, "q1"), idx(b, "c1")) - p.g[0] * phase) < 1e-4);

    TermSetEvaluator ev(h);
    CHECK((DenseMatrix(ev.evaluate(t)) - ht.to_dense()).norm() < 1e-6);
    TermSetEvaluator scaled(h, cplx(0.0, -1.0));
    CHECK((DenseMatrix(scaled.evaluate(t)) - cplx(0.0, -1.0) * ht.to_dense()).norm() < 1e-6);
}

TEST_CASE("zero coupling gives a zero operator") {
    auto p = recipe().device();
    for (auto* v : {&p.g, &p.g_coupler, &p.g_tilde, &p.g_tilde_coupler}) std::fill(v->begin(), v->end(), 0.0);
    CHECK(build_h_I(p, recipe().basis()).evaluate(1e-8).is_zero());
}

TEST_CASE("effective Hamiltonian in the single-excitation sector") {
    const auto r = recipe();
    const auto p = r.device();
    const auto b = r.basis();
    const auto e = effective_params(p);
    const auto heff = build_H_eff(p, b);
    CHECK(is_hermitian(heff));
    CHECK(heff.coeff(idx(b, "q1"), idx(b, "qA")).real() == Approx(e.lambda[0]).epsilon(1e-12));
    CHECK(heff.coeff(idx(b, "q2'"), idx(b, "qA")).real() == Approx(e.lambda[4]).epsilon(1e-12));
    CHECK(heff.coeff(idx(b, "q1"), idx(b, "q1")).real() == Approx(e.chi).epsilon(1e-12));
    CHECK(heff.coeff(idx(b, "qA"), idx(b, "qA")).real() == Approx(e.chi).epsilon(1e-12));
    CHECK_THROWS_AS(build_H_eff(apply_breakage(p, 1.1), b), ConditionViolation);

    const auto [h0, hint] = build_H0_Hint(p, b);
    for (const auto* site : {"q1", "q3", "q2'", "qA"})
        CHECK(h0.coeff(idx(b, site), idx(b, site)).real() == Approx(e.chi).epsilon(1e-12));
    CHECK((hint - build_collective_Hint(e.lambda_common, 3, b)).max_abs() < 1e-9 * hint.max_abs());
}

TEST_CASE("conjugation leaves the exchange invariant only when matched") {
    const auto r = recipe();
    const auto b = r.basis();
    const auto [h0, hint] = build_H0_Hint(r.device(), b);
    for (double t : {1e-8, 8.1e-8}) CHECK(conjugation_residual(h0, hint, t) < 1e-9);
    auto broken = r;
    broken.r = 0.9;
    const auto hb = build_H0_Hint(broken.device(), b);
    CHECK(conjugation_residual(hb.H0, hb.Hint, 8.1e-8) > 1e-3);
    CHECK_THROWS_AS(conjugation_residual(hint, hint, 1e-8), DomainError);
}
