#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "cavityw/errors.hpp"
#include "cavityw/hamiltonians.hpp"
#include "cavityw/operators.hpp"

using namespace cavityw;

namespace {

BasisPtr qubit_cavity() { return build_basis({{ModeKind::Qutrit, 3, "q"}, {ModeKind::Cavity, 2, "c"}}); }

BasisPtr sector(int n = 3) {
    TransferLayout l;
    l.n = n;
    return build_transfer_basis(l, 1);
}

std::size_t state_with(const BasisPtr& b, std::initializer_list<std::pair<std::string, int>> exc) {
    std::vector<std::pair<std::string, int>> v(exc);
    return b->index_with(v).value();
}

}  // namespace

TEST_CASE("local matrices") {
    const auto a = local::annihilation(3);
    CHECK(a(0, 1) == cplx(1.0, 0.0));
    CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
    CHECK((local::creation(3) - a.adjoint()).norm() == 0.0);
    CHECK((local::number(3) - local::creation(3) * a).norm() < 1e-15);
    CHECK(local::transition(3, 2, 1)(2, 1) == cplx(1.0, 0.0));
    CHECK(local::projector(3, 2)(2, 2) == cplx(1.0, 0.0));
    CHECK_THROWS_AS(local::transition(2, 2, 1), ShapeError);
}

TEST_CASE("embedding matches Kronecker products on unrestricted bases") {
    const auto b = qubit_cavity();
    const DenseMatrix sq = local::transition(3, 1, 0) + local::transition(3, 2, 1) * cplx(0.3, 0.2);
    const DenseMatrix ac = local::annihilation(2);
    const DenseMatrix kq = Eigen::kroneckerProduct(sq, DenseMatrix::Identity(2, 2)).eval();
    const DenseMatrix kc = Eigen::kroneckerProduct(DenseMatrix::Identity(3, 3), ac).eval();
    CHECK((embed(sq, "q", b).to_dense() - kq).norm() < 1e-15);
    CHECK((embed(ac, "c", b).to_dense() - kc).norm() < 1e-15);
    CHECK((embed_product({{"c", ac}, {"q", sq}}, b).to_dense() - kq * kc).norm() < 1e-15);
}

TEST_CASE("embedding is a homomorphism for same-mode factors") {
    const auto b = qubit_cavity();
    const DenseMatrix x = local::annihilation(3) + cplx(0.0, 0.5) * local::projector(3, 2);
    const DenseMatrix y = local::creation(3) * cplx(1.5, 0.0);
    CHECK(embed(x * y, "q", b) == embed(x, "q", b) * embed(y, "q", b));
    CHECK(embed_product({{"q", x}, {"q", y}}, b) == embed(x * y, "q", b));
}

TEST_CASE("identity and annihilation actions") {
    TransferLayout l;
    const auto full = build_transfer_basis(l, 1);
    CHECK(embed(local::identity(3), "q1", full) == SparseOperator::identity(full));
    const auto a = embed(local::annihilation(2), "c1", full);
    const auto one = state_with(full, {{"c1", 1}});
    const auto vac = state_with(full, {});
    CHECK(a.coeff(vac, one) == cplx(1.0, 0.0));
    CHECK(a.nonzeros() == 1);
}

TEST_CASE("raising twice in the single-excitation sector vanishes") {
    const auto b = sector();
    const auto sp = embed(local::transition(3, 1, 0), "q2", b);
    const auto vac = state_with(b, {});
    const auto q2 = state_with(b, {{"q2", 1}});
    CHECK(sp.coeff(q2, vac) == cplx(1.0, 0.0));
    CHECK((sp * sp).is_zero());
}

TEST_CASE("sector product is the projection of the product") {
    const auto b = sector();
    const auto a = local::annihilation(2), ad = local::creation(2);
    const auto from = state_with(b, {{"c1", 1}});
    const auto to = state_with(b, {{"c2", 1}});
    // a_1 a_2^+ passes through a two-excitation state outside the sector
    const auto hop = embed_product({{"c1", a}, {"c2", ad}}, b);
    const auto naive = embed(a, "c1", b) * embed(ad, "c2", b);
    CHECK(hop.coeff(to, from) == cplx(1.0, 0.0));
    CHECK(hop.nonzeros() == 1);
    CHECK(naive.is_zero());
    // the other ordering stays inside the sector, so both agree
    const auto down_first = embed_product({{"c2", ad}, {"c1", a}}, b);
    CHECK(down_first == embed(ad, "c2", b) * embed(a, "c1", b));
    CHECK(down_first.coeff(to, from) == cplx(1.0, 0.0));
}

TEST_CASE("operator algebra") {
    const auto b = qubit_cavity();
    const auto a = embed(local::annihilation(2), "c", b);
    const auto s = embed(local::transition(3, 0, 1), "q", b);
    CHECK(commutator(a, a).is_zero());
    CHECK(adjoint(a) == embed(local::creation(2), "c", b));
    CHECK(add(a, a) == scale(2.0, a));
    CHECK(multiply(a, s) == a * s);
    CHECK((a - a).is_zero());
    CHECK(commutator(a, s).is_zero());
    const auto h = a * adjoint(s) + adjoint(a) * s;
    CHECK(is_hermitian(h));
    CHECK_FALSE(is_hermitian(a));
    CHECK(SparseOperator::zero(b).max_abs() == 0.0);
    const auto other = build_basis({{ModeKind::Qutrit, 3, "x"}, {ModeKind::Cavity, 2, "c"}});
    CHECK_THROWS_AS(a + embed(local::annihilation(2), "c", other), IncompatibleBasisError);
}

TEST_CASE("canonical storage") {
    const auto b = qubit_cavity();
    auto op = SparseOperator::from_entries(b, {{0, 1, cplx(1.0, 0.0)}, {0, 1, cplx(-1.0, 0.0)}, {2, 2, cplx(3.0, 0.0)}});
    CHECK(op.nonzeros() == 1);
    CHECK(op.entries() == std::vector<Entry>{{2, 2, cplx(3.0, 0.0)}});
    CHECK_THROWS_AS(SparseOperator::from_entries(b, {{6, 0, cplx(1.0, 0.0)}}), ShapeError);
    CHECK_THROWS_AS(embed(local::annihilation(3), "c", b), ShapeError);
}

TEST_CASE("expectation values") {
    const auto b = qubit_cavity();
    const auto n = embed(local::number(2), "c", b);
    const std::pair<std::string, int> exc[] = {{"c", 1}};
    const auto psi = StateVector::basis_state(b, b->index_with(exc).value());
    CHECK(expectation(n, psi) == cplx(1.0, 0.0));
    CHECK(expectation(n, DensityMatrix::pure(psi)) == cplx(1.0, 0.0));
}

TEST_CASE("excitation number") {
    const auto b = qubit_cavity();
    const auto nexc = excitation_number(b);
    for (std::size_t i = 0; i < b->dimension(); ++i) CHECK(nexc.coeff(i, i).real() == b->weight(i));
}

TEST_CASE("state validation") {
    const auto b = qubit_cavity();
    DenseVector v = DenseVector::Zero(6);
    v(0) = 2.0;
    CHECK_THROWS_AS(StateVector(b, v), DomainError);
    CHECK_THROWS_AS(StateVector(b, DenseVector::Zero(5)), ShapeError);
    DenseMatrix r = DenseMatrix::Zero(6, 6);
    r(0, 0) = 1.0;
    CHECK_NOTHROW(DensityMatrix(b, r));
    r(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(b, r), DomainError);
    r(0, 1) = 0.0;
    r(0, 0) = 1.5;
    r(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix(b, r), DomainError);
    CHECK_NOTHROW(DensityMatrix::unchecked(b, r));
}

TEST_CASE("lifting a sector state into the full basis") {
    TransferLayout l;
    l.n = 1;
    const auto s = build_transfer_basis(l, 1);
    const auto f = build_transfer_basis(l, std::nullopt);
    const std::pair<std::string, int> exc[] = {{"qA", 1}};
    const auto psi = StateVector::basis_state(s, s->index_with(exc).value());
    const DenseVector lifted = lift_state(psi.amplitudes(), *s, *f);
    CHECK(lifted.size() == 108);
    CHECK(lifted(static_cast<Eigen::Index>(f->index_with(exc).value())) == cplx(1.0, 0.0));
    CHECK(std::abs(lifted.norm() - 1.0) < 1e-15);
    const DenseMatrix rho = lift_density(DensityMatrix::pure(psi).matrix(), *s, *f);
    CHECK(std::abs(rho.trace() - cplx(1.0, 0.0)) < 1e-15);
}
