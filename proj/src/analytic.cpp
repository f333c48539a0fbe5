#include "cavityw/analytic.hpp"

#include <cmath>

#include "cavityw/errors.hpp"

namespace cavityw {

namespace {

std::vector<std::string> side_qutrits(int n, Side side) {
    TransferLayout layout;
    layout.n = n;
    std::vector<std::string> out;
    const int k0 = side == Side::Unprimed ? 0 : n;
    for (int k = k0; k < k0 + n; ++k) out.push_back(layout.qutrit(k));
    return out;
}

DenseVector excitation_vector(const std::vector<std::string>& qutrits, const BasisPtr& basis) {
    DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(basis->dimension()));
    const double amp = 1.0 / std::sqrt(static_cast<double>(qutrits.size()));
    for (const auto& q : qutrits) {
        const std::pair<std::string, int> exc[] = {{q, 1}};
        const auto idx = basis->index_with(exc);
        if (!idx) throw LookupError("single excitation of '" + q + "' is not a basis state");
        v(static_cast<Eigen::Index>(*idx)) = amp;
    }
    return v;
}

}  // namespace

double ClosedFormState::norm_squared() const {
    return std::norm(c_w) + std::norm(c_w_primed) + std::norm(c_coupler);
}

StateVector single_excitation_state(const std::vector<std::string>& qutrits, const BasisPtr& basis) {
    if (qutrits.empty()) throw DomainError("need at least one qutrit to excite");
    return StateVector(basis, excitation_vector(qutrits, basis));
}

StateVector w_state(int n, const BasisPtr& basis, Side side) {
    if (n < 2) throw DomainError("a W state needs at least two qubits");
    return single_excitation_state(side_qutrits(n, side), basis);
}

StateVector transfer_initial_state(int n, const BasisPtr& basis) {
    if (n < 1) throw DomainError("number of cavity pairs must be at least 1");
    return single_excitation_state(side_qutrits(n, Side::Unprimed), basis);
}

ClosedFormState closed_form_state(const EffectiveParams& e, double t) {
    if (t < 0.0) throw DomainError("time must be non-negative");
    const double c = std::cos(e.Lambda * t);
    const double s = std::sin(e.Lambda * t);
    const cplx phase1 = std::exp(cplx(0.0, -e.chi * t));
    const cplx phase2 = std::exp(cplx(0.0, -2.0 * e.chi * t));
    // the coupler branch follows the sign of the exchange rate
    const double sign = e.lambda_common < 0.0 ? -1.0 : 1.0;
    return {0.5 * phase1 * (1.0 + c), 0.5 * phase1 * (c - 1.0), cplx(0.0, -sign / std::sqrt(2.0)) * phase2 * s, t};
}

double transfer_time(const EffectiveParams& e) {
    if (!(e.Lambda > 0.0)) throw DomainError("degenerate coupling: Lambda is zero");
    return std::numbers::pi / e.Lambda;
}

StateVector ideal_target(int n, const BasisPtr& basis) {
    return single_excitation_state(side_qutrits(n, Side::Primed), basis);
}

DenseVector closed_form_vector(const ClosedFormState& s, int n, const BasisPtr& basis) {
    DenseVector v = s.c_w * excitation_vector(side_qutrits(n, Side::Unprimed), basis) +
                    s.c_w_primed * excitation_vector(side_qutrits(n, Side::Primed), basis);
    const std::pair<std::string, int> exc[] = {{TransferLayout::coupler(), 1}};
    const auto idx = basis->index_with(exc);
    if (!idx) throw LookupError("coupler excitation is not a basis state");
    v(static_cast<Eigen::Index>(*idx)) += s.c_coupler;
    return v;
}

}  // namespace cavityw
