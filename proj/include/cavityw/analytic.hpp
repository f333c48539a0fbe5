#pragma once

#include <vector>

#include "cavityw/basis.hpp"
#include "cavityw/device.hpp"
#include "cavityw/operators.hpp"

namespace cavityw {

enum class Side { Unprimed, Primed };

/// Branch amplitudes of the ideal evolution: c_w on |W>|0..0>'|0_A>,
/// c_w_primed on |0..0>|W>'|0_A> and c_coupler on |0..0>|0..0>'|1_A>.
struct ClosedFormState {
    cplx c_w;
    cplx c_w_primed;
    cplx c_coupler;
    double t = 0.0;

    double norm_squared() const;
};

/// Equal-amplitude single-excitation superposition over the qubits of one
/// side; every other mode in its ground state. Requires n >= 2.
StateVector w_state(int n, const BasisPtr& basis, Side side);

/// Uniform superposition of the given qutrits each singly excited. Unlike
/// w_state this accepts a single qutrit (n = 1 instances).
StateVector single_excitation_state(const std::vector<std::string>& qutrits, const BasisPtr& basis);

/// Initial state of the transfer: W on the unprimed qubits (a single
/// excitation of q1 when n = 1), everything else ground.
StateVector transfer_initial_state(int n, const BasisPtr& basis);

/// c_w = 1/2 e^{-i chi t} (1 + cos Lt), c_w' = 1/2 e^{-i chi t} (cos Lt - 1),
/// c_A = -i s/sqrt(2) e^{-2 i chi t} sin Lt with s the sign of lambda.
ClosedFormState closed_form_state(const EffectiveParams& effective, double t);

/// pi / Lambda. Throws DomainError when Lambda is zero.
double transfer_time(const EffectiveParams& effective);

/// W on the primed qubits, unprimed qubits, coupler and cavities in ground.
StateVector ideal_target(int n, const BasisPtr& basis);

/// Closed-form amplitudes expressed as a vector of `basis`.
DenseVector closed_form_vector(const ClosedFormState& s, int n, const BasisPtr& basis);

}  // namespace cavityw
