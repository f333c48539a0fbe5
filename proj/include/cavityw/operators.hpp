#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavityw/basis.hpp"

namespace cavityw {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Single-mode matrices in the level basis {|0>, |1>, ...}.
namespace local {
DenseMatrix identity(int levels);
DenseMatrix annihilation(int levels);
DenseMatrix creation(int levels);
DenseMatrix number(int levels);
/// |to><from|
DenseMatrix transition(int levels, int to, int from);
DenseMatrix projector(int levels, int level);
}  // namespace local

struct Entry {
    std::size_t row;
    std::size_t col;
    cplx value;
    bool operator==(const Entry&) const = default;
};

/// Complex sparse operator over a CompositeBasis. Storage is canonical:
/// compressed row-major with sorted columns and no explicit zeros, so two
/// operators are equal iff their entry lists are equal.
class SparseOperator {
public:
    SparseOperator(BasisPtr basis, SparseMatrix matrix);
    static SparseOperator zero(BasisPtr basis);
    static SparseOperator identity(BasisPtr basis);
    static SparseOperator from_entries(BasisPtr basis, const std::vector<Entry>& entries);

    const BasisPtr& basis() const noexcept { return basis_; }
    const SparseMatrix& matrix() const noexcept { return m_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    std::size_t nonzeros() const noexcept { return static_cast<std::size_t>(m_.nonZeros()); }
    bool is_zero() const noexcept { return m_.nonZeros() == 0; }

    std::vector<Entry> entries() const;
    cplx coeff(std::size_t row, std::size_t col) const;
    double max_abs() const;
    DenseMatrix to_dense() const { return DenseMatrix(m_); }

    bool operator==(const SparseOperator& other) const;

    SparseOperator operator+(const SparseOperator& other) const;
    SparseOperator operator-(const SparseOperator& other) const;
    SparseOperator operator*(const SparseOperator& other) const;
    SparseOperator operator*(cplx c) const;
    friend SparseOperator operator*(cplx c, const SparseOperator& a) { return a * c; }
    SparseOperator adjoint() const;

private:
    void canonicalize();
    void require_same_basis(const SparseOperator& other) const;

    BasisPtr basis_;
    SparseMatrix m_;
};

SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator scale(cplx c, const SparseOperator& a);
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

/// Operator acting as `local_matrix` on `label` and identity elsewhere. On a
/// restricted basis only matrix elements between retained states are kept.
SparseOperator embed(const DenseMatrix& local_matrix, const std::string& label, const BasisPtr& basis);

/// Product of single-mode factors (applied right to left, as written),
/// evaluated directly between retained states. On a restricted basis this is
/// the projection of the product, which differs from the product of
/// projections whenever an intermediate state leaves the sector.
SparseOperator embed_product(const std::vector<std::pair<std::string, DenseMatrix>>& factors,
                             const BasisPtr& basis);

/// Total excitation number: sum of photon numbers plus qutrit level indices.
SparseOperator excitation_number(const BasisPtr& basis);

/// Normalised pure state. Construction checks ||psi|| = 1 within 1e-12.
class StateVector {
public:
    StateVector(BasisPtr basis, DenseVector amplitudes);
    static StateVector basis_state(BasisPtr basis, std::size_t index);

    const BasisPtr& basis() const noexcept { return basis_; }
    const DenseVector& amplitudes() const noexcept { return psi_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(psi_.size()); }

private:
    BasisPtr basis_;
    DenseVector psi_;
};

/// Density matrix. The checked constructor enforces Hermiticity and unit
/// trace within 1e-12 and eigenvalues >= -1e-10; `unchecked` wraps integrator
/// output whose deviations are reported as diagnostics instead.
class DensityMatrix {
public:
    DensityMatrix(BasisPtr basis, DenseMatrix rho);
    static DensityMatrix unchecked(BasisPtr basis, DenseMatrix rho);
    static DensityMatrix pure(const StateVector& psi);

    const BasisPtr& basis() const noexcept { return basis_; }
    const DenseMatrix& matrix() const noexcept { return rho_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rho_.rows()); }

private:
    DensityMatrix() = default;
    BasisPtr basis_;
    DenseMatrix rho_;
};

cplx expectation(const SparseOperator& op, const StateVector& psi);
cplx expectation(const SparseOperator& op, const DensityMatrix& rho);

/// Re-expresses a state of a restricted basis in a larger basis with the same
/// modes (matched by occupation tuple). Throws if a populated state is absent.
DenseVector lift_state(const DenseVector& psi, const CompositeBasis& from, const CompositeBasis& to);
DenseMatrix lift_density(const DenseMatrix& rho, const CompositeBasis& from, const CompositeBasis& to);

}  // namespace cavityw
