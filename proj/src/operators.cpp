#include "cavityw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "cavityw/errors.hpp"

namespace cavityw {

namespace local {

DenseMatrix identity(int levels) { return DenseMatrix::Identity(levels, levels); }

DenseMatrix annihilation(int levels) {
    DenseMatrix a = DenseMatrix::Zero(levels, levels);
    for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

DenseMatrix creation(int levels) { return annihilation(levels).adjoint(); }

DenseMatrix number(int levels) {
    DenseMatrix n = DenseMatrix::Zero(levels, levels);
    for (int k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

DenseMatrix transition(int levels, int to, int from) {
    if (to < 0 || from < 0 || to >= levels || from >= levels)
        throw ShapeError("transition level outside the mode's level range");
    DenseMatrix m = DenseMatrix::Zero(levels, levels);
    m(to, from) = 1.0;
    return m;
}

DenseMatrix projector(int levels, int level) { return transition(levels, level, level); }

}  // namespace local

SparseOperator::SparseOperator(BasisPtr basis, SparseMatrix matrix)
    : basis_(std::move(basis)), m_(std::move(matrix)) {
    if (!basis_) throw ConfigError("operator needs a basis");
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    if (m_.rows() != d || m_.cols() != d) throw ShapeError("operator shape does not match basis dimension");
    canonicalize();
}

SparseOperator SparseOperator::zero(BasisPtr basis) {
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    return SparseOperator(std::move(basis), SparseMatrix(d, d));
}

SparseOperator SparseOperator::identity(BasisPtr basis) {
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    SparseMatrix m(d, d);
    m.setIdentity();
    return SparseOperator(std::move(basis), std::move(m));
}

SparseOperator SparseOperator::from_entries(BasisPtr basis, const std::vector<Entry>& entries) {
    const auto d = basis->dimension();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.row >= d || e.col >= d) throw ShapeError("operator entry index out of range");
        trips.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    SparseMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m.setFromTriplets(trips.begin(), trips.end());
    return SparseOperator(std::move(basis), std::move(m));
}

void SparseOperator::canonicalize() {
    m_.prune(cplx(0.0, 0.0), 0.0);
    m_.makeCompressed();
}

void SparseOperator::require_same_basis(const SparseOperator& other) const {
    if (!basis_->same_as(*other.basis_)) throw IncompatibleBasisError("operators live on different bases");
}

std::vector<Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(nonzeros());
    for (Eigen::Index r = 0; r < m_.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m_, r); it; ++it)
            out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
    return out;
}

cplx SparseOperator::coeff(std::size_t row, std::size_t col) const {
    return m_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double SparseOperator::max_abs() const {
    double best = 0.0;
    for (Eigen::Index k = 0; k < m_.nonZeros(); ++k) best = std::max(best, std::abs(m_.valuePtr()[k]));
    return best;
}

bool SparseOperator::operator==(const SparseOperator& other) const {
    return basis_->same_as(*other.basis_) && entries() == other.entries();
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
    require_same_basis(other);
    return SparseOperator(basis_, SparseMatrix(m_ + other.m_));
}

SparseOperator SparseOperator::operator-(const SparseOperator& other) const {
    require_same_basis(other);
    return SparseOperator(basis_, SparseMatrix(m_ - other.m_));
}

SparseOperator SparseOperator::operator*(const SparseOperator& other) const {
    require_same_basis(other);
    return SparseOperator(basis_, SparseMatrix(m_ * other.m_));
}

SparseOperator SparseOperator::operator*(cplx c) const { return SparseOperator(basis_, SparseMatrix(m_ * c)); }

SparseOperator SparseOperator::adjoint() const { return SparseOperator(basis_, SparseMatrix(m_.adjoint())); }

SparseOperator add(const SparseOperator& a, const SparseOperator& b) { return a + b; }
SparseOperator scale(cplx c, const SparseOperator& a) { return a * c; }
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) { return a * b; }
SparseOperator adjoint(const SparseOperator& a) { return a.adjoint(); }
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

SparseOperator embed_product(const std::vector<std::pair<std::string, DenseMatrix>>& factors,
                             const BasisPtr& basis) {
    // Same-mode factors are multiplied in written order; distinct modes commute.
    std::map<std::size_t, DenseMatrix> per_mode;
    for (const auto& [label, mat] : factors) {
        const auto i = basis->mode_index(label);
        const int lv = basis->mode(i).levels;
        if (mat.rows() != lv || mat.cols() != lv)
            throw ShapeError("local matrix for '" + label + "' must be " + std::to_string(lv) + "x" +
                             std::to_string(lv));
        auto [it, fresh] = per_mode.try_emplace(i, mat);
        if (!fresh) it->second = it->second * mat;
    }

    struct Local {
        std::size_t mode;
        // for each source level: list of (target level, value)
        std::vector<std::vector<std::pair<int, cplx>>> columns;
    };
    std::vector<Local> locals;
    for (const auto& [mode, mat] : per_mode) {
        Local l{mode, std::vector<std::vector<std::pair<int, cplx>>>(static_cast<std::size_t>(mat.cols()))};
        for (int c = 0; c < mat.cols(); ++c)
            for (int r = 0; r < mat.rows(); ++r)
                if (mat(r, c) != cplx(0.0, 0.0)) l.columns[c].emplace_back(r, mat(r, c));
        locals.push_back(std::move(l));
    }

    std::vector<Eigen::Triplet<cplx>> trips;
    std::vector<std::uint8_t> target;
    const auto dim = basis->dimension();
    for (std::size_t col = 0; col < dim; ++col) {
        const auto occ = basis->occupation(col);
        target.assign(occ.begin(), occ.end());
        // Depth-first walk over the Cartesian product of per-mode transitions.
        auto walk = [&](auto&& self, std::size_t depth, cplx amp) -> void {
            if (depth == locals.size()) {
                if (const auto row = basis->index_of(target))
                    trips.emplace_back(static_cast<int>(*row), static_cast<int>(col), amp);
                return;
            }
            const auto& l = locals[depth];
            const auto src = occ[l.mode];
            for (const auto& [to, v] : l.columns[src]) {
                target[l.mode] = static_cast<std::uint8_t>(to);
                self(self, depth + 1, amp * v);
            }
            target[l.mode] = src;
        };
        walk(walk, 0, cplx(1.0, 0.0));
    }
    SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(trips.begin(), trips.end());
    return SparseOperator(basis, std::move(m));
}

SparseOperator embed(const DenseMatrix& local_matrix, const std::string& label, const BasisPtr& basis) {
    return embed_product({{label, local_matrix}}, basis);
}

SparseOperator excitation_number(const BasisPtr& basis) {
    const auto dim = basis->dimension();
    std::vector<Entry> diag;
    for (std::size_t i = 0; i < dim; ++i)
        if (const int w = basis->weight(i); w != 0) diag.push_back({i, i, cplx(w, 0.0)});
    return SparseOperator::from_entries(basis, diag);
}

StateVector::StateVector(BasisPtr basis, DenseVector amplitudes)
    : basis_(std::move(basis)), psi_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(psi_.size()) != basis_->dimension())
        throw ShapeError("state length does not match basis dimension");
    if (std::abs(psi_.norm() - 1.0) > 1e-12) throw DomainError("state vector is not normalised");
}

StateVector StateVector::basis_state(BasisPtr basis, std::size_t index) {
    if (index >= basis->dimension()) throw LookupError("basis index out of range");
    DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(basis->dimension()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(basis), std::move(v));
}

DensityMatrix::DensityMatrix(BasisPtr basis, DenseMatrix rho) : basis_(std::move(basis)), rho_(std::move(rho)) {
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    if (rho_.rows() != d || rho_.cols() != d) throw ShapeError("density matrix shape does not match basis");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("density matrix is not Hermitian");
    if (std::abs(rho_.trace() - cplx(1.0, 0.0)) > 1e-12) throw DomainError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::unchecked(BasisPtr basis, DenseMatrix rho) {
    DensityMatrix out;
    out.basis_ = std::move(basis);
    out.rho_ = std::move(rho);
    return out;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.basis(), psi.amplitudes() * psi.amplitudes().adjoint());
}

cplx expectation(const SparseOperator& op, const StateVector& psi) {
    if (!op.basis()->same_as(*psi.basis())) throw IncompatibleBasisError("operator and state bases differ");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

cplx expectation(const SparseOperator& op, const DensityMatrix& rho) {
    if (!op.basis()->same_as(*rho.basis())) throw IncompatibleBasisError("operator and state bases differ");
    return (op.matrix() * rho.matrix()).trace();
}

namespace {

std::vector<Eigen::Index> index_map(const CompositeBasis& from, const CompositeBasis& to) {
    if (from.modes() != to.modes()) throw IncompatibleBasisError("bases declare different modes");
    std::vector<Eigen::Index> map(from.dimension(), -1);
    for (std::size_t i = 0; i < from.dimension(); ++i)
        if (const auto j = to.index_of(from.occupation(i))) map[i] = static_cast<Eigen::Index>(*j);
    return map;
}

}  // namespace

DenseVector lift_state(const DenseVector& psi, const CompositeBasis& from, const CompositeBasis& to) {
    const auto map = index_map(from, to);
    DenseVector out = DenseVector::Zero(static_cast<Eigen::Index>(to.dimension()));
    for (std::size_t i = 0; i < map.size(); ++i) {
        const auto a = psi(static_cast<Eigen::Index>(i));
        if (map[i] < 0) {
            if (a != cplx(0.0, 0.0)) throw LookupError("populated state missing from target basis");
            continue;
        }
        out(map[i]) = a;
    }
    return out;
}

DenseMatrix lift_density(const DenseMatrix& rho, const CompositeBasis& from, const CompositeBasis& to) {
    const auto map = index_map(from, to);
    const auto d = static_cast<Eigen::Index>(to.dimension());
    DenseMatrix out = DenseMatrix::Zero(d, d);
    for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j = 0; j < map.size(); ++j) {
            const auto v = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (map[i] < 0 || map[j] < 0) {
                if (v != cplx(0.0, 0.0)) throw LookupError("populated state missing from target basis");
                continue;
            }
            out(map[i], map[j]) = v;
        }
    return out;
}

}  // namespace cavityw
