#include <bagus/matrix.hpp>

#include <cmath>
#include <sstream>

namespace bagus {

namespace {

void mirror_upper(Matrix& m) {
    const Index p = m.rows();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            m(j, i) = m(i, j);
        }
    }
}

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw ShapeError(os.str());
    }
}

} // namespace

SymMatrix::SymMatrix(Index p) : m_(Matrix::Zero(p, p)) {
    if (p < 0) {
        throw ShapeError("SymMatrix: negative dimension");
    }
}

SymMatrix SymMatrix::identity(Index p) {
    SymMatrix s(p);
    s.m_.diagonal().setOnes();
    return s;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
    SymMatrix s(d.size());
    s.m_.diagonal() = d;
    return s;
}

SymMatrix SymMatrix::from_dense(const Matrix& m, double tol) {
    require_square(m, "SymMatrix::from_dense");
    if (!m.allFinite()) {
        throw InvalidDataError("SymMatrix::from_dense: non-finite entry");
    }
    const Index p = m.rows();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) {
                std::ostringstream os;
                os << "SymMatrix::from_dense: entries (" << i << "," << j << ") and (" << j << ","
                   << i << ") differ: " << a << " vs " << b;
                throw InvalidDataError(os.str());
            }
        }
    }
    SymMatrix s;
    s.m_ = m;
    mirror_upper(s.m_);
    return s;
}

SymMatrix SymMatrix::from_upper(Matrix m) {
    require_square(m, "SymMatrix::from_upper");
    mirror_upper(m);
    SymMatrix s;
    s.m_ = std::move(m);
    return s;
}

double SymMatrix::at(Index i, Index j) const {
    if (i < 0 || j < 0 || i >= dim() || j >= dim()) {
        throw IndexError("SymMatrix::at: index out of range");
    }
    return m_(i, j);
}

void SymMatrix::set(Index i, Index j, double v) {
    if (i < 0 || j < 0 || i >= dim() || j >= dim()) {
        throw IndexError("SymMatrix::set: index out of range");
    }
    m_(i, j) = v;
    m_(j, i) = v;
}

void SymMatrix::set_column(Index j, const Eigen::Ref<const Vector>& off_diag, double diag) {
    const Index p = dim();
    if (j < 0 || j >= p) {
        throw IndexError("SymMatrix::set_column: index out of range");
    }
    if (off_diag.size() != p - 1) {
        throw ShapeError("SymMatrix::set_column: expected p-1 off-diagonal entries");
    }
    for (Index k = 0, r = 0; k < p; ++k) {
        if (k == j) {
            continue;
        }
        m_(k, j) = off_diag(r);
        m_(j, k) = off_diag(r);
        ++r;
    }
    m_(j, j) = diag;
}

void SymMatrix::set_principal(const std::vector<Index>& idx, const Matrix& block) {
    const auto q = static_cast<Index>(idx.size());
    if (block.rows() != q || block.cols() != q) {
        throw ShapeError("SymMatrix::set_principal: block size mismatch");
    }
    for (Index b = 0; b < q; ++b) {
        for (Index a = 0; a <= b; ++a) {
            const double v = block(a, b);
            m_(idx[a], idx[b]) = v;
            m_(idx[b], idx[a]) = v;
        }
    }
}

std::vector<Index> complement_indices(Index p, Index j) {
    std::vector<Index> rest;
    rest.reserve(static_cast<std::size_t>(p > 0 ? p - 1 : 0));
    for (Index k = 0; k < p; ++k) {
        if (k != j) {
            rest.push_back(k);
        }
    }
    return rest;
}

ColumnPartition::ColumnPartition(const Matrix& source, Index target)
    : source_(&source), target_(target) {
    require_square(source, "partition");
    if (target < 0 || target >= source.rows()) {
        std::ostringstream os;
        os << "partition: column " << target << " out of range for p=" << source.rows();
        throw IndexError(os.str());
    }
    rest_ = complement_indices(source.rows(), target);
}

ColumnPartition partition(const SymMatrix& m, Index j) {
    return ColumnPartition(m.dense(), j);
}

SymMatrix reassemble(const Matrix& block11, const Vector& vec12, double scalar22, Index j) {
    const Index p = block11.rows() + 1;
    if (block11.cols() != p - 1 || vec12.size() != p - 1) {
        throw ShapeError("reassemble: inconsistent block sizes");
    }
    if (j < 0 || j >= p) {
        throw IndexError("reassemble: target out of range");
    }
    const auto rest = complement_indices(p, j);
    Matrix out(p, p);
    out(rest, rest) = block11;
    out(rest, j) = vec12;
    out(j, rest) = vec12.transpose();
    out(j, j) = scalar22;
    return SymMatrix::from_upper(std::move(out));
}

void validate(const Dataset& data) {
    if (data.n() < 1 || data.p() < 1) {
        throw InvalidDataError("dataset: need at least one row and one column");
    }
    if (!data.rows.allFinite()) {
        throw InvalidDataError("dataset: non-finite value in observations");
    }
    if (data.truth && data.truth->dim() != data.p()) {
        throw InvalidDataError("dataset: truth dimension does not match column count");
    }
}

Vector column_means(const Matrix& rows) {
    if (rows.rows() < 1) {
        throw InvalidDataError("column_means: no observations");
    }
    return rows.colwise().mean().transpose();
}

SymMatrix sample_covariance(const Matrix& rows, bool center) {
    if (rows.rows() < 1 || rows.cols() < 1) {
        throw InvalidDataError("sample_covariance: empty data");
    }
    if (!rows.allFinite()) {
        throw InvalidDataError("sample_covariance: non-finite value in observations");
    }
    const double inv_n = 1.0 / static_cast<double>(rows.rows());
    if (center) {
        const Matrix centered = rows.rowwise() - rows.colwise().mean();
        Matrix s = (centered.transpose() * centered) * inv_n;
        return SymMatrix::from_upper(std::move(s));
    }
    Matrix s = (rows.transpose() * rows) * inv_n;
    return SymMatrix::from_upper(std::move(s));
}

SymMatrix sample_covariance(const Dataset& data, bool center) {
    return sample_covariance(data.rows, center);
}

namespace {

Eigen::LLT<Matrix> factor_spd(const SymMatrix& m, const char* what) {
    if (m.empty()) {
        throw ShapeError(std::string(what) + ": empty matrix");
    }
    Eigen::LLT<Matrix> llt(m.dense());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError(std::string(what) + ": matrix is not positive definite");
    }
    const auto& l = llt.matrixLLT();
    for (Index i = 0; i < m.dim(); ++i) {
        if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) {
            throw NotPositiveDefiniteError(std::string(what) + ": non-positive pivot");
        }
    }
    return llt;
}

} // namespace

SymMatrix chol_inverse(const SymMatrix& m) {
    const auto llt = factor_spd(m, "chol_inverse");
    Matrix inv = llt.solve(Matrix::Identity(m.dim(), m.dim()));
    // Average the triangles before mirroring so the result does not favour one.
    Matrix sym = 0.5 * (inv + inv.transpose());
    return SymMatrix::from_upper(std::move(sym));
}

double log_det_spd(const SymMatrix& m) {
    const auto llt = factor_spd(m, "log_det");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

bool is_positive_definite(const SymMatrix& m) {
    if (m.empty() || !m.dense().allFinite()) {
        return false;
    }
    Eigen::LLT<Matrix> llt(m.dense());
    if (llt.info() != Eigen::Success) {
        return false;
    }
    return (llt.matrixLLT().diagonal().array() > 0.0).all();
}

SymMatrix inv11_from_w(const ColumnPartition& wpart) {
    const double w22 = wpart.scalar22();
    if (!(w22 > 0.0)) {
        throw DegenerateError("inv11_from_w: diagonal entry w22 must be positive");
    }
    const Vector w12 = wpart.vec12();
    Matrix out = wpart.block11();
    out.noalias() -= (w12 * w12.transpose()) / w22;
    return SymMatrix::from_upper(std::move(out));
}

double rank_two_spectral_bound(const Eigen::Ref<const Vector>& old_col,
                               const Eigen::Ref<const Vector>& new_col,
                               double old_diag, double new_diag) {
    if (old_col.size() != new_col.size()) {
        throw ShapeError("rank_two_spectral_bound: column length mismatch");
    }
    const double d2 = (new_col - old_col).squaredNorm();
    const double delta = new_diag - old_diag;
    return 0.5 * (std::abs(delta) + std::sqrt(delta * delta + 4.0 * d2));
}

double spectral_norm(const Matrix& symmetric) {
    require_square(symmetric, "spectral_norm");
    if (symmetric.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("spectral_norm: eigenvalue solver failed");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const SymMatrix& m) { return spectral_norm(m.dense()); }

double min_eigenvalue(const SymMatrix& m) {
    if (m.empty()) {
        throw ShapeError("min_eigenvalue: empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.dense(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("min_eigenvalue: eigenvalue solver failed");
    }
    return es.eigenvalues().minCoeff();
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace bagus
