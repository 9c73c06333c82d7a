#pragma once

// Dense symmetric storage and the small set of linear-algebra kernels the
// estimator needs: column partitions, Cholesky inversion, the rank-two
// spectral bound for single column/row replacements, and sample covariance.
//
// Indexing is 0-based everywhere. A "column partition at j" treats column j as
// if it had been moved to the end of the matrix; nothing is physically
// permuted, the complement indices are carried alongside the view.

#include <bagus/errors.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bagus {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square matrix whose two triangles are bit-identical.
///
/// Both triangles are stored. Every mutating entry point writes (i,j) and (j,i)
/// together, and every constructor from arbitrary data mirrors the upper
/// triangle into the lower one, so `(*this)(i,j) == (*this)(j,i)` holds exactly.
class SymMatrix {
public:
    SymMatrix() = default;

    /// p×p zero matrix.
    explicit SymMatrix(Index p);

    static SymMatrix identity(Index p);
    static SymMatrix diagonal(const Vector& d);

    /// Validates squareness, finiteness and symmetry (|a_ij - a_ji| <= tol·max(1,|a_ij|)),
    /// then copies the upper triangle over the lower one.
    static SymMatrix from_dense(const Matrix& m, double tol = 0.0);

    /// Takes ownership of `m` and mirrors its upper triangle. No validation
    /// beyond squareness; for internal kernels that already produce symmetric data.
    static SymMatrix from_upper(Matrix m);

    Index dim() const noexcept { return m_.rows(); }
    bool empty() const noexcept { return m_.size() == 0; }

    double operator()(Index i, Index j) const { return m_(i, j); }
    double at(Index i, Index j) const;
    void set(Index i, Index j, double v);

    /// Replaces row and column j: off-diagonal entries (in complement order) and the diagonal.
    void set_column(Index j, const Eigen::Ref<const Vector>& off_diag, double diag);

    /// Overwrites the principal submatrix on `idx` with the upper triangle of `block`.
    void set_principal(const std::vector<Index>& idx, const Matrix& block);

    const Matrix& dense() const noexcept { return m_; }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
    }

private:
    Matrix m_;
};

/// Partition of a symmetric matrix around column `target`.
///
/// The view borrows the source matrix; it must not outlive it.
class ColumnPartition {
public:
    ColumnPartition(const Matrix& source, Index target);

    Index target() const noexcept { return target_; }
    Index dim() const noexcept { return source_->rows(); }
    const std::vector<Index>& rest() const noexcept { return rest_; }

    auto block11() const { return (*source_)(rest_, rest_); }
    auto vec12() const { return (*source_)(rest_, target_); }
    double scalar22() const { return (*source_)(target_, target_); }

private:
    const Matrix* source_;
    Index target_;
    std::vector<Index> rest_;
};

/// Indices 0..p-1 with j removed, in increasing order.
std::vector<Index> complement_indices(Index p, Index j);

ColumnPartition partition(const SymMatrix& m, Index j);

/// Writes (block11, vec12, scalar22) back at index `j` of a p×p matrix.
SymMatrix reassemble(const Matrix& block11, const Vector& vec12, double scalar22, Index j);

/// Observations as rows. `truth` carries the generating precision matrix for
/// simulated data.
struct Dataset {
    Matrix rows;
    std::optional<SymMatrix> truth;
    std::uint64_t seed = 0;
    std::string model;
    std::string generator;

    Index n() const noexcept { return rows.rows(); }
    Index p() const noexcept { return rows.cols(); }
};

/// Throws InvalidDataError when rows contain non-finite values, the shape is
/// empty, or the truth matrix does not match p.
void validate(const Dataset& data);

/// (1/n)·Σ YᵢYᵢᵀ. With `center`, column means are subtracted first.
SymMatrix sample_covariance(const Matrix& rows, bool center = false);
SymMatrix sample_covariance(const Dataset& data, bool center = false);

Vector column_means(const Matrix& rows);

/// Inverse of an SPD matrix via LLᵀ. Throws NotPositiveDefiniteError.
SymMatrix chol_inverse(const SymMatrix& m);

/// log det of an SPD matrix via LLᵀ. Throws NotPositiveDefiniteError.
double log_det_spd(const SymMatrix& m);

bool is_positive_definite(const SymMatrix& m);

/// Θ₁₁⁻¹ recovered from the partition of W = Θ⁻¹: W₁₁ − w₁₂w₁₂ᵀ/w₂₂.
SymMatrix inv11_from_w(const ColumnPartition& wpart);

/// ‖Δ‖₂ for the symmetric perturbation that changes the off-diagonal part of one
/// column/row from `old_col` to `new_col` and its diagonal from `old_diag` to
/// `new_diag`. Δ has rank ≤ 2 with nonzero eigenvalues (δ ± √(δ² + 4‖d‖²))/2.
double rank_two_spectral_bound(const Eigen::Ref<const Vector>& old_col,
                               const Eigen::Ref<const Vector>& new_col,
                               double old_diag, double new_diag);

/// Largest absolute eigenvalue.
double spectral_norm(const SymMatrix& m);
double spectral_norm(const Matrix& symmetric);

double min_eigenvalue(const SymMatrix& m);

double max_abs(const Matrix& m);

} // namespace bagus
