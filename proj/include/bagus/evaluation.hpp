#pragma once

#include <bagus/matrix.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace bagus {

/// Undirected graph over p nodes; edges stored as (i,j) with i<j, sorted.
struct GraphStructure {
    Index p = 0;
    std::vector<std::pair<Index, Index>> edges;

    /// Sorts, removes duplicates, and rejects self-loops or out-of-range nodes.
    void normalize();
    bool contains(Index i, Index j) const;

    friend bool operator==(const GraphStructure&, const GraphStructure&) = default;
};

/// Edges at the nonzero off-diagonal entries (|m_ij| > tol) of m.
GraphStructure support_graph(const SymMatrix& m, double tol = 0.0);

struct ErrorNorms {
    double fnorm = 0.0;
    double max_norm = 0.0;
    double spectral_err = 0.0;
};

/// Frobenius, entrywise-max and spectral norms of Θ̂ − Θ⁰.
ErrorNorms error_norms(const SymMatrix& theta_hat, const SymMatrix& theta0);

struct Confusion {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;
};

/// Counts over the p(p−1)/2 unordered pairs.
Confusion confusion(const GraphStructure& est, const GraphStructure& truth);

/// Matthews correlation; 0 when any factor of the denominator is 0.
double mcc(const Confusion& c);
double sensitivity(const Confusion& c);
double specificity(const Confusion& c);

struct MetricsReport {
    double fnorm = 0.0;
    double max_norm = 0.0;
    double spectral_err = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double mcc = 0.0;
    std::optional<double> auc;
};

MetricsReport evaluate(const SymMatrix& theta_hat, const GraphStructure& est, const SymMatrix& theta0);

/// Conditional-mean predictor for the last p−k coordinates given the first k.
struct ForecastTask {
    Vector mu;
    SymMatrix theta;
    Index split = 0;

    void validate() const;
};

/// u₂ − Θ₂₂⁻¹Θ₂₁(z₁ − u₁), with Θ₂₂ applied through a Cholesky solve.
Vector forecast(const ForecastTask& task, const Eigen::Ref<const Vector>& z1);

/// Forecasts every row of `observed` (n×k); returns n×(p−k).
Matrix forecast_rows(const ForecastTask& task, const Matrix& observed);

/// Per-column mean absolute error across rows.
Vector aafe(const Matrix& predictions, const Matrix& actuals);

} // namespace bagus
