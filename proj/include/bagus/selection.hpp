#pragma once

#include <bagus/estimator.hpp>
#include <bagus/evaluation.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bagus {

/// Entries with |θ̂_ij| above this count as selected in the BIC edge term.
inline constexpr double kBicZeroTol = 1e-8;

/// Default cut-off on inclusion probabilities.
inline constexpr double kDefaultThreshold = 0.5;

/// n(tr(SΘ̂) − log det Θ̂) + log(n)·#{i<j : |θ̂_ij| > kBicZeroTol}.
double bic(const SymMatrix& theta_hat, const SymMatrix& s, Index n);
double bic(const FitResult& fit, const SymMatrix& s, Index n);

/// Number of off-diagonal pairs counted by bic().
Index count_edges(const SymMatrix& theta_hat);

/// 4×4 grid: v₀ = τ ∈ (0.4, 2, 4, 20)·√(1/(n log p)), v₁ = v₀·(1.5, 3, 5, 10), η = 0.5.
/// Ordered by v₀ first, then by the v₁ multiplier.
std::vector<Hyperparameters> default_grid(Index n, Index p);

struct TuneOptions {
    bool center = false;
    int jobs = 1;
};

struct TuneReport {
    std::vector<Hyperparameters> grid;
    /// BIC per grid point; +inf where the fit failed.
    std::vector<double> scores;
    std::vector<Index> edge_counts;
    /// Empty string for points that fit successfully.
    std::vector<std::string> failures;
    std::size_t best_index = 0;
    FitResult best_fit;
    /// All fits, in grid order; failed points hold a default FitResult.
    std::vector<FitResult> fits;
};

/// Fits every grid point and keeps the lowest BIC; ties go to fewer edges,
/// then to the lower grid index. Throws TuningFailedError if no point fits.
TuneReport tune(const SymMatrix& s, Index n, const std::vector<Hyperparameters>& grid,
                const TuneOptions& options = {});
TuneReport tune(const Dataset& data, const std::vector<Hyperparameters>& grid,
                const TuneOptions& options = {});

/// Edges with p_ij ≥ t, for t ∈ (0,1).
GraphStructure threshold_graph(const SymMatrix& pmat, double t = kDefaultThreshold);

struct RocCurve {
    /// (fpr, tpr) pairs from (0,0) to (1,1), non-decreasing in both coordinates.
    std::vector<std::pair<double, double>> points;
    /// Trapezoid area over every distinct threshold (not only the reported points).
    double auc = 0.0;
};

/// Sweeps the threshold over the distinct off-diagonal values of pmat. When
/// there are more than num_points of them, an evenly spaced subset is
/// reported; the endpoints (0,0) and (1,1) are always included.
RocCurve roc_sweep(const SymMatrix& pmat, const GraphStructure& truth, std::size_t num_points);

} // namespace bagus
