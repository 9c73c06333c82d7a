#pragma once

// EM fit of a sparse precision matrix under the spike-and-slab Lasso prior.
//
// Each outer sweep runs one E-step (inclusion probabilities from the current
// Θ) followed by one pass over all columns. A column update holds the rest of
// Θ fixed, solves the weighted-L1 stationary equation for the off-diagonal part
// by cyclic coordinate descent, sets the diagonal from the Schur complement,
// and refreshes W = Θ⁻¹ with the partitioned-inverse identities so that no
// O(p³) inversion is needed inside the sweep.

#include <bagus/matrix.hpp>
#include <bagus/penalty.hpp>

#include <functional>
#include <vector>

namespace bagus {

/// Working state of a fit. Both `theta` and `w` keep exactly symmetric storage;
/// between column updates W·Θ = I holds to rounding.
struct FitState {
    SymMatrix theta;
    SymMatrix w;
    SymMatrix pmat;
    int iter = 0;
    std::vector<double> objective_trace;
    /// Upper bound on ‖Θ‖₂ (spectral mode) or on max |θ_ij| (maxelem mode).
    double spectral_estimate = 0.0;

    /// Θ = W = I, P = 0.5 off the diagonal.
    static FitState identity(Index p);
    /// Starts from a given SPD Θ; W is its Cholesky inverse.
    static FitState from_theta(const SymMatrix& theta);
};

enum class ColumnOutcome {
    accepted, ///< new θ₁₂ kept
    reverted, ///< θ₁₂ restored from before the update, θ₂₂ refreshed
    skipped,  ///< column left untouched; even the reverted candidate broke the cap
};

struct FitResult {
    SymMatrix theta_hat;
    SymMatrix pmat;
    bool converged = false;
    int sweeps = 0;
    double final_objective = 0.0;
    /// Hyperparameters with B resolved.
    Hyperparameters hyper;
    double kkt_residual = 0.0;
    std::vector<double> objective_trace;
    /// False when B ≥ √(2nv₀); the fit still runs but without the convexity guarantee.
    bool convex_regime = true;
    int reverted_columns = 0;
    int skipped_columns = 0;
};

/// Inclusion probabilities for every off-diagonal entry; diagonal set to 1.
SymMatrix e_step(const SymMatrix& theta, const Hyperparameters& h);

/// Cyclic coordinate descent for the off-diagonal column θ₁₂ of one update.
///
/// Minimizes n·s₁₂ᵀθ + (n/2)·w₂₂·θᵀ·inv11·θ + Σ λ_k|θ_k| with
/// λ_k = p₁₂_k/v₁ + (1−p₁₂_k)/v₀; each coordinate step is a soft threshold.
/// Stops when the largest coordinate change of a sweep drops below h.inner_tol
/// or after h.max_inner sweeps.
Vector solve_theta12(const Eigen::Ref<const Vector>& s12, double w22, const SymMatrix& inv11,
                     const Eigen::Ref<const Vector>& p12, const Eigen::Ref<const Vector>& theta12_init,
                     Index n, const Hyperparameters& h);

/// One column update of Θ and W at index j. `cap` is the resolved spectral cap B.
ColumnOutcome update_column(FitState& state, Index j, const SymMatrix& s, Index n,
                            const Hyperparameters& h, double cap);

/// Resolved cap: h.B if set, else 0.99·√(2nv₀).
double resolve_cap(const Hyperparameters& h, Index n);

struct FitOptions {
    /// Called after every completed sweep with the state at the sweep boundary.
    std::function<void(const FitState&)> on_sweep;
};

/// Runs the EM iteration from Θ = W = I (or from `init`).
FitResult fit(const SymMatrix& s, Index n, const Hyperparameters& h,
              const SymMatrix* init = nullptr, const FitOptions& options = {});

/// Largest violation of 0 ∈ ∂L(Θ), divided by n. Zero off-diagonal entries are
/// measured against the subgradient interval.
double kkt_residual(const SymMatrix& theta, const SymMatrix& s, Index n, const Hyperparameters& h);

} // namespace bagus
