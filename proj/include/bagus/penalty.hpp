#pragma once

#include <bagus/matrix.hpp>

#include <optional>
#include <string>
#include <utility>

namespace bagus {

/// How the spectral-norm cap ‖Θ‖₂ ≤ B is enforced during column updates.
enum class SpectralMode {
    spectral, ///< incremental rank-two bound, exact recompute on violation
    maxelem,  ///< proxy: cap on the largest absolute entry of Θ
};

std::string to_string(SpectralMode mode);
SpectralMode spectral_mode_from_string(const std::string& s);

/// Prior scales and solver controls for one fit.
struct Hyperparameters {
    double v0 = 0.0;  ///< spike scale
    double v1 = 0.0;  ///< slab scale, v1 > v0
    double eta = 0.5; ///< prior slab weight
    double tau = 0.0; ///< rate of the exponential prior on the diagonal
    /// Spectral cap. Unset means 0.99·convexity_cap(n, v0), resolved by fit().
    std::optional<double> B;
    double inner_tol = 1e-6;
    double outer_tol = 1e-4;
    int max_inner = 100;
    int max_outer = 100;
    SpectralMode mode = SpectralMode::spectral;

    /// Throws ParameterError on any domain violation.
    void validate() const;
};

/// Spike-and-slab Lasso penalty: −log[(η/2v₁)e^{−|θ|/v₁} + ((1−η)/2v₀)e^{−|θ|/v₀}].
double pen_ss(double theta, const Hyperparameters& h);

/// Log-odds that θ was drawn from the slab component.
double slab_log_odds(double theta, const Hyperparameters& h);

/// Logistic function evaluated without overflow in either tail.
double stable_logistic(double x);

/// d pen_ss / dθ for θ ≠ 0: sign(θ)·[w/v₁ + (1−w)/v₀], w the slab weight at θ.
/// Throws ContractViolation at θ = 0; use subgradient_interval there.
double pen_ss_grad(double theta, const Hyperparameters& h);

/// Subdifferential of pen_ss at zero: [−λ(0), λ(0)].
std::pair<double, double> subgradient_interval(const Hyperparameters& h);

/// Second derivative for θ ≠ 0: −(1/v₀ − 1/v₁)²·w(1−w).
/// Its magnitude never exceeds (1/v₀ − 1/v₁)²/4.
double pen_ss_hess(double theta, const Hyperparameters& h);

/// Posterior probability that θ belongs to the slab, clamped to the open
/// interval (0,1).
double inclusion_prob(double theta, const Hyperparameters& h);

/// Adaptive L1 weight used by the M-step for an entry with inclusion probability p.
inline double weighted_penalty(double p, const Hyperparameters& h) {
    return p / h.v1 + (1.0 - p) / h.v0;
}

/// Negative log posterior up to a constant:
/// (n/2)(tr(SΘ) − log det Θ) + Σ_{i<j} pen_ss(θ_ij) + τ Σ_i θ_ii.
double objective(const SymMatrix& theta, const SymMatrix& s, Index n, const Hyperparameters& h);

/// √(2·n·v₀).
double convexity_cap(Index n, double v0);

} // namespace bagus
