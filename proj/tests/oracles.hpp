#pragma once

// Reference computations that share no code path with the library routines
// they check. Used by the unit tests and by the acceptance binary.

#include "support.hpp"

#include <bagus/estimator.hpp>
#include <bagus/penalty.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace bagus::testing {

/// Step for the fourth-order stencils: a fraction of the curvature scale v₀
/// near the kink, of |θ| far from it, and never more than |θ|/4 so the
/// stencil stays on one side of 0.
inline double fd_step(double theta, const Hyperparameters& h, double fraction) {
    const double a = std::abs(theta);
    return std::min(fraction * (a > 10.0 * h.v0 ? a : h.v0), a / 4.0);
}

inline double fd_grad(double theta, const Hyperparameters& h) {
    const double s = fd_step(theta, h, 0.002);
    auto f = [&](double t) { return pen_ss(t, h); };
    return (f(theta - 2 * s) - 8 * f(theta - s) + 8 * f(theta + s) - f(theta + 2 * s)) / (12 * s);
}

inline double fd_hess(double theta, const Hyperparameters& h) {
    const double s = fd_step(theta, h, 0.01);
    auto f = [&](double t) { return pen_ss(t, h); };
    return (-f(theta + 2 * s) + 16 * f(theta + s) - 30 * f(theta) + 16 * f(theta - s) - f(theta - 2 * s)) /
           (12 * s * s);
}

/// Second-order central differences, as used in the single-point examples.
inline double fd_grad_simple(double theta, const Hyperparameters& h, double step) {
    return (pen_ss(theta + step, h) - pen_ss(theta - step, h)) / (2 * step);
}

inline double fd_hess_simple(double theta, const Hyperparameters& h, double step) {
    return (pen_ss(theta + step, h) - 2 * pen_ss(theta, h) + pen_ss(theta - step, h)) / (step * step);
}

/// The θ grid {±10^k·v₀ : k = −2..3}.
inline std::vector<double> derivative_grid(double v0) {
    std::vector<double> out;
    for (int k = -2; k <= 3; ++k) {
        const double t = std::pow(10.0, k) * v0;
        out.push_back(t);
        out.push_back(-t);
    }
    return out;
}

inline Hyperparameters random_penalty_hyper(std::mt19937_64& rng) {
    Hyperparameters h;
    h.v0 = std::exp(uniform(rng, std::log(0.01), std::log(0.5)));
    h.v1 = h.v0 * uniform(rng, 1.5, 20.0);
    h.eta = uniform(rng, 0.1, 0.9);
    h.tau = h.v0;
    return h;
}

/// Long-double evaluation of the two-component mixture, no log-sum-exp.
inline long double pen_ss_extended(long double theta, long double eta, long double v0, long double v1) {
    const long double a = std::fabs(theta);
    return -std::log(eta / (2 * v1) * std::exp(-a / v1) + (1 - eta) / (2 * v0) * std::exp(-a / v0));
}

struct FitInstance {
    SymMatrix s;
    Index n = 0;
    Hyperparameters h;
};

/// Random SPD sample covariance from n draws of a correlated Gaussian, and
/// hyperparameters with an explicit cap B below √(2nv₀).
inline FitInstance random_fit_instance(std::mt19937_64& rng, Index p) {
    FitInstance inst;
    inst.n = static_cast<Index>(uniform(rng, 100.0, 300.0));
    Matrix mix = (0.3 / std::sqrt(static_cast<double>(p))) * random_matrix(rng, p, p);
    mix.diagonal().array() += 1.0;
    const Matrix y = random_matrix(rng, inst.n, p) * mix;
    inst.s = SymMatrix::from_upper(y.transpose() * y / static_cast<double>(inst.n));
    inst.h.v0 = uniform(rng, 0.15, 0.5);
    inst.h.v1 = inst.h.v0 * uniform(rng, 3.0, 10.0);
    inst.h.eta = uniform(rng, 0.2, 0.8);
    inst.h.tau = inst.h.v0 * uniform(rng, 0.5, 2.0);
    inst.h.B = uniform(rng, 0.8, 0.99) * convexity_cap(inst.n, inst.h.v0);
    return inst;
}

/// Direct minimizer of objective() for small p by proximal gradient descent.
///
/// The objective splits into λ₀Σ_{i<j}|θ_ij| plus a C¹ remainder (pen_ss minus
/// its kink). The remainder's gradient is taken by central differences of
/// objective() itself; steps use Armijo backtracking and reject points that
/// are not positive definite or leave the ball ‖Θ‖₂ ≤ radius.
struct ProxResult {
    Matrix theta;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline ProxResult prox_minimize(const SymMatrix& s, Index n, const Hyperparameters& h, double radius,
                                const Matrix& start, double tol = 1e-7, int max_iter = 200000) {
    const Index p = s.dim();
    const double lambda0 = subgradient_interval(h).second;
    auto l1 = [&](const Matrix& t) {
        double acc = 0.0;
        for (Index j = 0; j < p; ++j) {
            for (Index i = 0; i < j; ++i) {
                acc += std::abs(t(i, j));
            }
        }
        return lambda0 * acc;
    };
    auto total = [&](const Matrix& t) {
        const SymMatrix sym = SymMatrix::from_upper(t);
        if (!is_positive_definite(sym)) {
            return std::numeric_limits<double>::infinity();
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym.dense(), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > radius) {
            return std::numeric_limits<double>::infinity();
        }
        return objective(sym, s, n, h);
    };
    auto smooth = [&](const Matrix& t) { return total(t) - l1(t); };

    // Coordinates: upper triangle including the diagonal, each off-diagonal
    // coordinate moving both mirrored entries.
    auto gradient = [&](const Matrix& t) {
        Matrix g = Matrix::Zero(p, p);
        const double eps = 1e-7;
        for (Index j = 0; j < p; ++j) {
            for (Index i = 0; i <= j; ++i) {
                Matrix plus = t;
                Matrix minus = t;
                plus(i, j) += eps;
                minus(i, j) -= eps;
                if (i != j) {
                    plus(j, i) += eps;
                    minus(j, i) -= eps;
                }
                g(i, j) = (smooth(plus) - smooth(minus)) / (2 * eps);
                g(j, i) = g(i, j);
            }
        }
        return g;
    };
    auto prox = [&](const Matrix& t, double step) {
        Matrix out = t;
        for (Index j = 0; j < p; ++j) {
            for (Index i = 0; i < j; ++i) {
                const double v = t(i, j);
                const double shrink = step * lambda0;
                const double r = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
                out(i, j) = r;
                out(j, i) = r;
            }
        }
        return out;
    };

    ProxResult res;
    res.theta = start;
    double f = smooth(res.theta);
    double step = 1e-2 / static_cast<double>(n);
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        const Matrix g = gradient(res.theta);
        Matrix cand;
        double fc = 0.0;
        step *= 2.0;
        while (true) {
            Matrix raw = res.theta - step * g;
            cand = prox(raw, step);
            fc = smooth(cand);
            const Matrix d = cand - res.theta;
            double lin = 0.0;
            double sq = 0.0;
            for (Index j = 0; j < p; ++j) {
                for (Index i = 0; i <= j; ++i) {
                    lin += g(i, j) * d(i, j);
                    sq += d(i, j) * d(i, j);
                }
            }
            if (std::isfinite(fc) && fc <= f + lin + sq / (2 * step) + 1e-13) {
                break;
            }
            step *= 0.5;
            if (step < 1e-20) {
                res.value = total(res.theta);
                return res;
            }
        }
        const double change = max_abs(cand - res.theta);
        res.theta = cand;
        f = fc;
        // Gradient-mapping norm, relative to the n-scaled likelihood.
        if (change / step < tol * static_cast<double>(n)) {
            res.converged = true;
            break;
        }
    }
    res.value = total(res.theta);
    return res;
}

} // namespace bagus::testing
