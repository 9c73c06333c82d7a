#include <bagus/estimator.hpp>

#include <cmath>
#include <sstream>

namespace bagus {

namespace {

double soft_threshold(double z, double lambda) {
    if (z > lambda) {
        return z - lambda;
    }
    if (z < -lambda) {
        return z + lambda;
    }
    return 0.0;
}

void require_covariance(const SymMatrix& s, Index n) {
    if (s.empty()) {
        throw ShapeError("fit: empty covariance matrix");
    }
    if (!s.dense().allFinite()) {
        throw InvalidDataError("fit: covariance contains non-finite values");
    }
    if (n < 1) {
        throw ParameterError("fit: sample count must be at least 1");
    }
}

} // namespace

FitState FitState::identity(Index p) {
    FitState st;
    st.theta = SymMatrix::identity(p);
    st.w = SymMatrix::identity(p);
    st.pmat = SymMatrix::from_upper(Matrix::Constant(p, p, 0.5));
    st.spectral_estimate = 1.0;
    return st;
}

FitState FitState::from_theta(const SymMatrix& theta) {
    FitState st;
    st.theta = theta;
    st.w = chol_inverse(theta);
    st.pmat = SymMatrix::from_upper(Matrix::Constant(theta.dim(), theta.dim(), 0.5));
    st.spectral_estimate = spectral_norm(theta);
    return st;
}

SymMatrix e_step(const SymMatrix& theta, const Hyperparameters& h) {
    const Index p = theta.dim();
    Matrix out(p, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            out(i, j) = inclusion_prob(theta(i, j), h);
        }
        out(j, j) = 1.0;
    }
    return SymMatrix::from_upper(std::move(out));
}

Vector solve_theta12(const Eigen::Ref<const Vector>& s12, double w22, const SymMatrix& inv11,
                     const Eigen::Ref<const Vector>& p12, const Eigen::Ref<const Vector>& theta12_init,
                     Index n, const Hyperparameters& h) {
    const Index q = s12.size();
    if (inv11.dim() != q || p12.size() != q || theta12_init.size() != q) {
        throw ShapeError("solve_theta12: inconsistent lengths");
    }
    if (!(w22 > 0.0)) {
        throw DegenerateError("solve_theta12: w22 must be positive");
    }
    const double nd = static_cast<double>(n);
    const Matrix& a = inv11.dense();

    Vector lambda(q);
    for (Index k = 0; k < q; ++k) {
        if (!(p12(k) > 0.0 && p12(k) < 1.0)) {
            throw ParameterError("solve_theta12: inclusion probabilities must lie in (0,1)");
        }
        lambda(k) = weighted_penalty(p12(k), h);
        if (!(a(k, k) > 0.0)) {
            throw DegenerateError("solve_theta12: non-positive diagonal in inv11");
        }
    }

    Vector theta = theta12_init;
    // g = inv11·θ, kept in sync as coordinates move.
    Vector g = a * theta;
    for (int sweep = 0; sweep < h.max_inner; ++sweep) {
        double max_change = 0.0;
        for (Index k = 0; k < q; ++k) {
            const double akk = a(k, k);
            const double curvature = nd * w22 * akk;
            const double z = -(nd * s12(k) + nd * w22 * (g(k) - akk * theta(k)));
            const double next = soft_threshold(z, lambda(k)) / curvature;
            const double step = next - theta(k);
            if (step != 0.0) {
                g.noalias() += a.col(k) * step;
                theta(k) = next;
                max_change = std::max(max_change, std::abs(step));
            }
        }
        if (max_change < h.inner_tol) {
            break;
        }
    }
    return theta;
}

double resolve_cap(const Hyperparameters& h, Index n) {
    return h.B ? *h.B : 0.99 * convexity_cap(n, h.v0);
}

ColumnOutcome update_column(FitState& state, Index j, const SymMatrix& s, Index n,
                            const Hyperparameters& h, double cap) {
    const Index p = state.theta.dim();
    if (j < 0 || j >= p) {
        throw IndexError("update_column: column index out of range");
    }
    if (s.dim() != p) {
        throw ShapeError("update_column: covariance dimension mismatch");
    }

    // Θ₁₁⁻¹ must come from the W that is consistent with the current Θ, so it is
    // formed before w₂₂ is reset.
    const ColumnPartition wpart(state.w.dense(), j);
    const auto& rest = wpart.rest();
    const SymMatrix inv11 = inv11_from_w(wpart);

    const double w22 = s(j, j) + 2.0 * h.tau / static_cast<double>(n);
    if (!(w22 > 0.0)) {
        std::ostringstream os;
        os << "update_column: column " << j << " has zero variance and tau = 0";
        throw DegenerateError(os.str());
    }

    const Matrix& theta = state.theta.dense();
    const Vector old12 = theta(rest, j);
    const double old22 = theta(j, j);
    const Vector s12 = s.dense()(rest, j);
    const Vector p12 = state.pmat.dense()(rest, j);

    Vector new12 = solve_theta12(s12, w22, inv11, p12, old12, n, h);
    Vector g = inv11.dense() * new12;
    double new22 = 1.0 / w22 + new12.dot(g);

    double estimate = state.spectral_estimate;
    auto admissible = [&](const Vector& col, double diag) {
        if (h.mode == SpectralMode::maxelem) {
            const double m = std::max(col.size() ? col.cwiseAbs().maxCoeff() : 0.0, std::abs(diag));
            if (m > cap) {
                return false;
            }
            estimate = std::max(state.spectral_estimate, m);
            return true;
        }
        const double bound = state.spectral_estimate + rank_two_spectral_bound(old12, col, old22, diag);
        if (bound <= cap) {
            estimate = bound;
            return true;
        }
        // The candidate is PD (its Schur complement is 1/w22), so ‖Θ‖₂ ≤ B
        // exactly when B·I − Θ admits a Cholesky factorization.
        Matrix gap = -theta;
        gap(rest, j) = -col;
        gap(j, rest) = -col.transpose();
        gap(j, j) = -diag;
        gap.diagonal().array() += cap;
        Eigen::LLT<Matrix> llt(gap);
        if (llt.info() == Eigen::Success) {
            estimate = cap;
            return true;
        }
        return false;
    };

    ColumnOutcome outcome = ColumnOutcome::accepted;
    if (!admissible(new12, new22)) {
        outcome = ColumnOutcome::reverted;
        new12 = old12;
        g = inv11.dense() * new12;
        new22 = 1.0 / w22 + new12.dot(g);
        if (!admissible(new12, new22)) {
            return ColumnOutcome::skipped;
        }
    }

    const double schur = new22 - new12.dot(g);
    if (!(schur > 0.0) || !std::isfinite(new22)) {
        throw InternalConsistencyError("update_column: Schur complement lost positivity");
    }

    state.spectral_estimate = estimate;
    state.theta.set_column(j, new12, new22);

    Matrix w11 = inv11.dense();
    w11.noalias() += w22 * (g * g.transpose());
    state.w.set_principal(rest, w11);
    state.w.set_column(j, -w22 * g, w22);
    return outcome;
}

FitResult fit(const SymMatrix& s, Index n, const Hyperparameters& h, const SymMatrix* init,
              const FitOptions& options) {
    h.validate();
    require_covariance(s, n);
    const Index p = s.dim();
    const double cap = resolve_cap(h, n);

    FitState state;
    if (init != nullptr) {
        if (init->dim() != p) {
            throw ShapeError("fit: initial value has the wrong dimension");
        }
        if (!is_positive_definite(*init)) {
            throw NotPositiveDefiniteError("fit: initial value is not positive definite");
        }
        state = FitState::from_theta(*init);
    } else {
        state = FitState::identity(p);
    }
    if (h.mode == SpectralMode::maxelem) {
        state.spectral_estimate = max_abs(state.theta.dense());
    }
    if (state.spectral_estimate > cap) {
        std::ostringstream os;
        os << "fit: initial value violates the spectral cap (" << state.spectral_estimate << " > "
           << cap << ")";
        throw ParameterError(os.str());
    }

    FitResult result;
    result.hyper = h;
    result.hyper.B = cap;
    result.convex_regime = cap < convexity_cap(n, h.v0);

    state.objective_trace.push_back(objective(state.theta, s, n, h));

    for (int sweep = 0; sweep < h.max_outer; ++sweep) {
        state.pmat = e_step(state.theta, h);
        const Matrix previous = state.theta.dense();
        if (h.mode == SpectralMode::spectral) {
            state.spectral_estimate = spectral_norm(state.theta);
        } else {
            state.spectral_estimate = max_abs(state.theta.dense());
        }

        for (Index j = 0; j < p; ++j) {
            switch (update_column(state, j, s, n, h, cap)) {
            case ColumnOutcome::accepted:
                break;
            case ColumnOutcome::reverted:
                ++result.reverted_columns;
                break;
            case ColumnOutcome::skipped:
                ++result.skipped_columns;
                break;
            }
        }
        ++state.iter;

        double value = 0.0;
        try {
            value = objective(state.theta, s, n, h);
        } catch (const NotPositiveDefiniteError&) {
            throw InternalConsistencyError("fit: estimate lost positive definiteness");
        }
        if (!std::isfinite(value)) {
            throw DivergenceError("fit: objective is not finite");
        }
        state.objective_trace.push_back(value);
        if (options.on_sweep) {
            options.on_sweep(state);
        }

        if (max_abs(state.theta.dense() - previous) < h.outer_tol) {
            result.converged = true;
            break;
        }
    }

    result.sweeps = state.iter;
    result.final_objective = state.objective_trace.back();
    result.objective_trace = std::move(state.objective_trace);
    result.pmat = e_step(state.theta, h);
    result.kkt_residual = kkt_residual(state.theta, s, n, h);
    result.theta_hat = std::move(state.theta);
    return result;
}

double kkt_residual(const SymMatrix& theta, const SymMatrix& s, Index n, const Hyperparameters& h) {
    if (theta.dim() != s.dim()) {
        throw ShapeError("kkt_residual: dimension mismatch");
    }
    const SymMatrix w = chol_inverse(theta);
    const double half_n = 0.5 * static_cast<double>(n);
    const double half_lambda0 = 0.5 * subgradient_interval(h).second;
    const Index p = theta.dim();
    double worst = 0.0;
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i <= j; ++i) {
            const double smooth = half_n * (s(i, j) - w(i, j));
            double violation = 0.0;
            if (i == j) {
                violation = std::abs(smooth + h.tau);
            } else if (theta(i, j) != 0.0) {
                violation = std::abs(smooth + 0.5 * pen_ss_grad(theta(i, j), h));
            } else {
                violation = std::max(0.0, std::abs(smooth) - half_lambda0);
            }
            worst = std::max(worst, violation);
        }
    }
    return worst / static_cast<double>(n);
}

} // namespace bagus
