#include <bagus/evaluation.hpp>

#include <algorithm>
#include <cmath>

namespace bagus {

void GraphStructure::normalize() {
    for (auto& [i, j] : edges) {
        if (i > j) {
            std::swap(i, j);
        }
        if (i == j) {
            throw ParameterError("graph: self-loop");
        }
        if (i < 0 || j >= p) {
            throw IndexError("graph: node index out of range");
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

bool GraphStructure::contains(Index i, Index j) const {
    if (i > j) {
        std::swap(i, j);
    }
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

GraphStructure support_graph(const SymMatrix& m, double tol) {
    GraphStructure g;
    g.p = m.dim();
    for (Index i = 0; i < g.p; ++i) {
        for (Index j = i + 1; j < g.p; ++j) {
            if (std::abs(m(i, j)) > tol) {
                g.edges.emplace_back(i, j);
            }
        }
    }
    return g;
}

ErrorNorms error_norms(const SymMatrix& theta_hat, const SymMatrix& theta0) {
    if (theta_hat.dim() != theta0.dim()) {
        throw ShapeError("error_norms: dimension mismatch");
    }
    const Matrix diff = theta_hat.dense() - theta0.dense();
    ErrorNorms out;
    out.fnorm = diff.norm();
    out.max_norm = max_abs(diff);
    out.spectral_err = spectral_norm(diff);
    return out;
}

Confusion confusion(const GraphStructure& est, const GraphStructure& truth) {
    if (est.p != truth.p) {
        throw ShapeError("confusion: graphs have different node counts");
    }
    Confusion c;
    const long long pairs = static_cast<long long>(truth.p) * (truth.p - 1) / 2;
    std::size_t a = 0;
    std::size_t b = 0;
    // Both edge lists are sorted; merge them.
    while (a < est.edges.size() || b < truth.edges.size()) {
        if (b == truth.edges.size() || (a < est.edges.size() && est.edges[a] < truth.edges[b])) {
            ++c.fp;
            ++a;
        } else if (a == est.edges.size() || truth.edges[b] < est.edges[a]) {
            ++c.fn;
            ++b;
        } else {
            ++c.tp;
            ++a;
            ++b;
        }
    }
    c.tn = pairs - c.tp - c.fp - c.fn;
    return c;
}

double mcc(const Confusion& c) {
    const double tp = static_cast<double>(c.tp);
    const double fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn);
    const double fn = static_cast<double>(c.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom == 0.0) {
        return 0.0;
    }
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

double sensitivity(const Confusion& c) {
    const long long d = c.tp + c.fn;
    return d == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double specificity(const Confusion& c) {
    const long long d = c.tn + c.fp;
    return d == 0 ? 0.0 : static_cast<double>(c.tn) / static_cast<double>(d);
}

MetricsReport evaluate(const SymMatrix& theta_hat, const GraphStructure& est, const SymMatrix& theta0) {
    const ErrorNorms norms = error_norms(theta_hat, theta0);
    const Confusion c = confusion(est, support_graph(theta0));
    MetricsReport r;
    r.fnorm = norms.fnorm;
    r.max_norm = norms.max_norm;
    r.spectral_err = norms.spectral_err;
    r.sensitivity = sensitivity(c);
    r.specificity = specificity(c);
    r.mcc = mcc(c);
    return r;
}

void ForecastTask::validate() const {
    const Index p = theta.dim();
    if (mu.size() != p) {
        throw ShapeError("forecast: mean and precision dimensions differ");
    }
    if (split < 1 || split >= p) {
        throw ParameterError("forecast: split must satisfy 1 <= k < p");
    }
}

namespace {

Matrix conditional_gain(const ForecastTask& task) {
    const Index p = task.theta.dim();
    const Index k = task.split;
    const Matrix& t = task.theta.dense();
    Eigen::LLT<Matrix> llt(t.bottomRightCorner(p - k, p - k));
    if (llt.info() != Eigen::Success) {
        throw InternalConsistencyError("forecast: Theta22 is not positive definite");
    }
    return llt.solve(t.bottomLeftCorner(p - k, k));
}

} // namespace

Vector forecast(const ForecastTask& task, const Eigen::Ref<const Vector>& z1) {
    task.validate();
    const Index p = task.theta.dim();
    const Index k = task.split;
    if (z1.size() != k) {
        throw ShapeError("forecast: observed block has the wrong length");
    }
    const Matrix gain = conditional_gain(task);
    return task.mu.tail(p - k) - gain * (z1 - task.mu.head(k));
}

Matrix forecast_rows(const ForecastTask& task, const Matrix& observed) {
    task.validate();
    const Index p = task.theta.dim();
    const Index k = task.split;
    if (observed.cols() != k) {
        throw ShapeError("forecast: observed block has the wrong width");
    }
    const Matrix gain = conditional_gain(task);
    const Matrix centered = observed.rowwise() - task.mu.head(k).transpose();
    Matrix out = -(centered * gain.transpose());
    out.rowwise() += task.mu.tail(p - k).transpose();
    return out;
}

Vector aafe(const Matrix& predictions, const Matrix& actuals) {
    if (predictions.rows() != actuals.rows() || predictions.cols() != actuals.cols()) {
        throw ShapeError("aafe: prediction and actual shapes differ");
    }
    if (predictions.rows() == 0) {
        throw ShapeError("aafe: no rows");
    }
    return (predictions - actuals).cwiseAbs().colwise().mean().transpose();
}

} // namespace bagus
