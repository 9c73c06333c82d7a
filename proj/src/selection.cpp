#include <bagus/parallel.hpp>
#include <bagus/selection.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bagus {

Index count_edges(const SymMatrix& theta_hat) {
    Index count = 0;
    const Index p = theta_hat.dim();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            if (std::abs(theta_hat(i, j)) > kBicZeroTol) {
                ++count;
            }
        }
    }
    return count;
}

double bic(const SymMatrix& theta_hat, const SymMatrix& s, Index n) {
    if (theta_hat.dim() != s.dim()) {
        throw ShapeError("bic: dimension mismatch");
    }
    const double nd = static_cast<double>(n);
    const double trace = theta_hat.dense().cwiseProduct(s.dense()).sum();
    const double logdet = log_det_spd(theta_hat);
    return nd * (trace - logdet) + std::log(nd) * static_cast<double>(count_edges(theta_hat));
}

double bic(const FitResult& fit, const SymMatrix& s, Index n) { return bic(fit.theta_hat, s, n); }

std::vector<Hyperparameters> default_grid(Index n, Index p) {
    if (n < 2 || p < 2) {
        throw ParameterError("default_grid: need n >= 2 and p >= 2");
    }
    const double base = std::sqrt(1.0 / (static_cast<double>(n) * std::log(static_cast<double>(p))));
    constexpr double v0_factors[] = {0.4, 2.0, 4.0, 20.0};
    constexpr double v1_multipliers[] = {1.5, 3.0, 5.0, 10.0};
    std::vector<Hyperparameters> grid;
    grid.reserve(16);
    for (double f : v0_factors) {
        for (double m : v1_multipliers) {
            Hyperparameters h;
            h.v0 = f * base;
            h.v1 = h.v0 * m;
            h.eta = 0.5;
            h.tau = h.v0;
            grid.push_back(h);
        }
    }
    return grid;
}

TuneReport tune(const SymMatrix& s, Index n, const std::vector<Hyperparameters>& grid,
                const TuneOptions& options) {
    if (grid.empty()) {
        throw ParameterError("tune: empty grid");
    }
    const std::size_t m = grid.size();
    TuneReport report;
    report.grid = grid;
    report.scores.assign(m, std::numeric_limits<double>::infinity());
    report.edge_counts.assign(m, 0);
    report.failures.assign(m, std::string());
    report.fits.resize(m);

    parallel_for(static_cast<std::ptrdiff_t>(m), options.jobs, [&](std::ptrdiff_t i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            FitResult f = fit(s, n, grid[k]);
            report.scores[k] = bic(f, s, n);
            report.edge_counts[k] = count_edges(f.theta_hat);
            report.fits[k] = std::move(f);
        } catch (const std::exception& e) {
            report.failures[k] = e.what();
        }
    });

    bool found = false;
    for (std::size_t k = 0; k < m; ++k) {
        if (!report.failures[k].empty() || !std::isfinite(report.scores[k])) {
            continue;
        }
        if (!found) {
            report.best_index = k;
            found = true;
            continue;
        }
        const std::size_t b = report.best_index;
        const bool better = report.scores[k] < report.scores[b] ||
                            (report.scores[k] == report.scores[b] &&
                             report.edge_counts[k] < report.edge_counts[b]);
        if (better) {
            report.best_index = k;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "tune: all " << m << " grid points failed";
        for (std::size_t k = 0; k < m; ++k) {
            os << "\n  [" << k << "] " << report.failures[k];
        }
        throw TuningFailedError(os.str());
    }
    report.best_fit = report.fits[report.best_index];
    return report;
}

TuneReport tune(const Dataset& data, const std::vector<Hyperparameters>& grid,
                const TuneOptions& options) {
    validate(data);
    return tune(sample_covariance(data, options.center), data.n(), grid, options);
}

GraphStructure threshold_graph(const SymMatrix& pmat, double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw ParameterError("threshold_graph: threshold must lie in (0,1)");
    }
    GraphStructure g;
    g.p = pmat.dim();
    for (Index i = 0; i < g.p; ++i) {
        for (Index j = i + 1; j < g.p; ++j) {
            if (pmat(i, j) >= t) {
                g.edges.emplace_back(i, j);
            }
        }
    }
    return g;
}

RocCurve roc_sweep(const SymMatrix& pmat, const GraphStructure& truth, std::size_t num_points) {
    if (num_points < 2) {
        throw ParameterError("roc_sweep: need at least 2 points");
    }
    if (truth.p != pmat.dim()) {
        throw ShapeError("roc_sweep: truth graph and probability matrix differ in size");
    }
    const Index p = pmat.dim();

    // (score, is_edge), sorted by descending score.
    std::vector<std::pair<double, bool>> scored;
    scored.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
    for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
            scored.emplace_back(pmat(i, j), truth.contains(i, j));
        }
    }
    const auto positives = static_cast<double>(
        std::count_if(scored.begin(), scored.end(), [](const auto& e) { return e.second; }));
    const double negatives = static_cast<double>(scored.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) {
        throw ParameterError("roc_sweep: truth graph needs both edges and non-edges");
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    // One point per distinct threshold t (predict edge when score ≥ t).
    std::vector<std::pair<double, double>> full{{0.0, 0.0}};
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t k = 0; k < scored.size();) {
        const double t = scored[k].first;
        while (k < scored.size() && scored[k].first == t) {
            (scored[k].second ? tp : fp) += 1.0;
            ++k;
        }
        full.emplace_back(fp / negatives, tp / positives);
    }

    RocCurve curve;
    for (std::size_t k = 1; k < full.size(); ++k) {
        const auto [x0, y0] = full[k - 1];
        const auto [x1, y1] = full[k];
        curve.auc += (x1 - x0) * 0.5 * (y0 + y1);
    }

    // Interior points are full[1 .. full.size()-2]; the last entry is (1,1).
    const std::size_t interior = full.size() - 2;
    curve.points.push_back(full.front());
    if (interior <= num_points) {
        for (std::size_t k = 1; k + 1 < full.size(); ++k) {
            curve.points.push_back(full[k]);
        }
    } else {
        for (std::size_t r = 0; r < num_points; ++r) {
            const std::size_t k = 1 + (r * (interior - 1)) / (num_points - 1);
            curve.points.push_back(full[k]);
        }
    }
    curve.points.push_back(full.back());
    return curve;
}

} // namespace bagus
