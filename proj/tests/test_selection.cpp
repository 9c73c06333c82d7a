#include "oracles.hpp"

#include <bagus/selection.hpp>
#include <bagus/simulation.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace bagus;
using namespace bagus::testing;

TEST(Bic, IdentityExample) {
    EXPECT_NEAR(bic(SymMatrix::identity(5), SymMatrix::identity(5), 100), 500.0, 1e-12);
}

TEST(Bic, EachCountedEdgeAddsLogN) {
    std::mt19937_64 rng(61);
    const SymMatrix s = random_spd(rng, 4);
    const Index n = 150;
    SymMatrix a = SymMatrix::identity(4);
    SymMatrix b = a;
    b.set(0, 2, 2e-8);
    auto likelihood = [&](const SymMatrix& t) {
        return static_cast<double>(n) * (t.dense().cwiseProduct(s.dense()).sum() - log_det_spd(t));
    };
    const double extra = (bic(b, s, n) - likelihood(b)) - (bic(a, s, n) - likelihood(a));
    EXPECT_NEAR(extra, std::log(150.0), 1e-9);
    EXPECT_EQ(count_edges(b), 1);
    b.set(1, 3, 5e-9);
    EXPECT_EQ(count_edges(b), 1);
}

TEST(Bic, MatchesScalarLoopsOnFit) {
    std::mt19937_64 rng(62);
    const FitInstance inst = random_fit_instance(rng, 4);
    const FitResult f = fit(inst.s, inst.n, inst.h);
    const Matrix& t = f.theta_hat.dense();
    long double trace = 0;
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 4; ++j) {
            trace += static_cast<long double>(inst.s(i, j)) * t(j, i);
        }
    }
    int edges = 0;
    for (Index i = 0; i < 4; ++i) {
        for (Index j = i + 1; j < 4; ++j) {
            edges += std::abs(t(i, j)) > 1e-8 ? 1 : 0;
        }
    }
    const long double logdet = std::log(static_cast<long double>(t.partialPivLu().determinant()));
    const long double oracle = inst.n * (trace - logdet) + std::log(static_cast<long double>(inst.n)) * edges;
    EXPECT_NEAR(bic(f, inst.s, inst.n), static_cast<double>(oracle), 1e-10);
}

TEST(DefaultGrid, Layout) {
    const auto grid = default_grid(100, 50);
    ASSERT_EQ(grid.size(), 16u);
    // 0.4·√(1/(100·ln 50)), evaluated at 40 digits.
    EXPECT_NEAR(grid.front().v0, 0.02022363839215214933955, 1e-15);
    const double factors[] = {0.4, 2.0, 4.0, 20.0};
    const double mult[] = {1.5, 3.0, 5.0, 10.0};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& h = grid[k];
        EXPECT_GT(h.v1, h.v0);
        EXPECT_EQ(h.tau, h.v0);
        EXPECT_EQ(h.eta, 0.5);
        EXPECT_FALSE(h.B.has_value());
        EXPECT_NEAR(h.v0, factors[k / 4] * std::sqrt(1.0 / (100.0 * std::log(50.0))), 1e-15);
        EXPECT_NEAR(h.v1 / h.v0, mult[k % 4], 1e-12);
        EXPECT_NO_THROW(h.validate());
    }
    for (Index n : {2, 17, 400}) {
        for (Index p : {2, 9, 120}) {
            EXPECT_EQ(default_grid(n, p).size(), 16u);
        }
    }
    EXPECT_THROW(default_grid(1, 10), ParameterError);
    EXPECT_THROW(default_grid(10, 1), ParameterError);
}

TEST(Tune, SinglePointAndTies) {
    std::mt19937_64 rng(63);
    const FitInstance inst = random_fit_instance(rng, 5);
    const TuneReport one = tune(inst.s, inst.n, {inst.h});
    EXPECT_EQ(one.best_index, 0u);
    const TuneReport dup = tune(inst.s, inst.n, {inst.h, inst.h});
    EXPECT_EQ(dup.scores[0], dup.scores[1]);
    EXPECT_EQ(dup.best_index, 0u);
    EXPECT_EQ(dup.best_fit.theta_hat, one.best_fit.theta_hat);
}

TEST(Tune, PicksLowestScoreAndRecordsFailures) {
    std::mt19937_64 rng(64);
    const FitInstance inst = random_fit_instance(rng, 5);
    Hyperparameters bad = inst.h;
    bad.v1 = bad.v0 / 2;
    std::vector<Hyperparameters> grid = default_grid(inst.n, 5);
    grid.insert(grid.begin() + 3, bad);
    const TuneReport r = tune(inst.s, inst.n, grid);
    EXPECT_FALSE(r.failures[3].empty());
    EXPECT_TRUE(std::isinf(r.scores[3]));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (r.failures[k].empty()) {
            EXPECT_LE(r.scores[r.best_index], r.scores[k]);
        }
    }
    EXPECT_THROW(tune(inst.s, inst.n, {bad, bad}), TuningFailedError);
    EXPECT_THROW(tune(inst.s, inst.n, {}), ParameterError);
}

TEST(Tune, Deterministic) {
    std::mt19937_64 rng(65);
    const FitInstance inst = random_fit_instance(rng, 6);
    const auto grid = default_grid(inst.n, 6);
    const TuneReport a = tune(inst.s, inst.n, grid);
    const TuneReport b = tune(inst.s, inst.n, grid);
    EXPECT_EQ(a.scores, b.scores);
    EXPECT_EQ(a.best_index, b.best_index);
    EXPECT_EQ(a.best_fit.theta_hat, b.best_fit.theta_hat);
}

TEST(Tune, RecoversStarGraph) {
    SimulationSpec spec;
    spec.model = GraphModel::star;
    spec.p = 10;
    spec.n = 200;
    spec.seed = 2024;
    const Dataset data = simulate(spec);
    const TuneReport r = tune(data, default_grid(200, 10));
    const GraphStructure g = threshold_graph(r.best_fit.pmat);
    EXPECT_EQ(g, support_graph(*data.truth));
    EXPECT_EQ(g.edges.size(), 9u);
}

TEST(ThresholdGraph, Examples) {
    const SymMatrix low = SymMatrix::from_upper(Matrix::Constant(4, 4, 0.4));
    EXPECT_TRUE(threshold_graph(low, 0.5).edges.empty());
    const SymMatrix high = SymMatrix::from_upper(Matrix::Constant(3, 3, 0.9));
    EXPECT_EQ(threshold_graph(high, 0.5).edges.size(), 3u);
    EXPECT_THROW(threshold_graph(high, 0.0), ParameterError);
    EXPECT_THROW(threshold_graph(high, 1.0), ParameterError);
}

TEST(ThresholdGraph, DoubleLoopAndMonotone) {
    std::mt19937_64 rng(66);
    Matrix m(9, 9);
    for (Index i = 0; i < 9; ++i) {
        for (Index j = 0; j < 9; ++j) {
            m(i, j) = uniform(rng, 0.0, 1.0);
        }
    }
    const SymMatrix pm = SymMatrix::from_upper(m);
    const GraphStructure g = threshold_graph(pm, 0.5);
    GraphStructure oracle;
    oracle.p = 9;
    for (Index i = 0; i < 9; ++i) {
        for (Index j = 0; j < 9; ++j) {
            if (i < j && pm(i, j) >= 0.5) {
                oracle.edges.emplace_back(i, j);
            }
        }
    }
    EXPECT_EQ(g, oracle);
    GraphStructure prev = threshold_graph(pm, 0.01);
    for (double t = 0.05; t < 1.0; t += 0.05) {
        const GraphStructure cur = threshold_graph(pm, t);
        for (const auto& [i, j] : cur.edges) {
            EXPECT_TRUE(prev.contains(i, j));
        }
        prev = cur;
    }
}

namespace {

GraphStructure ring(Index p) {
    GraphStructure g;
    g.p = p;
    for (Index i = 0; i + 1 < p; ++i) {
        g.edges.emplace_back(i, i + 1);
    }
    return g;
}

} // namespace

TEST(RocSweep, SeparableAndConstant) {
    const Index p = 8;
    const GraphStructure truth = ring(p);
    Matrix m = Matrix::Constant(p, p, 0.1);
    for (const auto& [i, j] : truth.edges) {
        m(i, j) = 0.9;
    }
    const RocCurve sep = roc_sweep(SymMatrix::from_upper(m), truth, 10);
    EXPECT_DOUBLE_EQ(sep.auc, 1.0);

    const RocCurve flat = roc_sweep(SymMatrix::from_upper(Matrix::Constant(p, p, 0.3)), truth, 10);
    EXPECT_DOUBLE_EQ(flat.auc, 0.5);
    EXPECT_EQ(flat.points.front(), std::make_pair(0.0, 0.0));
    EXPECT_EQ(flat.points.back(), std::make_pair(1.0, 1.0));
}

TEST(RocSweep, MatchesMannWhitney) {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const Index p = 12;
        GraphStructure truth;
        truth.p = p;
        Matrix m(p, p);
        for (Index i = 0; i < p; ++i) {
            for (Index j = i + 1; j < p; ++j) {
                const bool edge = uniform(rng, 0, 1) < 0.3;
                if (edge) {
                    truth.edges.emplace_back(i, j);
                }
                // Coarse scores so that ties occur.
                m(i, j) = std::round(uniform(rng, 0, 1) * 10 + (edge ? 3 : 0)) / 14.0;
            }
        }
        const SymMatrix pm = SymMatrix::from_upper(m);
        double wins = 0;
        double pairs = 0;
        for (const auto& [a, b] : truth.edges) {
            for (Index i = 0; i < p; ++i) {
                for (Index j = i + 1; j < p; ++j) {
                    if (truth.contains(i, j)) {
                        continue;
                    }
                    pairs += 1;
                    wins += pm(a, b) > pm(i, j) ? 1.0 : (pm(a, b) == pm(i, j) ? 0.5 : 0.0);
                }
            }
        }
        const RocCurve c = roc_sweep(pm, truth, 5);
        EXPECT_NEAR(c.auc, wins / pairs, 1e-10);
        EXPECT_GE(c.auc, 0.0);
        EXPECT_LE(c.auc, 1.0);
        for (std::size_t k = 1; k < c.points.size(); ++k) {
            EXPECT_GE(c.points[k].first, c.points[k - 1].first);
            EXPECT_GE(c.points[k].second, c.points[k - 1].second);
        }
        EXPECT_LE(c.points.size(), 5u + 2u);
    }
}

TEST(RocSweep, TwoPointsKeepsEndpointsAndInterior) {
    std::mt19937_64 rng(68);
    Matrix m(10, 10);
    for (Index i = 0; i < 10; ++i) {
        for (Index j = 0; j < 10; ++j) {
            m(i, j) = uniform(rng, 0, 1);
        }
    }
    const RocCurve c = roc_sweep(SymMatrix::from_upper(m), ring(10), 2);
    ASSERT_EQ(c.points.size(), 4u);
    EXPECT_EQ(c.points.front(), std::make_pair(0.0, 0.0));
    EXPECT_EQ(c.points.back(), std::make_pair(1.0, 1.0));
}

TEST(RocSweep, Errors) {
    const SymMatrix pm = SymMatrix::identity(5);
    EXPECT_THROW(roc_sweep(pm, ring(5), 1), ParameterError);
    EXPECT_THROW(roc_sweep(pm, ring(6), 5), ShapeError);
    GraphStructure empty;
    empty.p = 5;
    EXPECT_THROW(roc_sweep(pm, empty, 5), ParameterError);
}
