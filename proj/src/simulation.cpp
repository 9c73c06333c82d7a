#include <bagus/parallel.hpp>
#include <bagus/simulation.hpp>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace bagus {

std::string to_string(GraphModel m) {
    switch (m) {
    case GraphModel::star:
        return "star";
    case GraphModel::ar2:
        return "ar2";
    case GraphModel::circle:
        return "circle";
    case GraphModel::random_graph:
        return "random";
    }
    return "star";
}

GraphModel graph_model_from_string(const std::string& s) {
    if (s == "star") {
        return GraphModel::star;
    }
    if (s == "ar2") {
        return GraphModel::ar2;
    }
    if (s == "circle") {
        return GraphModel::circle;
    }
    if (s == "random" || s == "random_graph") {
        return GraphModel::random_graph;
    }
    throw ParameterError("unknown model '" + s + "' (expected star, ar2, circle or random)");
}

void SimulationSpec::validate() const {
    if (p < 3) {
        throw ParameterError("simulation: p must be at least 3");
    }
    if (n < 1) {
        throw ParameterError("simulation: n must be at least 1");
    }
    if (!(sigma2 > 0.0)) {
        throw ParameterError("simulation: sigma2 must be positive");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

namespace {

SymMatrix star_matrix(Index p) {
    SymMatrix t = SymMatrix::identity(p);
    const double v = 1.0 / std::sqrt(static_cast<double>(p));
    for (Index i = 1; i < p; ++i) {
        t.set(0, i, v);
    }
    return t;
}

SymMatrix ar2_matrix(Index p) {
    SymMatrix t = SymMatrix::identity(p);
    for (Index i = 1; i < p; ++i) {
        t.set(i, i - 1, 0.5);
        if (i >= 2) {
            t.set(i, i - 2, 0.25);
        }
    }
    return t;
}

SymMatrix circle_matrix(Index p) {
    SymMatrix t = SymMatrix::diagonal(Vector::Constant(p, 2.0));
    for (Index i = 1; i < p; ++i) {
        t.set(i, i - 1, 1.0);
    }
    t.set(0, p - 1, 0.9);
    return t;
}

} // namespace

RandomGraphDraw random_graph_draw(Index p, double sigma2, std::mt19937_64& rng) {
    const Index pairs = p * (p - 1) / 2;
    const Index picks = std::min<Index>(static_cast<Index>(std::floor(1.5 * static_cast<double>(p))), pairs);

    std::vector<Index> order(static_cast<std::size_t>(pairs));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index k = 0; k < picks; ++k) {
        std::uniform_int_distribution<Index> pick(k, pairs - 1);
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng))]);
    }

    // Linear index over the strict upper triangle, column by column.
    std::vector<std::pair<Index, Index>> position(static_cast<std::size_t>(pairs));
    for (Index j = 1, k = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            position[static_cast<std::size_t>(k++)] = {i, j};
        }
    }

    std::uniform_real_distribution<double> magnitude(0.4, 1.0);
    std::bernoulli_distribution negative(0.5);
    Matrix a = Matrix::Identity(p, p);
    for (Index k = 0; k < picks; ++k) {
        const auto [i, j] = position[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        double v = magnitude(rng);
        if (negative(rng)) {
            v = -v;
        }
        a(i, j) = v;
        a(j, i) = v;
    }

    Matrix scaled = a;
    for (Index j = 0; j < p; ++j) {
        double colsum = 0.0;
        for (Index i = 0; i < p; ++i) {
            if (i != j) {
                colsum += std::abs(a(i, j));
            }
        }
        if (colsum == 0.0) {
            continue;
        }
        for (Index i = 0; i < p; ++i) {
            if (i != j) {
                scaled(i, j) = a(i, j) / (1.1 * colsum);
            }
        }
    }
    RandomGraphDraw draw;
    draw.result = SymMatrix::from_upper(sigma2 * (0.5 * (scaled + scaled.transpose())));
    draw.selected = std::move(a);
    draw.rescaled = std::move(scaled);
    return draw;
}

SymMatrix truth_matrix(const SimulationSpec& spec) {
    spec.validate();
    switch (spec.model) {
    case GraphModel::star:
        return star_matrix(spec.p);
    case GraphModel::ar2:
        return ar2_matrix(spec.p);
    case GraphModel::circle:
        return circle_matrix(spec.p);
    case GraphModel::random_graph:
        break;
    }
    constexpr int kMaxAttempts = 10;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto rng = make_engine(derive_seed(spec.seed, 0x7275746855ULL + static_cast<std::uint64_t>(attempt)));
        RandomGraphDraw draw = random_graph_draw(spec.p, spec.sigma2, rng);
        if (is_positive_definite(draw.result)) {
            return std::move(draw.result);
        }
    }
    throw GenerationFailedError("truth_matrix: random graph not positive definite after 10 draws");
}

Dataset sample_mvn(const SymMatrix& theta0, Index n, std::uint64_t seed) {
    if (n < 1) {
        throw ParameterError("sample_mvn: n must be at least 1");
    }
    const SymMatrix sigma = chol_inverse(theta0);
    Eigen::LLT<Matrix> llt(sigma.dense());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError("sample_mvn: covariance is not positive definite");
    }
    const Matrix lower = llt.matrixL();

    const Index p = theta0.dim();
    auto rng = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < p; ++k) {
            z(i, k) = normal(rng);
        }
    }

    Dataset out;
    out.rows = z * lower.transpose();
    out.truth = theta0;
    out.seed = seed;
    out.generator = kGeneratorName;
    return out;
}

Dataset simulate(const SimulationSpec& spec) {
    const SymMatrix t = truth_matrix(spec);
    Dataset d = sample_mvn(t, spec.n, spec.seed);
    d.model = to_string(spec.model);
    return d;
}

std::string Summary::formatted() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f(%.3f)", mean, sd);
    return buf;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

ReplicationReport replicate(const SimulationSpec& spec, std::size_t reps,
                            const ReplicationRunner& runner, int jobs) {
    if (reps < 1) {
        throw ParameterError("replicate: reps must be at least 1");
    }
    std::vector<std::map<std::string, double>> outputs(reps);
    std::vector<std::string> errors(reps);
    std::vector<char> ok(reps, 0);

    parallel_for(static_cast<std::ptrdiff_t>(reps), jobs, [&](std::ptrdiff_t i) {
        const auto idx = static_cast<std::size_t>(i);
        ReplicationContext ctx;
        ctx.index = idx;
        ctx.seed = derive_seed(spec.seed, idx);
        ctx.spec = spec;
        ctx.spec.seed = ctx.seed;
        try {
            outputs[idx] = runner(ctx);
            ok[idx] = 1;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    });

    ReplicationReport report;
    report.reps = reps;
    for (std::size_t i = 0; i < reps; ++i) {
        if (!ok[i]) {
            ++report.failures;
            std::ostringstream os;
            os << "replication " << i << ": " << errors[i];
            report.failure_messages.push_back(os.str());
            continue;
        }
        for (const auto& [name, value] : outputs[i]) {
            report.values[name].push_back(value);
        }
    }
    for (const auto& [name, vals] : report.values) {
        report.metrics[name] = summarize(vals);
    }
    return report;
}

} // namespace bagus
