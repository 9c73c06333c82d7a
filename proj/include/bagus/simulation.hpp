#pragma once

#include <bagus/matrix.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace bagus {

enum class GraphModel { star, ar2, circle, random_graph };

std::string to_string(GraphModel m);
/// Accepts star, ar2, circle, random and random_graph.
GraphModel graph_model_from_string(const std::string& s);

struct SimulationSpec {
    GraphModel model = GraphModel::star;
    Index p = 0;
    Index n = 0;
    std::uint64_t seed = 0;
    double sigma2 = 3.0; ///< scale applied to the random-graph matrix

    void validate() const;
};

/// Name recorded in every generated Dataset.
inline constexpr const char* kGeneratorName = "mt19937_64/splitmix64";

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

std::mt19937_64 make_engine(std::uint64_t seed);

/// Stages of one random-graph draw.
struct RandomGraphDraw {
    Matrix selected; ///< unit diagonal plus the signed entries at the chosen positions
    Matrix rescaled; ///< off-diagonal entries of column j divided by 1.1× its absolute sum
    SymMatrix result; ///< sigma2·(rescaled + rescaledᵀ)/2
};

RandomGraphDraw random_graph_draw(Index p, double sigma2, std::mt19937_64& rng);

/// Ground-truth precision matrix of the model.
///
/// random_graph: unit diagonal, ⌊1.5p⌋ distinct upper-triangle positions with
/// values uniform on [0.4,1]∪[−1,−0.4] (mirrored), each off-diagonal entry of
/// column j divided by 1.1× the column's off-diagonal absolute sum, the result
/// averaged with its transpose and scaled by sigma2. Redrawn (up to 10 times)
/// if the result is not positive definite.
SymMatrix truth_matrix(const SimulationSpec& spec);

/// n draws from N(0, Θ⁰⁻¹) using the lower Cholesky factor of Σ = Θ⁰⁻¹.
Dataset sample_mvn(const SymMatrix& theta0, Index n, std::uint64_t seed);

/// truth_matrix + sample_mvn with SimulationSpec::seed; model name recorded.
Dataset simulate(const SimulationSpec& spec);

struct Summary {
    double mean = 0.0;
    double sd = 0.0; ///< sample standard deviation (n−1 divisor); 0 for one value
    std::size_t count = 0;

    /// "mean(sd)" with three decimals.
    std::string formatted() const;
};

Summary summarize(const std::vector<double>& values);

struct ReplicationContext {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    SimulationSpec spec; ///< spec.seed replaced by the replication seed
};

using ReplicationRunner = std::function<std::map<std::string, double>(const ReplicationContext&)>;

struct ReplicationReport {
    std::size_t reps = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
    std::map<std::string, Summary> metrics;
    /// Per-replication values in replication order; failed replications are absent.
    std::map<std::string, std::vector<double>> values;
};

/// Runs `runner` once per replication with seed derive_seed(spec.seed, index).
/// Failures are counted, not rethrown. `jobs > 1` runs replications concurrently.
ReplicationReport replicate(const SimulationSpec& spec, std::size_t reps,
                            const ReplicationRunner& runner, int jobs = 1);

} // namespace bagus
