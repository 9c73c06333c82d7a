#include <bagus/cli.hpp>
#include <bagus/io.hpp>
#include <bagus/parallel.hpp>
#include <bagus/selection.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace bagus {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Argument preprocessing: --from-manifest and --config expand into plain flags.

const std::vector<std::string> kCommands = {"estimate", "simulate", "roc", "forecast"};

bool is_command(const std::string& s) {
    return std::find(kCommands.begin(), kCommands.end(), s) != kCommands.end();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Removes `--name VALUE` / `--name=VALUE` from args and returns VALUE.
std::optional<std::string> take_option(std::vector<std::string>& args, const std::string& name) {
    std::optional<std::string> value;
    const std::string eq = name + "=";
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == name) {
            if (i + 1 >= args.size()) {
                throw ParseError(name + " requires a file argument");
            }
            value = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind(eq, 0) == 0) {
            value = args[i].substr(eq.size());
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return value;
}

std::string json_to_arg(const Json& v) {
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    return v.dump();
}

std::vector<std::string> config_args(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file " + path.string());
    }
    std::vector<std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << path.string() << ":" << lineno << ": expected 'key = value'";
            throw ParseError(os.str());
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.rfind("--", 0) == 0) {
            key = key.substr(2);
        }
        if (key.empty()) {
            std::ostringstream os;
            os << path.string() << ":" << lineno << ": empty key";
            throw ParseError(os.str());
        }
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

std::vector<std::string> expand_args(std::vector<std::string> args) {
    if (auto manifest_path = take_option(args, "--from-manifest")) {
        const Json manifest = read_json(*manifest_path);
        if (!manifest.contains("command") || !manifest.contains("params") ||
            !manifest["params"].is_object()) {
            throw ParseError(*manifest_path + ": not a run manifest");
        }
        const auto command = manifest["command"].get<std::string>();
        if (!args.empty() && is_command(args.front())) {
            if (args.front() != command) {
                throw ParseError("manifest records command '" + command + "', not '" + args.front() + "'");
            }
            args.erase(args.begin());
        }
        std::vector<std::string> rebuilt{command};
        for (const auto& [key, value] : manifest["params"].items()) {
            if (!value.is_null()) {
                rebuilt.push_back("--" + key + "=" + json_to_arg(value));
            }
        }
        rebuilt.insert(rebuilt.end(), args.begin(), args.end());
        args = std::move(rebuilt);
    }
    if (auto config_path = take_option(args, "--config")) {
        const auto extra = config_args(*config_path);
        const auto at = std::find_if(args.begin(), args.end(), is_command);
        if (at == args.end()) {
            throw ParseError("--config needs a subcommand");
        }
        args.insert(at + 1, extra.begin(), extra.end());
    }
    return args;
}

// ---------------------------------------------------------------------------
// Options shared by the subcommands.

struct Common {
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string out = ".";
    std::string format = "json";

    void add(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Random seed (default: $BAGUS_SEED, then 0)");
        cmd->add_option("--jobs", jobs, "Worker threads for grid points and replications (0 = all cores)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--out", out, "Output directory");
        cmd->add_option("--format", format, "Summary format: json, or csv for CSV copies as well")
            ->check(CLI::IsMember({"json", "csv"}));
    }

    int resolved_jobs() const { return jobs == 0 ? available_threads() : jobs; }
};

struct SeedChoice {
    std::uint64_t value = 0;
    std::string source;
};

SeedChoice resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return {*flag, "argument"};
    }
    if (const char* env = std::getenv("BAGUS_SEED"); env != nullptr && *env != '\0') {
        std::uint64_t v = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec != std::errc() || ptr != end) {
            throw ParseError(std::string("BAGUS_SEED is not an unsigned integer: ") + env);
        }
        return {v, "BAGUS_SEED"};
    }
    return {0, "default"};
}

struct HyperFlags {
    std::optional<double> v0;
    std::optional<double> v1;
    std::optional<double> eta;
    std::optional<double> tau;
    std::optional<double> cap;
    std::string mode = "spectral";
    double inner_tol = 1e-6;
    double outer_tol = 1e-4;
    int max_inner = 100;
    int max_outer = 100;
    bool tune = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--v0", v0, "Spike scale; omit to tune over the default grid");
        cmd->add_option("--v1", v1, "Slab scale (required with --v0)");
        cmd->add_option("--eta", eta, "Prior slab weight (default 0.5)");
        cmd->add_option("--tau", tau, "Diagonal prior rate (default v0)");
        cmd->add_option("--B", cap, "Spectral cap (default 0.99*sqrt(2*n*v0))");
        cmd->add_option("--mode", mode, "Spectral constraint: spectral or maxelem")
            ->check(CLI::IsMember({"spectral", "maxelem"}));
        cmd->add_option("--inner-tol", inner_tol, "Coordinate descent tolerance");
        cmd->add_option("--outer-tol", outer_tol, "EM tolerance on max |change| of Theta");
        cmd->add_option("--max-inner", max_inner, "Coordinate descent sweep limit");
        cmd->add_option("--max-outer", max_outer, "EM sweep limit");
        cmd->add_flag("--tune", tune, "Select hyperparameters by BIC over the default grid");
    }

    bool tuning() const { return tune || !v0; }

    void apply_controls(Hyperparameters& h) const {
        if (eta) {
            h.eta = *eta;
        }
        h.B = cap;
        h.mode = spectral_mode_from_string(mode);
        h.inner_tol = inner_tol;
        h.outer_tol = outer_tol;
        h.max_inner = max_inner;
        h.max_outer = max_outer;
    }

    std::vector<Hyperparameters> resolve(Index n, Index p) const {
        if (tune && v0) {
            throw ParameterError("--tune and --v0 are mutually exclusive");
        }
        if (tuning()) {
            auto grid = default_grid(n, p);
            for (auto& h : grid) {
                apply_controls(h);
            }
            return grid;
        }
        if (!v1) {
            throw ParameterError("--v1 is required with --v0");
        }
        Hyperparameters h;
        h.v0 = *v0;
        h.v1 = *v1;
        h.tau = tau.value_or(*v0);
        apply_controls(h);
        h.validate();
        return {h};
    }

    void record(Json& params, const Hyperparameters& resolved) const {
        if (tuning()) {
            params["tune"] = true;
            if (eta) {
                params["eta"] = *eta;
            }
        } else {
            params["v0"] = resolved.v0;
            params["v1"] = resolved.v1;
            params["eta"] = resolved.eta;
            params["tau"] = resolved.tau;
        }
        if (cap) {
            params["B"] = *cap;
        }
        params["mode"] = mode;
        params["inner-tol"] = inner_tol;
        params["outer-tol"] = outer_tol;
        params["max-inner"] = max_inner;
        params["max-outer"] = max_outer;
    }
};

Json hyper_json(const Hyperparameters& h) {
    Json j;
    j["v0"] = h.v0;
    j["v1"] = h.v1;
    j["eta"] = h.eta;
    j["tau"] = h.tau;
    j["B"] = h.B ? Json(*h.B) : Json();
    j["mode"] = to_string(h.mode);
    return j;
}

struct Estimate {
    FitResult fit;
    std::optional<TuneReport> tuning;
};

Estimate fit_or_tune(const SymMatrix& s, Index n, const std::vector<Hyperparameters>& grid, bool tuning,
                     int jobs) {
    Estimate e;
    if (tuning) {
        TuneOptions opts;
        opts.jobs = jobs;
        e.tuning = tune(s, n, grid, opts);
        e.fit = e.tuning->best_fit;
    } else {
        e.fit = fit(s, n, grid.front());
    }
    return e;
}

Json fit_json(const Estimate& e, const SymMatrix& s, Index n) {
    Json j;
    j["schema"] = kSchema;
    j["converged"] = e.fit.converged;
    j["sweeps"] = e.fit.sweeps;
    j["final_objective"] = e.fit.final_objective;
    j["objective_trace"] = e.fit.objective_trace;
    j["kkt_residual"] = e.fit.kkt_residual;
    j["bic"] = bic(e.fit, s, n);
    j["nonzero_offdiagonal"] = count_edges(e.fit.theta_hat);
    j["convex_regime"] = e.fit.convex_regime;
    j["reverted_columns"] = e.fit.reverted_columns;
    j["skipped_columns"] = e.fit.skipped_columns;
    j["hyperparameters"] = hyper_json(e.fit.hyper);
    if (e.tuning) {
        Json grid = Json::array();
        for (std::size_t k = 0; k < e.tuning->grid.size(); ++k) {
            Json g = hyper_json(e.tuning->grid[k]);
            g.erase("B");
            g.erase("mode");
            if (e.tuning->failures[k].empty()) {
                g["bic"] = e.tuning->scores[k];
                g["edges"] = e.tuning->edge_counts[k];
            } else {
                g["error"] = e.tuning->failures[k];
            }
            grid.push_back(std::move(g));
        }
        j["tuning"] = {{"best_index", e.tuning->best_index}, {"grid", std::move(grid)}};
    }
    return j;
}

Json graph_json(const GraphStructure& g, double threshold) {
    Json edges = Json::array();
    for (const auto& [i, k] : g.edges) {
        edges.push_back({i, k});
    }
    Json j;
    j["schema"] = kSchema;
    j["p"] = g.p;
    j["threshold"] = threshold;
    j["edges"] = std::move(edges);
    return j;
}

void write_graph_csv(const fs::path& path, const GraphStructure& g) {
    Matrix m(static_cast<Index>(g.edges.size()), 2);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        m(static_cast<Index>(k), 0) = static_cast<double>(g.edges[k].first);
        m(static_cast<Index>(k), 1) = static_cast<double>(g.edges[k].second);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "# i,j\n";
    for (Index r = 0; r < m.rows(); ++r) {
        out << static_cast<long long>(m(r, 0)) << ',' << static_cast<long long>(m(r, 1)) << '\n';
    }
}

void write_manifest(const fs::path& dir, const std::string& command, const Json& params,
                    const SeedChoice& seed, const Json& extra_seeds, const std::vector<std::string>& outputs) {
    Json m;
    m["schema"] = kSchema;
    m["command"] = command;
    m["version"] = BAGUS_VERSION;
    m["generator"] = kGeneratorName;
    m["params"] = params;
    m["seeds"] = {{"seed", seed.value}, {"source", seed.source}};
    if (!extra_seeds.is_null()) {
        m["seeds"]["replications"] = extra_seeds;
    }
    m["outputs"] = outputs;
    write_json(dir / "run-manifest.json", m);
}

std::string absolute_string(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

// ---------------------------------------------------------------------------
// Subcommands.

struct EstimateCmd {
    Common common;
    HyperFlags hyper;
    std::string data;
    double threshold = kDefaultThreshold;
    std::string center = "auto";

    void add(CLI::App* cmd) {
        common.add(cmd);
        hyper.add(cmd);
        cmd->add_option("--data", data, "Dataset CSV (tagged or plain numeric)")->required();
        cmd->add_option("--threshold", threshold, "Inclusion-probability cut-off for graph.json");
        cmd->add_option("--center", center, "Subtract column means: auto (plain CSV only), yes, no")
            ->check(CLI::IsMember({"auto", "yes", "no"}));
    }

    int run(std::ostream& out) {
        const SeedChoice seed = resolve_seed(common.seed);
        const DatasetFile file = read_dataset(data);
        const bool do_center = center == "yes" || (center == "auto" && !file.tagged);
        const SymMatrix s = sample_covariance(file.data, do_center);
        const Index n = file.data.n();
        const auto grid = hyper.resolve(n, file.data.p());
        if (!(threshold > 0.0 && threshold < 1.0)) {
            throw ParameterError("--threshold must lie in (0,1)");
        }

        const Estimate e = fit_or_tune(s, n, grid, hyper.tuning(), common.resolved_jobs());
        const GraphStructure graph = threshold_graph(e.fit.pmat, threshold);

        const fs::path dir = common.out;
        fs::create_directories(dir);
        write_matrix_csv(dir / "theta.csv", e.fit.theta_hat.dense());
        write_matrix_csv(dir / "pmat.csv", e.fit.pmat.dense());
        write_json(dir / "graph.json", graph_json(graph, threshold));
        write_json(dir / "fit.json", fit_json(e, s, n));
        std::vector<std::string> outputs{"theta.csv", "pmat.csv", "graph.json", "fit.json"};
        if (common.format == "csv") {
            write_graph_csv(dir / "graph.csv", graph);
            outputs.push_back("graph.csv");
        }

        Json params;
        params["data"] = absolute_string(data);
        params["center"] = do_center ? "yes" : "no";
        params["threshold"] = threshold;
        hyper.record(params, grid.front());
        params["seed"] = seed.value;
        params["jobs"] = common.jobs;
        params["out"] = common.out;
        params["format"] = common.format;
        write_manifest(dir, "estimate", params, seed, Json(), outputs);

        out << "estimate: " << graph.edges.size() << " edges, " << (e.fit.converged ? "converged" : "not converged")
            << " after " << e.fit.sweeps << " sweeps\n";
        return kExitOk;
    }
};

struct SimulateCmd {
    Common common;
    std::string model = "star";
    Index p = 50;
    Index n = 100;
    std::size_t reps = 50;
    double threshold = kDefaultThreshold;
    double sigma2 = 3.0;
    bool save_datasets = false;

    void add(CLI::App* cmd) {
        common.add(cmd);
        cmd->add_option("--model", model, "star, ar2, circle or random");
        cmd->add_option("--p", p, "Dimension");
        cmd->add_option("--n", n, "Sample size");
        cmd->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
        cmd->add_option("--threshold", threshold, "Inclusion-probability cut-off");
        cmd->add_option("--sigma2", sigma2, "Scale of the random-graph model");
        cmd->add_flag("--save-datasets", save_datasets, "Write every replication's dataset");
    }

    int run(std::ostream& out) {
        const SeedChoice seed = resolve_seed(common.seed);
        SimulationSpec spec;
        spec.model = graph_model_from_string(model);
        spec.p = p;
        spec.n = n;
        spec.seed = seed.value;
        spec.sigma2 = sigma2;
        spec.validate();
        if (!(threshold > 0.0 && threshold < 1.0)) {
            throw ParameterError("--threshold must lie in (0,1)");
        }

        const fs::path dir = common.out;
        fs::create_directories(dir);
        const auto runner = [&](const ReplicationContext& ctx) {
            const Dataset data = simulate(ctx.spec);
            if (save_datasets) {
                char name[32];
                std::snprintf(name, sizeof name, "rep-%04zu.csv", ctx.index);
                write_dataset(dir / "datasets" / name, data);
            }
            const SymMatrix s = sample_covariance(data);
            const TuneReport t = tune(s, data.n(), default_grid(data.n(), data.p()));
            const GraphStructure est = threshold_graph(t.best_fit.pmat, threshold);
            const MetricsReport m = evaluate(t.best_fit.theta_hat, est, *data.truth);
            return std::map<std::string, double>{{"fnorm", m.fnorm},
                                                  {"max_norm", m.max_norm},
                                                  {"spectral_err", m.spectral_err},
                                                  {"sensitivity", m.sensitivity},
                                                  {"specificity", m.specificity},
                                                  {"mcc", m.mcc}};
        };
        const ReplicationReport report = replicate(spec, reps, runner, common.resolved_jobs());
        if (report.failures == reps) {
            throw TuningFailedError("simulate: every replication failed: " + report.failure_messages.front());
        }

        Json bench;
        bench["schema"] = kSchema;
        bench["model"] = to_string(spec.model);
        bench["p"] = p;
        bench["n"] = n;
        bench["reps"] = reps;
        bench["seed"] = seed.value;
        bench["threshold"] = threshold;
        bench["failures"] = report.failures;
        bench["failure_messages"] = report.failure_messages;
        bench["metrics"] = to_json(report.metrics);
        bench["replications"] = report.values;
        write_json(dir / "benchmark.json", bench);
        std::vector<std::string> outputs{"benchmark.json"};
        if (common.format == "csv") {
            std::ofstream csv(dir / "benchmark.csv", std::ios::binary | std::ios::trunc);
            csv << "# metric,mean,sd\n";
            for (const auto& [name, s] : report.metrics) {
                csv << name << ',' << format_double(s.mean) << ',' << format_double(s.sd) << '\n';
            }
            outputs.push_back("benchmark.csv");
        }
        if (save_datasets) {
            outputs.push_back("datasets/");
        }

        Json rep_seeds = Json::array();
        for (std::size_t i = 0; i < reps; ++i) {
            rep_seeds.push_back(derive_seed(seed.value, i));
        }
        Json params;
        params["model"] = to_string(spec.model);
        params["p"] = p;
        params["n"] = n;
        params["reps"] = reps;
        params["threshold"] = threshold;
        params["sigma2"] = sigma2;
        params["save-datasets"] = save_datasets;
        params["seed"] = seed.value;
        params["jobs"] = common.jobs;
        params["out"] = common.out;
        params["format"] = common.format;
        write_manifest(dir, "simulate", params, seed, rep_seeds, outputs);

        const auto& mcc = report.metrics.at("mcc");
        const auto& fn = report.metrics.at("fnorm");
        out << "simulate: " << to_string(spec.model) << " mcc " << mcc.formatted() << " fnorm " << fn.formatted()
            << " (" << report.failures << " failed)\n";
        return kExitOk;
    }
};

struct RocCmd {
    Common common;
    std::string model = "star";
    Index p = 50;
    Index n = 100;
    std::size_t points = 20;
    std::string grid_point = "all";
    std::string pmat_file;
    std::string truth_file;

    void add(CLI::App* cmd) {
        common.add(cmd);
        cmd->add_option("--model", model, "star, ar2, circle or random");
        cmd->add_option("--p", p, "Dimension");
        cmd->add_option("--n", n, "Sample size");
        cmd->add_option("--points", points, "Maximum number of interior ROC points");
        cmd->add_option("--grid-point", grid_point, "Grid index, or 'all' for the best AUC");
        cmd->add_option("--pmat", pmat_file, "Score a given probability matrix instead of fitting");
        cmd->add_option("--truth", truth_file, "Truth precision matrix for --pmat");
    }

    static void write_roc(const fs::path& dir, const RocCurve& curve) {
        Matrix m(static_cast<Index>(curve.points.size()), 2);
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            m(static_cast<Index>(k), 0) = curve.points[k].first;
            m(static_cast<Index>(k), 1) = curve.points[k].second;
        }
        write_matrix_csv(dir / "roc.csv", m, "fpr,tpr");
    }

    int run(std::ostream& out) {
        const SeedChoice seed = resolve_seed(common.seed);
        const fs::path dir = common.out;
        Json params;
        Json doc;
        doc["schema"] = kSchema;
        RocCurve best;

        if (!pmat_file.empty()) {
            if (truth_file.empty()) {
                throw ParameterError("--pmat requires --truth");
            }
            const SymMatrix pm = SymMatrix::from_dense(read_matrix_csv(pmat_file), 1e-12);
            const SymMatrix truth = SymMatrix::from_dense(read_matrix_csv(truth_file), 1e-12);
            best = roc_sweep(pm, support_graph(truth), points);
            doc["source"] = "pmat";
            params["pmat"] = absolute_string(pmat_file);
            params["truth"] = absolute_string(truth_file);
        } else {
            SimulationSpec spec;
            spec.model = graph_model_from_string(model);
            spec.p = p;
            spec.n = n;
            spec.seed = seed.value;
            spec.validate();
            const Dataset data = simulate(spec);
            const SymMatrix s = sample_covariance(data);
            const GraphStructure truth = support_graph(*data.truth);
            const auto grid = default_grid(n, p);

            std::vector<std::size_t> indices;
            if (grid_point == "all") {
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    indices.push_back(k);
                }
            } else {
                std::size_t k = 0;
                const auto [ptr, ec] = std::from_chars(grid_point.data(), grid_point.data() + grid_point.size(), k);
                if (ec != std::errc() || ptr != grid_point.data() + grid_point.size() || k >= grid.size()) {
                    throw ParameterError("--grid-point must be 'all' or an index below " +
                                         std::to_string(grid.size()));
                }
                indices.push_back(k);
            }

            std::vector<std::optional<RocCurve>> curves(indices.size());
            std::vector<std::string> errors(indices.size());
            parallel_for(static_cast<std::ptrdiff_t>(indices.size()), common.resolved_jobs(), [&](std::ptrdiff_t i) {
                const auto k = static_cast<std::size_t>(i);
                try {
                    const FitResult f = fit(s, n, grid[indices[k]]);
                    curves[k] = roc_sweep(f.pmat, truth, points);
                } catch (const Error& e) {
                    errors[k] = e.what();
                }
            });

            std::optional<std::size_t> chosen;
            Json per_point = Json::array();
            for (std::size_t k = 0; k < indices.size(); ++k) {
                Json g = hyper_json(grid[indices[k]]);
                g.erase("B");
                g.erase("mode");
                g["index"] = indices[k];
                if (curves[k]) {
                    g["auc"] = curves[k]->auc;
                    if (!chosen || curves[k]->auc > curves[*chosen]->auc) {
                        chosen = k;
                    }
                } else {
                    g["error"] = errors[k];
                }
                per_point.push_back(std::move(g));
            }
            if (!chosen) {
                throw TuningFailedError("roc: no grid point could be fitted");
            }
            best = *curves[*chosen];
            doc["source"] = "fit";
            doc["model"] = to_string(spec.model);
            doc["p"] = p;
            doc["n"] = n;
            doc["seed"] = seed.value;
            doc["grid_point"] = indices[*chosen];
            doc["grid"] = std::move(per_point);
            params["model"] = to_string(spec.model);
            params["p"] = p;
            params["n"] = n;
            params["grid-point"] = grid_point;
        }

        fs::create_directories(dir);
        doc["auc"] = best.auc;
        doc["points"] = best.points.size();
        write_roc(dir, best);
        write_json(dir / "roc.json", doc);

        params["points"] = points;
        params["seed"] = seed.value;
        params["jobs"] = common.jobs;
        params["out"] = common.out;
        params["format"] = common.format;
        write_manifest(dir, "roc", params, seed, Json(), {"roc.csv", "roc.json"});
        out << "roc: auc " << format_double(best.auc) << "\n";
        return kExitOk;
    }
};

struct ForecastCmd {
    Common common;
    HyperFlags hyper;
    std::string train;
    std::string test;
    Index split = 0;

    void add(CLI::App* cmd) {
        common.add(cmd);
        hyper.add(cmd);
        cmd->add_option("--train", train, "Training rows (CSV)")->required();
        cmd->add_option("--test", test, "Test rows (CSV)")->required();
        cmd->add_option("--split", split, "Number of leading observed coordinates k, 1 <= k < p")->required();
    }

    int run(std::ostream& out) {
        const SeedChoice seed = resolve_seed(common.seed);
        const Dataset tr = read_dataset(train).data;
        const Dataset te = read_dataset(test).data;
        if (tr.p() != te.p()) {
            std::ostringstream os;
            os << "forecast: train has " << tr.p() << " columns but test has " << te.p();
            throw ShapeError(os.str());
        }
        const Index p = tr.p();
        if (split < 1 || split >= p) {
            throw ParameterError("--split must satisfy 1 <= k < p");
        }
        const SymMatrix s = sample_covariance(tr.rows, true);
        const auto grid = hyper.resolve(tr.n(), p);
        const Estimate e = fit_or_tune(s, tr.n(), grid, hyper.tuning(), common.resolved_jobs());

        ForecastTask task;
        task.mu = column_means(tr.rows);
        task.theta = e.fit.theta_hat;
        task.split = split;
        const Matrix predictions = forecast_rows(task, te.rows.leftCols(split));
        const Matrix actual = te.rows.rightCols(p - split);
        const Vector err = aafe(predictions, actual);
        Matrix marginal(actual.rows(), actual.cols());
        marginal.rowwise() = task.mu.tail(p - split).transpose();
        const Vector err_marginal = aafe(marginal, actual);

        const fs::path dir = common.out;
        fs::create_directories(dir);
        write_matrix_csv(dir / "predictions.csv", predictions);
        Matrix table(err.size(), 2);
        for (Index k = 0; k < err.size(); ++k) {
            table(k, 0) = static_cast<double>(split + k);
            table(k, 1) = err(k);
        }
        write_matrix_csv(dir / "aafe.csv", table, "coordinate,aafe");

        Json doc;
        doc["schema"] = kSchema;
        doc["split"] = split;
        doc["train_rows"] = tr.n();
        doc["test_rows"] = te.n();
        doc["mean_aafe"] = err.mean();
        doc["marginal_mean_aafe"] = err_marginal.mean();
        doc["fit"] = fit_json(e, s, tr.n());
        write_json(dir / "forecast.json", doc);

        Json params;
        params["train"] = absolute_string(train);
        params["test"] = absolute_string(test);
        params["split"] = split;
        hyper.record(params, grid.front());
        params["seed"] = seed.value;
        params["jobs"] = common.jobs;
        params["out"] = common.out;
        params["format"] = common.format;
        write_manifest(dir, "forecast", params, seed, Json(), {"predictions.csv", "aafe.csv", "forecast.json"});
        out << "forecast: mean AAFE " << format_double(err.mean()) << " (marginal "
            << format_double(err_marginal.mean()) << ")\n";
        return kExitOk;
    }
};

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse precision matrix estimation with a spike-and-slab Lasso prior", "bagus"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", BAGUS_VERSION);
    app.require_subcommand(1);

    EstimateCmd estimate;
    SimulateCmd simulate_cmd;
    RocCmd roc;
    ForecastCmd forecast_cmd;
    auto* c_est = app.add_subcommand("estimate", "Fit one dataset");
    estimate.add(c_est);
    auto* c_sim = app.add_subcommand("simulate", "Replicated benchmark on a synthetic model");
    simulate_cmd.add(c_sim);
    auto* c_roc = app.add_subcommand("roc", "ROC curve of the inclusion probabilities");
    roc.add(c_roc);
    auto* c_fc = app.add_subcommand("forecast", "Conditional-mean forecasts from a fitted precision matrix");
    forecast_cmd.add(c_fc);

    args = expand_args(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (c_est->parsed()) {
        return estimate.run(out);
    }
    if (c_sim->parsed()) {
        return simulate_cmd.run(out);
    }
    if (c_roc->parsed()) {
        return roc.run(out);
    }
    return forecast_cmd.run(out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace bagus
