#include "netinf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "netinf/analysis.hpp"
#include "netinf/density.hpp"
#include "netinf/graphs.hpp"
#include "netinf/io.hpp"

namespace netinf::run {

namespace fs = std::filesystem;
using cfg::json;
using cfg::ModelKind;
using cfg::RunConfig;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

void write_manifest(const RunConfig& config, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config"] = config.doc;
    std::ofstream out(out_dir / "manifest.json");
    if (!out)
        throw std::runtime_error("cannot write manifest in " + out_dir.string());
    out << manifest.dump(2) << "\n";
}

int network_nodes(const RunConfig& config) {
    const json n = config.get("network.nodes");
    if (!n.is_number())
        throw std::invalid_argument("config: network.nodes is required");
    return n.get<int>();
}

Mat load_or_generate_network(const RunConfig& config) {
    const json file = config.get("network.file");
    if (file.is_string())
        return io::read_edge_list(config.resolve(file.get<std::string>()),
                                  network_nodes(config));
    const json gen = config.get("network.generator");
    if (gen.is_object()) {
        return graphs::random_graph(network_nodes(config), gen.value("density", 0.3),
                                    gen.value("weight_lo", 0.1), gen.value("weight_hi", 1.0),
                                    gen.value("seed", std::uint64_t{0}));
    }
    throw std::invalid_argument("config: need network.file or network.generator");
}

Vec load_power(const RunConfig& config, int n) {
    const json file = config.get("power.file");
    if (file.is_string()) {
        const Mat m = io::read_dense_matrix(config.resolve(file.get<std::string>()));
        if (m.size() != n)
            throw std::invalid_argument("config: power file length does not match nodes");
        Vec p(n);
        for (int i = 0; i < n; ++i) p(i) = m(i % m.rows(), i / m.rows());
        return p;
    }
    if (config.get("power").is_object()) {
        std::vector<double> stations;
        for (const auto& v : config.get("power.stations", json::array()))
            stations.push_back(v.get<double>());
        return graphs::assign_powers(n, stations, config.get("power.seed", std::uint64_t{0}));
    }
    return Vec::Zero(n);
}

struct KuramotoScenario {
    Mat truth;          // network the data was generated from
    const Mat* prior;   // A0 for the nu regularizer (power-cut runs)
    Mat prior_storage;
    dyn::TimeSeries data;
    dyn::KuramotoParams params;
    int order = 1;
};

// Chops a single long recording into batch-compatible training segments is
// not needed: the trainer batches within segments directly.
KuramotoScenario load_kuramoto_scenario(const RunConfig& config, const fs::path& data_dir) {
    KuramotoScenario sc;
    sc.order = config.model() == ModelKind::Kuramoto2 ? 2 : 1;
    sc.params = config.kuramoto_params();
    sc.data = io::read_time_series(data_dir / "series.csv");
    const int n = sc.data.nodes;
    sc.params.power = load_power(config, n);
    if (fs::exists(data_dir / "power.csv")) {
        const Mat p = io::read_dense_matrix(data_dir / "power.csv");
        sc.params.power = p.col(0);
    }
    const bool power_cut = fs::exists(data_dir / "perturbed_network.csv");
    if (power_cut) {
        sc.truth = io::read_edge_list(data_dir / "perturbed_network.csv", n);
        sc.prior_storage = io::read_edge_list(data_dir / "network.csv", n);
        sc.prior = &sc.prior_storage;
    } else {
        sc.truth = io::read_edge_list(data_dir / "network.csv", n);
        sc.prior = nullptr;
        if (config.get("training.use_prior", false).get<bool>()) {
            sc.prior_storage = sc.truth;
            sc.prior = &sc.prior_storage;
        }
    }
    return sc;
}

std::vector<std::pair<int, int>> positive_edges(const Mat& a) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j)
            if (a(i, j) > 0.0) edges.emplace_back(i, j);
    return edges;
}

void generate_kuramoto(const RunConfig& config, const fs::path& out_dir) {
    dyn::KuramotoParams params = config.kuramoto_params();
    const int order = config.model() == ModelKind::Kuramoto2 ? 2 : 1;
    const Mat a = load_or_generate_network(config);
    params.power = load_power(config, static_cast<int>(a.rows()));
    params.sigma = config.get("data.sigma", params.sigma);

    io::write_dense_matrix(out_dir / "power.csv", params.power);

    const json cut = config.get("power_cut");
    if (cut.is_object()) {
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : cut.value("edges", json::array()))
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        auto result = dyn::simulate_power_cut(
            a, edges, params, cut.value("window_len", 400),
            cut.value("record_delay", 1.0), cut.value("max_steps", 2000000L));
        io::write_edge_list(out_dir / "network.csv", a);
        io::write_edge_list(out_dir / "perturbed_network.csv", result.perturbed_network);
        io::write_time_series(out_dir / "series.csv", result.response);
        return;
    }

    const int segments = config.get("data.segments", 10);
    const int steps = config.get("data.steps_per_segment", order == 2 ? 3 : 2);
    const auto seed = config.get("data.seed", std::uint64_t{0}).get<std::uint64_t>();
    const dyn::TimeSeries series =
        dyn::generate_kuramoto_dataset(a, segments, steps, params, order, seed);
    io::write_edge_list(out_dir / "network.csv", a);
    io::write_time_series(out_dir / "series.csv", series);
}

Mat load_hw_cost(const RunConfig& config) {
    const json file = config.get("hw.cost_file");
    if (file.is_string())
        return io::read_dense_matrix(config.resolve(file.get<std::string>()));
    const json dist = config.get("hw.distance_files");
    if (dist.is_array() && dist.size() == 2) {
        const Mat a = io::read_dense_matrix(config.resolve(dist[0].get<std::string>()));
        const Mat b = io::read_dense_matrix(config.resolve(dist[1].get<std::string>()));
        return graphs::hw_cost_network(a, b);
    }
    if (dist.is_array() && dist.size() == 1)
        return graphs::hw_cost_network(
            io::read_dense_matrix(config.resolve(dist[0].get<std::string>())));
    // Synthetic fallback: random distances.
    const int n = config.get("hw.origins", 20);
    const int m = config.get("hw.destinations", 5);
    std::mt19937_64 rng(config.get("hw.network_seed", std::uint64_t{0}).get<std::uint64_t>());
    std::uniform_real_distribution<double> dist_minutes(1.0, 60.0);
    Mat d(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) d(i, j) = dist_minutes(rng);
    return graphs::hw_cost_network(d);
}

void generate_harris_wilson(const RunConfig& config, const fs::path& out_dir) {
    dyn::HarrisWilsonParams params = config.harris_wilson_params();
    params.sigma = config.get("data.sigma", params.sigma);
    const Mat c = load_hw_cost(config);
    const int n = static_cast<int>(c.rows());
    const int m = static_cast<int>(c.cols());
    const auto seed = config.get("data.seed", std::uint64_t{0}).get<std::uint64_t>();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> usize(0.5, 1.5);
    Vec o0(n), w0(m);
    for (int i = 0; i < n; ++i) o0(i) = usize(rng);
    for (int j = 0; j < m; ++j) w0(j) = usize(rng);
    const int n_steps = config.get("data.n_steps", 1000);
    auto series = dyn::generate_harris_wilson_dataset(
        o0, w0, c, n_steps, params, config.get("data.sigma_origin", 0.1), seed);
    io::write_dense_matrix(out_dir / "cost_network.csv", c);
    io::write_dense_matrix(out_dir / "origins.csv", series.origins);
    io::write_dense_matrix(out_dir / "destinations.csv", series.destinations);
}

json train_kuramoto_run(const RunConfig& config, const fs::path& data_dir,
                        const fs::path& out_dir) {
    KuramotoScenario sc = load_kuramoto_scenario(config, data_dir);
    const infer::TrainingConfig tc = config.training_config();
    auto result = infer::train_kuramoto(tc, sc.data, sc.params, sc.order, sc.prior,
                                        config.mlp_config());

    const auto seed = tc.seed;
    io::write_ensemble(out_dir / "ensemble.csv", result.ensemble, seed);
    const Mat& mle = result.ensemble.mle_network();
    io::write_dense_matrix(out_dir / "mle_network.csv", mle);

    // Marginals for requested edges (default: all positive edges of the
    // reference network when small, else none).
    std::vector<std::pair<int, int>> edges;
    const json requested = config.get("analysis.edges");
    if (requested.is_array()) {
        for (const auto& e : requested) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    } else if (sc.prior != nullptr) {
        edges = positive_edges(*sc.prior);
    }
    std::vector<std::vector<double>> p_rows;
    const Mat& reference = sc.prior != nullptr ? *sc.prior : sc.truth;
    for (auto [i, j] : edges) {
        auto marginal = infer::marginal_density(result.ensemble, i, j,
                                                config.get("analysis.grid_size", 100));
        std::ostringstream name;
        name << "marginal_" << i << "_" << j << ".csv";
        io::write_marginal(out_dir / name.str(), marginal);
        p_rows.push_back({static_cast<double>(i), static_cast<double>(j), reference(i, j),
                          infer::edge_p_value(marginal, reference(i, j))});
    }
    if (!p_rows.empty())
        io::write_table(out_dir / "p_values.csv", {"i", "j", "a0", "p_value"}, p_rows);

    // Ranked relative errors against the unperturbed network for power-cut
    // style runs.
    if (sc.prior != nullptr) {
        std::vector<std::vector<double>> rows;
        for (auto [i, j] : positive_edges(*sc.prior)) {
            const double a0 = (*sc.prior)(i, j);
            const double rel = std::abs(mle(i, j) - a0) / a0;
            rows.push_back({static_cast<double>(i), static_cast<double>(j), a0, mle(i, j), rel});
        }
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a[4] > b[4]; });
        io::write_table(out_dir / "edge_errors.csv",
                        {"i", "j", "a0", "predicted", "relative_error"}, rows);
    }

    json summary;
    summary["model"] = cfg::to_string(config.model());
    summary["iterations"] = result.ensemble.samples.size();
    summary["mle_data_loss"] = result.ensemble.samples[result.ensemble.mle_index()].data_loss;
    summary["final_l1_error"] = analysis::l1_error(mle, sc.truth);
    summary["convexity"] = analysis::gram_convexity(sc.data, 1).convexity;
    return summary;
}

json train_hw_run(const RunConfig& config, const fs::path& data_dir,
                  const fs::path& out_dir) {
    dyn::HarrisWilsonSeries series;
    series.origins = io::read_dense_matrix(data_dir / "origins.csv");
    series.destinations = io::read_dense_matrix(data_dir / "destinations.csv");
    const infer::TrainingConfig tc = config.training_config();
    const int window_len = config.get("hw.window_len", 2);
    const int n_windows = config.get("hw.subsample_windows", 0);
    std::vector<infer::HwWindow> windows;
    if (n_windows > 0) {
        windows = infer::subsample_hw_windows(series, n_windows, window_len, tc.seed);
    } else {
        windows.push_back(infer::HwWindow{series.origins, series.destinations});
    }
    auto result =
        infer::train_harris_wilson(tc, windows, config.harris_wilson_params(),
                                   config.mlp_config());
    io::write_ensemble(out_dir / "ensemble.csv", result.ensemble, tc.seed);
    const Mat& mle = result.ensemble.mle_network();
    io::write_dense_matrix(out_dir / "mle_network.csv", mle);

    json summary;
    summary["model"] = cfg::to_string(config.model());
    summary["iterations"] = result.ensemble.samples.size();
    summary["mle_data_loss"] = result.ensemble.samples[result.ensemble.mle_index()].data_loss;
    if (fs::exists(data_dir / "cost_network.csv")) {
        const Mat truth = infer::row_normalize(io::read_dense_matrix(data_dir / "cost_network.csv"));
        summary["final_l1_error"] = analysis::l1_error(mle, truth);
    }
    return summary;
}

void write_summary(const json& summary, const fs::path& out_dir) {
    std::ofstream out(out_dir / "summary.json");
    out << summary.dump(2) << "\n";
}

fs::path data_directory(const RunConfig& config, const fs::path& out_dir) {
    const json d = config.get("data_dir");
    if (d.is_string()) return config.resolve(d.get<std::string>());
    return out_dir;
}

}  // namespace

void cmd_generate(const RunConfig& config, const fs::path& out_dir) {
    write_manifest(config, out_dir);
    if (config.model() == ModelKind::HarrisWilson)
        generate_harris_wilson(config, out_dir);
    else
        generate_kuramoto(config, out_dir);
}

void cmd_train(const RunConfig& config, const fs::path& out_dir) {
    write_manifest(config, out_dir);
    const fs::path data_dir = data_directory(config, out_dir);
    if (!fs::exists(data_dir / (config.model() == ModelKind::HarrisWilson
                                    ? "destinations.csv"
                                    : "series.csv")))
        throw std::invalid_argument("train: no data files in " + data_dir.string() +
                                    " (run generate first)");
    const json summary = config.model() == ModelKind::HarrisWilson
                             ? train_hw_run(config, data_dir, out_dir)
                             : train_kuramoto_run(config, data_dir, out_dir);
    write_summary(summary, out_dir);
}

void cmd_infer_ols(const RunConfig& config, const fs::path& out_dir) {
    write_manifest(config, out_dir);
    if (config.model() == ModelKind::HarrisWilson)
        throw std::invalid_argument("infer-ols: OLS applies to Kuramoto models only");
    const fs::path data_dir = data_directory(config, out_dir);
    KuramotoScenario sc = load_kuramoto_scenario(config, data_dir);
    auto result = analysis::ols_infer(sc.data, sc.params, sc.order);
    io::write_dense_matrix(out_dir / "ols_network.csv", result.network);
    json summary;
    summary["ols_l1_error"] = analysis::l1_error(result.network, sc.truth);
    summary["convexity"] = result.gram.convexity;
    int deficient = 0;
    for (bool b : result.rank_deficient) deficient += b ? 1 : 0;
    summary["rank_deficient_nodes"] = deficient;
    std::ofstream out(out_dir / "ols_summary.json");
    out << summary.dump(2) << "\n";
}

void cmd_analyze(const RunConfig& config, const fs::path& out_dir) {
    write_manifest(config, out_dir);
    const fs::path data_dir = data_directory(config, out_dir);
    json summary;

    const json ens_file = config.get("analysis.ensemble");
    const fs::path ens_path = ens_file.is_string()
                                  ? config.resolve(ens_file.get<std::string>())
                                  : data_dir / "ensemble.csv";
    if (fs::exists(ens_path)) {
        auto ensemble = io::read_ensemble(ens_path);
        const Mat& mle = ensemble.mle_network();
        const bool square = mle.rows() == mle.cols();
        const int grid_size = config.get("analysis.grid_size", 100);
        auto grid_for = [&](analysis::Statistic kind) {
            const Vec values = analysis::statistic_values(mle, kind);
            const double hi = std::max(1e-6, 1.1 * values.maxCoeff());
            return density::linspace(0.0, hi, grid_size);
        };
        auto degree = analysis::hellinger_uncertainty(ensemble, analysis::Statistic::Degree,
                                                      grid_for(analysis::Statistic::Degree));
        io::write_distribution(out_dir / "degree_distribution.csv", degree);
        summary["hellinger_degree"] = degree.band_total;
        summary["kl_degree"] = analysis::kl_uncertainty(ensemble, analysis::Statistic::Degree,
                                                        degree.grid, degree.bandwidth);
        if (square) {
            auto tri = analysis::hellinger_uncertainty(
                ensemble, analysis::Statistic::Triangle,
                grid_for(analysis::Statistic::Triangle));
            io::write_distribution(out_dir / "triangle_distribution.csv", tri);
            summary["hellinger_triangle"] = tri.band_total;
            summary["kl_triangle"] = analysis::kl_uncertainty(
                ensemble, analysis::Statistic::Triangle, tri.grid, tri.bandwidth);
        }
    }

    if (config.model() != ModelKind::HarrisWilson && fs::exists(data_dir / "series.csv")) {
        KuramotoScenario sc = load_kuramoto_scenario(config, data_dir);
        auto gram = analysis::gram_convexity(sc.data, sc.order == 2 ? 2 : 1);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < gram.node_ranks.size(); ++i)
            rows.push_back({static_cast<double>(i), static_cast<double>(gram.node_ranks[i])});
        io::write_table(out_dir / "convexity.csv", {"node", "gram_rank"}, rows);
        summary["convexity"] = gram.convexity;

        auto ols = analysis::ols_infer(sc.data, sc.params, sc.order);
        summary["ols_l1_error"] = analysis::l1_error(ols.network, sc.truth);
        if (fs::exists(data_dir / "mle_network.csv")) {
            const Mat mle = io::read_dense_matrix(data_dir / "mle_network.csv");
            summary["neural_l1_error"] = analysis::l1_error(mle, sc.truth);
            io::write_table(out_dir / "method_comparison.csv",
                            {"neural_l1_error", "ols_l1_error", "convexity"},
                            {{summary["neural_l1_error"].get<double>(),
                              summary["ols_l1_error"].get<double>(),
                              static_cast<double>(gram.convexity)}});
        }
    }

    // Per-epoch wall-time scaling probe (quadratic-in-N check).
    const json timing = config.get("analysis.timing");
    if (timing.is_object()) {
        const int epochs = std::max(5, timing.value("epochs", 6));
        std::vector<std::vector<double>> rows;
        for (const auto& size : timing.value("sizes", json::array())) {
            const int n = size.get<int>();
            const Mat a = graphs::random_graph(n, 0.3, 0.1, 1.0, 7);
            dyn::KuramotoParams params;
            params.beta = 1.0;
            params.dt = 0.01;
            params.power = Vec::Zero(n);
            // L/B held fixed: same segment count and batch size for every N.
            auto data = dyn::generate_kuramoto_dataset(a, 16, 2, params, 1, 7);
            infer::TrainingConfig tc;
            tc.batch_size = 1;
            tc.epochs = 1;
            nn::MlpConfig mc = config.mlp_config();
            std::vector<double> times;
            for (int e = 0; e < epochs; ++e) {
                const auto t0 = std::chrono::steady_clock::now();
                infer::train_kuramoto(tc, data, params, 1, nullptr, mc);
                const auto t1 = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            times.erase(times.begin());  // warm-up epoch excluded
            std::sort(times.begin(), times.end());
            const double median = times[times.size() / 2];
            rows.push_back({static_cast<double>(n), median});
        }
        io::write_table(out_dir / "timing.csv", {"n_nodes", "median_epoch_seconds"}, rows);
    }

    write_summary(summary, out_dir);
}

void cmd_sweep(const RunConfig& config, const fs::path& out_dir, int workers) {
    const json axes_json = config.get("sweep.axes");
    if (!axes_json.is_object() || axes_json.empty())
        throw std::invalid_argument("sweep: need at least one axis under sweep.axes");
    std::vector<std::string> axis_names;
    std::vector<std::vector<json>> axis_values;
    for (const auto& [name, values] : axes_json.items()) {
        axis_names.push_back(name);
        axis_values.emplace_back(values.begin(), values.end());
    }
    std::vector<std::string> steps;
    for (const auto& s : config.get("sweep.run", json::array({"generate", "train"})))
        steps.push_back(s.get<std::string>());

    // Cartesian product of the axes.
    std::vector<std::vector<std::size_t>> combos;
    std::vector<std::size_t> current(axis_names.size(), 0);
    for (;;) {
        combos.push_back(current);
        std::size_t d = 0;
        while (d < current.size()) {
            if (++current[d] < axis_values[d].size()) break;
            current[d] = 0;
            ++d;
        }
        if (d == current.size()) break;
    }

    fs::create_directories(out_dir);
    write_manifest(config, out_dir);

    struct RunOutcome {
        json values;
        json summary;
        std::string error;
    };
    std::vector<RunOutcome> outcomes(combos.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= combos.size()) return;
            std::ostringstream dir_name;
            dir_name << "run_" << std::setw(4) << std::setfill('0') << k;
            const fs::path run_dir = out_dir / dir_name.str();
            RunOutcome& outcome = outcomes[k];
            outcome.summary = json::object();
            try {
                RunConfig run_config = config;
                for (std::size_t a = 0; a < axis_names.size(); ++a) {
                    run_config.set(axis_names[a], axis_values[a][combos[k][a]]);
                    outcome.values[axis_names[a]] = axis_values[a][combos[k][a]];
                }
                run_config.doc.erase("sweep");
                for (const std::string& step : steps) {
                    if (step == "generate")
                        cmd_generate(run_config, run_dir);
                    else if (step == "train")
                        cmd_train(run_config, run_dir);
                    else if (step == "infer-ols")
                        cmd_infer_ols(run_config, run_dir);
                    else if (step == "analyze")
                        cmd_analyze(run_config, run_dir);
                    else
                        throw std::invalid_argument("sweep: unknown step '" + step + "'");
                }
                for (const char* f : {"summary.json", "ols_summary.json"}) {
                    if (fs::exists(run_dir / f)) {
                        std::ifstream in(run_dir / f);
                        json s;
                        in >> s;
                        outcome.summary.update(s);
                    }
                }
            } catch (const std::exception& e) {
                outcome.error = e.what();
                fs::create_directories(run_dir);
                std::ofstream err(run_dir / "error.txt");
                err << e.what() << "\n";
            }
        }
    };
    workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Aggregate table: sweep values joined to the scalar metrics.
    std::vector<std::string> metric_names;
    for (const auto& outcome : outcomes)
        if (outcome.error.empty())
            for (const auto& [k, v] : outcome.summary.items())
                if (v.is_number() &&
                    std::find(metric_names.begin(), metric_names.end(), k) ==
                        metric_names.end())
                    metric_names.push_back(k);
    std::sort(metric_names.begin(), metric_names.end());

    std::ofstream agg(out_dir / "aggregate.csv");
    agg << std::setprecision(17) << "run";
    for (const auto& a : axis_names) agg << "," << a;
    for (const auto& m : metric_names) agg << "," << m;
    agg << ",error\n";
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        agg << k;
        for (const auto& a : axis_names) agg << "," << outcomes[k].values.value(a, json()).dump();
        for (const auto& m : metric_names) {
            agg << ",";
            if (outcomes[k].error.empty() && outcomes[k].summary.contains(m) &&
                outcomes[k].summary[m].is_number())
                agg << outcomes[k].summary[m].get<double>();
        }
        agg << "," << (outcomes[k].error.empty() ? "" : "failed") << "\n";
    }
}

}  // namespace netinf::run
