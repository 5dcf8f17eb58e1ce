#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "netinf/config.hpp"
#include "netinf/graphs.hpp"
#include "netinf/io.hpp"

namespace fs = std::filesystem;
namespace io = netinf::io;
namespace dyn = netinf::dyn;
using nlohmann::json;
using Mat = Eigen::MatrixXd;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("netinf_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter() {
        static int c = 0;
        return c++;
    }
};

int run_cli(const std::string& args) {
    const char* cli = std::getenv("NETINF_CLI");
    REQUIRE(cli != nullptr);
    const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2);
}

json kuramoto_config() {
    return {
        {"model", "kuramoto1"},
        {"network", {{"nodes", 5}, {"generator", {{"density", 0.8}, {"seed", 3}}}}},
        {"dynamics", {{"beta", 1.0}, {"kappa", 1.0}, {"dt", 0.02}}},
        {"data", {{"segments", 8}, {"steps_per_segment", 3}, {"sigma", 0.0}, {"seed", 4}}},
        {"training", {{"epochs", 3}, {"batch_size", 2}, {"seed", 5}}},
    };
}

}  // namespace

TEST_CASE("time series round-trips through CSV") {
    TempDir dir;
    dyn::TimeSeries ts;
    ts.nodes = 3;
    ts.segments = {Mat::Random(3, 4), Mat::Random(3, 2)};
    io::write_time_series(dir.path / "ts.csv", ts);
    const auto back = io::read_time_series(dir.path / "ts.csv");
    REQUIRE(back.nodes == 3);
    REQUIRE(back.segments.size() == 2);
    for (int s = 0; s < 2; ++s)
        CHECK((ts.segments[s] - back.segments[s]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("edge lists and dense matrices round-trip") {
    TempDir dir;
    const Mat a = netinf::graphs::random_graph(6, 0.5, 0.2, 0.9, 7);
    io::write_edge_list(dir.path / "net.csv", a);
    CHECK((io::read_edge_list(dir.path / "net.csv", 6) - a).cwiseAbs().maxCoeff() <
          1e-12);
    const Mat d = Mat::Random(4, 3);
    io::write_dense_matrix(dir.path / "dense.csv", d);
    CHECK((io::read_dense_matrix(dir.path / "dense.csv") - d).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("ensembles round-trip with weights intact") {
    TempDir dir;
    netinf::infer::SampleEnsemble e;
    e.burn_in_fraction = 0.0;
    for (int k = 0; k < 5; ++k)
        e.samples.push_back({Mat::Constant(3, 3, 0.1 * k), 0.5 + k, k});
    io::write_ensemble(dir.path / "ens.csv", e, 42);
    const auto back = io::read_ensemble(dir.path / "ens.csv");
    REQUIRE(back.samples.size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(back.samples[k].iteration == k);
        CHECK(back.samples[k].data_loss == doctest::Approx(0.5 + k).epsilon(1e-12));
        CHECK((back.samples[k].network - e.samples[k].network).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("malformed inputs name the file in the error") {
    TempDir dir;
    std::ofstream(dir.path / "bad.csv") << "segment,t,x_0\nnot,a,number\n";
    try {
        io::read_time_series(dir.path / "bad.csv");
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
    }
    CHECK_THROWS(io::read_dense_matrix(dir.path / "missing.csv"));
}

TEST_CASE("cli: missing config file exits with code 1") {
    CHECK(run_cli("generate --config /nonexistent.json --out /tmp/x") == 1);
}

TEST_CASE("cli: invalid model name exits with code 1") {
    TempDir dir;
    write_json(dir.path / "cfg.json", {{"model", "not_a_model"}});
    CHECK(run_cli("generate --config " + (dir.path / "cfg.json").string() + " --out " +
                  (dir.path / "out").string()) == 1);
}

TEST_CASE("cli: generate then train then analyze produce their artifacts") {
    TempDir dir;
    write_json(dir.path / "cfg.json", kuramoto_config());
    const std::string cfg = " --config " + (dir.path / "cfg.json").string();
    const std::string out = (dir.path / "run").string();
    REQUIRE(run_cli("generate" + cfg + " --out " + out) == 0);
    CHECK(fs::exists(dir.path / "run" / "series.csv"));
    CHECK(fs::exists(dir.path / "run" / "network.csv"));
    CHECK(fs::exists(dir.path / "run" / "manifest.json"));

    json tcfg = kuramoto_config();
    tcfg["data_dir"] = out;
    write_json(dir.path / "tcfg.json", tcfg);
    const std::string tc = " --config " + (dir.path / "tcfg.json").string();
    REQUIRE(run_cli("train" + tc + " --out " + out) == 0);
    CHECK(fs::exists(dir.path / "run" / "ensemble.csv"));
    CHECK(fs::exists(dir.path / "run" / "mle_network.csv"));
    CHECK(fs::exists(dir.path / "run" / "summary.json"));

    REQUIRE(run_cli("infer-ols" + tc + " --out " + out) == 0);
    CHECK(fs::exists(dir.path / "run" / "ols_network.csv"));

    REQUIRE(run_cli("analyze" + tc + " --out " + out) == 0);
    CHECK(fs::exists(dir.path / "run" / "degree_distribution.csv"));
    CHECK(fs::exists(dir.path / "run" / "convexity.csv"));

    // The MLE written by train is a valid 5x5 matrix.
    const Mat mle = io::read_dense_matrix(dir.path / "run" / "mle_network.csv");
    CHECK(mle.rows() == 5);
    CHECK(mle.cols() == 5);
}

TEST_CASE("cli: train without data exits with code 1") {
    TempDir dir;
    json cfg = kuramoto_config();
    cfg["data_dir"] = (dir.path / "empty").string();
    fs::create_directories(dir.path / "empty");
    write_json(dir.path / "cfg.json", cfg);
    CHECK(run_cli("train --config " + (dir.path / "cfg.json").string() + " --out " +
                  (dir.path / "out").string()) == 1);
}

TEST_CASE("cli: sweep runs the grid and writes an aggregate") {
    TempDir dir;
    json cfg = kuramoto_config();
    cfg["training"]["epochs"] = 1;
    cfg["sweep"] = {{"axes", {{"data.sigma", {0.0, 0.01}}, {"data.seed", {1, 2}}}},
                    {"run", {"generate", "train"}}};
    write_json(dir.path / "cfg.json", cfg);
    const std::string out = (dir.path / "sweep").string();
    REQUIRE(run_cli("sweep --config " + (dir.path / "cfg.json").string() + " --out " +
                    out + " --workers 2") == 0);
    CHECK(fs::exists(dir.path / "sweep" / "aggregate.csv"));
    int runs = 0;
    for (const auto& entry : fs::directory_iterator(dir.path / "sweep"))
        if (entry.is_directory()) ++runs;
    CHECK(runs == 4);
    for (int k = 0; k < 4; ++k)
        CHECK(fs::exists(dir.path / "sweep" / ("run_000" + std::to_string(k)) /
                         "summary.json"));
}

TEST_CASE("cli: seed flag overrides config seeds deterministically") {
    TempDir dir;
    write_json(dir.path / "cfg.json", kuramoto_config());
    const std::string cfg = " --config " + (dir.path / "cfg.json").string();
    REQUIRE(run_cli("generate" + cfg + " --seed 123 --out " +
                    (dir.path / "a").string()) == 0);
    REQUIRE(run_cli("generate" + cfg + " --seed 123 --out " +
                    (dir.path / "b").string()) == 0);
    REQUIRE(run_cli("generate" + cfg + " --seed 456 --out " +
                    (dir.path / "c").string()) == 0);
    const auto a = io::read_time_series(dir.path / "a" / "series.csv");
    const auto b = io::read_time_series(dir.path / "b" / "series.csv");
    const auto c = io::read_time_series(dir.path / "c" / "series.csv");
    CHECK((a.segments[0] - b.segments[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.segments[0] - c.segments[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("config dotted-path get/set and validation") {
    auto cfg = netinf::cfg::RunConfig::from_json(kuramoto_config());
    CHECK(cfg.get("dynamics.beta").get<double>() == 1.0);
    cfg.set("dynamics.beta", 2.5);
    CHECK(cfg.get("dynamics.beta").get<double>() == 2.5);
    CHECK(cfg.get("nonexistent.path").is_null());
    CHECK(cfg.model() == netinf::cfg::ModelKind::Kuramoto1);

    // from_json validates eagerly, so a dangling file reference is rejected
    // at construction.
    CHECK_THROWS_AS(netinf::cfg::RunConfig::from_json(
                        {{"model", "kuramoto1"}, {"network", {{"file", "/no/such"}}}}),
                    std::invalid_argument);
}
