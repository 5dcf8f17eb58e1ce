#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "netinf/config.hpp"
#include "netinf/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    bool has_seed = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "override all RNG seeds in the config");
}

netinf::cfg::RunConfig load_config(const CommonOpts& opts) {
    auto config = netinf::cfg::RunConfig::load(opts.config_path);
    if (opts.has_seed) {
        config.set("data.seed", opts.seed);
        config.set("training.seed", opts.seed);
        config.set("hw.network_seed", opts.seed);
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network inference from node time series"};
    app.set_version_flag("--version", std::string(netinf::run::kToolVersion));
    app.require_subcommand(1);

    CommonOpts opts;
    int workers = 1;

    CLI::App* generate = app.add_subcommand("generate", "simulate a dataset");
    CLI::App* train = app.add_subcommand("train", "train the estimator net");
    CLI::App* infer_ols = app.add_subcommand("infer-ols", "least-squares baseline");
    CLI::App* analyze = app.add_subcommand("analyze", "distributions, convexity, timing");
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    for (CLI::App* sub : {generate, train, infer_ols, analyze, sweep}) add_common(sub, opts);
    sweep->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    opts.has_seed = app.get_subcommand()->count("--seed") > 0;

    try {
        const auto config = load_config(opts);
        if (generate->parsed())
            netinf::run::cmd_generate(config, opts.out_dir);
        else if (train->parsed())
            netinf::run::cmd_train(config, opts.out_dir);
        else if (infer_ols->parsed())
            netinf::run::cmd_infer_ols(config, opts.out_dir);
        else if (analyze->parsed())
            netinf::run::cmd_analyze(config, opts.out_dir);
        else if (sweep->parsed())
            netinf::run::cmd_sweep(config, opts.out_dir, workers);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
