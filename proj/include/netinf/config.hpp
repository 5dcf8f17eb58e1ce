#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "netinf/dynamics.hpp"
#include "netinf/mlp.hpp"
#include "netinf/training.hpp"

namespace netinf::cfg {

using nlohmann::json;

enum class ModelKind { Kuramoto1, Kuramoto2, HarrisWilson };

ModelKind model_from_string(const std::string& s);
const char* to_string(ModelKind m);

// Run configuration: a nested key/value document loaded from file, with
// dotted-path access for sweeps ("data.sigma").
struct RunConfig {
    json doc;
    std::filesystem::path source_dir;  // directory of the config file

    static RunConfig load(const std::filesystem::path& path);
    static RunConfig from_json(json j);

    ModelKind model() const;
    json get(const std::string& dotted_path, const json& fallback = {}) const;
    void set(const std::string& dotted_path, const json& value);
    // Resolve a possibly-relative file path against the config location.
    std::filesystem::path resolve(const std::string& file) const;

    dyn::KuramotoParams kuramoto_params() const;
    dyn::HarrisWilsonParams harris_wilson_params() const;
    nn::MlpConfig mlp_config() const;
    infer::TrainingConfig training_config() const;

    void validate() const;
};

}  // namespace netinf::cfg
