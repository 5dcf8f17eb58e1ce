#include "netinf/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netinf::cfg {

ModelKind model_from_string(const std::string& s) {
    if (s == "kuramoto1") return ModelKind::Kuramoto1;
    if (s == "kuramoto2") return ModelKind::Kuramoto2;
    if (s == "harris_wilson") return ModelKind::HarrisWilson;
    throw std::invalid_argument("config: unknown model kind '" + s + "'");
}

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Kuramoto1: return "kuramoto1";
        case ModelKind::Kuramoto2: return "kuramoto2";
        case ModelKind::HarrisWilson: return "harris_wilson";
    }
    return "?";
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    RunConfig config;
    try {
        in >> config.doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: parse error in " + path.string() + ": " + e.what());
    }
    config.source_dir = path.has_parent_path() ? path.parent_path()
                                               : std::filesystem::path(".");
    config.validate();
    return config;
}

RunConfig RunConfig::from_json(json j) {
    RunConfig config;
    config.doc = std::move(j);
    config.source_dir = ".";
    config.validate();
    return config;
}

ModelKind RunConfig::model() const {
    return model_from_string(doc.value("model", std::string()));
}

json RunConfig::get(const std::string& dotted_path, const json& fallback) const {
    const json* node = &doc;
    std::stringstream ss(dotted_path);
    std::string key;
    while (std::getline(ss, key, '.')) {
        if (!node->is_object() || !node->contains(key)) return fallback;
        node = &(*node)[key];
    }
    return *node;
}

void RunConfig::set(const std::string& dotted_path, const json& value) {
    json* node = &doc;
    std::stringstream ss(dotted_path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ss, key, '.')) keys.push_back(key);
    if (keys.empty()) throw std::invalid_argument("config: empty path");
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &(*node)[keys[i]];
    (*node)[keys.back()] = value;
}

std::filesystem::path RunConfig::resolve(const std::string& file) const {
    std::filesystem::path p(file);
    return p.is_absolute() ? p : source_dir / p;
}

dyn::KuramotoParams RunConfig::kuramoto_params() const {
    dyn::KuramotoParams p;
    p.alpha = get("dynamics.alpha", 0.0);
    p.beta = get("dynamics.beta", 1.0);
    p.kappa = get("dynamics.kappa", 1.0);
    p.dt = get("dynamics.dt", 0.01);
    p.sigma = get("dynamics.sigma", 0.0);
    return p;
}

dyn::HarrisWilsonParams RunConfig::harris_wilson_params() const {
    dyn::HarrisWilsonParams p;
    p.alpha = get("dynamics.alpha", 0.92);
    p.beta = get("dynamics.beta", 0.54);
    p.kappa = get("dynamics.kappa", 8.3);
    p.epsilon = get("dynamics.epsilon", 2.0);
    p.sigma = get("dynamics.sigma", 0.0);
    p.dt = get("dynamics.dt", 0.01);
    return p;
}

nn::MlpConfig RunConfig::mlp_config() const {
    nn::MlpConfig m;
    const bool hw = model() == ModelKind::HarrisWilson;
    m.num_layers = get("mlp.num_layers", hw ? 2 : 5);
    m.nodes_default = get("mlp.nodes_default", 20);
    m.activation_default =
        nn::activation_from_string(get("mlp.activation_default", std::string("tanh")));
    m.activations[m.num_layers - 1] = nn::activation_from_string(
        get("mlp.last_activation", std::string(hw ? "sigmoid" : "hard_sigmoid")));
    if (doc.contains("mlp") && doc["mlp"].contains("nodes_per_layer"))
        for (const auto& [k, v] : doc["mlp"]["nodes_per_layer"].items())
            m.nodes_per_layer[std::stoi(k)] = v.get<int>();
    if (doc.contains("mlp") && doc["mlp"].contains("biases")) {
        const json& b = doc["mlp"]["biases"];
        auto parse_bias = [](const json& spec) {
            nn::BiasInit init;
            if (spec.is_null()) {
                init.kind = nn::BiasInit::Kind::None;
            } else if (spec.is_string() && spec.get<std::string>() == "default") {
                init.kind = nn::BiasInit::Kind::Default;
            } else if (spec.is_array() && spec.size() == 2) {
                init.kind = nn::BiasInit::Kind::Uniform;
                init.lo = spec[0].get<double>();
                init.hi = spec[1].get<double>();
            } else {
                throw std::invalid_argument(
                    "config: bias spec must be null, \"default\", or [lo, hi]");
            }
            return init;
        };
        if (b.contains("default")) m.bias_default = parse_bias(b["default"]);
        if (b.contains("layer_specific"))
            for (const auto& [k, v] : b["layer_specific"].items())
                m.biases[std::stoi(k)] = parse_bias(v);
    }
    // input_dim / input_window / output_dim are filled in by the trainer.
    m.input_dim = 1;
    m.output_dim = 1;
    return m;
}

infer::TrainingConfig RunConfig::training_config() const {
    infer::TrainingConfig t;
    t.batch_size = get("training.batch_size", 2);
    t.epochs = get("training.epochs", 10);
    t.learning_rate = get("training.learning_rate", 0.002);
    const std::string opt = get("training.optimizer", std::string("adam"));
    if (opt == "adam")
        t.optimizer = nn::OptimizerState::Kind::Adam;
    else if (opt == "sgd")
        t.optimizer = nn::OptimizerState::Kind::Sgd;
    else
        throw std::invalid_argument("config: unknown optimizer '" + opt + "'");
    t.nu_value = get("training.nu_value", 10.0);
    t.nu_threshold = get("training.nu_threshold", 1e-10);
    t.nu_window = get("training.nu_window", 20);
    t.burn_in_fraction = get("training.burn_in", 0.1);
    t.loss_exponent_power = get("training.loss_exponent_power", 1.0);
    t.seed = get("training.seed", 0);
    return t;
}

void RunConfig::validate() const {
    if (!doc.is_object()) throw std::invalid_argument("config: document must be an object");
    if (!doc.contains("model")) throw std::invalid_argument("config: missing 'model'");
    model();  // throws on unknown kind
    for (const char* key : {"network.file", "data.file", "hw.cost_file"}) {
        const json v = get(key);
        if (v.is_string() && !std::filesystem::exists(resolve(v.get<std::string>())))
            throw std::invalid_argument("config: referenced file does not exist: " +
                                        v.get<std::string>());
    }
    if (doc.contains("sweep")) {
        const json& axes = doc["sweep"].value("axes", json::object());
        for (const auto& [axis, values] : axes.items())
            if (!values.is_array() || values.empty())
                throw std::invalid_argument("config: sweep axis '" + axis +
                                            "' must be a nonempty list");
    }
}

}  // namespace netinf::cfg
