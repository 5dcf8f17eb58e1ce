#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netinf/tape.hpp"

namespace netinf::nn {

using ad::Mat;
using ad::Tape;
using ad::Var;

enum class Activation { Tanh, Sigmoid, HardSigmoid, Identity };

Activation activation_from_string(const std::string& name);
const char* to_string(Activation a);

struct BiasInit {
    enum class Kind { None, Default, Uniform } kind = Kind::None;
    double lo = 0.0;  // for Uniform
    double hi = 0.0;
};

// Architecture of the estimator net. Layer i maps width_i -> width_{i+1};
// the last layer maps onto output_dim.
struct MlpConfig {
    int num_layers = 5;
    int nodes_default = 20;
    std::map<int, int> nodes_per_layer;  // overrides, keyed by layer index
    BiasInit bias_default;
    std::map<int, BiasInit> biases;  // per-layer overrides
    Activation activation_default = Activation::Tanh;
    std::map<int, Activation> activations;  // per-layer overrides
    int input_window = 1;                   // q: time steps fed as input
    int input_dim = 0;                      // rows of the window (set per model)
    int output_dim = 0;                     // N*N or N*M

    int layer_output_width(int layer) const;
    Activation layer_activation(int layer) const;
    BiasInit layer_bias(int layer) const;
    void validate() const;
};

// Handles into a recorded forward pass; grads of params are read from these.
struct ForwardPass {
    Var output;
    std::vector<Var> weights;
    std::vector<Var> biases;  // invalid Var where the layer has no bias
};

class Mlp {
public:
    Mlp() = default;
    // Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer.
    Mlp(const MlpConfig& config, std::uint64_t seed);

    // Records the pass on the tape; `window` is input_dim x input_window,
    // flattened column-wise.
    ForwardPass forward(Tape& tape, const Mat& window) const;

    // Plain evaluation without a tape.
    Mat evaluate(const Mat& window) const;

    const MlpConfig& config() const { return config_; }
    std::vector<Mat>& weights() { return weights_; }
    const std::vector<Mat>& weights() const { return weights_; }
    std::vector<Mat>& biases() { return biases_; }
    const std::vector<Mat>& biases() const { return biases_; }

    std::size_t parameter_count() const;

private:
    MlpConfig config_;
    std::vector<Mat> weights_;
    std::vector<Mat> biases_;  // empty Mat where the layer has no bias
};

// Rescales the final layer so that every last-layer pre-activation on the
// probe window is >= 3 + margin, making a hard-sigmoid output the all-ones
// vector exactly (a delta prior on the complete graph).
void init_delta_on_complete_graph(Mlp& mlp, const Mat& probe_window, double margin = 1.0);

struct OptimizerState {
    enum class Kind { Adam, Sgd } kind = Kind::Adam;
    double learning_rate = 0.002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Mat> m;  // first moments, parallel to params
    std::vector<Mat> v;  // second moments

    static OptimizerState adam(double lr = 0.002);
    static OptimizerState sgd(double lr);
};

// In-place update of `params` given matching `grads`. Non-finite gradients
// abort the run with a diagnostic naming the step.
void optimizer_step(std::vector<Mat*> params, const std::vector<Mat>& grads,
                    OptimizerState& state);

}  // namespace netinf::nn
