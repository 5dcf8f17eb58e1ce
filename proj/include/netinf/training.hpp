#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netinf/dynamics.hpp"
#include "netinf/mlp.hpp"

namespace netinf::infer {

using ad::Mat;
using Vec = Eigen::VectorXd;

struct TrainingConfig {
    int batch_size = 2;
    int epochs = 10;
    double learning_rate = 0.002;
    nn::OptimizerState::Kind optimizer = nn::OptimizerState::Kind::Adam;
    double nu_value = 10.0;
    double nu_threshold = 1e-10;
    int nu_window = 20;
    double burn_in_fraction = 0.1;
    // Exponent p in the ensemble weight exp(-p * data_loss).
    double loss_exponent_power = 1.0;
    std::uint64_t seed = 0;
};

// nu = 10 while |<d_s J>| > threshold or |<d_ss J>| > threshold, estimated by
// central differences of the windowed moving average; once both fall below,
// nu = 0 permanently.
class NuSchedule {
public:
    NuSchedule(double value = 10.0, double threshold = 1e-10, int window = 20);

    double push(double total_loss);  // record and return the nu for the next step
    double current() const { return latched_ ? 0.0 : value_; }
    bool latched() const { return latched_; }

private:
    double value_;
    double threshold_;
    int window_;
    bool latched_ = false;
    std::vector<double> history_;
    std::vector<double> averages_;
};

struct Sample {
    Mat network;
    double data_loss = 0.0;
    long iteration = 0;
};

// Sequence of (adjacency sample, predicted-series loss) pairs gathered during
// training, in training order; the carrier of the predictive density.
struct SampleEnsemble {
    std::vector<Sample> samples;
    double burn_in_fraction = 0.1;
    double loss_exponent_power = 1.0;

    std::vector<std::size_t> active_indices() const;  // post burn-in
    // Normalized weights over the active samples, w ∝ exp(-p * loss).
    std::vector<double> normalized_weights() const;
    std::size_t mle_index() const;  // min data loss, earliest iteration on ties
    const Mat& mle_network() const;
};

struct KuramotoLossTerms {
    double data = 0.0;
    double asymmetry = 0.0;
    double trace = 0.0;
    double prior = 0.0;  // nu * ||A - A0||_2
    double total() const { return data + asymmetry + trace + prior; }
};

// J = ||T_hat - T||_2 + ||A - A^T||_2 + tr(A) + nu ||A - A0||_2.
KuramotoLossTerms loss_kuramoto(const std::vector<Vec>& predicted,
                                const std::vector<Vec>& observed, const Mat& a_hat,
                                const Mat* a0, double nu);

// L2 data misfit after row-normalizing the predicted cost network.
double loss_hw(const std::vector<Vec>& predicted, const std::vector<Vec>& observed);

Mat row_normalize(const Mat& c);  // rows scaled to sum 1; zero row rejected

struct Marginal {
    int row = 0;
    int col = 0;
    Vec grid;
    Vec density;
    double bandwidth = 0.0;
    // The weighted edge samples behind the density, for tail statistics.
    std::vector<double> samples;
    std::vector<double> weights;

    double mode() const;
    double mean() const;
};

Marginal marginal_density(const SampleEnsemble& ensemble, int row, int col,
                          int grid_size = 100, double bandwidth = 0.0);

// One-sided tail mass from the density mode toward a0, computed on the
// weighted samples (inclusive at a0).
double edge_p_value(const Marginal& marginal, double a0);

struct TrainResult {
    SampleEnsemble ensemble;
    std::vector<double> loss_history;  // total loss per iteration
    std::vector<double> nu_history;
    nn::Mlp mlp;
};

// The Gibbs-style training loop for Kuramoto data: per batch, feed the
// observation window to the MLP, run the differentiable stepper B steps from
// the batch's true initial state, backprop the loss, and append the sample.
TrainResult train_kuramoto(const TrainingConfig& config, const dyn::TimeSeries& data,
                           const dyn::KuramotoParams& params, int order,
                           const Mat* a0, nn::MlpConfig mlp_config);

struct HwWindow {
    Mat origins;       // N x len
    Mat destinations;  // M x len
};

std::vector<HwWindow> subsample_hw_windows(const dyn::HarrisWilsonSeries& series,
                                           int n_windows, int window_len,
                                           std::uint64_t seed);

TrainResult train_harris_wilson(const TrainingConfig& config,
                                const std::vector<HwWindow>& windows,
                                const dyn::HarrisWilsonParams& params,
                                nn::MlpConfig mlp_config);

}  // namespace netinf::infer
