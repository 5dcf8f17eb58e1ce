#include "netinf/training.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "netinf/density.hpp"

namespace netinf::infer {

// --- nu schedule -----------------------------------------------------------

NuSchedule::NuSchedule(double value, double threshold, int window)
    : value_(value), threshold_(threshold), window_(window) {
    if (window_ < 1) throw std::invalid_argument("NuSchedule: window must be >= 1");
}

double NuSchedule::push(double total_loss) {
    if (!latched_) {
        history_.push_back(total_loss);
        if (static_cast<int>(history_.size()) >= window_) {
            double avg = 0.0;
            for (std::size_t k = history_.size() - static_cast<std::size_t>(window_);
                 k < history_.size(); ++k)
                avg += history_[k];
            averages_.push_back(avg / window_);
        }
        if (averages_.size() >= 3) {
            const std::size_t k = averages_.size() - 1;
            const double d_s = (averages_[k] - averages_[k - 2]) / 2.0;
            const double d_ss = averages_[k] - 2.0 * averages_[k - 1] + averages_[k - 2];
            if (std::abs(d_s) <= threshold_ && std::abs(d_ss) <= threshold_)
                latched_ = true;  // permanently
        }
    }
    return current();
}

// --- ensemble --------------------------------------------------------------

std::vector<std::size_t> SampleEnsemble::active_indices() const {
    const std::size_t skip =
        static_cast<std::size_t>(burn_in_fraction * static_cast<double>(samples.size()));
    std::vector<std::size_t> idx;
    for (std::size_t i = skip; i < samples.size(); ++i) idx.push_back(i);
    if (idx.empty() && !samples.empty()) idx.push_back(samples.size() - 1);
    return idx;
}

std::vector<double> SampleEnsemble::normalized_weights() const {
    const auto idx = active_indices();
    if (idx.empty()) throw std::invalid_argument("ensemble: empty after burn-in");
    double min_loss = samples[idx.front()].data_loss;
    for (std::size_t i : idx) min_loss = std::min(min_loss, samples[i].data_loss);
    std::vector<double> w;
    w.reserve(idx.size());
    double total = 0.0;
    for (std::size_t i : idx) {
        // Shift by the minimum: a common additive constant in the losses
        // leaves the normalized weights unchanged.
        const double e = std::exp(-loss_exponent_power * (samples[i].data_loss - min_loss));
        w.push_back(e);
        total += e;
    }
    for (double& v : w) v /= total;
    return w;
}

std::size_t SampleEnsemble::mle_index() const {
    if (samples.empty()) throw std::invalid_argument("ensemble: empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].data_loss < samples[best].data_loss) best = i;
    return best;
}

const Mat& SampleEnsemble::mle_network() const { return samples[mle_index()].network; }

// --- losses ----------------------------------------------------------------

namespace {

double series_l2(const std::vector<Vec>& predicted, const std::vector<Vec>& observed) {
    if (predicted.size() != observed.size())
        throw std::invalid_argument("loss: predicted/observed length mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        sq += (predicted[i] - observed[i]).squaredNorm();
    return std::sqrt(sq);
}

}  // namespace

KuramotoLossTerms loss_kuramoto(const std::vector<Vec>& predicted,
                                const std::vector<Vec>& observed, const Mat& a_hat,
                                const Mat* a0, double nu) {
    if (nu < 0.0) throw std::invalid_argument("loss_kuramoto: nu must be >= 0");
    KuramotoLossTerms terms;
    terms.data = series_l2(predicted, observed);
    terms.asymmetry = (a_hat - a_hat.transpose()).norm();
    terms.trace = a_hat.trace();
    if (a0 != nullptr && nu > 0.0) terms.prior = nu * (a_hat - *a0).norm();
    return terms;
}

double loss_hw(const std::vector<Vec>& predicted, const std::vector<Vec>& observed) {
    return series_l2(predicted, observed);
}

Mat row_normalize(const Mat& c) {
    Mat out = c;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const double s = c.row(i).sum();
        if (s == 0.0)
            throw std::invalid_argument("row_normalize: zero row " + std::to_string(i));
        out.row(i) /= s;
    }
    return out;
}

// --- marginals -------------------------------------------------------------

double Marginal::mode() const {
    Eigen::Index best = 0;
    density.maxCoeff(&best);
    return grid(best);
}

double Marginal::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) m += weights[j] * samples[j];
    return m;
}

Marginal marginal_density(const SampleEnsemble& ensemble, int row, int col,
                          int grid_size, double bandwidth) {
    const auto idx = ensemble.active_indices();
    if (idx.empty()) throw std::invalid_argument("marginal_density: empty ensemble");
    Marginal m;
    m.row = row;
    m.col = col;
    m.weights = ensemble.normalized_weights();
    for (std::size_t i : idx)
        m.samples.push_back(ensemble.samples[i].network(row, col));
    m.bandwidth = bandwidth > 0.0
                      ? bandwidth
                      : density::scott_bandwidth(m.samples, m.weights, 1e-3);
    m.grid = density::linspace(0.0, 1.0, grid_size);
    m.density = density::weighted_kde(m.samples, m.weights, m.grid, m.bandwidth);
    return m;
}

double edge_p_value(const Marginal& marginal, double a0) {
    const double mode = marginal.mode();
    // At the mode itself no tail is excluded.
    if (std::abs(a0 - mode) < 1e-12) return 1.0;
    double p = 0.0;
    for (std::size_t j = 0; j < marginal.samples.size(); ++j) {
        if (a0 >= mode ? marginal.samples[j] >= a0 : marginal.samples[j] <= a0)
            p += marginal.weights[j];
    }
    return std::clamp(p, 0.0, 1.0);
}

// --- training loops --------------------------------------------------------

namespace {

using ad::Tape;
using ad::Var;

struct StepContext {
    nn::Mlp* mlp;
    nn::OptimizerState* opt;
    long iteration = 0;
};

// Backprop + optimizer update for a recorded pass.
void apply_gradients(Tape& tape, const nn::ForwardPass& fp, Var loss, StepContext& ctx) {
    const double total = tape.value(loss)(0, 0);
    if (!std::isfinite(total)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at iteration " << ctx.iteration;
        throw std::runtime_error(msg.str());
    }
    tape.backward(loss);
    std::vector<Mat*> params;
    std::vector<Mat> grads;
    for (std::size_t l = 0; l < fp.weights.size(); ++l) {
        params.push_back(&ctx.mlp->weights()[l]);
        grads.push_back(tape.grad(fp.weights[l]));
        if (fp.biases[l].valid()) {
            params.push_back(&ctx.mlp->biases()[l]);
            grads.push_back(tape.grad(fp.biases[l]));
        }
    }
    nn::optimizer_step(params, grads, *ctx.opt);
}

}  // namespace

TrainResult train_kuramoto(const TrainingConfig& config, const dyn::TimeSeries& data,
                           const dyn::KuramotoParams& params, int order,
                           const Mat* a0, nn::MlpConfig mlp_config) {
    if (data.segments.empty()) throw std::invalid_argument("train: no data segments");
    const int n = data.nodes;
    const int batch = config.batch_size;
    if (batch < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    const int t_first = order == 2 ? 1 : 0;
    for (const Mat& seg : data.segments)
        if (seg.cols() - 1 - t_first < batch)
            throw std::invalid_argument(
                "train: batch_size exceeds usable segment length");

    mlp_config.input_dim = n;
    mlp_config.input_window = batch;
    mlp_config.output_dim = n * n;
    nn::Mlp mlp(mlp_config, config.seed);
    const bool hard_last =
        mlp_config.layer_activation(mlp_config.num_layers - 1) == nn::Activation::HardSigmoid;
    if (hard_last) {
        // Delta prior on the complete graph, probed with the first window.
        init_delta_on_complete_graph(mlp, data.segments.front().middleCols(t_first, batch));
    }

    nn::OptimizerState opt = config.optimizer == nn::OptimizerState::Kind::Adam
                                 ? nn::OptimizerState::adam(config.learning_rate)
                                 : nn::OptimizerState::sgd(config.learning_rate);
    NuSchedule schedule(config.nu_value, config.nu_threshold, config.nu_window);
    double nu = a0 != nullptr ? schedule.current() : 0.0;

    dyn::KuramotoParams train_params = params;
    train_params.sigma = 0.0;  // the differentiable stepper runs noiseless

    TrainResult result;
    result.ensemble.burn_in_fraction = config.burn_in_fraction;
    result.ensemble.loss_exponent_power = config.loss_exponent_power;
    StepContext ctx{&mlp, &opt, 0};

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const Mat& seg : data.segments) {
            for (int t0 = t_first; t0 + batch <= seg.cols() - 1; t0 += batch) {
                Tape tape;
                auto fp = mlp.forward(tape, seg.middleCols(t0, batch));
                Var a_hat = tape.reshape(fp.output, n, n);

                Var phases = tape.leaf(seg.col(t0));
                Var velocities{};
                if (order == 2)
                    velocities = tape.leaf((seg.col(t0) - seg.col(t0 - 1)) / params.dt);

                Var data_sq{};
                for (int b = 1; b <= batch; ++b) {
                    if (order == 2) {
                        auto [p_next, v_next] = dyn::kuramoto_step_second_order(
                            tape, phases, velocities, a_hat, train_params);
                        phases = p_next;
                        velocities = v_next;
                    } else {
                        phases = dyn::kuramoto_step_first_order(tape, phases, a_hat,
                                                                train_params);
                    }
                    Var diff = tape.sub(phases, tape.leaf(seg.col(t0 + b)));
                    Var sq = tape.cwise_pow(tape.norm_l2(diff), 2.0);
                    data_sq = data_sq.valid() ? tape.add(data_sq, sq) : sq;
                }
                Var data_loss = tape.cwise_pow(data_sq, 0.5);

                Var sym = tape.norm_l2(tape.sub(a_hat, tape.transpose(a_hat)));
                Var loss = tape.add(tape.add(data_loss, sym), tape.trace(a_hat));
                if (a0 != nullptr && nu > 0.0) {
                    Var prior = tape.norm_l2(tape.sub(a_hat, tape.leaf(*a0)));
                    loss = tape.add(loss, tape.scale(prior, nu));
                }

                const double total = tape.value(loss)(0, 0);
                result.ensemble.samples.push_back(
                    Sample{tape.value(a_hat), tape.value(data_loss)(0, 0), ctx.iteration});
                result.loss_history.push_back(total);
                result.nu_history.push_back(nu);

                apply_gradients(tape, fp, loss, ctx);
                if (a0 != nullptr) nu = schedule.push(total);
                ++ctx.iteration;
            }
        }
    }
    result.mlp = std::move(mlp);
    return result;
}

std::vector<HwWindow> subsample_hw_windows(const dyn::HarrisWilsonSeries& series,
                                           int n_windows, int window_len,
                                           std::uint64_t seed) {
    const Eigen::Index total = series.destinations.cols();
    if (window_len < 2 || total < window_len)
        throw std::invalid_argument("subsample_hw_windows: series shorter than window");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> start(0, total - window_len);
    std::vector<HwWindow> windows;
    windows.reserve(static_cast<std::size_t>(n_windows));
    for (int k = 0; k < n_windows; ++k) {
        const Eigen::Index t0 = start(rng);
        windows.push_back(HwWindow{series.origins.middleCols(t0, window_len),
                                   series.destinations.middleCols(t0, window_len)});
    }
    return windows;
}

TrainResult train_harris_wilson(const TrainingConfig& config,
                                const std::vector<HwWindow>& windows,
                                const dyn::HarrisWilsonParams& params,
                                nn::MlpConfig mlp_config) {
    if (windows.empty()) throw std::invalid_argument("train: no data windows");
    const int n = static_cast<int>(windows.front().origins.rows());
    const int m = static_cast<int>(windows.front().destinations.rows());
    const int batch = config.batch_size;
    for (const HwWindow& w : windows)
        if (w.destinations.cols() - 1 < batch || w.origins.cols() != w.destinations.cols())
            throw std::invalid_argument("train: window incompatible with batch size");

    mlp_config.input_dim = n + m;
    mlp_config.input_window = batch;
    mlp_config.output_dim = n * m;
    nn::Mlp mlp(mlp_config, config.seed);

    nn::OptimizerState opt = config.optimizer == nn::OptimizerState::Kind::Adam
                                 ? nn::OptimizerState::adam(config.learning_rate)
                                 : nn::OptimizerState::sgd(config.learning_rate);

    dyn::HarrisWilsonParams train_params = params;
    train_params.sigma = 0.0;

    TrainResult result;
    result.ensemble.burn_in_fraction = config.burn_in_fraction;
    result.ensemble.loss_exponent_power = config.loss_exponent_power;
    StepContext ctx{&mlp, &opt, 0};

    Mat ones_row = Mat::Ones(1, m);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const HwWindow& w : windows) {
            for (int t0 = 0; t0 + batch <= w.destinations.cols() - 1; t0 += batch) {
                Tape tape;
                Mat input(n + m, batch);
                input.topRows(n) = w.origins.middleCols(t0, batch);
                input.bottomRows(m) = w.destinations.middleCols(t0, batch);
                auto fp = mlp.forward(tape, input);
                Var c_raw = tape.reshape(fp.output, n, m);
                // Scale gauge: the dynamics are invariant under C -> lambda C,
                // so work with row sums fixed to 1.
                if ((tape.value(c_raw).rowwise().sum().array() == 0.0).any())
                    throw std::runtime_error("train: predicted cost network has a zero row");
                Var row_inv = tape.cwise_pow(tape.row_sum(c_raw), -1.0);
                Var c_hat = tape.hadamard(c_raw, tape.matmul(row_inv, tape.leaf(ones_row)));

                Var w_state = tape.leaf(w.destinations.col(t0));
                Var data_sq{};
                for (int b = 1; b <= batch; ++b) {
                    Var o_leaf = tape.leaf(w.origins.col(t0 + b - 1));
                    w_state = dyn::harris_wilson_step(tape, w_state, o_leaf, c_hat,
                                                      train_params);
                    Var diff = tape.sub(w_state, tape.leaf(w.destinations.col(t0 + b)));
                    Var sq = tape.cwise_pow(tape.norm_l2(diff), 2.0);
                    data_sq = data_sq.valid() ? tape.add(data_sq, sq) : sq;
                }
                Var loss = tape.cwise_pow(data_sq, 0.5);

                result.ensemble.samples.push_back(Sample{
                    tape.value(c_hat), tape.value(loss)(0, 0), ctx.iteration});
                result.loss_history.push_back(tape.value(loss)(0, 0));
                result.nu_history.push_back(0.0);

                apply_gradients(tape, fp, loss, ctx);
                ++ctx.iteration;
            }
        }
    }
    result.mlp = std::move(mlp);
    return result;
}

}  // namespace netinf::infer
