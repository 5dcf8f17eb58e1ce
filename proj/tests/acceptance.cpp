// End-to-end acceptance checks. Each criterion is self-contained, prints one
// [PASS]/[FAIL] line, and exits nonzero on failure so `ctest` can run the
// criteria in parallel.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "netinf/analysis.hpp"
#include "netinf/density.hpp"
#include "netinf/dynamics.hpp"
#include "netinf/graphs.hpp"
#include "netinf/mlp.hpp"
#include "netinf/tape.hpp"
#include "netinf/training.hpp"

using namespace netinf;
using ad::Tape;
using ad::Var;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace {

Mat random_mat(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

nn::MlpConfig kuramoto_mlp(nn::Activation last = nn::Activation::HardSigmoid) {
    nn::MlpConfig c;
    c.num_layers = 5;
    c.nodes_default = 20;
    c.activation_default = nn::Activation::Tanh;
    c.activations[4] = last;
    return c;
}

// --- 1: autodiff finite-difference checks ---------------------------------

bool criterion_autodiff() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> dim(2, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = dim(rng);
        dyn::KuramotoParams params;
        params.beta = 1.2;
        params.kappa = 0.9;
        params.dt = 0.03;
        params.power = random_mat(rng, n, 1, -1, 1).col(0);
        const Mat a0 = random_mat(rng, n, n, 0.05, 0.95);
        const Vec phi0 = random_mat(rng, n, 1, -2, 2).col(0);
        const Vec target = random_mat(rng, n, 1, -2, 2).col(0);

        auto loss_of = [&](Tape& t, const Mat& a, bool grads) {
            Var va = t.leaf(a, grads);
            Var next = dyn::kuramoto_step_first_order(t, t.leaf(phi0), va, params);
            Var data = t.norm_l2(t.sub(next, t.leaf(target)));
            Var sym = t.norm_l2(t.sub(va, t.transpose(va)));
            Var penal = t.add(sym, t.trace(va));
            // Exercise the remaining primitives in the same scalar.
            Var extras = t.norm_l1(t.tanh(t.hadamard(va, t.exp(t.scale(va, -0.5)))));
            Var sq = t.trace(t.matmul(t.sigmoid(va), t.transpose(t.sin(va))));
            Var shaped = t.norm_l2(t.cwise_pow(t.reshape(t.row_sum(va), 1, n), 1.3));
            Var hs = t.norm_l1(t.hard_sigmoid(t.scale(va, 2.0)));
            Var all = t.add(t.add(t.add(data, penal), t.add(extras, sq)),
                            t.add(shaped, hs));
            return std::make_pair(all, va);
        };
        Tape t;
        auto [out, va] = loss_of(t, a0, true);
        t.backward(out);
        const Mat analytic = t.grad(va);

        Mat fd(n, n);
        Mat x = a0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double save = x(i, j);
                x(i, j) = save + 1e-5;
                Tape tp;
                const double up = tp.value(loss_of(tp, x, false).first)(0, 0);
                x(i, j) = save - 1e-5;
                Tape tm;
                const double down = tm.value(loss_of(tm, x, false).first)(0, 0);
                x(i, j) = save;
                fd(i, j) = (up - down) / 2e-5;
            }
        const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
        worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff() / scale);
    }
    std::cout << "  worst relative gradient error: " << worst << "\n";
    return worst < 1e-6;
}

// --- 2: OLS exact recovery -------------------------------------------------

bool criterion_ols_exact() {
    const int n = 10;
    Mat a = graphs::random_graph(n, 0.4, 0.2, 0.9, 7);
    dyn::KuramotoParams p;
    p.beta = 1.0;
    p.kappa = 1.0;
    p.dt = 0.02;
    p.power = Vec::Zero(n);
    const auto data = dyn::generate_kuramoto_dataset(a, 25, 3, p, 1, 11);
    const auto result = analysis::ols_infer(data, p, 1);
    const double per_edge = analysis::l1_error(result.network, a) / (n * n);
    std::cout << "  convexity " << result.gram.convexity << ", per-edge L1 "
              << per_edge << "\n";
    return result.gram.convexity == n - 1 && per_edge < 1e-6;
}

// --- 3: neural vs OLS under noise -----------------------------------------

bool criterion_neural_vs_ols() {
    const int n = 16;
    int wins = 0;
    for (int seed = 0; seed < 10; ++seed) {
        Mat a = graphs::random_graph(n, 0.35, 0.2, 0.9, 500 + seed);
        dyn::KuramotoParams p;
        p.beta = 1.0;
        p.kappa = 1.0;
        p.dt = 0.02;
        p.sigma = 1e-2;
        p.power = Vec::Zero(n);
        // Long segments with B=8 keep the per-sample loss variance small, so
        // the minimum-loss sample tracks network quality rather than batch
        // luck.
        const auto data = dyn::generate_kuramoto_dataset(a, 12, 9, p, 1, 900 + seed);

        const auto ols = analysis::ols_infer(data, p, 1);
        const double ols_err = analysis::l1_error(ols.network, a);

        infer::TrainingConfig tc;
        tc.batch_size = 8;
        tc.epochs = 800;
        tc.seed = 40 + seed;
        const auto result = infer::train_kuramoto(tc, data, p, 1, nullptr,
                                                  kuramoto_mlp(nn::Activation::Sigmoid));
        const double neural_err =
            analysis::l1_error(result.ensemble.mle_network(), a);
        std::cout << "  seed " << seed << ": neural " << neural_err << " vs OLS "
                  << ols_err << (neural_err < ols_err ? "  (win)" : "") << "\n";
        if (neural_err < ols_err) ++wins;
    }
    std::cout << "  neural wins " << wins << "/10\n";
    return wins >= 8;
}

// --- helpers for criteria 4, 5 --------------------------------------------

struct UncertaintyRun {
    double hellinger = 0.0;
    double kl = 0.0;
    int convexity = 0;
};

// Trains `restarts` independent runs on the same data and merges the
// converged tail of each into one ensemble: restart-to-restart spread exposes
// the flat (unidentified) directions of the posterior that a single gradient
// run collapses onto a point.
UncertaintyRun train_and_measure(const Mat& a, const dyn::KuramotoParams& p,
                                 int segments, int steps_per_segment, int batch,
                                 int epochs, int restarts, std::uint64_t seed) {
    const auto data =
        dyn::generate_kuramoto_dataset(a, segments, steps_per_segment, p, 1, seed);
    infer::SampleEnsemble merged;
    merged.burn_in_fraction = 0.0;
    for (int r = 0; r < restarts; ++r) {
        infer::TrainingConfig tc;
        tc.batch_size = batch;
        tc.epochs = epochs;
        tc.seed = (seed ^ 0xabcd) * 31 + r;
        // A wide random output bias makes restarts start from genuinely
        // different networks; identified directions are pulled back to the
        // truth, unidentified ones stay put.
        nn::MlpConfig mc = kuramoto_mlp(nn::Activation::Sigmoid);
        mc.biases[4] = nn::BiasInit{nn::BiasInit::Kind::Uniform, -3.0, 3.0};
        const auto result = infer::train_kuramoto(tc, data, p, 1, nullptr, mc);
        const auto& samples = result.ensemble.samples;
        const std::size_t tail = samples.size() / 4;
        merged.samples.insert(merged.samples.end(), samples.end() - tail,
                              samples.end());
    }
    const Vec grid = density::linspace(0.0, static_cast<double>(a.rows()), 120);
    const auto est =
        analysis::hellinger_uncertainty(merged, analysis::Statistic::Degree, grid);
    UncertaintyRun out;
    out.hellinger = est.band_total;
    out.kl = analysis::kl_uncertainty(merged, analysis::Statistic::Degree, grid,
                                      est.bandwidth);
    out.convexity = analysis::gram_convexity(data, 1).convexity;
    return out;
}

// --- 4: convexity vs uncertainty trend ------------------------------------

bool criterion_convexity_trend() {
    const int n = 16;
    dyn::KuramotoParams p;
    p.beta = 1.0;
    p.kappa = 1.0;
    p.dt = 0.02;
    p.power = Vec::Zero(n);
    std::vector<double> cs, bands;
    for (int target_c = 3; target_c <= 15; target_c += 2) {
        double mean_band = 0.0, mean_c = 0.0;
        for (int seed = 0; seed < 10; ++seed) {
            Mat a = graphs::random_graph(n, 0.35, 0.2, 0.9, 300 + seed);
            // Two-state segments contribute one observation column each, so
            // the segment count sets the Gram rank directly. Epochs are scaled
            // so every run gets the same number of gradient updates.
            const auto run = train_and_measure(a, p, target_c, 2, 1,
                                               20000 / target_c, 4,
                                               1000 * target_c + seed);
            mean_band += run.hellinger / 10.0;
            mean_c += run.convexity / 10.0;
        }
        cs.push_back(mean_c);
        bands.push_back(mean_band);
        std::cout << "  c=" << mean_c << " mean Hellinger band " << mean_band << "\n";
    }
    const double rho = analysis::spearman_correlation(cs, bands);
    std::cout << "  Spearman(c, band) = " << rho << "\n";
    return rho <= -0.8;
}

// --- 5: noise vs uncertainty trend ----------------------------------------

bool criterion_noise_trend() {
    const int n = 16;
    const std::vector<double> sigmas = {1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<double> hs, kls, idx;
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        dyn::KuramotoParams p;
        p.beta = 1.0;
        p.kappa = 1.0;
        p.dt = 0.02;
        p.sigma = sigmas[k];
        p.power = Vec::Zero(n);
        double h = 0.0, kl = 0.0;
        for (int seed = 0; seed < 5; ++seed) {
            Mat a = graphs::random_graph(n, 0.35, 0.2, 0.9, 700 + seed);
            const auto run =
                train_and_measure(a, p, 30, 3, 2, 500, 4, 40 * (k + 1) + seed);
            h += run.hellinger / 5.0;
            kl += run.kl / 5.0;
        }
        hs.push_back(h);
        kls.push_back(kl);
        idx.push_back(static_cast<double>(k));
        std::cout << "  sigma=" << sigmas[k] << " Hellinger " << h << " KL " << kl
                  << "\n";
    }
    const double rho_h = analysis::spearman_correlation(idx, hs);
    const double rho_kl = analysis::spearman_correlation(idx, kls);
    std::cout << "  Spearman sigma-Hellinger " << rho_h << ", sigma-KL " << rho_kl
              << "\n";
    return hs.back() > hs.front() && kls.back() > kls.front() && rho_h > 0.7 &&
           rho_kl > 0.7;
}

// --- 6: quadratic epoch scaling -------------------------------------------

bool criterion_scaling() {
    auto epoch_time = [](int n) {
        Mat a = graphs::random_graph(n, 0.2, 0.2, 0.9, 19);
        dyn::KuramotoParams p;
        p.beta = 1.0;
        p.kappa = 1.0;
        p.dt = 0.02;
        p.power = Vec::Zero(n);
        // L and B fixed across sizes.
        const auto data = dyn::generate_kuramoto_dataset(a, 8, 3, p, 1, 23);
        infer::TrainingConfig tc;
        tc.batch_size = 2;
        tc.epochs = 1;
        tc.seed = 5;
        std::vector<double> times;
        for (int rep = 0; rep < 7; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            infer::train_kuramoto(tc, data, p, 1, nullptr, kuramoto_mlp());
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        times.erase(times.begin());  // warm-up
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };
    const double t64 = epoch_time(64);
    const double t128 = epoch_time(128);
    const double ratio = t128 / t64;
    std::cout << "  epoch time N=64: " << t64 << " s, N=128: " << t128
              << " s, ratio " << ratio << "\n";
    return ratio >= 3.0 && ratio <= 6.0;
}

// --- 7: power-cut localization --------------------------------------------

bool criterion_power_cut() {
    const int n = 16;
    int localized = 0;
    std::vector<bool> p_ok;
    for (int seed = 0; seed < 10; ++seed) {
        Mat a0 = graphs::random_graph(n, 0.3, 0.4, 0.9, 1100 + seed);
        dyn::KuramotoParams p;
        p.alpha = 1.0;
        p.beta = 2.0;
        p.kappa = 10.0;
        p.dt = 0.01;
        // Balanced alternating injections give the grid a nontrivial
        // phase-locked state with real flows on the edges.
        p.power = Vec(n);
        for (int i = 0; i < n; ++i) p.power(i) = (i % 2 == 0) ? 5.0 : -5.0;

        // Cut the two node-disjoint edges carrying the largest equilibrium
        // flow |a_ij sin(phi_i - phi_j)|, found from an uncut run.
        const auto base = dyn::simulate_power_cut(a0, {}, p, 2, 0.0);
        const Vec& phi_eq = base.equilibrium_phases;
        struct Flow {
            int i, j;
            double flow;
        };
        std::vector<Flow> flows;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (a0(i, j) > 0.0)
                    flows.push_back(
                        {i, j, std::abs(a0(i, j) * std::sin(phi_eq(i) - phi_eq(j)))});
        std::sort(flows.begin(), flows.end(),
                  [](const Flow& x, const Flow& y) { return x.flow > y.flow; });
        std::vector<std::pair<int, int>> edges{{flows[0].i, flows[0].j}};
        for (std::size_t k = 1; k < flows.size() && edges.size() < 2; ++k)
            if (flows[k].i != flows[0].i && flows[k].i != flows[0].j &&
                flows[k].j != flows[0].i && flows[k].j != flows[0].j)
                edges.emplace_back(flows[k].i, flows[k].j);

        const auto cut = dyn::simulate_power_cut(a0, edges, p, 7, 0.2);
        const dyn::TimeSeries& data = cut.response;
        const int c = analysis::gram_convexity(data, 2).convexity;
        if (c > n / 3) {
            std::cout << "  seed " << seed << ": convexity " << c
                      << " too high, check setup\n";
        }

        infer::TrainingConfig tc;
        tc.batch_size = 2;
        tc.epochs = 12000;
        tc.seed = 60 + seed;
        // Small steps keep the unconstrained edges pinned near the prior
        // after the nu latch; the loose latch threshold reflects the noisy
        // per-batch loss plateau.
        tc.learning_rate = 0.001;
        tc.nu_threshold = 1e-5;
        const auto result = infer::train_kuramoto(tc, data, p, 2, &a0,
                                                  kuramoto_mlp(nn::Activation::Sigmoid));
        const Mat mle = result.ensemble.mle_network();

        // Rank positive prior edges by relative error.
        struct Entry {
            int i, j;
            double rel;
            double pval;
        };
        std::vector<Entry> entries;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (a0(i, j) > 0.0) {
                    const auto marginal =
                        infer::marginal_density(result.ensemble, i, j, 100);
                    entries.push_back({i, j,
                                       std::abs(mle(i, j) - a0(i, j)) / a0(i, j),
                                       infer::edge_p_value(marginal, a0(i, j))});
                }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& x, const Entry& y) { return x.rel > y.rel; });
        int found = 0;
        for (int k = 0; k < 4 && k < static_cast<int>(entries.size()); ++k)
            for (const auto& e : edges)
                if (entries[k].i == e.first && entries[k].j == e.second) ++found;
        if (found == 2) ++localized;

        // Cut-edge p-values below the median p-value of uncut edges.
        std::vector<double> uncut_p;
        double cut_p_max = 0.0;
        for (const auto& entry : entries) {
            bool is_cut = false;
            for (const auto& e : edges)
                is_cut = is_cut || (entry.i == e.first && entry.j == e.second);
            if (is_cut)
                cut_p_max = std::max(cut_p_max, entry.pval);
            else
                uncut_p.push_back(entry.pval);
        }
        std::sort(uncut_p.begin(), uncut_p.end());
        const double median_p = uncut_p[uncut_p.size() / 2];
        p_ok.push_back(cut_p_max < median_p);
        std::cout << "  seed " << seed << ": top-4 hits " << found
                  << ", cut p <= " << cut_p_max << " vs median " << median_p
                  << "\n";
    }
    int p_wins = 0;
    for (bool ok : p_ok) p_wins += ok ? 1 : 0;
    std::cout << "  localized " << localized << "/10, p-ordering " << p_wins
              << "/10\n";
    return localized >= 8 && p_wins >= 8;
}

// --- 8: Harris-Wilson recovery --------------------------------------------

bool criterion_harris_wilson() {
    const int n = 20, m = 5;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> minutes(1.0, 60.0);
    Mat d(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) d(i, j) = minutes(rng);
    const Mat truth = infer::row_normalize(graphs::hw_cost_network(d));

    dyn::HarrisWilsonParams p;
    p.sigma = 0.0;
    p.dt = 0.01;
    std::uniform_real_distribution<double> usize(0.5, 1.5);
    Vec o0(n), w0(m);
    for (int i = 0; i < n; ++i) o0(i) = usize(rng);
    for (int j = 0; j < m; ++j) w0(j) = usize(rng);
    const auto series =
        dyn::generate_harris_wilson_dataset(o0, w0, graphs::hw_cost_network(d), 200,
                                            p, 0.1, 31);
    const auto windows = infer::subsample_hw_windows(series, 40, 2, 9);

    infer::TrainingConfig tc;
    tc.batch_size = 1;
    tc.epochs = 1000;
    tc.seed = 13;
    nn::MlpConfig mc;
    mc.num_layers = 2;
    mc.nodes_default = 20;
    mc.activations[1] = nn::Activation::Sigmoid;
    const auto result = infer::train_harris_wilson(tc, windows, p, mc);
    const Mat mle = result.ensemble.mle_network();

    const Vec grid = density::linspace(0.0, static_cast<double>(n) / m, 200);
    const auto rho_mle =
        analysis::statistic_distribution(mle, analysis::Statistic::ColumnDegree, grid);
    const auto rho_truth = analysis::statistic_distribution(
        truth, analysis::Statistic::ColumnDegree, grid, rho_mle.bandwidth);
    const double h =
        analysis::hellinger_distance(rho_mle.density, rho_truth.density, grid);
    std::cout << "  column-degree Hellinger distance " << h << " (L1 "
              << analysis::l1_error(mle, truth) << ")\n";
    return h < 0.05;
}

// --- 9: nu schedule --------------------------------------------------------

bool criterion_nu_schedule() {
    // Latches exactly when both windowed derivative magnitudes fall below
    // threshold, and never returns to 10.
    infer::NuSchedule schedule(10.0, 1e-10, 20);
    bool ok = true;
    // Strictly decreasing history: never latches.
    for (int i = 0; i < 200; ++i) ok = ok && schedule.push(1000.0 - i) == 10.0;

    infer::NuSchedule flat(10.0, 1e-10, 20);
    int latch_at = -1;
    for (int i = 0; i < 100; ++i) {
        const double nu = flat.push(3.5);
        if (nu == 0.0 && latch_at < 0) latch_at = i;
    }
    ok = ok && latch_at > 0;
    // A constant history latches as soon as both central differences of the
    // moving average exist, i.e. after window + 2 samples.
    ok = ok && latch_at <= 25;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 500; ++i) ok = ok && flat.push(u(rng)) == 0.0;
    std::cout << "  latched at iteration " << latch_at
              << ", stayed latched under spikes: " << (ok ? "yes" : "no") << "\n";
    return ok;
}

// --- 10: SDE consistency ---------------------------------------------------

bool criterion_sde() {
    // Noiseless path == ODE path.
    dyn::HarrisWilsonParams p;
    p.sigma = 0.0;
    p.dt = 0.004;
    const int n = 4, m = 3;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Mat c(n, m);
    Vec w(m), o(n);
    for (int i = 0; i < n; ++i) o(i) = u(rng);
    for (int j = 0; j < m; ++j) w(j) = u(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) c(i, j) = u(rng) / 2.0;
    Vec wa = w, wb = w;
    double max_gap = 0.0;
    for (int step = 0; step < 500; ++step) {
        wa = dyn::harris_wilson_step(wa, o, c, p);
        const Vec demand = dyn::harris_wilson_demand(wb, o, c, p);
        wb = wb + p.epsilon * wb.cwiseProduct(demand - p.kappa * wb) * p.dt;
        max_gap = std::max(max_gap, (wa - wb).cwiseAbs().maxCoeff());
    }

    // Monte-Carlo mean one-step increment vs Ito-corrected drift.
    dyn::HarrisWilsonParams ps;
    ps.alpha = 1.0;
    ps.beta = 1.0;
    ps.kappa = 1.0;
    ps.epsilon = 2.0;
    ps.sigma = 0.05;
    ps.dt = 0.01;
    const double w0 = 0.8;
    const Vec o1 = Vec::Ones(1);
    const Mat c1 = Mat::Ones(1, 1);
    const double demand =
        dyn::harris_wilson_demand(Vec::Constant(1, w0), o1, c1, ps)(0);
    const double drift = (ps.epsilon * w0 * (demand - ps.kappa * w0) +
                          0.5 * ps.sigma * ps.sigma * w0) *
                         ps.dt;
    std::mt19937_64 mc_rng(2025);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int paths = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < paths; ++k) {
        const Vec draw = Vec::Constant(1, normal(mc_rng));
        const double inc =
            dyn::harris_wilson_step(Vec::Constant(1, w0), o1, c1, ps, &draw)(0) - w0;
        sum += inc;
        sum_sq += inc * inc;
    }
    const double mean = sum / paths;
    const double se = std::sqrt((sum_sq / paths - mean * mean) / paths);
    std::cout << "  ODE gap " << max_gap << "; MC mean " << mean << " vs drift "
              << drift << " (3 SE = " << 3 * se << ")\n";
    return max_gap < 1e-12 && std::abs(mean - drift) < 3 * se;
}

// --- 11: brute-force statistic oracles ------------------------------------

bool criterion_oracles() {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> dim(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = dim(rng);
        Mat a(n, n), b(n, n), g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a(i, j) = u(rng);
                b(i, j) = u(rng);
                g(i, j) = u(rng);
            }
        const Vec k = analysis::node_degrees(a);
        const Vec t = analysis::node_triangles(a);
        Tape tape;
        const Mat diag = tape.value(tape.diag_product(tape.leaf(a), tape.leaf(g)));
        double l1 = 0.0;
        for (int i = 0; i < n; ++i) {
            double deg = 0.0, tri = 0.0, dp = 0.0;
            for (int j = 0; j < n; ++j) {
                deg += a(i, j);
                l1 += std::abs(a(i, j) - b(i, j));
                dp += a(i, j) * g(j, i);
                for (int l = 0; l < n; ++l) tri += a(i, j) * a(j, l) * a(l, i);
            }
            if (std::abs(k(i) - deg) > 1e-12) return false;
            if (std::abs(t(i) - tri / 2) > 1e-12) return false;
            if (std::abs(diag(i, 0) - dp) > 1e-12) return false;
        }
        if (std::abs(analysis::l1_error(a, b) - l1) > 1e-12) return false;
    }
    std::cout << "  all loop oracles matched to 1e-12\n";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..11>\n";
        return 2;
    }
    const int which = std::atoi(argv[1]);
    const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
        {"autodiff finite-difference correctness", criterion_autodiff},
        {"OLS exact recovery in the noiseless regime", criterion_ols_exact},
        {"neural beats OLS under observation noise", criterion_neural_vs_ols},
        {"uncertainty decreases with convexity", criterion_convexity_trend},
        {"uncertainty increases with noise", criterion_noise_trend},
        {"per-epoch cost scales quadratically in N", criterion_scaling},
        {"power-cut edges are localized", criterion_power_cut},
        {"Harris-Wilson degree-distribution recovery", criterion_harris_wilson},
        {"nu schedule latches permanently", criterion_nu_schedule},
        {"SDE consistency (ODE limit and Ito-corrected drift)", criterion_sde},
        {"brute-force statistic oracles", criterion_oracles},
    };
    if (which < 1 || which > static_cast<int>(criteria.size())) {
        std::cerr << "unknown criterion " << which << "\n";
        return 2;
    }
    const auto& [name, fn] = criteria[which - 1];
    std::cout << "criterion " << which << ": " << name << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = fn();
    const auto t1 = std::chrono::steady_clock::now();
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << which << " ("
              << std::chrono::duration<double>(t1 - t0).count() << " s)\n";
    return ok ? 0 : 1;
}
