#include "netinf/dynamics.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace netinf::dyn {

void KuramotoParams::validate_first_order() const {
    if (beta <= 0.0) throw std::invalid_argument("kuramoto: beta must be > 0 (first order)");
    if (dt <= 0.0) throw std::invalid_argument("kuramoto: dt must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("kuramoto: sigma must be >= 0");
}

void KuramotoParams::validate_second_order() const {
    if (alpha == 0.0)
        throw std::invalid_argument("kuramoto: alpha == 0; use the first-order stepper");
    if (alpha < 0.0) throw std::invalid_argument("kuramoto: alpha must be > 0 (second order)");
    if (dt <= 0.0) throw std::invalid_argument("kuramoto: dt must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("kuramoto: sigma must be >= 0");
}

void HarrisWilsonParams::validate() const {
    if (alpha <= 0.0 || beta <= 0.0 || kappa <= 0.0 || epsilon <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("harris_wilson: alpha, beta, kappa, epsilon, dt must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("harris_wilson: sigma must be >= 0");
}

long TimeSeries::total_steps() const {
    long n = 0;
    for (const Mat& s : segments) n += s.cols();
    return n;
}

namespace {

void check_square(const Mat& A, Eigen::Index n, const char* ctx) {
    if (A.rows() != n || A.cols() != n) {
        std::ostringstream msg;
        msg << ctx << ": adjacency shape (" << A.rows() << "x" << A.cols()
            << ") does not match " << n << " phases";
        throw std::invalid_argument(msg.str());
    }
}

// c_i = sum_j a_ij sin(phi_j - phi_i)
Vec coupling_vector(const Vec& phases, const Mat& A) {
    const Eigen::Index n = phases.size();
    Vec c = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            c(i) += A(i, j) * std::sin(phases(j) - phases(i));
    return c;
}

Vec resolve_power(const KuramotoParams& p, Eigen::Index n) {
    if (p.power.size() == 0) return Vec::Zero(n);
    if (p.power.size() != n)
        throw std::invalid_argument("kuramoto: power vector length does not match node count");
    return p.power;
}

}  // namespace

Vec kuramoto_step_first_order(const Vec& phases, const Mat& A, const KuramotoParams& p,
                              const Vec* noise) {
    p.validate_first_order();
    check_square(A, phases.size(), "kuramoto_step_first_order");
    const Vec omega = resolve_power(p, phases.size());
    Vec next = phases + (p.dt / p.beta) * (omega + p.kappa * coupling_vector(phases, A));
    if (noise != nullptr && p.sigma > 0.0)
        next += p.sigma * std::sqrt(p.dt) * (*noise);
    return next;
}

std::pair<Vec, Vec> kuramoto_step_second_order(const Vec& phases, const Vec& velocities,
                                               const Mat& A, const KuramotoParams& p,
                                               const Vec* noise) {
    p.validate_second_order();
    check_square(A, phases.size(), "kuramoto_step_second_order");
    if (velocities.size() != phases.size())
        throw std::invalid_argument("kuramoto: velocity length does not match phases");
    const Vec omega = resolve_power(p, phases.size());
    Vec inner = (omega + p.kappa * coupling_vector(phases, A) - p.beta * velocities) * p.dt +
                velocities;
    Vec next = phases + (p.dt / p.alpha) * inner;
    if (noise != nullptr && p.sigma > 0.0)
        next += p.sigma * std::sqrt(p.dt) * (*noise);
    Vec vel_next = (next - phases) / p.dt;
    return {next, vel_next};
}

Vec harris_wilson_demand(const Vec& W, const Vec& O, const Mat& C,
                         const HarrisWilsonParams& p) {
    if (C.rows() != O.size() || C.cols() != W.size())
        throw std::invalid_argument("harris_wilson: C shape does not match O/W lengths");
    const Vec Wa = W.array().pow(p.alpha).matrix();
    const Mat Cb = C.array().pow(p.beta).matrix();
    const Vec Zinv = Cb * Wa;                      // N
    const Vec Z = Zinv.cwiseInverse();             // normalisation constants
    return Wa.cwiseProduct(Cb.transpose() * O.cwiseProduct(Z));
}

Vec harris_wilson_step(const Vec& W, const Vec& O, const Mat& C,
                       const HarrisWilsonParams& p, const Vec* noise_draw) {
    p.validate();
    if ((C.array() <= 0.0).any())
        throw std::invalid_argument("harris_wilson: cost network entries must be positive");
    if ((W.array() <= 0.0).any() || (O.array() <= 0.0).any())
        throw std::invalid_argument("harris_wilson: W and O must be positive");
    const Vec D = harris_wilson_demand(W, O, C, p);
    // Stratonovich noise via Ito correction + sigma^2 W / 2, Euler-Maruyama.
    Vec drift = p.epsilon * W.cwiseProduct(D - p.kappa * W);
    if (p.sigma > 0.0) drift += 0.5 * p.sigma * p.sigma * W;
    Vec next = W + drift * p.dt;
    if (p.sigma > 0.0 && noise_draw != nullptr)
        next += p.sigma * std::sqrt(p.dt) * W.cwiseProduct(*noise_draw);
    for (Eigen::Index j = 0; j < next.size(); ++j) {
        if (next(j) <= 0.0) {
            std::cerr << "harris_wilson_step: W_" << j
                      << " <= 0 after step, clamped to 1e-12\n";
            next(j) = 1e-12;
        }
    }
    return next;
}

// --- Tape steppers ---------------------------------------------------------

namespace {

// Gamma_ij = sin(phi_i - phi_j), so that diag(A Gamma)_i = sum_j a_ij
// sin(phi_j - phi_i) matches the explicit double sum.
Var coupling_on_tape(Tape& tape, Var phases, Var A) {
    const Eigen::Index n = tape.value(phases).rows();
    Var ones_row = tape.leaf(Mat::Ones(1, n));
    Var M = tape.matmul(phases, ones_row);  // M_ij = phi_i
    Var gamma = tape.sin(tape.sub(M, tape.transpose(M)));
    return tape.diag_product(A, gamma);
}

}  // namespace

Var kuramoto_step_first_order(Tape& tape, Var phases, Var A, const KuramotoParams& p) {
    p.validate_first_order();
    const Eigen::Index n = tape.value(phases).rows();
    check_square(tape.value(A), n, "kuramoto_step_first_order(tape)");
    Var omega = tape.leaf(resolve_power(p, n));
    Var coupling = tape.scale(coupling_on_tape(tape, phases, A), p.kappa);
    Var drift = tape.scale(tape.add(omega, coupling), p.dt / p.beta);
    return tape.add(phases, drift);
}

std::pair<Var, Var> kuramoto_step_second_order(Tape& tape, Var phases, Var velocities,
                                               Var A, const KuramotoParams& p) {
    p.validate_second_order();
    const Eigen::Index n = tape.value(phases).rows();
    check_square(tape.value(A), n, "kuramoto_step_second_order(tape)");
    Var omega = tape.leaf(resolve_power(p, n));
    Var coupling = tape.scale(coupling_on_tape(tape, phases, A), p.kappa);
    Var forcing = tape.sub(tape.add(omega, coupling), tape.scale(velocities, p.beta));
    Var inner = tape.add(tape.scale(forcing, p.dt), velocities);
    Var next = tape.add(phases, tape.scale(inner, p.dt / p.alpha));
    Var vel_next = tape.scale(tape.sub(next, phases), 1.0 / p.dt);
    return {next, vel_next};
}

Var harris_wilson_step(Tape& tape, Var W, Var O_leaf, Var C, const HarrisWilsonParams& p) {
    p.validate();
    Var Wa = tape.cwise_pow(W, p.alpha);
    Var Cb = tape.cwise_pow(C, p.beta);
    Var Zinv = tape.matmul(Cb, Wa);
    Var Z = tape.cwise_pow(Zinv, -1.0);
    Var D = tape.hadamard(Wa, tape.matmul(tape.transpose(Cb), tape.hadamard(O_leaf, Z)));
    Var drift = tape.scale(tape.hadamard(W, tape.sub(D, tape.scale(W, p.kappa))), p.epsilon);
    return tape.add(W, tape.scale(drift, p.dt));
}

// --- Generators ------------------------------------------------------------

TimeSeries generate_kuramoto_dataset(const Mat& A, int n_segments, int steps_per_segment,
                                     const KuramotoParams& p, int order,
                                     std::uint64_t seed) {
    if (n_segments < 1) throw std::invalid_argument("generate_kuramoto_dataset: n_segments >= 1");
    const int min_steps = order == 2 ? 3 : 2;
    if (steps_per_segment < min_steps)
        throw std::invalid_argument("generate_kuramoto_dataset: segment too short for order");
    const Eigen::Index n = A.rows();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1.0);

    TimeSeries series;
    series.nodes = static_cast<int>(n);
    for (int s = 0; s < n_segments; ++s) {
        Mat seg(n, steps_per_segment);
        Vec phi(n);
        for (Eigen::Index i = 0; i < n; ++i) phi(i) = uphase(rng);
        seg.col(0) = phi;
        Vec vel = Vec::Zero(n);
        for (int t = 1; t < steps_per_segment; ++t) {
            Vec noise(n);
            for (Eigen::Index i = 0; i < n; ++i) noise(i) = gauss(rng);
            const Vec* np = p.sigma > 0.0 ? &noise : nullptr;
            if (order == 2) {
                auto [phi_next, vel_next] = kuramoto_step_second_order(phi, vel, A, p, np);
                phi = phi_next;
                vel = vel_next;
            } else {
                phi = kuramoto_step_first_order(phi, A, p, np);
            }
            seg.col(t) = phi;
        }
        series.segments.push_back(std::move(seg));
    }
    return series;
}

HarrisWilsonSeries generate_harris_wilson_dataset(const Vec& O0, const Vec& W0,
                                                  const Mat& C, int n_steps,
                                                  const HarrisWilsonParams& p,
                                                  double sigma_origin,
                                                  std::uint64_t seed) {
    if (n_steps < 2)
        throw std::invalid_argument("generate_harris_wilson_dataset: need n_steps >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::Index n = O0.size();
    const Eigen::Index m = W0.size();

    HarrisWilsonSeries out;
    out.origins.resize(n, n_steps);
    out.destinations.resize(m, n_steps);
    Vec O = O0;
    Vec W = W0;
    out.origins.col(0) = O;
    out.destinations.col(0) = W;
    for (int t = 1; t < n_steps; ++t) {
        Vec wnoise(m);
        for (Eigen::Index j = 0; j < m; ++j) wnoise(j) = gauss(rng);
        const Vec* np = p.sigma > 0.0 ? &wnoise : nullptr;
        W = harris_wilson_step(W, O, C, p, np);
        if (sigma_origin > 0.0) {
            for (Eigen::Index i = 0; i < n; ++i)
                O(i) = std::max(1e-9, O(i) + sigma_origin * std::sqrt(p.dt) * gauss(rng));
        }
        out.origins.col(t) = O;
        out.destinations.col(t) = W;
    }
    return out;
}

PowerCutResult simulate_power_cut(const Mat& A0,
                                  const std::vector<std::pair<int, int>>& cut_edges,
                                  const KuramotoParams& p, int window_len,
                                  double record_delay, long max_steps) {
    p.validate_second_order();
    const Eigen::Index n = A0.rows();
    check_square(A0, n, "simulate_power_cut");
    for (auto [i, j] : cut_edges)
        if (i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw std::invalid_argument("simulate_power_cut: invalid cut edge");

    // Equilibrate from all phases = 1.
    Vec phi = Vec::Ones(n);
    Vec vel = Vec::Zero(n);
    long steps = 0;
    auto settled = [&]() {
        for (Eigen::Index i = 0; i < n; ++i) {
            // |dphi_i|/phi_i <= 0.01, read as |dphi_i| <= 0.01 max(|phi_i|, 1)
            // to stay defined when phi_i crosses zero.
            if (std::abs(vel(i)) > 0.01 * std::max(std::abs(phi(i)), 1.0)) return false;
        }
        return true;
    };
    KuramotoParams quiet = p;
    quiet.sigma = 0.0;
    do {
        auto [phi_next, vel_next] = kuramoto_step_second_order(phi, vel, A0, quiet);
        phi = phi_next;
        vel = vel_next;
        if (++steps > max_steps) {
            std::ostringstream msg;
            msg << "simulate_power_cut: equilibration not reached within " << max_steps
                << " steps";
            throw std::runtime_error(msg.str());
        }
    } while (!settled());

    Mat A_cut = A0;
    for (auto [i, j] : cut_edges) {
        A_cut(i, j) = 0.0;
        A_cut(j, i) = 0.0;
    }

    PowerCutResult result;
    result.perturbed_network = A_cut;
    result.equilibrium_phases = phi;
    result.equilibrium_velocities = vel;
    result.equilibration_steps = steps;

    const long delay_steps = std::lround(record_delay / p.dt);
    for (long t = 0; t < delay_steps; ++t) {
        auto [phi_next, vel_next] = kuramoto_step_second_order(phi, vel, A_cut, quiet);
        phi = phi_next;
        vel = vel_next;
    }

    Mat window(n, window_len);
    window.col(0) = phi;
    for (int t = 1; t < window_len; ++t) {
        auto [phi_next, vel_next] = kuramoto_step_second_order(phi, vel, A_cut, quiet);
        phi = phi_next;
        vel = vel_next;
        window.col(t) = phi;
    }
    result.response.nodes = static_cast<int>(n);
    result.response.segments.push_back(std::move(window));
    return result;
}

}  // namespace netinf::dyn
