#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netinf/tape.hpp"

namespace netinf::dyn {

using ad::Mat;
using ad::Tape;
using ad::Var;
using Vec = Eigen::VectorXd;

struct KuramotoParams {
    double alpha = 0.0;   // inertia (second-order mode)
    double beta = 1.0;    // friction
    double kappa = 1.0;   // coupling
    double dt = 0.01;     // step size, seconds
    double sigma = 0.0;   // additive noise std per step (generator mode only)
    Vec power;            // per-node power / eigenfrequency vector

    void validate_first_order() const;
    void validate_second_order() const;
};

struct HarrisWilsonParams {
    double alpha = 0.92;    // attractiveness exponent
    double beta = 0.54;     // cost exponent
    double kappa = 8.3;     // carrying-capacity coefficient
    double epsilon = 2.0;   // responsiveness
    double sigma = 0.0;     // multiplicative noise std
    double dt = 0.01;       // step size, model time units

    void validate() const;
};

// Ordered observations of node states, possibly segmented into independent
// short windows. Each segment is nodes x length, one column per time index.
struct TimeSeries {
    int nodes = 0;
    std::vector<Mat> segments;

    long total_steps() const;
};

// --- Plain (non-tape) steppers -------------------------------------------

// phi(t+1) = phi(t) + (1/beta) (omega + kappa diag(A Gamma)) dt [+ noise]
Vec kuramoto_step_first_order(const Vec& phases, const Mat& A,
                              const KuramotoParams& p, const Vec* noise = nullptr);

// Returns (phases', velocities'); velocities' = (phi(t+1) - phi(t)) / dt.
std::pair<Vec, Vec> kuramoto_step_second_order(const Vec& phases, const Vec& velocities,
                                               const Mat& A, const KuramotoParams& p,
                                               const Vec* noise = nullptr);

// One Euler-Maruyama step of the Harris-Wilson SDE with Ito-corrected drift.
// W is M x 1, O is N x 1, C is N x M with positive entries. `noise_draw`
// supplies the standard-normal increments when sigma > 0.
Vec harris_wilson_step(const Vec& W, const Vec& O, const Mat& C,
                       const HarrisWilsonParams& p, const Vec* noise_draw = nullptr);

// Demand vector D = W^a ⊙ [(C^b)^T (O ⊙ Z)], Z^-1 = C^b W^a.
Vec harris_wilson_demand(const Vec& W, const Vec& O, const Mat& C,
                         const HarrisWilsonParams& p);

// --- Tape (differentiable) steppers --------------------------------------

Var kuramoto_step_first_order(Tape& tape, Var phases, Var A, const KuramotoParams& p);

std::pair<Var, Var> kuramoto_step_second_order(Tape& tape, Var phases, Var velocities,
                                               Var A, const KuramotoParams& p);

// sigma = 0 path; fully deterministic and differentiable w.r.t. C.
Var harris_wilson_step(Tape& tape, Var W, Var O_leaf, Var C, const HarrisWilsonParams& p);

// --- Generators -----------------------------------------------------------

// Segments start from phases uniform in [0, 2pi); `steps_per_segment`
// states per segment (>= 2 first order, >= 3 second order).
TimeSeries generate_kuramoto_dataset(const Mat& A, int n_segments, int steps_per_segment,
                                     const KuramotoParams& p, int order,
                                     std::uint64_t seed);

struct HarrisWilsonSeries {
    Mat origins;       // N x L
    Mat destinations;  // M x L
};

// Origin sizes follow a Wiener process with std sigma_origin per sqrt(dt).
HarrisWilsonSeries generate_harris_wilson_dataset(const Vec& O0, const Vec& W0,
                                                  const Mat& C, int n_steps,
                                                  const HarrisWilsonParams& p,
                                                  double sigma_origin,
                                                  std::uint64_t seed);

struct PowerCutResult {
    TimeSeries response;       // recorded window (single segment)
    Mat perturbed_network;     // A0 with the cut edges zeroed symmetrically
    Vec equilibrium_phases;
    Vec equilibrium_velocities;
    long equilibration_steps = 0;
};

// Equilibrates the second-order dynamics from all phases = 1, zeroes the cut
// edges, evolves `record_delay` seconds, then records `window_len` steps.
// Equilibrium: |dphi_i| <= 0.01 * max(|phi_i|, 1) for all i.
PowerCutResult simulate_power_cut(const Mat& A0,
                                  const std::vector<std::pair<int, int>>& cut_edges,
                                  const KuramotoParams& p, int window_len,
                                  double record_delay, long max_steps = 2000000);

}  // namespace netinf::dyn
