#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace netinf::graphs {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Transmission line constants for a 1000 mm^2 copper conductor.
struct PowerLineConstants {
    double resistance_ohm_per_km = 0.0276;
    double inductance_h_per_km = 0.41e-3;
    double capacitance_f_per_km = 0.150e-6;
    double grid_frequency_hz = 50.0;
    // Angular frequency in the impedance formulas by default; set false to
    // plug in 50 directly (the difference only rescales the weights, which
    // normalization absorbs).
    bool angular_frequency = true;
};

// Raw edge weight |Y| U^2 from line length and voltage, with the admittance
// of lines over 10 km doubled and over 80 km tripled.
double line_weight(double length_km, double voltage_kv,
                   const PowerLineConstants& constants = {});

// a <- min(1, a / mean(a)); entries that land exactly on 1 are re-drawn
// uniformly from [0.9, 1.0].
std::vector<double> normalize_weights(const std::vector<double>& raw, std::uint64_t seed);

// Stations keep their given capacities; remaining nodes draw U[-200, 200],
// then the non-station values are shifted so the total sums to zero exactly.
Vec assign_powers(int n_nodes, const std::vector<double>& station_capacities,
                  std::uint64_t seed);

// c_ij = exp(-d_ij / tau), tau = max d_ij. With two mode matrices, take the
// elementwise minimum first.
Mat hw_cost_network(const Mat& distances);
Mat hw_cost_network(const Mat& mode_a, const Mat& mode_b);

// Symmetric zero-diagonal graph; each edge present with probability
// `density`, weights uniform in [weight_lo, weight_hi].
Mat random_graph(int n, double density, double weight_lo, double weight_hi,
                 std::uint64_t seed);

}  // namespace netinf::graphs
