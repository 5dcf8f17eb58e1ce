#include "netinf/graphs.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace netinf::graphs {

double line_weight(double length_km, double voltage_kv, const PowerLineConstants& c) {
    if (length_km <= 0.0 || voltage_kv <= 0.0)
        throw std::invalid_argument("line_weight: length and voltage must be > 0");
    const double omega = c.angular_frequency ? 2.0 * M_PI * c.grid_frequency_hz
                                             : c.grid_frequency_hz;
    const std::complex<double> series(c.resistance_ohm_per_km, omega * c.inductance_h_per_km);
    const std::complex<double> shunt(0.0, omega * c.capacitance_f_per_km);
    const std::complex<double> z0 = std::sqrt(series / shunt);
    const std::complex<double> gamma = std::sqrt(series * shunt);
    const std::complex<double> z = z0 * std::sinh(gamma * length_km);
    double admittance = std::abs(1.0 / z);
    if (length_km > 80.0)
        admittance *= 3.0;
    else if (length_km > 10.0)
        admittance *= 2.0;
    return admittance * voltage_kv * voltage_kv;
}

std::vector<double> normalize_weights(const std::vector<double>& raw, std::uint64_t seed) {
    if (raw.empty()) throw std::invalid_argument("normalize_weights: empty weight list");
    double mean = 0.0;
    for (double w : raw) mean += w;
    mean /= static_cast<double>(raw.size());
    if (mean == 0.0) throw std::invalid_argument("normalize_weights: all weights are zero");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> redraw(0.9, 1.0);
    std::vector<double> out;
    out.reserve(raw.size());
    for (double w : raw) {
        double a = std::min(1.0, w / mean);
        if (a == 1.0) a = redraw(rng);
        out.push_back(a);
    }
    return out;
}

Vec assign_powers(int n_nodes, const std::vector<double>& station_capacities,
                  std::uint64_t seed) {
    const int n_stations = static_cast<int>(station_capacities.size());
    if (n_nodes < n_stations)
        throw std::invalid_argument("assign_powers: more stations than nodes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-200.0, 200.0);
    Vec p(n_nodes);
    for (int i = 0; i < n_stations; ++i) p(i) = station_capacities[static_cast<std::size_t>(i)];
    for (int i = n_stations; i < n_nodes; ++i) p(i) = dist(rng);
    const int n_free = n_nodes - n_stations;
    if (n_free > 0) {
        const double shift = p.sum() / static_cast<double>(n_free);
        for (int i = n_stations; i < n_nodes; ++i) p(i) -= shift;
    } else if (p.sum() != 0.0) {
        throw std::invalid_argument("assign_powers: station capacities alone do not balance");
    }
    return p;
}

Mat hw_cost_network(const Mat& distances) {
    if ((distances.array() < 0.0).any())
        throw std::invalid_argument("hw_cost_network: distances must be nonnegative");
    const double tau = distances.maxCoeff();
    if (tau == 0.0)
        throw std::invalid_argument("hw_cost_network: all distances are zero (tau == 0)");
    return (-distances.array() / tau).exp().matrix();
}

Mat hw_cost_network(const Mat& mode_a, const Mat& mode_b) {
    if (mode_a.rows() != mode_b.rows() || mode_a.cols() != mode_b.cols())
        throw std::invalid_argument("hw_cost_network: mode matrices differ in shape");
    return hw_cost_network(mode_a.cwiseMin(mode_b));
}

Mat random_graph(int n, double density, double weight_lo, double weight_hi,
                 std::uint64_t seed) {
    if (density <= 0.0 || density > 1.0)
        throw std::invalid_argument("random_graph: density must be in (0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> weight(weight_lo, weight_hi);
    Mat a = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng) <= density) {
                const double w = weight(rng);
                a(i, j) = w;
                a(j, i) = w;
            }
        }
    }
    return a;
}

}  // namespace netinf::graphs
