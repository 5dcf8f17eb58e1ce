#include "netinf/density.hpp"

#include <cmath>
#include <stdexcept>

namespace netinf::density {

Vec linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
    Vec g(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) g(i) = lo + step * i;
    return g;
}

double trapezoid(const Vec& values, const Vec& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("trapezoid: grid/value length mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        sum += 0.5 * (values(i) + values(i - 1)) * (grid(i) - grid(i - 1));
    return sum;
}

double scott_bandwidth(const std::vector<double>& samples,
                       const std::vector<double>& weights, double floor) {
    if (samples.empty() || samples.size() != weights.size())
        throw std::invalid_argument("scott_bandwidth: bad sample/weight lists");
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        wsum += weights[i];
        mean += weights[i] * samples[i];
    }
    if (wsum <= 0.0) throw std::invalid_argument("scott_bandwidth: nonpositive total weight");
    mean /= wsum;
    double var = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = samples[i] - mean;
        var += weights[i] * d * d;
        w2 += weights[i] * weights[i];
    }
    var /= wsum;
    // Kish effective sample size for the weighted sample.
    const double n_eff = wsum * wsum / (w2 > 0.0 ? w2 : 1.0);
    const double bw = std::sqrt(var) * std::pow(n_eff, -0.2);
    return std::max(bw, floor);
}

Vec weighted_kde(const std::vector<double>& samples, const std::vector<double>& weights,
                 const Vec& grid, double bandwidth) {
    if (samples.empty() || samples.size() != weights.size())
        throw std::invalid_argument("weighted_kde: bad sample/weight lists");
    if (bandwidth <= 0.0) throw std::invalid_argument("weighted_kde: bandwidth must be > 0");
    Vec density = Vec::Zero(grid.size());
    const double inv_bw = 1.0 / bandwidth;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (weights[j] == 0.0) continue;
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            const double u = (grid(i) - samples[j]) * inv_bw;
            density(i) += weights[j] * std::exp(-0.5 * u * u);
        }
    }
    const double mass = trapezoid(density, grid);
    if (mass > 0.0) density /= mass;
    return density;
}

}  // namespace netinf::density
