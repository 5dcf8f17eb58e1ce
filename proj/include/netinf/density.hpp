#pragma once

#include <vector>

#include <Eigen/Dense>

namespace netinf::density {

using Vec = Eigen::VectorXd;

// Weighted Gaussian kernel density, normalized to integrate to 1 over the
// grid (trapezoid rule). Weights need not be normalized.
Vec weighted_kde(const std::vector<double>& samples, const std::vector<double>& weights,
                 const Vec& grid, double bandwidth);

// Scott's rule over a weighted sample, with a configurable floor.
double scott_bandwidth(const std::vector<double>& samples,
                       const std::vector<double>& weights, double floor = 1e-3);

Vec linspace(double lo, double hi, int n);

double trapezoid(const Vec& values, const Vec& grid);

}  // namespace netinf::density
