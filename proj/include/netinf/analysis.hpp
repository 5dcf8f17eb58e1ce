#pragma once

#include <vector>

#include <Eigen/Dense>

#include "netinf/dynamics.hpp"
#include "netinf/training.hpp"

namespace netinf::analysis {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct GramSummary {
    std::vector<int> node_ranks;
    int convexity = 0;  // c = min_i rank; c = N-1 means fully determined
    bool fully_determined(int n_nodes) const { return convexity >= n_nodes - 1; }
};

struct OlsResult {
    Mat network;
    std::vector<bool> rank_deficient;  // per node; minimum-norm solve was used
    GramSummary gram;
};

// Per-row least-squares estimate A_i = X_i G_i^T (G_i G_i^T)^-1 via a
// rank-revealing pseudo-inverse, diagonal zeroed afterward. `order` selects
// first- or second-order assembly of the left-hand side.
OlsResult ols_infer(const dyn::TimeSeries& data, const dyn::KuramotoParams& params,
                    int order);

GramSummary gram_convexity(const dyn::TimeSeries& data, int order = 1);

double l1_error(const Mat& estimate, const Mat& truth);

Vec node_degrees(const Mat& a);    // k_i = sum_j a_ij
Vec node_triangles(const Mat& a);  // t_i = (1/2) sum_jk a_ij a_jk a_ki

enum class Statistic { Degree, Triangle, ColumnDegree };

Vec statistic_values(const Mat& a, Statistic kind);

struct DistributionEstimate {
    Statistic kind = Statistic::Degree;
    Vec grid;
    Vec density;
    Vec band;  // pointwise uncertainty; empty when not computed
    double bandwidth = 0.0;
    double band_total = 0.0;  // integral of the band over the grid
};

DistributionEstimate statistic_distribution(const Mat& a, Statistic kind,
                                            const Vec& grid, double bandwidth = 0.0);

// Hellinger band around the MLE-sample density: at each grid point,
// sum_j w_j (sqrt(rho_mle) - sqrt(rho_j))^2 with normalized exp(-loss)
// weights. Size-1 ensembles give an identically zero band.
DistributionEstimate hellinger_uncertainty(const infer::SampleEnsemble& ensemble,
                                           Statistic kind, const Vec& grid,
                                           double bandwidth = 0.0);

// Weighted sample sum of per-sample KL divergences to the MLE density, with
// densities floored at 1e-12 before the log.
double kl_uncertainty(const infer::SampleEnsemble& ensemble, Statistic kind,
                      const Vec& grid, double bandwidth = 0.0);

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Proper Hellinger distance between two densities on a shared grid.
double hellinger_distance(const Vec& p, const Vec& q, const Vec& grid);

}  // namespace netinf::analysis
