#include "netinf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>

#include "netinf/density.hpp"

namespace netinf::analysis {

namespace {

// Stacked observation matrices: for each node i, G_i is N x L with
// (G_i)_{j,l} = sin(phi_j - phi_i) at observation l, and X_i collects the
// left-hand side of the dynamics at the same instants.
struct Observations {
    std::vector<Mat> gram_obs;  // per node, N x L
    std::vector<Vec> lhs;       // per node, L
    int n_nodes = 0;
};

Observations assemble(const dyn::TimeSeries& data, const dyn::KuramotoParams& params,
                      int order, bool with_lhs) {
    const int n = data.nodes;
    const double dt = params.dt;
    Vec power = params.power.size() > 0 ? params.power : Vec::Zero(n);
    if (power.size() != n)
        throw std::invalid_argument("ols: power vector length does not match node count");

    long total = 0;
    for (const Mat& seg : data.segments) {
        const long usable = order == 2 ? seg.cols() - 2 : seg.cols() - 1;
        if (usable < 1)
            throw std::invalid_argument("ols: segment too short for the requested order");
        total += usable;
    }

    Observations obs;
    obs.n_nodes = n;
    obs.gram_obs.assign(static_cast<std::size_t>(n), Mat(n, total));
    obs.lhs.assign(static_cast<std::size_t>(n), Vec(total));

    long l = 0;
    for (const Mat& seg : data.segments) {
        const long t_first = order == 2 ? 1 : 0;
        for (long t = t_first; t < seg.cols() - 1; ++t, ++l) {
            const Vec phi = seg.col(t);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    obs.gram_obs[static_cast<std::size_t>(i)](j, l) =
                        std::sin(phi(j) - phi(i));
            }
            if (!with_lhs) continue;
            for (int i = 0; i < n; ++i) {
                double x;
                if (order == 2) {
                    // Exact inversion of the discrete second-order update
                    // phi(t+1) = phi(t) + (dt/alpha)[(omega + kappa c - beta v)dt + v]
                    // with the backward velocity v = (phi(t) - phi(t-1))/dt:
                    // kappa c = (alpha d+ - d-)/dt^2 + beta d-/dt - omega.
                    const double dplus = seg(i, t + 1) - seg(i, t);
                    const double dminus = seg(i, t) - seg(i, t - 1);
                    x = (params.alpha * dplus - dminus) / (dt * dt) +
                        params.beta * dminus / dt - power(i);
                } else {
                    const double v = (seg(i, t + 1) - seg(i, t)) / dt;
                    x = params.beta * v - power(i);
                }
                obs.lhs[static_cast<std::size_t>(i)](l) = x / params.kappa;
            }
        }
    }
    return obs;
}

}  // namespace

OlsResult ols_infer(const dyn::TimeSeries& data, const dyn::KuramotoParams& params,
                    int order) {
    Observations obs = assemble(data, params, order, true);
    const int n = obs.n_nodes;
    OlsResult result;
    result.network = Mat::Zero(n, n);
    result.rank_deficient.assign(static_cast<std::size_t>(n), false);
    result.gram.node_ranks.resize(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        const Mat& g = obs.gram_obs[static_cast<std::size_t>(i)];
        Eigen::BDCSVD<Mat> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
        const double tol = std::max<double>(g.rows(), g.cols()) *
                           std::numeric_limits<double>::epsilon() * smax;
        int rank = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()(k) > tol) ++rank;
        result.gram.node_ranks[static_cast<std::size_t>(i)] = rank;
        // Row i of G_i is identically zero, so full determination is rank N-1.
        result.rank_deficient[static_cast<std::size_t>(i)] = rank < n - 1;

        // Minimum-norm solve through the pseudo-inverse with the same cutoff.
        const Vec& x = obs.lhs[static_cast<std::size_t>(i)];
        Vec sv_inv = svd.singularValues();
        for (Eigen::Index k = 0; k < sv_inv.size(); ++k)
            sv_inv(k) = sv_inv(k) > tol ? 1.0 / sv_inv(k) : 0.0;
        // a_i = X_i G_i^+ with G_i = U S V^T (N x L): G^+ = V S^+ U^T.
        Vec row = svd.matrixU() * (sv_inv.asDiagonal() * (svd.matrixV().transpose() * x));
        result.network.row(i) = row.transpose();
        result.network(i, i) = 0.0;
    }
    result.gram.convexity =
        *std::min_element(result.gram.node_ranks.begin(), result.gram.node_ranks.end());
    return result;
}

GramSummary gram_convexity(const dyn::TimeSeries& data, int order) {
    dyn::KuramotoParams dummy;
    dummy.power = Vec::Zero(data.nodes);
    Observations obs = assemble(data, dummy, order, false);
    GramSummary summary;
    for (const Mat& g : obs.gram_obs) {
        Eigen::BDCSVD<Mat> svd(g);
        const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
        const double tol = std::max<double>(g.rows(), g.cols()) *
                           std::numeric_limits<double>::epsilon() * smax;
        int rank = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()(k) > tol) ++rank;
        summary.node_ranks.push_back(rank);
    }
    summary.convexity =
        *std::min_element(summary.node_ranks.begin(), summary.node_ranks.end());
    return summary;
}

double l1_error(const Mat& estimate, const Mat& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw std::invalid_argument("l1_error: shape mismatch");
    return (estimate - truth).array().abs().sum();
}

Vec node_degrees(const Mat& a) { return a.rowwise().sum(); }

Vec node_triangles(const Mat& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("node_triangles: matrix must be square");
    const Mat cubed = a * a * a;
    return 0.5 * cubed.diagonal();
}

Vec statistic_values(const Mat& a, Statistic kind) {
    switch (kind) {
        case Statistic::Degree: return node_degrees(a);
        case Statistic::Triangle: return node_triangles(a);
        case Statistic::ColumnDegree: return a.colwise().sum().transpose();
    }
    throw std::invalid_argument("statistic_values: unknown statistic");
}

namespace {

std::vector<double> to_std(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

double default_bandwidth(const std::vector<double>& samples, const Vec& grid) {
    const double span = grid(grid.size() - 1) - grid(0);
    std::vector<double> w(samples.size(), 1.0);
    return density::scott_bandwidth(samples, w, std::max(1e-3 * span, 1e-6));
}

}  // namespace

DistributionEstimate statistic_distribution(const Mat& a, Statistic kind,
                                            const Vec& grid, double bandwidth) {
    DistributionEstimate est;
    est.kind = kind;
    est.grid = grid;
    const std::vector<double> values = to_std(statistic_values(a, kind));
    est.bandwidth = bandwidth > 0.0 ? bandwidth : default_bandwidth(values, grid);
    std::vector<double> w(values.size(), 1.0);
    est.density = density::weighted_kde(values, w, grid, est.bandwidth);
    return est;
}

DistributionEstimate hellinger_uncertainty(const infer::SampleEnsemble& ensemble,
                                           Statistic kind, const Vec& grid,
                                           double bandwidth) {
    const auto idx = ensemble.active_indices();
    if (idx.empty()) throw std::invalid_argument("hellinger_uncertainty: empty ensemble");
    const auto weights = ensemble.normalized_weights();

    const Mat& mle = ensemble.mle_network();
    const std::vector<double> mle_values = to_std(statistic_values(mle, kind));
    const double bw = bandwidth > 0.0 ? bandwidth : default_bandwidth(mle_values, grid);

    std::vector<double> unit(mle_values.size(), 1.0);
    DistributionEstimate est;
    est.kind = kind;
    est.grid = grid;
    est.bandwidth = bw;
    est.density = density::weighted_kde(mle_values, unit, grid, bw);
    est.band = Vec::Zero(grid.size());

    for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::vector<double> values =
            to_std(statistic_values(ensemble.samples[idx[k]].network, kind));
        const Vec rho = density::weighted_kde(values, unit, grid, bw);
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
            const double d = std::sqrt(est.density(g)) - std::sqrt(rho(g));
            est.band(g) += weights[k] * d * d;
        }
    }
    est.band_total = density::trapezoid(est.band, grid);
    return est;
}

double kl_uncertainty(const infer::SampleEnsemble& ensemble, Statistic kind,
                      const Vec& grid, double bandwidth) {
    const auto idx = ensemble.active_indices();
    if (idx.empty()) throw std::invalid_argument("kl_uncertainty: empty ensemble");
    const auto weights = ensemble.normalized_weights();

    const std::vector<double> mle_values =
        to_std(statistic_values(ensemble.mle_network(), kind));
    const double bw = bandwidth > 0.0 ? bandwidth : default_bandwidth(mle_values, grid);
    std::vector<double> unit(mle_values.size(), 1.0);
    const Vec rho_mle = density::weighted_kde(mle_values, unit, grid, bw);

    constexpr double kFloor = 1e-12;
    double total = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::vector<double> values =
            to_std(statistic_values(ensemble.samples[idx[k]].network, kind));
        const Vec rho = density::weighted_kde(values, unit, grid, bw);
        Vec integrand(grid.size());
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
            const double p = std::max(rho(g), kFloor);
            const double q = std::max(rho_mle(g), kFloor);
            integrand(g) = p * std::log(p / q);
        }
        total += weights[k] * density::trapezoid(integrand, grid);
    }
    return total;
}

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman_correlation: need matched lists of size >= 2");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

double hellinger_distance(const Vec& p, const Vec& q, const Vec& grid) {
    Vec integrand(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const double d = std::sqrt(std::max(p(g), 0.0)) - std::sqrt(std::max(q(g), 0.0));
        integrand(g) = d * d;
    }
    const double h2 = 0.5 * density::trapezoid(integrand, grid);
    return std::sqrt(std::max(h2, 0.0));
}

}  // namespace netinf::analysis
