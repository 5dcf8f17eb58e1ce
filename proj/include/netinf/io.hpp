#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netinf/analysis.hpp"
#include "netinf/dynamics.hpp"
#include "netinf/training.hpp"

namespace netinf::io {

using Mat = Eigen::MatrixXd;

// TimeSeries CSV: header `segment,t,x_0,...,x_{N-1}`, one row per time index
// per segment.
void write_time_series(const std::filesystem::path& path, const dyn::TimeSeries& series);
dyn::TimeSeries read_time_series(const std::filesystem::path& path);

// Undirected network as an edge list `i,j,weight`, each pair stored once.
void write_edge_list(const std::filesystem::path& path, const Mat& a);
Mat read_edge_list(const std::filesystem::path& path, int n_nodes);

// Dense matrix CSV (bipartite cost networks, distance matrices).
void write_dense_matrix(const std::filesystem::path& path, const Mat& m);
Mat read_dense_matrix(const std::filesystem::path& path);

// Ensemble: JSON header line, then CSV body `iteration,loss,a_00,...`.
void write_ensemble(const std::filesystem::path& path,
                    const infer::SampleEnsemble& ensemble, std::uint64_t seed);
infer::SampleEnsemble read_ensemble(const std::filesystem::path& path);

void write_marginal(const std::filesystem::path& path, const infer::Marginal& marginal);

void write_distribution(const std::filesystem::path& path,
                        const analysis::DistributionEstimate& est);

// Generic table: header row + rows of values.
void write_table(const std::filesystem::path& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

}  // namespace netinf::io
