#pragma once

#include <Eigen/Dense>

#include <vector>

#include "hawkes_vb/core.hpp"
#include "hawkes_vb/model.hpp"
#include "hawkes_vb/vi.hpp"

namespace hawkes_vb {

struct EvalReport {
  double risk_l1 = 0.0;
  double acc_graph = 0.0;
  double acc_dim = 0.0;
  Eigen::VectorXd nu_errors;    // E|nu_k - nu0_k|
  Eigen::MatrixXd edge_errors;  // E||h_lk - h0_lk||_1
};

/// E|nu - nu0|_1 + sum_{l,k} E||h_lk - h0_lk||_1 under Gaussian marginals.
/// Histograms with different J are compared on the lcm refinement.
EvalReport l1_risk(const std::vector<SubModel>& subs,
                   const std::vector<GaussianPosterior>& posteriors,
                   const HawkesParams& truth, double memory);

double graph_accuracy(const Eigen::MatrixXi& delta_hat, const Eigen::MatrixXi& delta_true);

/// Fraction of dimensions whose histogram size matches; a dimension with no
/// incoming edge has no size and matches only another empty column.
double dim_accuracy(const std::vector<int>& bins_hat, const std::vector<int>& bins_true);

/// Per-dimension J, or 0 when the column is empty.
std::vector<int> column_bins(const std::vector<SubModel>& subs);
std::vector<int> column_bins(const HawkesParams& truth);

EvalReport evaluate(const std::vector<SubModel>& subs,
                    const std::vector<GaussianPosterior>& posteriors,
                    const HawkesParams& truth);

}  // namespace hawkes_vb
