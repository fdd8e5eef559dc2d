#include "hawkes_vb/metrics.hpp"

#include <cmath>
#include <numeric>

#include "hawkes_vb/adaptive.hpp"

namespace hawkes_vb {

EvalReport l1_risk(const std::vector<SubModel>& subs,
                   const std::vector<GaussianPosterior>& posteriors,
                   const HawkesParams& truth, double memory) {
  const int K = truth.dims();
  if (subs.size() != static_cast<std::size_t>(K) || posteriors.size() != subs.size()) {
    throw Error(ErrorCode::ShapeMismatch, "need one posterior per dimension");
  }
  if (std::abs(memory - truth.memory()) > 1e-12 * memory) {
    throw Error(ErrorCode::Domain, "posterior and truth use different memory A");
  }
  EvalReport r;
  r.nu_errors = Eigen::VectorXd::Zero(K);
  r.edge_errors = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    const auto& post = posteriors[k];
    const auto& sub = subs[k];
    if (post.mean.size() != sub.num_params()) {
      throw Error(ErrorCode::ShapeMismatch, "posterior size does not match its model");
    }
    r.nu_errors(k) = folded_normal_mean(post.mean(0) - truth.nu(k), std::sqrt(post.cov(0, 0)));
    for (int l = 0; l < K; ++l) {
      const Eigen::VectorXd& w0 = truth.weights(l, k);
      const int J0 = w0.size() == 0 ? 1 : static_cast<int>(w0.size());
      const int o = sub.offset(l);
      if (o < 0) {
        r.edge_errors(l, k) = w0.size() == 0 ? 0.0 : w0.lpNorm<1>();
        continue;
      }
      const int J = sub.bins();
      const int L = std::lcm(J, J0);
      double e = 0.0;
      for (int i = 0; i < L; ++i) {
        const int j = i / (L / J);
        const int j0 = i / (L / J0);
        const double truth_mass = w0.size() == 0 ? 0.0 : w0(j0) * J0 / L;
        const double sd = std::sqrt(post.cov(o + j, o + j)) * J / L;
        e += folded_normal_mean(post.mean(o + j) * J / L - truth_mass, sd);
      }
      r.edge_errors(l, k) = e;
    }
  }
  r.risk_l1 = r.nu_errors.sum() + r.edge_errors.sum();
  return r;
}

double graph_accuracy(const Eigen::MatrixXi& delta_hat, const Eigen::MatrixXi& delta_true) {
  if (delta_hat.rows() != delta_true.rows() || delta_hat.cols() != delta_true.cols() ||
      delta_hat.size() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "graph shapes differ");
  }
  return static_cast<double>((delta_hat.array() == delta_true.array()).count()) /
         static_cast<double>(delta_hat.size());
}

double dim_accuracy(const std::vector<int>& bins_hat, const std::vector<int>& bins_true) {
  if (bins_hat.size() != bins_true.size() || bins_hat.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "dimension vectors differ in length");
  }
  std::size_t hits = 0;
  for (std::size_t k = 0; k < bins_hat.size(); ++k) hits += bins_hat[k] == bins_true[k];
  return static_cast<double>(hits) / static_cast<double>(bins_hat.size());
}

std::vector<int> column_bins(const std::vector<SubModel>& subs) {
  std::vector<int> out;
  for (const auto& s : subs) out.push_back(s.sources.empty() ? 0 : s.bins());
  return out;
}

std::vector<int> column_bins(const HawkesParams& truth) {
  std::vector<int> out;
  for (int k = 0; k < truth.dims(); ++k) {
    bool any = false;
    for (int l = 0; l < truth.dims(); ++l) any = any || truth.edge(l, k);
    out.push_back(any ? truth.basis(k).bins : 0);
  }
  return out;
}

EvalReport evaluate(const std::vector<SubModel>& subs,
                    const std::vector<GaussianPosterior>& posteriors,
                    const HawkesParams& truth) {
  EvalReport r = l1_risk(subs, posteriors, truth, truth.memory());
  const Model m = Model::from_sub_models(subs, truth.dims());
  r.acc_graph = graph_accuracy(m.graph, truth.graph());
  r.acc_dim = dim_accuracy(column_bins(subs), column_bins(truth));
  return r;
}

}  // namespace hawkes_vb
