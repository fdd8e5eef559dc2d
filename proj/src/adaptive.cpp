#include "hawkes_vb/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hawkes_vb/features.hpp"
#include "hawkes_vb/parallel.hpp"

namespace hawkes_vb {

double ModelPrior::log_weight(const SubModel& sub, int dims, int d_max,
                              std::size_t num_candidates) const {
  if (kind == Kind::Uniform) return -std::log(static_cast<double>(num_candidates));
  if (!(edge_prob > 0.0 && edge_prob < 1.0)) {
    throw Error(ErrorCode::Config, "edge probability must lie in (0, 1)");
  }
  const auto s = static_cast<double>(sub.sources.size());
  double lw = s * std::log(edge_prob) + (dims - s) * std::log1p(-edge_prob);
  if (!sub.sources.empty()) lw -= std::log(static_cast<double>(d_max + 1));
  return lw;
}

Model AdaptiveResult::selected_model() const {
  return Model::from_sub_models(selected_sub_models(), static_cast<int>(dims.size()));
}

std::vector<SubModel> AdaptiveResult::selected_sub_models() const {
  std::vector<SubModel> out;
  for (const auto& d : dims) out.push_back(d.best().sub);
  return out;
}

std::vector<GaussianPosterior> AdaptiveResult::selected_posteriors() const {
  std::vector<GaussianPosterior> out;
  for (const auto& d : dims) out.push_back(d.best().posterior);
  return out;
}

Eigen::VectorXd softmax_weights(const Eigen::VectorXd& scores) {
  const double top = scores.maxCoeff();
  // scalar exp: Eigen's vectorised exp clamps near -708 instead of underflowing
  Eigen::VectorXd w = (scores.array() - top).unaryExpr([](double x) { return std::exp(x); });
  return w / w.sum();
}

std::size_t select_best(const std::vector<SubModel>& candidates,
                        const Eigen::VectorXd& scores, int dims) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double a = scores(static_cast<Eigen::Index>(i));
    const double b = scores(static_cast<Eigen::Index>(best));
    const double tie = 1e-12 * std::max(std::abs(a), std::abs(b));
    if (a > b + tie ||
        (std::abs(a - b) <= tie && occam_less(candidates[i], candidates[best], dims))) {
      best = i;
    }
  }
  return best;
}

AdaptiveResult fully_adaptive(const EventData& events,
                              const std::vector<std::vector<SubModel>>& candidates,
                              std::span<const LinkFunction> links, double memory,
                              const PriorSpec& prior, const ViConfig& config,
                              AdaptiveMode mode, const ModelPrior& model_prior,
                              int d_max) {
  const int K = events.dims();
  if (candidates.size() != static_cast<std::size_t>(K) ||
      links.size() != static_cast<std::size_t>(K)) {
    throw Error(ErrorCode::ShapeMismatch, "need candidates and a link per dimension");
  }
  std::vector<std::pair<int, std::size_t>> tasks;
  for (int k = 0; k < K; ++k) {
    if (candidates[k].empty()) {
      throw Error(ErrorCode::EmptyModelSet, "empty model set for a dimension");
    }
    for (std::size_t m = 0; m < candidates[k].size(); ++m) tasks.emplace_back(k, m);
  }

  AdaptiveResult result;
  result.mode = mode;
  result.dims.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) result.dims[k].fits.resize(candidates[k].size());

  parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
    const auto [k, m] = tasks[t];
    const SubModel& sub = candidates[k][m];
    const auto design = build_design(events, k, sub, memory, config.quadrature, config.n_quad);
    auto& fit = result.dims[k].fits[m];
    fit.sub = sub;
    fit.posterior = cavi_dimension(design, links[k], prior.make(sub), config);
    fit.log_prior = model_prior.log_weight(sub, K, d_max, candidates[k].size());
  });

  for (int k = 0; k < K; ++k) {
    auto& dim = result.dims[k];
    Eigen::VectorXd scores(static_cast<Eigen::Index>(dim.fits.size()));
    for (std::size_t m = 0; m < dim.fits.size(); ++m)
      scores(static_cast<Eigen::Index>(m)) = dim.fits[m].log_prior + dim.fits[m].posterior.elbo;
    const Eigen::VectorXd w = softmax_weights(scores);
    for (std::size_t m = 0; m < dim.fits.size(); ++m)
      dim.fits[m].weight = w(static_cast<Eigen::Index>(m));
    dim.selected = select_best(candidates[k], scores, K);
  }
  return result;
}

double folded_normal_mean(double mu, double sd) {
  if (!(sd >= 0.0)) throw Error(ErrorCode::Domain, "standard deviation must be nonnegative");
  if (sd == 0.0) return std::abs(mu);
  const double z = mu / sd;
  return sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) +
         mu * std::erf(z / std::numbers::sqrt2);
}

double expected_l1_norm(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::ShapeMismatch, "mean and covariance sizes differ");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    if (!(cov(j, j) > 0.0)) {
      throw Error(ErrorCode::Domain, "covariance diagonal must be positive");
    }
    total += folded_normal_mean(mean(j), std::sqrt(cov(j, j)));
  }
  return total;
}

double detect_gap_threshold(std::span<const double> values,
                            std::optional<double> override_value) {
  if (override_value) return *override_value;
  if (values.size() < 2) throw Error(ErrorCode::NoGap, "need at least two norms");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::size_t at = 0;
  double widest = -1.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double gap = v[i + 1] - v[i];
    if (gap > widest) {
      widest = gap;
      at = i;
    }
  }
  if (!(widest > 0.0)) {
    throw Error(ErrorCode::NoGap, "all norms are equal; supply a threshold");
  }
  return 0.5 * (v[at] + v[at + 1]);
}

Eigen::MatrixXd expected_norms(const AdaptiveResult& result) {
  const int K = static_cast<int>(result.dims.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k < K; ++k) {
    const auto& fit = result.dims[k].best();
    const int J = fit.sub.bins();
    for (int l : fit.sub.sources) {
      const int o = fit.sub.offset(l);
      s(l, k) = expected_l1_norm(fit.posterior.mean.segment(o, J),
                                 fit.posterior.cov.block(o, o, J, J));
    }
  }
  return s;
}

TwoStepResult two_step(const EventData& events, std::span<const LinkFunction> links,
                       double memory, const PriorSpec& prior, const ViConfig& vi,
                       const TwoStepConfig& config) {
  const int K = events.dims();
  TwoStepResult out;
  std::vector<std::vector<SubModel>> complete(static_cast<std::size_t>(K),
                                              complete_sub_models(K, config.d_max));
  out.step1 = fully_adaptive(events, complete, links, memory, prior, vi,
                             AdaptiveMode::Select, config.model_prior, config.d_max);

  out.graph.s_hat = expected_norms(out.step1);
  const std::vector<double> flat(out.graph.s_hat.data(),
                                 out.graph.s_hat.data() + out.graph.s_hat.size());
  out.graph.threshold = detect_gap_threshold(flat, config.threshold);
  out.graph.delta_hat = (out.graph.s_hat.array() > out.graph.threshold).cast<int>();

  std::vector<std::vector<SubModel>> restricted;
  for (int k = 0; k < K; ++k) {
    std::vector<int> sources;
    for (int l = 0; l < K; ++l)
      if (out.graph.delta_hat(l, k)) sources.push_back(l);
    restricted.push_back(fixed_graph_sub_models(sources, config.d_max));
  }
  out.step2 = fully_adaptive(events, restricted, links, memory, prior, vi, config.mode,
                             config.model_prior, config.d_max);
  return out;
}

}  // namespace hawkes_vb
