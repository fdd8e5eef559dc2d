#pragma once

// Model selection / averaging over sub-models and the two-step graph
// thresholding procedure.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "hawkes_vb/core.hpp"
#include "hawkes_vb/model.hpp"
#include "hawkes_vb/vi.hpp"

namespace hawkes_vb {

enum class AdaptiveMode { Select, Average };

/// Prior over the candidate sub-models of one dimension. Uniform by default;
/// BernoulliUniform puts p^{|delta|}(1-p)^{K-|delta|} on the column and a
/// uniform weight on D in 0..d_max for nonempty columns.
struct ModelPrior {
  enum class Kind { Uniform, BernoulliUniform };
  Kind kind = Kind::Uniform;
  double edge_prob = 0.5;

  double log_weight(const SubModel& sub, int dims, int d_max,
                    std::size_t num_candidates) const;
};

struct SubModelFit {
  SubModel sub;
  GaussianPosterior posterior;
  double log_prior = 0.0;
  double weight = 0.0;  // gamma-hat
};

struct DimensionResult {
  std::vector<SubModelFit> fits;  // in candidate order
  std::size_t selected = 0;

  const SubModelFit& best() const { return fits[selected]; }
};

struct AdaptiveResult {
  AdaptiveMode mode = AdaptiveMode::Select;
  std::vector<DimensionResult> dims;

  Model selected_model() const;
  std::vector<SubModel> selected_sub_models() const;
  std::vector<GaussianPosterior> selected_posteriors() const;
};

/// Normalised weights exp(s_i - logsumexp(s)).
Eigen::VectorXd softmax_weights(const Eigen::VectorXd& scores);

/// Index of the best score; ties (within 1e-12 relative) go to the
/// occam_less-smallest candidate.
std::size_t select_best(const std::vector<SubModel>& candidates,
                        const Eigen::VectorXd& scores, int dims);

/// Fits every candidate of every dimension and attaches model weights.
/// candidates[k] lists the sub-models of receiving dimension k.
AdaptiveResult fully_adaptive(const EventData& events,
                              const std::vector<std::vector<SubModel>>& candidates,
                              std::span<const LinkFunction> links, double memory,
                              const PriorSpec& prior, const ViConfig& config,
                              AdaptiveMode mode = AdaptiveMode::Select,
                              const ModelPrior& model_prior = {}, int d_max = 0);

/// E|X| for X ~ N(mu, sd^2).
double folded_normal_mean(double mu, double sd);

/// sum_j E|w_j| under the Gaussian marginals of (mean, cov).
double expected_l1_norm(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

/// Midpoint of the largest gap between consecutive sorted values, or the
/// override when given.
double detect_gap_threshold(std::span<const double> values,
                            std::optional<double> override_value = std::nullopt);

struct GraphEstimate {
  Eigen::MatrixXd s_hat;      // E_Q ||h_lk||_1
  double threshold = 0.0;
  Eigen::MatrixXi delta_hat;  // s_hat > threshold
};

/// Expected L1 norms of every (l, k) block of the selected posteriors.
Eigen::MatrixXd expected_norms(const AdaptiveResult& result);

struct TwoStepResult {
  AdaptiveResult step1;
  GraphEstimate graph;
  AdaptiveResult step2;
};

struct TwoStepConfig {
  int d_max = 2;
  std::optional<double> threshold;  // auto when empty
  AdaptiveMode mode = AdaptiveMode::Select;
  ModelPrior model_prior;
};

TwoStepResult two_step(const EventData& events, std::span<const LinkFunction> links,
                       double memory, const PriorSpec& prior, const ViConfig& vi,
                       const TwoStepConfig& config);

}  // namespace hawkes_vb
