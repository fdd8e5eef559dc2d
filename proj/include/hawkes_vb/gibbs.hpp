#pragma once

// Gibbs sampler for the augmented sigmoid posterior, used as an oracle for
// the variational output on small problems.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "hawkes_vb/core.hpp"
#include "hawkes_vb/features.hpp"
#include "hawkes_vb/model.hpp"
#include "hawkes_vb/vi.hpp"

namespace hawkes_vb {

struct GibbsConfig {
  int n_iter = 3000;
  int burn_in = 500;
  int thin = 1;
  std::uint64_t seed = 0;
  PriorSpec prior;
  Model model;
  int threads = 0;

  void validate() const;
};

/// Kept draws of f_k = (nu_k, w_{.k}) for one dimension, one per row.
struct GibbsChain {
  SubModel sub;
  Eigen::MatrixXd draws;

  Eigen::VectorXd mean() const;
  Eigen::VectorXd sd() const;
};

/// Conditional Gaussian of f_k given PG marks at events (sign +1) and at
/// latent points (sign -1): precision alpha^2 H' D H + Sigma^{-1} and
/// mean Sigma~ (H (alpha v + alpha^2 eta u) + Sigma^{-1} mu), v = sign / 2.
struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
};

GaussianConditional gibbs_conditional(const SparseRows& event_rows,
                                      std::span<const double> event_omega,
                                      const SparseRows& latent_rows,
                                      std::span<const double> latent_omega,
                                      const LinkFunction& link, const GaussianPrior& prior);

/// One chain per receiving dimension, seeded from (seed, k).
std::vector<GibbsChain> gibbs_sample(const EventData& events, const GibbsConfig& config,
                                     std::span<const LinkFunction> links, double memory);

}  // namespace hawkes_vb
