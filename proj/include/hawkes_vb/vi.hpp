#pragma once

// Mean-field CAVI for the sigmoid Hawkes model with Polya-Gamma and latent
// Poisson augmentation, in a fixed model.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "hawkes_vb/core.hpp"
#include "hawkes_vb/features.hpp"
#include "hawkes_vb/model.hpp"

namespace hawkes_vb {

struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int size() const { return static_cast<int>(mean.size()); }
  void validate() const;
};

/// Independent normal priors: nu ~ N(nu_mean, nu_sd^2), every histogram
/// weight ~ N(weight_mean, weight_sd^2).
struct PriorSpec {
  double nu_mean = 0.0;
  double nu_sd = 5.0;
  double weight_mean = 0.0;
  double weight_sd = 5.0;

  GaussianPrior make(const SubModel& sub) const;
};

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double elbo = 0.0;
  std::vector<double> elbo_trace;
  int iterations = 0;
  bool converged = false;
};

enum class ViInit {
  PriorMean,  // first latent factors taken at the prior mean
  Prior,      // Q1 starts at the prior itself
};

struct ViConfig {
  int max_iter = 100;
  double tol = 1e-3;
  bool relative_tol = false;  // compare |Δ ELBO| / |ELBO| instead of |Δ ELBO|
  QuadratureRule quadrature = QuadratureRule::Exact;
  std::optional<int> n_quad;  // Gauss-Legendre only
  ViInit init = ViInit::PriorMean;
  int threads = 0;            // 0: hardware concurrency
};

/// Per-row moments of the recentred drive under N(mean, cov).
struct DriveMoments {
  Eigen::VectorXd expect;  // E[lambda~] = alpha (H'mu - eta)
  Eigen::VectorXd tilt;    // c = sqrt(E[lambda~^2])
};

DriveMoments drive_moments(const SparseRows& rows, const LinkFunction& link,
                           const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

/// Lambda(t) = theta exp(-E[lambda~]/2) / (2 cosh(c/2)), the intensity of
/// the optimal latent Poisson factor.
double latent_rate(double theta, double expect, double tilt);

/// ELBO of Q1 = N(mean, cov) with the latent factor set to its optimum given Q1.
double elbo(const DimensionDesign& design, const LinkFunction& link,
            const GaussianPrior& prior, const Eigen::VectorXd& mean,
            const Eigen::MatrixXd& cov);

/// One closed-form update of Q1 given the latent factors implied by (mean, cov).
void cavi_step(const DimensionDesign& design, const LinkFunction& link,
               const GaussianPrior& prior, Eigen::VectorXd& mean, Eigen::MatrixXd& cov);

/// CAVI from the prior until the ELBO increase drops below tol.
GaussianPosterior cavi_dimension(const DimensionDesign& design,
                                 const LinkFunction& link,
                                 const GaussianPrior& prior, const ViConfig& config);

/// Runs every receiving dimension of `model` independently.
std::vector<GaussianPosterior> cavi_fixed_model(const EventData& events,
                                                const Model& model,
                                                std::span<const LinkFunction> links,
                                                double memory, const PriorSpec& prior,
                                                const ViConfig& config);

/// Inverse and log-determinant of an SPD matrix via Cholesky, adding a
/// 1e-8 * mean-diagonal jitter once on failure.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, double* log_det = nullptr);

/// Throws ErrorCode::UnsupportedLink unless the link is a floor-free sigmoid.
void require_sigmoid(const LinkFunction& link);

}  // namespace hawkes_vb
