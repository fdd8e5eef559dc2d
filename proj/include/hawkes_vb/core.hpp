#pragma once

// Domain types and likelihood evaluation for nonlinear multivariate Hawkes
// processes with histogram interaction kernels.
//
// Conventions used throughout the library:
//  * dimensions are 0-based; h_{lk} is the kernel from source l to target k
//  * a kernel is supported on (0, A]: an event at s influences (s, s + A]
//  * the linear drive at t sums over events s in [t - A, t)

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hawkes_vb/error.hpp"

namespace hawkes_vb {

template <typename Scalar>
Scalar logistic(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

// log(cosh(x)) without overflow.
template <typename Scalar>
Scalar log_cosh(Scalar x) {
  using std::abs;
  using std::exp;
  using std::log1p;
  const Scalar a = abs(x);
  return a + log1p(exp(Scalar(-2) * a)) - Scalar(M_LN2);
}

enum class LinkKind { Sigmoid, ReLU, Softplus };

const char* to_string(LinkKind kind);
LinkKind link_kind_from_string(const std::string& name);

/// phi(x) = theta_base + theta * psi(alpha * (x - eta)), with psi the
/// logistic, positive-part or softplus function. For the sigmoid link the
/// floor is zero and theta is the upper bound of the intensity.
struct LinkFunction {
  LinkKind kind = LinkKind::Sigmoid;
  double theta = 20.0;
  double alpha = 0.1;
  double eta = 10.0;
  double theta_base = 0.0;

  static LinkFunction sigmoid(double theta, double alpha, double eta);
  static LinkFunction relu(double theta_base = 0.001, double scale = 1.0,
                           double alpha = 1.0, double eta = 0.0);
  static LinkFunction softplus(double scale, double alpha, double eta,
                               double theta_base = 0.0);

  double operator()(double x) const;

  /// sup_x phi(x); infinite for ReLU and softplus.
  double upper_bound() const;

  void validate() const;
};

/// Histogram dictionary on (0, A] with J equal-width pieces,
/// e_j(x) = (J / A) 1{(j A / J, (j + 1) A / J]}(x) for 0-based j.
struct HistogramBasis {
  double memory = 0.1;
  int bins = 1;

  double width() const { return memory / bins; }
  double height() const { return bins / memory; }

  /// 0-based bin containing x, or -1 when x is outside (0, A].
  int bin_of(double x) const;

  double value(int j, double x) const { return bin_of(x) == j ? height() : 0.0; }

  void validate() const;
};

class HawkesParams {
 public:
  HawkesParams() = default;

  /// weights[l * K + k] holds w_{lk} in R^{J_k}, or is empty when h_{lk} = 0.
  HawkesParams(Eigen::VectorXd nu, std::vector<HistogramBasis> basis,
               std::vector<Eigen::VectorXd> weights);

  int dims() const { return static_cast<int>(nu_.size()); }
  const Eigen::VectorXd& nu() const { return nu_; }
  double nu(int k) const { return nu_(k); }
  const HistogramBasis& basis(int k) const { return basis_[k]; }
  double memory() const { return basis_.front().memory; }
  const Eigen::VectorXd& weights(int l, int k) const {
    return weights_[static_cast<std::size_t>(l * dims() + k)];
  }

  double kernel(int l, int k, double x) const;
  double kernel_l1(int l, int k) const { return weights(l, k).lpNorm<1>(); }
  double kernel_sup_positive(int l, int k) const;

  bool edge(int l, int k) const;
  Eigen::MatrixXi graph() const;

 private:
  Eigen::VectorXd nu_;
  std::vector<HistogramBasis> basis_;
  std::vector<Eigen::VectorXd> weights_;
};

/// Event times per dimension on [-A, T]; events before 0 form the history.
class EventData {
 public:
  EventData() = default;

  /// Validates that every list is strictly increasing, lies below the
  /// horizon and that no two dimensions share a timestamp.
  EventData(std::vector<std::vector<double>> times, double horizon);

  int dims() const { return static_cast<int>(times_.size()); }
  double horizon() const { return horizon_; }
  std::span<const double> times(int k) const { return times_[k]; }
  const std::vector<std::vector<double>>& all_times() const { return times_; }

  /// Number of events of dimension k in [0, T].
  std::size_t observed_count(int k) const;
  std::size_t observed_count() const;

  /// Events of dimension k with s in [from, to).
  std::pair<std::size_t, std::size_t> window(int k, double from, double to) const;

  /// All events merged and sorted by time as (time, dim).
  std::vector<std::pair<double, int>> merged() const;

 private:
  std::vector<std::vector<double>> times_;
  double horizon_ = 0.0;
};

/// nu_k + sum_l sum_{s in [t - A, t)} h_{lk}(t - s), for t in [0, T].
double linear_drive(const HawkesParams& params, const EventData& events, int k,
                    double t);

double intensity(const HawkesParams& params, const EventData& events,
                 const LinkFunction& link, int k, double t);

/// H_j^l(t) = (J / A) #{s in dimension l : t - s in bin j}, j = 0..J-1.
Eigen::VectorXd basis_features(const EventData& events,
                               const HistogramBasis& basis, int l, double t);

/// Sorted breakpoints in (from, to) of the drive of target k: every
/// s + j A / J_k for events s of sources with nonzero kernels.
std::vector<double> drive_breakpoints(const HawkesParams& params,
                                      const EventData& events, int k,
                                      double from, double to);

/// Exact integral of the intensity of dimension k over [from, to]; the drive
/// is piecewise constant so the integral is a finite sum over pieces.
double integrated_intensity(const HawkesParams& params, const EventData& events,
                            const LinkFunction& link, int k, double from,
                            double to);

/// sum_k [ sum_{T_i^k in [0,T]} log lambda^k(T_i^k) - int_0^T lambda^k ].
/// Throws ErrorCode::ZeroIntensity when some event has zero intensity.
double log_likelihood(const HawkesParams& params, const EventData& events,
                      std::span<const LinkFunction> links);

double log_likelihood(const HawkesParams& params, const EventData& events,
                      const LinkFunction& link);

}  // namespace hawkes_vb
