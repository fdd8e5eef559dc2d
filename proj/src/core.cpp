#include "hawkes_vb/core.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace hawkes_vb {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Config: return "config_error";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Data: return "data_error";
    case ErrorCode::ZeroIntensity: return "zero_intensity";
    case ErrorCode::Numerical: return "numerical_failure";
    case ErrorCode::UnsupportedLink: return "unsupported_link";
    case ErrorCode::SimulationDiverged: return "simulation_diverged";
    case ErrorCode::NoGap: return "no_gap";
    case ErrorCode::EmptyModelSet: return "empty_model_set";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
  }
  return "unknown";
}

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Sigmoid: return "sigmoid";
    case LinkKind::ReLU: return "relu";
    case LinkKind::Softplus: return "softplus";
  }
  return "unknown";
}

LinkKind link_kind_from_string(const std::string& name) {
  if (name == "sigmoid") return LinkKind::Sigmoid;
  if (name == "relu") return LinkKind::ReLU;
  if (name == "softplus") return LinkKind::Softplus;
  throw Error(ErrorCode::Config, "unknown link kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// LinkFunction

LinkFunction LinkFunction::sigmoid(double theta, double alpha, double eta) {
  return {LinkKind::Sigmoid, theta, alpha, eta, 0.0};
}

LinkFunction LinkFunction::relu(double theta_base, double scale, double alpha,
                                double eta) {
  return {LinkKind::ReLU, scale, alpha, eta, theta_base};
}

LinkFunction LinkFunction::softplus(double scale, double alpha, double eta,
                                    double theta_base) {
  return {LinkKind::Softplus, scale, alpha, eta, theta_base};
}

double LinkFunction::operator()(double x) const {
  const double z = alpha * (x - eta);
  switch (kind) {
    case LinkKind::Sigmoid: return theta_base + theta * logistic(z);
    case LinkKind::ReLU: return theta_base + theta * std::max(z, 0.0);
    case LinkKind::Softplus: return theta_base + theta * hawkes_vb::softplus(z);
  }
  return 0.0;
}

double LinkFunction::upper_bound() const {
  if (kind == LinkKind::Sigmoid) return theta_base + theta;
  return std::numeric_limits<double>::infinity();
}

void LinkFunction::validate() const {
  if (!(theta > 0.0) || !(alpha > 0.0) || !(theta_base >= 0.0) ||
      !std::isfinite(eta)) {
    throw Error(ErrorCode::Domain,
                "link parameters require theta > 0, alpha > 0, floor >= 0");
  }
}

// ---------------------------------------------------------------------------
// HistogramBasis

int HistogramBasis::bin_of(double x) const {
  if (!(x > 0.0) || x > memory) return -1;
  const int j = static_cast<int>(std::ceil(x * bins / memory)) - 1;
  return std::clamp(j, 0, bins - 1);
}

void HistogramBasis::validate() const {
  if (!(memory > 0.0) || bins < 1) {
    throw Error(ErrorCode::Domain, "histogram basis needs A > 0 and J >= 1");
  }
}

// ---------------------------------------------------------------------------
// HawkesParams

HawkesParams::HawkesParams(Eigen::VectorXd nu, std::vector<HistogramBasis> basis,
                           std::vector<Eigen::VectorXd> weights)
    : nu_(std::move(nu)), basis_(std::move(basis)), weights_(std::move(weights)) {
  const auto K = static_cast<std::size_t>(nu_.size());
  if (K == 0 || basis_.size() != K || weights_.size() != K * K) {
    throw Error(ErrorCode::ShapeMismatch,
                "HawkesParams needs K background rates, K bases and K*K kernels");
  }
  for (const auto& b : basis_) {
    b.validate();
    if (b.memory != basis_.front().memory) {
      throw Error(ErrorCode::Domain, "all kernels must share the memory A");
    }
  }
  for (std::size_t l = 0; l < K; ++l) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto& w = weights_[l * K + k];
      if (w.size() != 0 && w.size() != basis_[k].bins) {
        throw Error(ErrorCode::ShapeMismatch,
                    "kernel weight length must equal J of the target dimension");
      }
    }
  }
}

double HawkesParams::kernel(int l, int k, double x) const {
  const auto& w = weights(l, k);
  if (w.size() == 0) return 0.0;
  const int j = basis_[k].bin_of(x);
  return j < 0 ? 0.0 : w(j) * basis_[k].height();
}

double HawkesParams::kernel_sup_positive(int l, int k) const {
  const auto& w = weights(l, k);
  if (w.size() == 0) return 0.0;
  return std::max(w.maxCoeff(), 0.0) * basis_[k].height();
}

bool HawkesParams::edge(int l, int k) const {
  const auto& w = weights(l, k);
  return w.size() != 0 && (w.array() != 0.0).any();
}

Eigen::MatrixXi HawkesParams::graph() const {
  Eigen::MatrixXi g(dims(), dims());
  for (int l = 0; l < dims(); ++l)
    for (int k = 0; k < dims(); ++k) g(l, k) = edge(l, k) ? 1 : 0;
  return g;
}

// ---------------------------------------------------------------------------
// EventData

EventData::EventData(std::vector<std::vector<double>> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
  if (times_.empty()) throw Error(ErrorCode::Data, "event data needs K >= 1");
  if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorCode::Data, "horizon must be finite and nonnegative");
  }
  for (const auto& list : times_) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!std::isfinite(list[i]) || list[i] > horizon_) {
        throw Error(ErrorCode::Data, "event time outside the observation window");
      }
      if (i > 0 && !(list[i] > list[i - 1])) {
        throw Error(ErrorCode::Data, "event times must be strictly increasing");
      }
    }
  }
  const auto all = merged();
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].first == all[i - 1].first) {
      throw Error(ErrorCode::Data, "simultaneous events across dimensions");
    }
  }
}

std::size_t EventData::observed_count(int k) const {
  const auto& list = times_[k];
  return static_cast<std::size_t>(
      list.end() - std::lower_bound(list.begin(), list.end(), 0.0));
}

std::size_t EventData::observed_count() const {
  std::size_t n = 0;
  for (int k = 0; k < dims(); ++k) n += observed_count(k);
  return n;
}

std::pair<std::size_t, std::size_t> EventData::window(int k, double from,
                                                      double to) const {
  const auto& list = times_[k];
  const auto lo = std::lower_bound(list.begin(), list.end(), from);
  const auto hi = std::lower_bound(lo, list.end(), to);
  return {static_cast<std::size_t>(lo - list.begin()),
          static_cast<std::size_t>(hi - list.begin())};
}

std::vector<std::pair<double, int>> EventData::merged() const {
  std::vector<std::pair<double, int>> out;
  for (int k = 0; k < dims(); ++k)
    for (double t : times_[k]) out.emplace_back(t, k);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Drive, intensity, likelihood

namespace {

void check_shapes(const HawkesParams& params, const EventData& events) {
  if (params.dims() != events.dims()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter and event dimensions differ");
  }
}

double drive_unchecked(const HawkesParams& params, const EventData& events,
                       int k, double t) {
  const double A = params.memory();
  double x = params.nu(k);
  for (int l = 0; l < params.dims(); ++l) {
    if (params.weights(l, k).size() == 0) continue;
    const auto [lo, hi] = events.window(l, t - A, t);
    const auto list = events.times(l);
    for (std::size_t i = lo; i < hi; ++i) x += params.kernel(l, k, t - list[i]);
  }
  return x;
}

}  // namespace

double linear_drive(const HawkesParams& params, const EventData& events, int k,
                    double t) {
  check_shapes(params, events);
  if (!(t >= 0.0) || t > events.horizon()) {
    throw Error(ErrorCode::Domain, "drive evaluated outside [0, T]");
  }
  return drive_unchecked(params, events, k, t);
}

double intensity(const HawkesParams& params, const EventData& events,
                 const LinkFunction& link, int k, double t) {
  return link(linear_drive(params, events, k, t));
}

Eigen::VectorXd basis_features(const EventData& events,
                               const HistogramBasis& basis, int l, double t) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(basis.bins);
  const auto [lo, hi] = events.window(l, t - basis.memory, t);
  const auto list = events.times(l);
  for (std::size_t i = lo; i < hi; ++i) {
    const int j = basis.bin_of(t - list[i]);
    if (j >= 0) h(j) += basis.height();
  }
  return h;
}

std::vector<double> drive_breakpoints(const HawkesParams& params,
                                      const EventData& events, int k,
                                      double from, double to) {
  const auto& basis = params.basis(k);
  std::vector<double> points;
  for (int l = 0; l < params.dims(); ++l) {
    if (!params.edge(l, k)) continue;
    const auto [lo, hi] = events.window(l, from - basis.memory, to);
    const auto list = events.times(l);
    for (std::size_t i = lo; i < hi; ++i) {
      for (int j = 0; j <= basis.bins; ++j) {
        const double b = list[i] + j * basis.width();
        if (b > from && b < to) points.push_back(b);
      }
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double integrated_intensity(const HawkesParams& params, const EventData& events,
                            const LinkFunction& link, int k, double from,
                            double to) {
  check_shapes(params, events);
  if (!(to > from)) return 0.0;
  auto points = drive_breakpoints(params, events, k, from, to);
  points.insert(points.begin(), from);
  points.push_back(to);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double len = points[i + 1] - points[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (points[i] + points[i + 1]);
    total += link(drive_unchecked(params, events, k, mid)) * len;
  }
  return total;
}

double log_likelihood(const HawkesParams& params, const EventData& events,
                      std::span<const LinkFunction> links) {
  check_shapes(params, events);
  if (links.size() != static_cast<std::size_t>(params.dims())) {
    throw Error(ErrorCode::ShapeMismatch, "one link function per dimension");
  }
  const double T = events.horizon();
  double total = 0.0;
  for (int k = 0; k < params.dims(); ++k) {
    const auto list = events.times(k);
    const auto first = std::lower_bound(list.begin(), list.end(), 0.0);
    for (auto it = first; it != list.end(); ++it) {
      const double lambda = links[k](drive_unchecked(params, events, k, *it));
      if (!(lambda > 0.0)) {
        throw Error(ErrorCode::ZeroIntensity,
                    "zero intensity at an observed event; log-likelihood is -inf");
      }
      total += std::log(lambda);
    }
    total -= integrated_intensity(params, events, links[k], k, 0.0, T);
  }
  return total;
}

double log_likelihood(const HawkesParams& params, const EventData& events,
                      const LinkFunction& link) {
  const std::vector<LinkFunction> links(static_cast<std::size_t>(params.dims()), link);
  return log_likelihood(params, events, links);
}

}  // namespace hawkes_vb
