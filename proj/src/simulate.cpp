#include "hawkes_vb/simulate.hpp"

#include <algorithm>
#include <random>

namespace hawkes_vb {

namespace {

// Event history with cheap access to the events in [t - A, t).
class History {
 public:
  explicit History(int dims) : times_(static_cast<std::size_t>(dims)) {}

  void push(int k, double t) { times_[k].push_back(t); }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& v : times_) n += v.size();
    return n;
  }

  double drive(const HawkesParams& params, int k, double t) const {
    const double A = params.memory();
    double x = params.nu(k);
    for (int l = 0; l < params.dims(); ++l) {
      if (params.weights(l, k).size() == 0) continue;
      const auto& v = times_[l];
      for (auto it = std::lower_bound(v.begin(), v.end(), t - A);
           it != v.end() && *it < t; ++it) {
        x += params.kernel(l, k, t - *it);
      }
    }
    return x;
  }

  // Upper bound of the drive on (t, next event]: only events already in
  // [t - A, t] can be active, each contributing at most sup h^+.
  double drive_bound(const HawkesParams& params, int k, double t) const {
    const double A = params.memory();
    double x = params.nu(k);
    for (int l = 0; l < params.dims(); ++l) {
      const double sup = params.kernel_sup_positive(l, k);
      if (sup <= 0.0) continue;
      const auto& v = times_[l];
      const auto lo = std::lower_bound(v.begin(), v.end(), t - A);
      x += sup * static_cast<double>(v.end() - lo);
    }
    return x;
  }

  std::vector<std::vector<double>> release() { return std::move(times_); }

 private:
  std::vector<std::vector<double>> times_;
};

}  // namespace

EventData simulate(const SimConfig& config) {
  const auto& params = config.params;
  const int K = params.dims();
  const double A = params.memory();
  const double T = config.horizon;
  const double burn = config.burn_in.value_or(A);
  if (!(T > 0.0)) throw Error(ErrorCode::Domain, "simulation horizon must be positive");
  if (!(burn >= 0.0)) throw Error(ErrorCode::Domain, "burn-in must be nonnegative");
  if (config.links.size() != static_cast<std::size_t>(K)) {
    throw Error(ErrorCode::ShapeMismatch, "one link function per dimension");
  }
  for (const auto& link : config.links) link.validate();

  bool bounded = true;
  double global_bound = 0.0;
  for (const auto& link : config.links) {
    bounded = bounded && std::isfinite(link.upper_bound());
    global_bound += link.upper_bound();
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  History history(K);
  std::vector<double> rates(static_cast<std::size_t>(K));

  auto local_bound = [&](double t) {
    double b = 0.0;
    for (int k = 0; k < K; ++k)
      b += config.links[k](history.drive_bound(params, k, t));
    return b;
  };

  double t = -burn;
  std::size_t accepted = 0;
  while (true) {
    const double bound = bounded ? global_bound : local_bound(t);
    if (!(bound > 0.0)) break;
    if (!std::isfinite(bound)) {
      throw Error(ErrorCode::SimulationDiverged, "intensity bound overflowed");
    }
    t += std::exponential_distribution<double>(bound)(rng);
    if (t > T) break;
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      rates[k] = config.links[k](history.drive(params, k, t));
      total += rates[k];
    }
    const double u = unif(rng) * bound;
    if (u >= total) continue;
    int k = 0;
    double acc = rates[0];
    while (u >= acc && k + 1 < K) acc += rates[++k];
    history.push(k, t);
    if (++accepted > config.max_events) {
      throw Error(ErrorCode::SimulationDiverged,
                  "event cap exceeded; the process looks explosive");
    }
  }

  auto times = history.release();
  for (auto& v : times) {
    v.erase(v.begin(), std::lower_bound(v.begin(), v.end(), -A));
  }
  return EventData(std::move(times), T);
}

namespace {

std::size_t count_renewals(const std::vector<double>& sorted, double A, double T) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double tau = sorted[i] + A;
    const bool quiet = i + 1 == sorted.size() || sorted[i + 1] > tau;
    if (quiet && tau > 0.0 && tau <= T) ++n;
  }
  return n;
}

}  // namespace

ExcursionStats excursion_stats(const EventData& events, double memory) {
  ExcursionStats stats;
  std::vector<double> all;
  for (int k = 0; k < events.dims(); ++k) {
    stats.num_events.push_back(events.observed_count(k));
    const auto times = events.times(k);
    const std::vector<double> list(times.begin(), times.end());
    stats.num_local_excursions.push_back(
        count_renewals(list, memory, events.horizon()));
    all.insert(all.end(), list.begin(), list.end());
  }
  std::sort(all.begin(), all.end());
  stats.num_global_excursions = count_renewals(all, memory, events.horizon());
  return stats;
}

}  // namespace hawkes_vb
