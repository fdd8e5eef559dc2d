#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hawkes_vb/core.hpp"

namespace hawkes_vb {

struct SimConfig {
  HawkesParams params;
  std::vector<LinkFunction> links;  // one per dimension
  double horizon = 0.0;
  std::optional<double> burn_in;    // defaults to A
  std::uint64_t seed = 0;
  std::size_t max_events = 10'000'000;
};

struct ExcursionStats {
  std::vector<std::size_t> num_events;  // per dimension, on [0, T]
  std::size_t num_global_excursions = 0;
  std::vector<std::size_t> num_local_excursions;
};

/// Thinning simulation on [-burn_in, T] from an empty history. The returned
/// data keeps events in [-A, T] and has horizon T.
EventData simulate(const SimConfig& config);

/// Renewal times tau = s + A of events s followed by a gap longer than A,
/// counted when tau lies in (0, T]. Local counts use one dimension at a time.
ExcursionStats excursion_stats(const EventData& events, double memory);

}  // namespace hawkes_vb
