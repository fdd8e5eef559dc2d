#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hawkes_vb/cli.hpp"
#include "hawkes_vb/simulate.hpp"

namespace hawkes_vb::cli {

void write_events_csv(const EventData& events, std::ostream& out) {
  out << "dim,time\n";
  char buf[64];
  for (const auto& [t, k] : events.merged()) {
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", k, t);
    out << buf;
  }
}

void write_events_csv(const EventData& events, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_events_csv(events, out);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

namespace {

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::Data, "events file line " + std::to_string(line) + ": " + why);
}

}  // namespace

EventData read_events_csv(std::istream& in, int dims, std::optional<double> horizon,
                          std::ostream* warn) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Data, "events file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "dim,time") throw Error(ErrorCode::Data, "events file must start with 'dim,time'");

  std::vector<std::pair<double, int>> rows;
  std::size_t n = 1;
  int max_dim = -1;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) bad_row(n, "expected 'dim,time'");
    int k = 0;
    double t = 0.0;
    const char* b = line.data();
    const char* e = b + line.size();
    auto r1 = std::from_chars(b, b + comma, k);
    if (r1.ec != std::errc() || r1.ptr != b + comma) bad_row(n, "bad dimension");
    auto r2 = std::from_chars(b + comma + 1, e, t);
    if (r2.ec != std::errc() || r2.ptr != e || !std::isfinite(t)) bad_row(n, "bad time");
    if (k < 0 || (dims > 0 && k >= dims)) bad_row(n, "dimension out of range");
    max_dim = std::max(max_dim, k);
    rows.emplace_back(t, k);
  }
  const int K = dims > 0 ? dims : max_dim + 1;
  if (K < 1) throw Error(ErrorCode::Data, "cannot infer K from an empty events file");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t jittered = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first <= rows[i - 1].first) {
      rows[i].first = rows[i - 1].first + 1e-9;
      ++jittered;
    }
  }
  if (jittered && warn) {
    *warn << "warning: " << jittered << " tied timestamps moved apart by 1e-9\n";
  }
  std::vector<std::vector<double>> times(static_cast<std::size_t>(K));
  for (const auto& [t, k] : rows) times[k].push_back(t);
  const double T = horizon.value_or(rows.empty() ? 0.0 : std::max(rows.back().first, 0.0));
  return EventData(std::move(times), T);
}

EventData read_events_csv(const std::filesystem::path& path, int dims,
                          std::optional<double> horizon, std::ostream* warn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open events file " + path.string());
  return read_events_csv(in, dims, horizon, warn);
}

nlohmann::json stats_json(const EventData& events, double memory, std::uint64_t seed) {
  const ExcursionStats s = excursion_stats(events, memory);
  std::size_t total = 0;
  for (auto n : s.num_events) total += n;
  return {{"seed", seed},
          {"horizon", events.horizon()},
          {"num_events", s.num_events},
          {"total_events", total},
          {"num_global_excursions", s.num_global_excursions},
          {"num_local_excursions", s.num_local_excursions}};
}

}  // namespace hawkes_vb::cli
