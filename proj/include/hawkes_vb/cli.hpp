#pragma once

// Config-driven experiment harness behind the hawkes-vb executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes_vb/adaptive.hpp"
#include "hawkes_vb/core.hpp"
#include "hawkes_vb/gibbs.hpp"
#include "hawkes_vb/vi.hpp"

namespace hawkes_vb::cli {

enum class FitMode { Fixed, Adaptive, TwoStep, Gibbs };

struct ExperimentConfig {
  FitMode mode = FitMode::TwoStep;
  int dims = 0;
  double memory = 0.1;
  std::optional<double> horizon;
  LinkFunction link = LinkFunction::sigmoid(20.0, 0.1, 10.0);
  std::optional<HawkesParams> truth;
  std::optional<double> burn_in;
  std::size_t max_events = 10'000'000;
  std::optional<std::filesystem::path> events_path;
  std::optional<Eigen::MatrixXi> graph;  // fixed / gibbs; complete when absent
  int depth = 0;                         // fixed / gibbs
  PriorSpec prior;
  ViConfig vi;
  TwoStepConfig adaptive;
  GibbsConfig gibbs;
  int plot_points = 200;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
  std::optional<std::filesystem::path> result_path;
  int threads = 0;

  std::vector<LinkFunction> links() const {
    return std::vector<LinkFunction>(static_cast<std::size_t>(dims), link);
  }
};

/// Parses and validates a config; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// events.csv: header `dim,time`, 0-based dim, time with 6 decimals, rows
/// sorted by time.
void write_events_csv(const EventData& events, std::ostream& out);
void write_events_csv(const EventData& events, const std::filesystem::path& path);

/// Reads events.csv. Times that collide after rounding are moved apart by
/// 1e-9 with a warning on `warn`. The horizon defaults to the last time.
EventData read_events_csv(std::istream& in, int dims, std::optional<double> horizon,
                          std::ostream* warn = nullptr);
EventData read_events_csv(const std::filesystem::path& path, int dims,
                          std::optional<double> horizon, std::ostream* warn = nullptr);

nlohmann::json stats_json(const EventData& events, double memory, std::uint64_t seed);

int cmd_simulate(const ExperimentConfig& config);
int cmd_fit(const ExperimentConfig& config);
int cmd_eval(const ExperimentConfig& config);

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 config error, 2 I/O error, 3 data error, 4 numerical failure.
int run(int argc, const char* const* argv);

int exit_code(ErrorCode code);

}  // namespace hawkes_vb::cli
