#include <doctest.h>

#include "oracles.hpp"
#include "scenarios.hpp"

using namespace hawkes_vb;

namespace {

HawkesParams homogeneous(int K, double nu) {
  return HawkesParams(Eigen::VectorXd::Constant(K, nu), std::vector<HistogramBasis>(K, {0.1, 1}),
                      std::vector<Eigen::VectorXd>(K * K));
}

}  // namespace

TEST_CASE("same seed gives identical data") {
  const auto p = scenarios::sparse(2, false);
  const auto a = scenarios::draw(p, 50.0, 4);
  const auto b = scenarios::draw(p, 50.0, 4);
  CHECK(a.all_times() == b.all_times());
  const auto c = scenarios::draw(p, 50.0, 5);
  CHECK(a.all_times() != c.all_times());
}

TEST_CASE("output is sorted, tie-free and inside the window") {
  const auto p = scenarios::sparse(3, true);
  const auto ev = scenarios::draw(p, 40.0, 1);
  for (int k = 0; k < 3; ++k) {
    const auto t = ev.times(k);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(t[i] >= -0.1);
      CHECK(t[i] <= 40.0);
      if (i) CHECK(t[i] > t[i - 1]);
    }
  }
}

TEST_CASE("homogeneous reduction: Poisson counts and exponential gaps") {
  const auto link = LinkFunction::sigmoid(20.0, 0.1, 10.0);
  const double nu = 12.0, T = 50.0;
  const double rate = link(nu);
  const auto p = homogeneous(1, nu);
  double total = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    total += static_cast<double>(
        simulate(SimConfig{p, {link}, T, std::nullopt, static_cast<std::uint64_t>(s)}).observed_count());
  }
  const double mean = total / seeds;
  CHECK(std::abs(mean - rate * T) < 3.0 * std::sqrt(rate * T / seeds));

  const auto ev = simulate(SimConfig{p, {link}, 10000.0 / rate, std::nullopt, 99});
  std::vector<double> gaps;
  const auto t = ev.times(0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i - 1] >= 0.0) gaps.push_back(t[i] - t[i - 1]);
  }
  CHECK(gaps.size() > 9000);
  const double pv = oracle::ks_pvalue(gaps, [&](double x) { return 1.0 - std::exp(-rate * x); });
  CHECK(pv > 0.01);
}

TEST_CASE("relu and softplus links simulate through the local bound") {
  const auto p = scenarios::sparse(2, false);
  for (const auto& link : {LinkFunction::relu(0.001, 1.0, 1.0, 0.0),
                           LinkFunction::softplus(1.0, 1.0, 0.0)}) {
    const auto ev = simulate(SimConfig{p, {link, link}, 100.0, std::nullopt, 3});
    CHECK(ev.observed_count() > 50);
  }
}

TEST_CASE("explosive relu process hits the event cap") {
  const HawkesParams p(Eigen::VectorXd::Constant(1, 1.0), {{0.1, 1}},
                       {Eigen::VectorXd::Constant(1, 2.0)});
  const auto relu = LinkFunction::relu();
  SimConfig cfg{p, {relu}, 1000.0, std::nullopt, 1, 5000};
  try {
    (void)simulate(cfg);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SimulationDiverged);
  }
}

TEST_CASE("excursion counts") {
  const EventData empty({{}}, 10.0);
  CHECK(excursion_stats(empty, 0.1).num_global_excursions == 0);

  const EventData ev({{1.0, 1.05, 3.0}}, 10.0);
  const auto s = excursion_stats(ev, 0.1);
  CHECK(s.num_global_excursions == 2);
  CHECK(s.num_local_excursions[0] == 2);
  CHECK(s.num_events[0] == 3);

  // A renewal needs silence in every dimension, a local one only in its own.
  const EventData two({{1.0}, {1.05}}, 10.0);
  const auto s2 = excursion_stats(two, 0.1);
  CHECK(s2.num_global_excursions == 1);
  CHECK(s2.num_local_excursions[0] == 1);
  CHECK(s2.num_local_excursions[1] == 1);

  // Renewals past T are not counted.
  const EventData late({{9.95}}, 10.0);
  CHECK(excursion_stats(late, 0.1).num_global_excursions == 0);
}

TEST_CASE("sigmoid excitation scenario lands near its targets") {
  const auto ev = scenarios::draw(scenarios::excitation(), 500.0, 1);
  const auto s = excursion_stats(ev, scenarios::kMemory);
  CHECK(ev.observed_count() > 4200);
  CHECK(ev.observed_count() < 6300);
  CHECK(s.num_global_excursions > 1250);
  CHECK(s.num_global_excursions < 1870);
}
