#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "hawkes_vb/core.hpp"

using namespace hawkes_vb;

namespace {

HawkesParams no_interaction(std::vector<double> nu) {
  const int K = static_cast<int>(nu.size());
  return HawkesParams(Eigen::Map<Eigen::VectorXd>(nu.data(), K),
                      std::vector<HistogramBasis>(K, {0.1, 1}),
                      std::vector<Eigen::VectorXd>(K * K));
}

HawkesParams random_params(int K, int J, std::mt19937_64& rng, double scale = 0.3) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXd nu(K);
  std::vector<Eigen::VectorXd> w(K * K);
  for (int k = 0; k < K; ++k) nu(k) = 5.0 + n(rng);
  for (auto& v : w) {
    v.resize(J);
    for (int j = 0; j < J; ++j) v(j) = n(rng);
  }
  return HawkesParams(nu, std::vector<HistogramBasis>(K, {0.1, J}), w);
}

// grid > 0 snaps times to multiples of grid, so every drive breakpoint lies
// on that grid.
EventData random_events(int K, double T, int n, std::mt19937_64& rng, double grid = 0.0) {
  std::uniform_real_distribution<double> u(-0.1, T);
  std::vector<std::vector<double>> times(K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      double t = u(rng);
      if (grid > 0.0) t = std::round(t / grid) * grid;
      times[k].push_back(t);
    }
    std::sort(times[k].begin(), times[k].end());
  }
  return EventData(times, T);
}

}  // namespace

TEST_CASE("sigmoid link values and bounds") {
  const auto link = LinkFunction::sigmoid(20.0, 0.1, 10.0);
  CHECK(link(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(link(1.0) == doctest::Approx(20.0 / (1.0 + std::exp(0.9))).epsilon(1e-14));
  for (double x : {-1e6, -50.0, 0.0, 7.0, 1e6}) {
    CHECK(link(x) >= 0.0);
    CHECK(link(x) <= 20.0);
  }
  CHECK(link.upper_bound() == 20.0);
}

TEST_CASE("relu and softplus links") {
  const auto relu = LinkFunction::relu();
  CHECK(relu(0.5) == doctest::Approx(0.501));
  CHECK(relu(-3.0) == doctest::Approx(0.001));
  const auto sp = LinkFunction::softplus(1.0, 1.0, 0.0);
  CHECK(sp(0.0) == doctest::Approx(std::log(2.0)));
  double prev = -1.0;
  for (double x = -30.0; x < 30.0; x += 0.7) {
    CHECK(sp(x) >= prev);
    prev = sp(x);
  }
  CHECK(link_kind_from_string("softplus") == LinkKind::Softplus);
  CHECK_THROWS_AS(link_kind_from_string("tanh"), Error);
}

TEST_CASE("histogram basis has unit mass and half-open bins") {
  for (int J : {1, 2, 4, 8}) {
    const HistogramBasis b{0.1, J};
    for (int j = 0; j < J; ++j) CHECK(b.height() * b.width() == doctest::Approx(1.0));
    CHECK(b.bin_of(0.0) == -1);
    CHECK(b.bin_of(0.1) == J - 1);
    CHECK(b.bin_of(0.1 + 1e-12) == -1);
    CHECK(b.bin_of(b.width()) == 0);
    if (J > 1) CHECK(b.bin_of(b.width() * 1.0000001) == 1);
  }
}

TEST_CASE("graph follows nonzero weights") {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2), w(2);
  w << 0.0, 0.3;
  const HawkesParams p(Eigen::Vector2d(1, 1), {{0.1, 2}, {0.1, 2}}, {w, z, Eigen::VectorXd(), w});
  CHECK(p.edge(0, 0));
  CHECK_FALSE(p.edge(0, 1));
  CHECK_FALSE(p.edge(1, 0));
  CHECK(p.edge(1, 1));
  CHECK(p.kernel_l1(0, 0) == doctest::Approx(0.3));
}

TEST_CASE("event data validation") {
  CHECK_THROWS_AS(EventData({{0.5, 0.4}}, 1.0), Error);
  CHECK_THROWS_AS(EventData({{0.5}, {0.5}}, 1.0), Error);
  CHECK_THROWS_AS(EventData({{1.5}}, 1.0), Error);
  const EventData ev({{-0.05, 0.2, 0.9}, {0.3}}, 1.0);
  CHECK(ev.observed_count() == 3);
  CHECK(ev.observed_count(0) == 2);
}

TEST_CASE("linear drive examples") {
  const auto p0 = no_interaction({10.0});
  const EventData ev({{0.1, 0.2}}, 1.0);
  CHECK(linear_drive(p0, ev, 0, 0.5) == 10.0);

  const HawkesParams p(Eigen::VectorXd::Constant(1, 1.0), {{0.1, 1}},
                       {Eigen::VectorXd::Constant(1, 0.3)});
  const EventData one({{0.45}}, 1.0);
  CHECK(linear_drive(p, one, 0, 0.5) == doctest::Approx(1.0 + 0.3 / 0.1));
  CHECK(linear_drive(p, one, 0, 0.45) == 1.0);  // an event does not excite itself
  CHECK_THROWS_AS(linear_drive(p, one, 0, 1.5), Error);
}

TEST_CASE("linear drive matches the brute-force sum") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = random_params(2, 4, rng);
    const auto ev = random_events(2, 1.0, 5, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double t = u(rng);
      for (int k = 0; k < 2; ++k) {
        CHECK(linear_drive(p, ev, k, t) == doctest::Approx(oracle::drive(p, ev, k, t)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("drive is constant between breakpoints") {
  std::mt19937_64 rng(5);
  const auto p = random_params(2, 4, rng);
  const auto ev = random_events(2, 2.0, 8, rng);
  for (int k = 0; k < 2; ++k) {
    auto bp = drive_breakpoints(p, ev, k, 0.0, 2.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      const double a = bp[i], b = bp[i + 1];
      if (b - a < 1e-9) continue;
      const double ref = linear_drive(p, ev, k, 0.5 * (a + b));
      CHECK(linear_drive(p, ev, k, a + 0.01 * (b - a)) == doctest::Approx(ref));
      CHECK(linear_drive(p, ev, k, b - 0.01 * (b - a)) == doctest::Approx(ref));
    }
  }
}

TEST_CASE("intensity examples") {
  const auto p = no_interaction({10.0});
  const EventData ev({{}}, 1.0);
  CHECK(intensity(p, ev, LinkFunction::sigmoid(20, 0.1, 10), 0, 0.3) == doctest::Approx(10.0));
  const auto p2 = no_interaction({0.5});
  CHECK(intensity(p2, ev, LinkFunction::relu(), 0, 0.3) == doctest::Approx(0.501));
  const auto p3 = no_interaction({1.0});
  CHECK(intensity(p3, ev, LinkFunction::sigmoid(20, 0.1, 10), 0, 0.3) ==
        doctest::Approx(20.0 / (1.0 + std::exp(0.9))).epsilon(1e-14));
}

TEST_CASE("basis features") {
  const HistogramBasis b{0.1, 4};
  const EventData empty({{}}, 1.0);
  CHECK(basis_features(empty, b, 0, 0.5).isZero());
  const EventData one({{0.5 - 0.1 / 8}}, 1.0);
  const Eigen::VectorXd h = basis_features(one, b, 0, 0.5);
  CHECK(h(0) == doctest::Approx(40.0));
  CHECK(h.tail(3).isZero());

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.5, 0.03);
  std::vector<double> t;
  for (int i = 0; i < 40; ++i) t.push_back(n(rng));
  std::sort(t.begin(), t.end());
  const EventData ev({t}, 1.0);
  for (double x = 0.4; x < 0.65; x += 0.0037) {
    const Eigen::VectorXd f = basis_features(ev, b, 0, x);
    CHECK((f - oracle::features(t, 0.1, 4, x)).norm() < 1e-9);
    const auto [lo, hi] = ev.window(0, x - 0.1, x);
    CHECK(f.sum() * b.width() == doctest::Approx(static_cast<double>(hi - lo)));
  }
}

TEST_CASE("log-likelihood closed forms") {
  const auto link = LinkFunction::sigmoid(20, 0.1, 10);
  const auto p = no_interaction({3.0, 8.0});
  const EventData ev({{}, {}}, 7.0);
  const double expected = -(link(3.0) + link(8.0)) * 7.0;
  CHECK(log_likelihood(p, ev, link) == doctest::Approx(expected).epsilon(1e-14));
  const EventData none({{}, {}}, 0.0);
  CHECK(log_likelihood(p, none, link) == 0.0);
}

TEST_CASE("log-likelihood matches the Riemann oracle") {
  const auto link = LinkFunction::sigmoid(20, 0.1, 10);
  std::mt19937_64 rng(7);
  SUBCASE("three-event toy") {
    const HawkesParams p(Eigen::VectorXd::Constant(1, 6.0), {{0.1, 2}},
                         {Eigen::Vector2d(1.5, -0.7)});
    const EventData ev({{0.12, 0.17, 0.31}}, 0.6);
    const double ll = log_likelihood(p, ev, link);
    CHECK(ll == doctest::Approx(oracle::riemann_loglik(p, ev, link, 1e-5)).epsilon(1e-6));
  }
  SUBCASE("random K <= 2 fixtures") {
    for (int rep = 0; rep < 4; ++rep) {
      const int K = 1 + rep % 2;
      const auto p = random_params(K, 4, rng, 2.0);
      const auto ev = random_events(K, 2.0, 15, rng, 1e-5);
      const double ll = log_likelihood(p, ev, link);
      CHECK(ll == doctest::Approx(oracle::riemann_loglik(p, ev, link, 1e-5)).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero intensity at an event is an error") {
  const auto p = no_interaction({0.0});
  const EventData ev({{0.5}}, 1.0);
  try {
    (void)log_likelihood(p, ev, LinkFunction::relu(0.0, 1.0, 1.0, 0.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroIntensity);
  }
}
