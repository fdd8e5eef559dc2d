#include <doctest.h>

#include <random>

#include "scenarios.hpp"

using namespace hawkes_vb;

TEST_CASE("softmax weights") {
  Eigen::VectorXd s(4);
  s << -1200.0, -1201.5, -1190.0, -2500.0;
  const Eigen::VectorXd w = softmax_weights(s);
  CHECK(std::abs(w.sum() - 1.0) < 1e-12);
  CHECK(w(3) == 0.0);
  const Eigen::VectorXd shifted = softmax_weights(s.array() + 1e4);
  CHECK((w - shifted).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(softmax_weights(Eigen::VectorXd::Constant(1, -5.0))(0) == 1.0);
}

TEST_CASE("selection: argmax, shift invariance and occam ties") {
  const std::vector<SubModel> c{{{0}, 2}, {{0}, 0}, {{}, 0}, {{0}, 1}};
  Eigen::VectorXd s(4);
  s << -10.0, -12.0, -30.0, -11.0;
  CHECK(select_best(c, s, 1) == 0);
  CHECK(select_best(c, s.array() - 777.0, 1) == 0);
  s << -10.0, -10.0, -30.0, -10.0;
  CHECK(select_best(c, s, 1) == 1);
}

TEST_CASE("folded normal and expected norms") {
  CHECK(folded_normal_mean(0.0, 1.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
  CHECK(folded_normal_mean(-0.7, 0.0) == 0.7);
  CHECK(folded_normal_mean(2.0, 1e-9) == doctest::Approx(2.0));
  CHECK(folded_normal_mean(-2.0, 1.3) == folded_normal_mean(2.0, 1.3));

  std::mt19937_64 rng(4);
  for (double mu : {2.0, -0.3, 0.0}) {
    std::normal_distribution<double> n(mu, 1.0);
    double s = 0.0;
    const int N = 1000000;
    for (int i = 0; i < N; ++i) s += std::abs(n(rng));
    CHECK(std::abs(folded_normal_mean(mu, 1.0) - s / N) < 1e-2);
  }
  Eigen::Vector2d m(0.3, -0.1);
  Eigen::Matrix2d S;
  S << 0.04, 0.01, 0.01, 0.09;
  CHECK(expected_l1_norm(m, S) ==
        doctest::Approx(folded_normal_mean(0.3, 0.2) + folded_normal_mean(-0.1, 0.3)));
  S(1, 1) = 0.0;
  CHECK_THROWS_AS(expected_l1_norm(m, S), Error);
}

TEST_CASE("gap threshold") {
  const std::vector<double> v{0.6, 0.01, 0.5, 0.02};
  CHECK(detect_gap_threshold(v) == doctest::Approx(0.26));
  CHECK(detect_gap_threshold(v, 0.15) == 0.15);
  const std::vector<double> flat{0.3, 0.3, 0.3};
  try {
    (void)detect_gap_threshold(flat);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoGap);
  }
  CHECK(detect_gap_threshold(flat, 0.1) == 0.1);
}

TEST_CASE("model prior") {
  ModelPrior uniform;
  CHECK(uniform.log_weight({{0}, 1}, 2, 3, 13) == doctest::Approx(-std::log(13.0)));
  ModelPrior b{ModelPrior::Kind::BernoulliUniform, 0.3};
  CHECK(b.log_weight({{}, 0}, 2, 3, 13) == doctest::Approx(2.0 * std::log(0.7)));
  CHECK(b.log_weight({{0, 1}, 2}, 2, 3, 13) == doctest::Approx(2.0 * std::log(0.3) - std::log(4.0)));
  // normalised over the enumerated set
  double total = 0.0;
  for (const auto& s : enumerate_sub_models(2, 3)) total += std::exp(b.log_weight(s, 2, 3, 13));
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("single candidate reproduces the fixed-model fit") {
  const auto ev = scenarios::draw(scenarios::excitation(), 100.0, 3);
  const SubModel sub{{0}, 2};
  const auto r = fully_adaptive(ev, {{sub}}, scenarios::links(1), scenarios::kMemory,
                                PriorSpec{}, ViConfig{});
  CHECK(r.dims[0].fits[0].weight == 1.0);
  const auto fixed = cavi_fixed_model(ev, Model::complete(1, 2), scenarios::links(1),
                                      scenarios::kMemory, PriorSpec{}, ViConfig{});
  CHECK(r.dims[0].best().posterior.mean == fixed[0].mean);
  try {
    (void)fully_adaptive(ev, {{}}, scenarios::links(1), scenarios::kMemory, PriorSpec{},
                         ViConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyModelSet);
  }
}

TEST_CASE("inhibition weights concentrate on at most two depths") {
  const auto ev = scenarios::draw(scenarios::inhibition(), 500.0, 2);
  const auto r = fully_adaptive(ev, {enumerate_sub_models(1, 5)}, scenarios::links(1),
                                scenarios::kMemory, PriorSpec{}, ViConfig{},
                                AdaptiveMode::Average, {}, 5);
  std::vector<double> w;
  for (const auto& f : r.dims[0].fits) w.push_back(f.weight);
  std::sort(w.rbegin(), w.rend());
  CHECK(w[0] + w[1] >= 0.9);
  double total = 0.0;
  for (double x : w) total += x;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("two-step recovers a sparse graph") {
  const auto truth = scenarios::sparse(2, false);
  const auto ev = scenarios::draw(truth, 500.0, 1);
  TwoStepConfig cfg;
  const auto r = two_step(ev, scenarios::links(2), scenarios::kMemory, PriorSpec{}, ViConfig{}, cfg);
  CHECK(r.graph.delta_hat == truth.graph());
  CHECK(r.step2.selected_model().graph == truth.graph());
  for (int k = 0; k < 2; ++k) CHECK(r.step2.dims[k].best().sub.depth == 1);
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 2; ++k) {
      CHECK((r.graph.s_hat(l, k) > r.graph.threshold) == static_cast<bool>(r.graph.delta_hat(l, k)));
    }
  }
}

TEST_CASE("two-step with a complete estimated graph repeats step one") {
  const auto ev = scenarios::draw(scenarios::sparse(2, true), 200.0, 3);
  TwoStepConfig cfg;
  cfg.threshold = 0.0;
  const auto r = two_step(ev, scenarios::links(2), scenarios::kMemory, PriorSpec{}, ViConfig{}, cfg);
  CHECK(r.graph.delta_hat == Eigen::MatrixXi::Ones(2, 2));
  for (int k = 0; k < 2; ++k) {
    CHECK(r.step2.dims[k].selected == r.step1.dims[k].selected);
    CHECK(r.step2.dims[k].best().posterior.mean == r.step1.dims[k].best().posterior.mean);
  }
}
