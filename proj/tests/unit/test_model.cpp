#include <doctest.h>

#include <set>

#include "hawkes_vb/model.hpp"

using namespace hawkes_vb;

TEST_CASE("sub-model parameter layout") {
  const SubModel s{{0, 2}, 2};
  CHECK(s.bins() == 4);
  CHECK(s.num_params() == 9);
  CHECK(s.offset(0) == 1);
  CHECK(s.offset(2) == 5);
  CHECK(s.offset(1) == -1);
  const SubModel empty{{}, 0};
  CHECK(empty.num_params() == 1);
}

TEST_CASE("enumeration sizes") {
  CHECK(enumerate_sub_models(1, 5).size() == 7);
  CHECK(enumerate_sub_models(2, 4).size() == 16);
  // (2^K - 1) nonempty columns times (d_max + 1) depths, plus the empty one
  for (int K = 1; K <= 4; ++K) {
    for (int d = 0; d <= 3; ++d) {
      const auto all = enumerate_sub_models(K, d);
      CHECK(all.size() == static_cast<std::size_t>(((1 << K) - 1) * (d + 1) + 1));
      std::set<std::string> labels;
      for (const auto& s : all) labels.insert(s.label());
      CHECK(labels.size() == all.size());
    }
  }
  CHECK(complete_sub_models(3, 2).size() == 3);
  CHECK(fixed_graph_sub_models({1}, 4).size() == 5);
  CHECK(fixed_graph_sub_models({}, 4).size() == 1);
}

TEST_CASE("occam ordering") {
  CHECK(occam_less({{}, 0}, {{0}, 0}, 2));
  CHECK(occam_less({{0}, 0}, {{0}, 1}, 2));
  // same size: the column with later sources sorts first
  CHECK(occam_less({{1}, 0}, {{0}, 0}, 2));
  CHECK_FALSE(occam_less({{0}, 0}, {{1}, 0}, 2));
  CHECK_FALSE(occam_less({{0}, 1}, {{0}, 1}, 2));
}

TEST_CASE("model round trip through sub-models") {
  Eigen::MatrixXi g(3, 3);
  g << 1, 0, 1,
       0, 0, 1,
       1, 0, 0;
  const Model m{g, {1, 0, 2}};
  std::vector<SubModel> subs;
  for (int k = 0; k < 3; ++k) subs.push_back(m.sub_model(k));
  CHECK(subs[0].sources == std::vector<int>{0, 2});
  CHECK(subs[1].sources.empty());
  CHECK(subs[1].depth == 0);
  CHECK(subs[2].sources == std::vector<int>{0, 1});
  const Model back = Model::from_sub_models(subs, 3);
  CHECK(back.graph == g);
  CHECK(Model::complete(2, 1).graph == Eigen::MatrixXi::Ones(2, 2));
}
