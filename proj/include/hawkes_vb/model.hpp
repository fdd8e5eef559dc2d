#pragma once

// Models m = (delta, J) and their per-dimension pieces.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hawkes_vb/core.hpp"

namespace hawkes_vb {

/// The column delta_{.k} and depth D_k of one receiving dimension. An empty
/// source list means h_{.k} = 0; the depth is then irrelevant and kept at 0.
struct SubModel {
  std::vector<int> sources;  // sorted, 0-based
  int depth = 0;

  int bins() const { return 1 << depth; }
  int num_params() const {
    return 1 + static_cast<int>(sources.size()) * (sources.empty() ? 0 : bins());
  }
  bool has_source(int l) const;
  /// Position of the first weight of source l in the parameter vector, or -1.
  int offset(int l) const;
  HistogramBasis basis(double memory) const { return {memory, bins()}; }

  std::string label() const;

  friend bool operator==(const SubModel&, const SubModel&) = default;
};

/// Occam ordering used for tie-breaks: fewer parameters first, then the
/// lexicographic order of the 0/1 column delta_{.k}.
bool occam_less(const SubModel& a, const SubModel& b, int dims);

struct Model {
  Eigen::MatrixXi graph;    // graph(l, k) = delta_{lk}
  std::vector<int> depths;  // D_k

  int dims() const { return static_cast<int>(graph.rows()); }
  SubModel sub_model(int k) const;
  static Model from_sub_models(const std::vector<SubModel>& subs, int dims);
  static Model complete(int dims, int depth);
};

/// Every (delta_{.k}, D) with D in 0..d_max, the empty column listed once.
std::vector<SubModel> enumerate_sub_models(int dims, int d_max);

/// Complete column with D in 0..d_max.
std::vector<SubModel> complete_sub_models(int dims, int d_max);

/// Fixed column with D in 0..d_max (a single empty model if sources is empty).
std::vector<SubModel> fixed_graph_sub_models(const std::vector<int>& sources, int d_max);

}  // namespace hawkes_vb
