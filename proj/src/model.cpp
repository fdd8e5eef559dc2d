#include "hawkes_vb/model.hpp"

#include <algorithm>

namespace hawkes_vb {

bool SubModel::has_source(int l) const {
  return std::binary_search(sources.begin(), sources.end(), l);
}

int SubModel::offset(int l) const {
  const auto it = std::lower_bound(sources.begin(), sources.end(), l);
  if (it == sources.end() || *it != l) return -1;
  return 1 + static_cast<int>(it - sources.begin()) * bins();
}

std::string SubModel::label() const {
  std::string s = "sources=[";
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(sources[i]);
  }
  s += "]";
  if (!sources.empty()) s += " J=" + std::to_string(bins());
  return s;
}

bool occam_less(const SubModel& a, const SubModel& b, int dims) {
  if (a.num_params() != b.num_params()) return a.num_params() < b.num_params();
  for (int l = 0; l < dims; ++l) {
    const bool x = a.has_source(l);
    const bool y = b.has_source(l);
    if (x != y) return !x;
  }
  return a.depth < b.depth;
}

SubModel Model::sub_model(int k) const {
  SubModel sub;
  for (int l = 0; l < dims(); ++l)
    if (graph(l, k)) sub.sources.push_back(l);
  sub.depth = sub.sources.empty() ? 0 : depths[k];
  return sub;
}

Model Model::from_sub_models(const std::vector<SubModel>& subs, int dims) {
  Model m{Eigen::MatrixXi::Zero(dims, dims), std::vector<int>(dims, 0)};
  for (int k = 0; k < dims; ++k) {
    for (int l : subs[k].sources) m.graph(l, k) = 1;
    m.depths[k] = subs[k].depth;
  }
  return m;
}

Model Model::complete(int dims, int depth) {
  return {Eigen::MatrixXi::Ones(dims, dims), std::vector<int>(dims, depth)};
}

std::vector<SubModel> enumerate_sub_models(int dims, int d_max) {
  std::vector<SubModel> out{SubModel{}};
  for (unsigned mask = 1; mask < (1u << dims); ++mask) {
    std::vector<int> sources;
    for (int l = 0; l < dims; ++l)
      if (mask & (1u << l)) sources.push_back(l);
    for (int d = 0; d <= d_max; ++d) out.push_back({sources, d});
  }
  return out;
}

std::vector<SubModel> complete_sub_models(int dims, int d_max) {
  std::vector<int> all(dims);
  for (int l = 0; l < dims; ++l) all[l] = l;
  return fixed_graph_sub_models(all, d_max);
}

std::vector<SubModel> fixed_graph_sub_models(const std::vector<int>& sources,
                                             int d_max) {
  if (sources.empty()) return {SubModel{}};
  std::vector<SubModel> out;
  for (int d = 0; d <= d_max; ++d) out.push_back({sources, d});
  return out;
}

}  // namespace hawkes_vb
