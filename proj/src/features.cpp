#include "hawkes_vb/features.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>

namespace hawkes_vb {

QuadratureGrid exact_grid(const EventData& events, const SubModel& sub,
                          double memory) {
  const double T = events.horizon();
  QuadratureGrid grid;
  if (!(T > 0.0)) return grid;
  const HistogramBasis basis = sub.basis(memory);
  std::vector<double> cuts{0.0, T};
  for (int l : sub.sources) {
    const auto [lo, hi] = events.window(l, -memory, T);
    const auto list = events.times(l);
    for (std::size_t i = lo; i < hi; ++i) {
      for (int j = 0; j <= basis.bins; ++j) {
        const double b = list[i] + j * basis.width();
        if (b > 0.0 && b < T) cuts.push_back(b);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  grid.points.reserve(cuts.size());
  grid.weights.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    grid.points.push_back(0.5 * (cuts[i] + cuts[i + 1]));
    grid.weights.push_back(len);
  }
  return grid;
}

void gauss_legendre_nodes(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  nodes = eig.eigenvalues();
  weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
}

QuadratureGrid gauss_legendre_grid(double horizon, double memory,
                                   std::optional<int> n_points, int order) {
  QuadratureGrid grid;
  if (!(horizon > 0.0)) return grid;
  const int n = n_points.value_or(
      std::max(100, static_cast<int>(std::ceil(5.0 * horizon / memory))));
  if (n < 1 || order < 1) throw Error(ErrorCode::Config, "quadrature size must be positive");
  const int panels = (n + order - 1) / order;
  Eigen::VectorXd x, w;
  gauss_legendre_nodes(order, x, w);
  const double width = horizon / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int i = 0; i < order; ++i) {
      grid.points.push_back(mid + 0.5 * width * x(i));
      grid.weights.push_back(0.5 * width * w(i));
    }
  }
  return grid;
}

SparseRows feature_rows(const EventData& events, const SubModel& sub,
                        double memory, std::span<const double> times) {
  const HistogramBasis basis = sub.basis(memory);
  const int p = sub.num_params();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(times.size() * 3);
  std::vector<double> row(static_cast<std::size_t>(p), 0.0);
  std::vector<int> touched;
  for (std::size_t r = 0; r < times.size(); ++r) {
    const double t = times[r];
    trips.emplace_back(static_cast<int>(r), 0, 1.0);
    for (std::size_t si = 0; si < sub.sources.size(); ++si) {
      const int l = sub.sources[si];
      const auto [lo, hi] = events.window(l, t - memory, t);
      const auto list = events.times(l);
      for (std::size_t i = lo; i < hi; ++i) {
        const int j = basis.bin_of(t - list[i]);
        if (j < 0) continue;
        const int col = 1 + static_cast<int>(si) * basis.bins + j;
        if (row[col] == 0.0) touched.push_back(col);
        row[col] += basis.height();
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int col : touched) {
      trips.emplace_back(static_cast<int>(r), col, row[col]);
      row[col] = 0.0;
    }
    touched.clear();
  }
  SparseRows H(static_cast<Eigen::Index>(times.size()), p);
  H.setFromTriplets(trips.begin(), trips.end());
  H.makeCompressed();
  return H;
}

namespace {

using RowKey = std::vector<std::pair<int, double>>;

void merge_rows(const SparseRows& rows, const std::vector<double>& weights,
                SparseRows& out_rows, Eigen::VectorXd& out_weights) {
  std::map<RowKey, double> merged;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    RowKey key;
    for (SparseRows::InnerIterator it(rows, r); it; ++it)
      key.emplace_back(static_cast<int>(it.col()), it.value());
    merged[std::move(key)] += weights[static_cast<std::size_t>(r)];
  }
  std::vector<Eigen::Triplet<double>> trips;
  out_weights.resize(static_cast<Eigen::Index>(merged.size()));
  int r = 0;
  for (const auto& [key, w] : merged) {
    for (const auto& [col, v] : key) trips.emplace_back(r, col, v);
    out_weights(r++) = w;
  }
  out_rows.resize(static_cast<Eigen::Index>(merged.size()), rows.cols());
  out_rows.setFromTriplets(trips.begin(), trips.end());
  out_rows.makeCompressed();
}

}  // namespace

DimensionDesign build_design(const EventData& events, int k, const SubModel& sub,
                             double memory, QuadratureRule rule,
                             std::optional<int> n_points) {
  DimensionDesign d;
  d.target = k;
  d.sub = sub;
  d.horizon = events.horizon();

  const auto list = events.times(k);
  const auto first = std::lower_bound(list.begin(), list.end(), 0.0);
  const std::vector<double> obs(first, list.end());
  d.event_rows = feature_rows(events, sub, memory, obs);

  const QuadratureGrid grid = rule == QuadratureRule::Exact
                                  ? exact_grid(events, sub, memory)
                                  : gauss_legendre_grid(d.horizon, memory, n_points);
  const SparseRows raw = feature_rows(events, sub, memory, grid.points);
  merge_rows(raw, grid.weights, d.node_rows, d.node_weights);
  return d;
}

}  // namespace hawkes_vb
