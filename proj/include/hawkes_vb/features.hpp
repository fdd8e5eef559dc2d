#pragma once

// Feature rows H(t) = (1, H^l_j(t)) for a receiving dimension and the
// quadrature grids used for the compensator integral.

#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <vector>

#include "hawkes_vb/core.hpp"
#include "hawkes_vb/model.hpp"

namespace hawkes_vb {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class QuadratureRule {
  Exact,          // midpoints of the pieces on which H(t) is constant
  GaussLegendre,  // composite Gauss-Legendre on [0, T]
};

struct QuadratureGrid {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Nodes at the midpoints of [0, T] cut at every s + j A / J for events s of
/// the sources of `sub`; weights are the piece lengths.
QuadratureGrid exact_grid(const EventData& events, const SubModel& sub,
                          double memory);

/// Composite Gauss-Legendre with `order` nodes per panel and at least
/// n_points nodes in total. n_points defaults to max(100, ceil(5 T / A)).
QuadratureGrid gauss_legendre_grid(double horizon, double memory,
                                   std::optional<int> n_points = std::nullopt,
                                   int order = 5);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre_nodes(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// One feature row per time: column 0 is the intercept, then J columns for
/// each source in `sub.sources`.
SparseRows feature_rows(const EventData& events, const SubModel& sub,
                        double memory, std::span<const double> times);

/// Everything CAVI and Gibbs need for one receiving dimension: feature rows
/// at its observed events and at the quadrature nodes.
struct DimensionDesign {
  int target = 0;
  SubModel sub;
  double horizon = 0.0;
  SparseRows event_rows;
  SparseRows node_rows;
  Eigen::VectorXd node_weights;

  int num_params() const { return sub.num_params(); }
};

/// Builds the design for target k. Quadrature nodes with identical feature
/// rows are merged (weights summed), which is exact since the integrand
/// depends on t only through H(t).
DimensionDesign build_design(const EventData& events, int k, const SubModel& sub,
                             double memory, QuadratureRule rule,
                             std::optional<int> n_points = std::nullopt);

}  // namespace hawkes_vb
