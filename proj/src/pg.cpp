#include "hawkes_vb/pg.hpp"

#include <numbers>

#include "hawkes_vb/error.hpp"

namespace hawkes_vb {

double pg_mean(double c) {
  if (!(c >= 0.0)) throw Error(ErrorCode::Domain, "pg_mean needs c >= 0");
  if (c < 1e-4) return 0.25 - c * c / 48.0;
  return std::tanh(0.5 * c) / (2.0 * c);
}

double log_g(double omega, double x) {
  return -0.5 * omega * x * x + 0.5 * x - std::numbers::ln2;
}

}  // namespace hawkes_vb
