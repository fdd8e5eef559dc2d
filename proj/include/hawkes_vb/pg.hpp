#pragma once

// Polya-Gamma PG(1, c) utilities.

#include <cmath>
#include <numbers>
#include <random>

namespace hawkes_vb {

/// E[omega] for omega ~ PG(1, c): tanh(c/2) / (2c), 1/4 at c = 0.
double pg_mean(double c);

/// g(omega, x) = -omega x^2 / 2 + x / 2 - log 2, so that
/// sigmoid(x) = E_{omega ~ PG(1,0)} exp(g(omega, x)).
double log_g(double omega, double x);

namespace detail {

inline constexpr double kPgTrunc = 0.64;

inline double log_normal_cdf(double x) {
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

// Coefficient a_n(x) of the alternating series for J*(1, z).
inline double pg_coef(int n, double x) {
  const double k = (n + 0.5) * std::numbers::pi;
  if (x > kPgTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double e = -1.5 * (std::log(0.5 * std::numbers::pi) + std::log(x)) +
                   std::log(k) - 2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(e);
}

// Probability of the exponential-tail proposal, 1 / (1 + q/p).
inline double pg_tail_mass(double z) {
  const double t = kPgTrunc;
  const double fz = 0.125 * std::numbers::pi * std::numbers::pi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + log_normal_cdf(b);
  const double xa = x0 + z + log_normal_cdf(a);
  const double q_over_p = 4.0 / std::numbers::pi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian IG(1/z, 1) truncated to (0, t].
template <typename Rng>
double truncated_inverse_gaussian(double z, Rng& rng) {
  const double t = kPgTrunc;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  double x = t + 1.0;
  if (z < 1.0 / t) {
    double accept = 0.0;
    while (unif(rng) > accept) {
      double e1 = expo(rng);
      double e2 = expo(rng);
      while (e1 * e1 > 2.0 * e2 / t) {
        e1 = expo(rng);
        e2 = expo(rng);
      }
      x = 1.0 + e1 * t;
      x = t / (x * x);
      accept = std::exp(-0.5 * z * z * x);
    }
    return x;
  }
  const double mu = 1.0 / z;
  std::normal_distribution<double> norm(0.0, 1.0);
  while (x > t) {
    double y = norm(rng);
    y *= y;
    const double half_mu = 0.5 * mu;
    const double mu_y = mu * y;
    x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
    if (unif(rng) > mu / (mu + x)) x = mu * mu / x;
  }
  return x;
}

}  // namespace detail

/// Exact draw from PG(1, c) by the alternating-series rejection method
/// (Devroye's sampler for J*(1, c/2), scaled by 1/4).
template <typename Rng>
double pg_sample(double c, Rng& rng) {
  const double z = 0.5 * std::abs(c);
  const double fz = 0.125 * std::numbers::pi * std::numbers::pi + 0.5 * z * z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double tail = detail::pg_tail_mass(z);
  for (;;) {
    double x;
    if (unif(rng) < tail) {
      x = detail::kPgTrunc + expo(rng) / fz;
    } else {
      x = detail::truncated_inverse_gaussian(z, rng);
    }
    double s = detail::pg_coef(0, x);
    const double y = unif(rng) * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= detail::pg_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += detail::pg_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

}  // namespace hawkes_vb
