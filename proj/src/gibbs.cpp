#include "hawkes_vb/gibbs.hpp"

#include <algorithm>
#include <random>

#include "hawkes_vb/parallel.hpp"
#include "hawkes_vb/pg.hpp"

namespace hawkes_vb {

void GibbsConfig::validate() const {
  if (!(n_iter > burn_in) || burn_in < 0 || thin < 1) {
    throw Error(ErrorCode::Config, "Gibbs needs n_iter > burn_in >= 0 and thin >= 1");
  }
}

Eigen::VectorXd GibbsChain::mean() const { return draws.colwise().mean().transpose(); }

Eigen::VectorXd GibbsChain::sd() const {
  const Eigen::RowVectorXd m = draws.colwise().mean();
  const Eigen::MatrixXd c = draws.rowwise() - m;
  const double n = std::max<double>(1.0, static_cast<double>(draws.rows()) - 1.0);
  return (c.array().square().colwise().sum() / n).sqrt().transpose();
}

namespace {

void accumulate(const SparseRows& rows, std::span<const double> omega, double sign,
                const LinkFunction& link, Eigen::MatrixXd& P, Eigen::VectorXd& b) {
  const double a = link.alpha;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double u = omega[static_cast<std::size_t>(r)];
    const double lin = a * 0.5 * sign + a * a * link.eta * u;
    for (SparseRows::InnerIterator x(rows, r); x; ++x) {
      b(x.col()) += lin * x.value();
      for (SparseRows::InnerIterator y(rows, r); y; ++y)
        P(x.col(), y.col()) += a * a * u * x.value() * y.value();
    }
  }
}

}  // namespace

GaussianConditional gibbs_conditional(const SparseRows& event_rows,
                                      std::span<const double> event_omega,
                                      const SparseRows& latent_rows,
                                      std::span<const double> latent_omega,
                                      const LinkFunction& link, const GaussianPrior& prior) {
  const Eigen::MatrixXd prior_inv = spd_inverse(prior.cov);
  GaussianConditional out{Eigen::VectorXd(), prior_inv};
  Eigen::VectorXd b = prior_inv * prior.mean;
  accumulate(event_rows, event_omega, 1.0, link, out.precision, b);
  accumulate(latent_rows, latent_omega, -1.0, link, out.precision, b);
  Eigen::LLT<Eigen::MatrixXd> llt(out.precision);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical, "conditional precision is not positive definite");
  }
  out.mean = llt.solve(b);
  return out;
}

namespace {

GibbsChain run_chain(const EventData& events, int k, const SubModel& sub,
                     const GibbsConfig& config, const LinkFunction& link, double memory) {
  std::seed_seq seq{config.seed, static_cast<std::uint64_t>(k)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const GaussianPrior prior = config.prior.make(sub);
  const int p = sub.num_params();
  const double T = events.horizon();
  const auto list = events.times(k);
  const std::vector<double> observed(std::lower_bound(list.begin(), list.end(), 0.0),
                                     list.end());
  const SparseRows H = feature_rows(events, sub, memory, observed);
  const Eigen::Index n_events = H.rows();

  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.cov);
  Eigen::VectorXd f = prior.mean;
  {
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = normal(rng);
    f += prior_llt.matrixL() * z;
  }

  const int kept = (config.n_iter - config.burn_in + config.thin - 1) / config.thin;
  GibbsChain chain{sub, Eigen::MatrixXd(kept, p)};
  std::vector<double> omega(static_cast<std::size_t>(n_events));
  std::vector<double> candidates;
  std::vector<double> latent_times;
  std::vector<double> latent_omega;
  int row = 0;

  for (int it = 0; it < config.n_iter; ++it) {
    const Eigen::VectorXd drive = link.alpha * ((H * f).array() - link.eta);
    for (Eigen::Index i = 0; i < n_events; ++i) omega[i] = pg_sample(std::abs(drive(i)), rng);

    candidates.clear();
    if (T > 0.0) {
      std::exponential_distribution<double> gap(link.theta);
      for (double t = gap(rng); t <= T; t += gap(rng)) candidates.push_back(t);
    }
    const SparseRows C = feature_rows(events, sub, memory, candidates);
    const Eigen::VectorXd cdrive = link.alpha * ((C * f).array() - link.eta);
    latent_times.clear();
    latent_omega.clear();
    for (Eigen::Index j = 0; j < C.rows(); ++j) {
      if (unif(rng) < logistic(-cdrive(j))) {
        latent_times.push_back(candidates[static_cast<std::size_t>(j)]);
        latent_omega.push_back(pg_sample(std::abs(cdrive(j)), rng));
      }
    }
    const SparseRows L = feature_rows(events, sub, memory, latent_times);

    const auto cond = gibbs_conditional(H, omega, L, latent_omega, link, prior);
    Eigen::LLT<Eigen::MatrixXd> llt(cond.precision);
    Eigen::VectorXd z(p);
    for (int i = 0; i < p; ++i) z(i) = normal(rng);
    f = cond.mean + llt.matrixU().solve(z);

    if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0) {
      chain.draws.row(row++) = f.transpose();
    }
  }
  return chain;
}

}  // namespace

std::vector<GibbsChain> gibbs_sample(const EventData& events, const GibbsConfig& config,
                                     std::span<const LinkFunction> links, double memory) {
  config.validate();
  const int K = events.dims();
  if (config.model.dims() != K || links.size() != static_cast<std::size_t>(K)) {
    throw Error(ErrorCode::ShapeMismatch, "model, links and data disagree on K");
  }
  for (const auto& link : links) require_sigmoid(link);
  std::vector<GibbsChain> chains(static_cast<std::size_t>(K));
  parallel_for(chains.size(), config.threads, [&](std::size_t k) {
    const int kk = static_cast<int>(k);
    chains[k] = run_chain(events, kk, config.model.sub_model(kk), config, links[k], memory);
  });
  return chains;
}

}  // namespace hawkes_vb
