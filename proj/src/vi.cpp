#include "hawkes_vb/vi.hpp"

#include <cmath>
#include <numbers>

#include "hawkes_vb/parallel.hpp"
#include "hawkes_vb/pg.hpp"

namespace hawkes_vb {

void GaussianPrior::validate() const {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::ShapeMismatch, "prior mean and covariance sizes differ");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Domain, "prior covariance is not positive definite");
  }
}

GaussianPrior PriorSpec::make(const SubModel& sub) const {
  if (!(nu_sd > 0.0) || !(weight_sd > 0.0)) {
    throw Error(ErrorCode::Config, "prior standard deviations must be positive");
  }
  const int p = sub.num_params();
  GaussianPrior prior{Eigen::VectorXd::Constant(p, weight_mean),
                      Eigen::MatrixXd::Zero(p, p)};
  prior.mean(0) = nu_mean;
  prior.cov.diagonal().setConstant(weight_sd * weight_sd);
  prior.cov(0, 0) = nu_sd * nu_sd;
  return prior;
}

void require_sigmoid(const LinkFunction& link) {
  if (link.kind != LinkKind::Sigmoid || link.theta_base != 0.0) {
    throw Error(ErrorCode::UnsupportedLink,
                "variational and Gibbs inference need the sigmoid link");
  }
  link.validate();
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, double* log_det) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = m;
    jittered.diagonal().array() += 1e-8 * m.diagonal().mean();
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::Numerical, "matrix not positive definite after jitter");
    }
  }
  if (log_det) {
    *log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

DriveMoments drive_moments(const SparseRows& rows, const LinkFunction& link,
                           const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::Index n = rows.rows();
  DriveMoments out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    double m = 0.0;
    double s = 0.0;
    for (SparseRows::InnerIterator a(rows, r); a; ++a) {
      m += a.value() * mean(a.col());
      for (SparseRows::InnerIterator b(rows, r); b; ++b)
        s += a.value() * b.value() * cov(a.col(), b.col());
    }
    const double centred = m - link.eta;
    out.expect(r) = link.alpha * centred;
    out.tilt(r) = link.alpha * std::sqrt(std::max(s, 0.0) + centred * centred);
  }
  return out;
}

double latent_rate(double theta, double expect, double tilt) {
  return theta * std::exp(-0.5 * expect - 0.5 * tilt - std::log1p(std::exp(-tilt)));
}

namespace {

double gaussian_kl(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                   const GaussianPrior& prior, const Eigen::MatrixXd& prior_inv,
                   double prior_log_det) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical, "posterior covariance is not positive definite");
  }
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::VectorXd diff = prior.mean - mean;
  return 0.5 * ((prior_inv * cov).trace() + diff.dot(prior_inv * diff) -
                static_cast<double>(mean.size()) + prior_log_det - log_det);
}

double elbo_from_moments(const DimensionDesign& d, const LinkFunction& link,
                         const DriveMoments& ev, const DriveMoments& nodes,
                         double kl) {
  const double log_theta = std::log(link.theta);
  double total = 0.0;
  for (Eigen::Index i = 0; i < ev.expect.size(); ++i) {
    total += log_theta - std::numbers::ln2 + 0.5 * ev.expect(i) -
             log_cosh(0.5 * ev.tilt(i));
  }
  for (Eigen::Index q = 0; q < nodes.expect.size(); ++q) {
    total += d.node_weights(q) * latent_rate(link.theta, nodes.expect(q), nodes.tilt(q));
  }
  return total - link.theta * d.horizon - kl;
}

void add_outer(Eigen::MatrixXd& P, Eigen::VectorXd& b, const SparseRows& rows,
               Eigen::Index r, double pw, double bw) {
  for (SparseRows::InnerIterator a(rows, r); a; ++a) {
    b(a.col()) += bw * a.value();
    for (SparseRows::InnerIterator c(rows, r); c; ++c)
      P(a.col(), c.col()) += pw * a.value() * c.value();
  }
}

struct Workspace {
  Eigen::MatrixXd prior_inv;
  double prior_log_det = 0.0;
  Eigen::VectorXd prior_term;  // Sigma^{-1} mu
};

Workspace make_workspace(const GaussianPrior& prior) {
  Workspace w;
  w.prior_inv = spd_inverse(prior.cov, &w.prior_log_det);
  w.prior_term = w.prior_inv * prior.mean;
  return w;
}

void check_design(const DimensionDesign& d, const GaussianPrior& prior) {
  if (prior.size() != d.num_params()) {
    throw Error(ErrorCode::ShapeMismatch, "prior size does not match the model");
  }
}

void update(const DimensionDesign& d, const LinkFunction& link, const Workspace& w,
            const DriveMoments& ev, const DriveMoments& nodes,
            Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const double a = link.alpha;
  const double ae = link.alpha * link.eta;
  Eigen::MatrixXd P = w.prior_inv;
  Eigen::VectorXd b = w.prior_term;
  for (Eigen::Index i = 0; i < d.event_rows.rows(); ++i) {
    const double pg = pg_mean(ev.tilt(i));
    add_outer(P, b, d.event_rows, i, a * a * pg, 0.5 * a * (2.0 * pg * ae + 1.0));
  }
  for (Eigen::Index q = 0; q < d.node_rows.rows(); ++q) {
    const double pg = pg_mean(nodes.tilt(q));
    const double lw = d.node_weights(q) * latent_rate(link.theta, nodes.expect(q), nodes.tilt(q));
    add_outer(P, b, d.node_rows, q, a * a * pg * lw, 0.5 * a * (2.0 * pg * ae - 1.0) * lw);
  }
  cov = spd_inverse(P);
  cov = 0.5 * (cov + cov.transpose()).eval();
  mean = cov * b;
}

}  // namespace

double elbo(const DimensionDesign& design, const LinkFunction& link,
            const GaussianPrior& prior, const Eigen::VectorXd& mean,
            const Eigen::MatrixXd& cov) {
  require_sigmoid(link);
  check_design(design, prior);
  const Workspace w = make_workspace(prior);
  const auto ev = drive_moments(design.event_rows, link, mean, cov);
  const auto nodes = drive_moments(design.node_rows, link, mean, cov);
  return elbo_from_moments(design, link, ev, nodes,
                           gaussian_kl(mean, cov, prior, w.prior_inv, w.prior_log_det));
}

void cavi_step(const DimensionDesign& design, const LinkFunction& link,
               const GaussianPrior& prior, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  require_sigmoid(link);
  check_design(design, prior);
  const Workspace w = make_workspace(prior);
  const auto ev = drive_moments(design.event_rows, link, mean, cov);
  const auto nodes = drive_moments(design.node_rows, link, mean, cov);
  update(design, link, w, ev, nodes, mean, cov);
}

GaussianPosterior cavi_dimension(const DimensionDesign& design,
                                 const LinkFunction& link,
                                 const GaussianPrior& prior, const ViConfig& config) {
  require_sigmoid(link);
  check_design(design, prior);
  const Workspace w = make_workspace(prior);
  // Starting from the full prior covariance makes the first latent factors
  // nearly vanish, and the iterates then stall on the plateau where the
  // sigmoid saturates. PriorMean starts from a near point mass instead.
  const double spread = config.init == ViInit::Prior ? 1.0 : 1e-6;
  GaussianPosterior post{prior.mean, prior.cov * spread, 0.0, {}, 0, false};

  auto ev = drive_moments(design.event_rows, link, post.mean, post.cov);
  auto nodes = drive_moments(design.node_rows, link, post.mean, post.cov);
  double current = elbo_from_moments(
      design, link, ev, nodes,
      gaussian_kl(post.mean, post.cov, prior, w.prior_inv, w.prior_log_det));
  post.elbo_trace.push_back(current);

  for (int it = 1; it <= config.max_iter; ++it) {
    update(design, link, w, ev, nodes, post.mean, post.cov);
    ev = drive_moments(design.event_rows, link, post.mean, post.cov);
    nodes = drive_moments(design.node_rows, link, post.mean, post.cov);
    const double next = elbo_from_moments(
        design, link, ev, nodes,
        gaussian_kl(post.mean, post.cov, prior, w.prior_inv, w.prior_log_det));
    if (!std::isfinite(next)) throw Error(ErrorCode::Numerical, "ELBO is not finite");
    post.elbo_trace.push_back(next);
    post.iterations = it;
    double change = std::abs(next - current);
    if (config.relative_tol) change /= std::max(std::abs(next), 1e-300);
    current = next;
    if (change < config.tol) {
      post.converged = true;
      break;
    }
  }
  post.elbo = current;
  return post;
}

std::vector<GaussianPosterior> cavi_fixed_model(const EventData& events,
                                                const Model& model,
                                                std::span<const LinkFunction> links,
                                                double memory, const PriorSpec& prior,
                                                const ViConfig& config) {
  const int K = events.dims();
  if (model.dims() != K || links.size() != static_cast<std::size_t>(K)) {
    throw Error(ErrorCode::ShapeMismatch, "model, links and data disagree on K");
  }
  std::vector<GaussianPosterior> out(static_cast<std::size_t>(K));
  parallel_for(out.size(), config.threads, [&](std::size_t k) {
    const int kk = static_cast<int>(k);
    const SubModel sub = model.sub_model(kk);
    const auto design = build_design(events, kk, sub, memory, config.quadrature, config.n_quad);
    out[k] = cavi_dimension(design, links[k], prior.make(sub), config);
  });
  return out;
}

}  // namespace hawkes_vb
