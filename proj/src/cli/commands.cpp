#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "hawkes_vb/cli.hpp"
#include "hawkes_vb/metrics.hpp"
#include "hawkes_vb/simulate.hpp"

namespace hawkes_vb::cli {

using nlohmann::json;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Domain:
    case ErrorCode::UnsupportedLink:
    case ErrorCode::NoGap:
    case ErrorCode::EmptyModelSet:
      return 1;
    case ErrorCode::Io:
      return 2;
    case ErrorCode::Data:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::ZeroIntensity:
      return 3;
    case ErrorCode::Numerical:
    case ErrorCode::SimulationDiverged:
      return 4;
  }
  return 4;
}

namespace {

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
}

EventData simulate_truth(const ExperimentConfig& c) {
  if (!c.truth) throw Error(ErrorCode::Config, "simulation needs a truth block");
  if (!c.horizon || !(*c.horizon > 0.0)) {
    throw Error(ErrorCode::Config, "simulation needs a positive horizon");
  }
  SimConfig sim{*c.truth, c.links(), *c.horizon, c.burn_in, c.seed, c.max_events};
  return simulate(sim);
}

EventData load_events(const ExperimentConfig& c) {
  if (c.events_path) {
    return read_events_csv(*c.events_path, c.dims, c.horizon, &std::cerr);
  }
  return simulate_truth(c);
}

json link_json(const LinkFunction& l) {
  return {{"kind", to_string(l.kind)}, {"theta", l.theta}, {"alpha", l.alpha},
          {"eta", l.eta}, {"theta_base", l.theta_base}};
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  return v;
}

template <typename Derived>
json matrix_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json sub_json(const SubModel& s) {
  return {{"sources", s.sources}, {"depth", s.depth}, {"bins", s.sources.empty() ? 0 : s.bins()}};
}

json posterior_json(const SubModel& s, const GaussianPosterior& p) {
  json j = sub_json(s);
  j["mean"] = std::vector<double>(p.mean.data(), p.mean.data() + p.mean.size());
  j["cov"] = row_major(p.cov);
  j["elbo"] = p.elbo;
  j["elbo_trace"] = p.elbo_trace;
  j["iterations"] = p.iterations;
  j["converged"] = p.converged;
  return j;
}

json adaptive_json(const AdaptiveResult& r) {
  json dims = json::array();
  for (std::size_t k = 0; k < r.dims.size(); ++k) {
    const auto& d = r.dims[k];
    json models = json::array();
    for (const auto& f : d.fits) {
      json m = sub_json(f.sub);
      m["elbo"] = f.posterior.elbo;
      m["log_prior"] = f.log_prior;
      m["weight"] = f.weight;
      models.push_back(m);
    }
    dims.push_back({{"k", k},
                    {"selected", posterior_json(d.best().sub, d.best().posterior)},
                    {"models", models}});
  }
  return dims;
}

// Pointwise mean and 95% band of h_lk on a grid of (0, A].
void write_plots(const std::filesystem::path& dir, const std::vector<SubModel>& subs,
                 const std::vector<GaussianPosterior>& posts, double memory, int points) {
  const double z = 1.959963984540054;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    const auto& s = subs[k];
    const HistogramBasis basis = s.basis(memory);
    for (int l : s.sources) {
      const auto path = dir / ("plot_h_" + std::to_string(l) + "_" + std::to_string(k) + ".csv");
      std::ofstream out(path);
      if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
      out << "x,mean,lower,upper\n";
      char buf[128];
      for (int i = 0; i < points; ++i) {
        const double x = (i + 0.5) * memory / points;
        const int j = s.offset(l) + basis.bin_of(x);
        const double m = posts[k].mean(j) * basis.height();
        const double sd = std::sqrt(posts[k].cov(j, j)) * basis.height();
        std::snprintf(buf, sizeof buf, "%.8g,%.10g,%.10g,%.10g\n", x, m, m - z * sd, m + z * sd);
        out << buf;
      }
    }
  }
}

std::vector<SubModel> fixed_sub_models(const ExperimentConfig& c) {
  const Eigen::MatrixXi g = c.graph.value_or(Eigen::MatrixXi::Ones(c.dims, c.dims));
  const Model m{g, std::vector<int>(static_cast<std::size_t>(c.dims), c.depth)};
  std::vector<SubModel> subs;
  for (int k = 0; k < c.dims; ++k) subs.push_back(m.sub_model(k));
  return subs;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& c) {
  const EventData events = simulate_truth(c);
  prepare_output(c.output);
  write_events_csv(events, c.output / "events.csv");
  write_json(stats_json(events, c.memory, c.seed), c.output / "stats.json");
  return 0;
}

int cmd_fit(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  const EventData events = load_events(c);
  if (c.dims == 0) c.dims = events.dims();
  if (events.dims() != c.dims) throw Error(ErrorCode::Data, "events file has the wrong K");
  const auto links = c.links();
  ViConfig vi = c.vi;
  vi.threads = c.threads;
  prepare_output(c.output);

  const auto start = std::chrono::steady_clock::now();
  json result{{"K", c.dims},
              {"memory", c.memory},
              {"horizon", events.horizon()},
              {"seed", c.seed},
              {"link", link_json(c.link)},
              {"num_events", events.observed_count()}};
  std::vector<SubModel> subs;
  std::vector<GaussianPosterior> posts;

  switch (c.mode) {
    case FitMode::Fixed: {
      result["mode"] = "fixed";
      subs = fixed_sub_models(c);
      const Model m = Model::from_sub_models(subs, c.dims);
      posts = cavi_fixed_model(events, m, links, c.memory, c.prior, vi);
      json dims = json::array();
      for (int k = 0; k < c.dims; ++k) {
        dims.push_back({{"k", k}, {"selected", posterior_json(subs[k], posts[k])}});
      }
      result["dimensions"] = dims;
      break;
    }
    case FitMode::Adaptive: {
      result["mode"] = "adaptive";
      const std::vector<std::vector<SubModel>> cands(
          static_cast<std::size_t>(c.dims), enumerate_sub_models(c.dims, c.adaptive.d_max));
      const auto r = fully_adaptive(events, cands, links, c.memory, c.prior, vi,
                                    c.adaptive.mode, c.adaptive.model_prior, c.adaptive.d_max);
      result["adaptive_mode"] = c.adaptive.mode == AdaptiveMode::Select ? "select" : "average";
      result["dimensions"] = adaptive_json(r);
      subs = r.selected_sub_models();
      posts = r.selected_posteriors();
      break;
    }
    case FitMode::TwoStep: {
      result["mode"] = "two_step";
      const auto r = two_step(events, links, c.memory, c.prior, vi, c.adaptive);
      result["adaptive_mode"] = c.adaptive.mode == AdaptiveMode::Select ? "select" : "average";
      result["step1"] = adaptive_json(r.step1);
      result["dimensions"] = adaptive_json(r.step2);
      result["s_hat"] = matrix_json(r.graph.s_hat);
      result["threshold"] = r.graph.threshold;
      result["delta_hat"] = matrix_json(r.graph.delta_hat);
      subs = r.step2.selected_sub_models();
      posts = r.step2.selected_posteriors();
      break;
    }
    case FitMode::Gibbs: {
      result["mode"] = "gibbs";
      subs = fixed_sub_models(c);
      GibbsConfig g = c.gibbs;
      g.seed = c.seed;
      g.prior = c.prior;
      g.model = Model::from_sub_models(subs, c.dims);
      g.threads = c.threads;
      const auto chains = gibbs_sample(events, g, links, c.memory);
      json dims = json::array();
      for (int k = 0; k < c.dims; ++k) {
        const auto& d = chains[k].draws;
        GaussianPosterior p;
        p.mean = chains[k].mean();
        const Eigen::MatrixXd centred = d.rowwise() - p.mean.transpose();
        p.cov = centred.transpose() * centred / std::max<double>(1.0, d.rows() - 1.0);
        json sel = posterior_json(subs[k], p);
        sel.erase("elbo");
        sel.erase("elbo_trace");
        sel.erase("iterations");
        sel.erase("converged");
        sel["num_draws"] = d.rows();
        dims.push_back({{"k", k}, {"selected", sel}});
        posts.push_back(std::move(p));
      }
      result["dimensions"] = dims;
      break;
    }
  }
  const Model chosen = Model::from_sub_models(subs, c.dims);
  if (!result.contains("delta_hat")) result["delta_hat"] = matrix_json(chosen.graph);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_json(result, c.output / "result.json");
  write_json({{"wall_clock_seconds", seconds}}, c.output / "timing.json");
  write_plots(c.output, subs, posts, c.memory, c.plot_points);
  return 0;
}

namespace {

void read_result(const json& r, int K, std::vector<SubModel>& subs,
                 std::vector<GaussianPosterior>& posts) {
  const auto& dims = r.at("dimensions");
  if (!dims.is_array() || static_cast<int>(dims.size()) != K) {
    throw Error(ErrorCode::Data, "result has the wrong number of dimensions");
  }
  for (const auto& d : dims) {
    const auto& s = d.at("selected");
    SubModel sub{s.at("sources").get<std::vector<int>>(), s.at("depth").get<int>()};
    for (int l : sub.sources) {
      if (l < 0 || l >= K) throw Error(ErrorCode::Data, "result source out of range");
    }
    const auto mean = s.at("mean").get<std::vector<double>>();
    const auto cov = s.at("cov").get<std::vector<double>>();
    const auto p = static_cast<std::size_t>(sub.num_params());
    if (mean.size() != p || cov.size() != p * p) {
      throw Error(ErrorCode::Data, "result posterior size does not match its model");
    }
    GaussianPosterior post;
    post.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(p));
    post.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(
        cov.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    subs.push_back(std::move(sub));
    posts.push_back(std::move(post));
  }
}

}  // namespace

int cmd_eval(const ExperimentConfig& c) {
  if (!c.truth) throw Error(ErrorCode::Config, "eval needs a truth block");
  const auto path = c.result_path.value_or(c.output / "result.json");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open result file " + path.string());
  std::vector<SubModel> subs;
  std::vector<GaussianPosterior> posts;
  try {
    const json r = json::parse(in);
    read_result(r, c.truth->dims(), subs, posts);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Data, std::string("malformed result file: ") + e.what());
  }
  const EvalReport rep = evaluate(subs, posts, *c.truth);
  prepare_output(c.output);
  write_json({{"risk_l1", rep.risk_l1},
              {"acc_graph", rep.acc_graph},
              {"acc_dim", rep.acc_dim},
              {"nu_errors", std::vector<double>(rep.nu_errors.data(),
                                                rep.nu_errors.data() + rep.nu_errors.size())},
              {"edge_errors", matrix_json(rep.edge_errors)}},
             c.output / "metrics.json");
  return 0;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Simulate and fit nonlinear Hawkes processes with adaptive variational Bayes",
               "hawkes-vb"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  for (const char* name : {"simulate", "fit", "eval"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (HAWKES_VB_THREADS otherwise)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    if (out) c.output = *out;
    if (threads) c.threads = *threads;
    if (cmd == "simulate") return cmd_simulate(c);
    if (cmd == "fit") return cmd_fit(c);
    return cmd_eval(c);
  } catch (const Error& e) {
    std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 4;
  }
}

}  // namespace hawkes_vb::cli
