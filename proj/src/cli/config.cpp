#include <fstream>
#include <set>

#include "hawkes_vb/cli.hpp"

namespace hawkes_vb::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

void allow(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.contains(key)) bad("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad("bad or missing value for '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

Eigen::MatrixXi parse_graph(const json& j, int dims) {
  if (!j.is_array() || static_cast<int>(j.size()) != dims) {
    bad("graph must be a K x K array of 0/1");
  }
  Eigen::MatrixXi g(dims, dims);
  for (int l = 0; l < dims; ++l) {
    if (!j[l].is_array() || static_cast<int>(j[l].size()) != dims) {
      bad("graph must be a K x K array of 0/1");
    }
    for (int k = 0; k < dims; ++k) {
      const int v = j[l][k].get<int>();
      if (v != 0 && v != 1) bad("graph entries must be 0 or 1");
      g(l, k) = v;
    }
  }
  return g;
}

LinkFunction parse_link(const json& j) {
  allow(j, {"kind", "theta", "alpha", "eta", "theta_base"}, "link");
  LinkFunction link = LinkFunction::sigmoid(20.0, 0.1, 10.0);
  if (j.contains("kind")) link.kind = link_kind_from_string(get<std::string>(j, "kind", "link"));
  if (link.kind == LinkKind::ReLU) link = LinkFunction::relu();
  read(j, "theta", link.theta, "link");
  read(j, "alpha", link.alpha, "link");
  read(j, "eta", link.eta, "link");
  read(j, "theta_base", link.theta_base, "link");
  try {
    link.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  return link;
}

HawkesParams parse_truth(const json& j, double memory) {
  allow(j, {"nu", "depth", "depths", "weights"}, "truth");
  const auto nu_list = get<std::vector<double>>(j, "nu", "truth");
  const int K = static_cast<int>(nu_list.size());
  if (K == 0) bad("truth.nu must list one background rate per dimension");
  std::vector<int> depths(static_cast<std::size_t>(K), 0);
  if (j.contains("depth")) depths.assign(K, get<int>(j, "depth", "truth"));
  if (j.contains("depths")) depths = get<std::vector<int>>(j, "depths", "truth");
  if (static_cast<int>(depths.size()) != K) bad("truth.depths needs K entries");
  std::vector<HistogramBasis> basis;
  for (int d : depths) {
    if (d < 0 || d > 20) bad("histogram depth must lie in 0..20");
    basis.push_back({memory, 1 << d});
  }
  std::vector<Eigen::VectorXd> weights(static_cast<std::size_t>(K * K));
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) bad("truth.weights must be an array");
    for (const auto& e : j["weights"]) {
      allow(e, {"from", "to", "w"}, "truth.weights entry");
      const int l = get<int>(e, "from", "truth.weights entry");
      const int k = get<int>(e, "to", "truth.weights entry");
      if (l < 0 || l >= K || k < 0 || k >= K) bad("truth.weights index out of range");
      const auto w = get<std::vector<double>>(e, "w", "truth.weights entry");
      if (static_cast<int>(w.size()) != basis[k].bins) {
        bad("truth.weights entry must have 2^depth values of its target");
      }
      weights[l * K + k] = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    }
  }
  try {
    return HawkesParams(Eigen::Map<const Eigen::VectorXd>(nu_list.data(), K), basis, weights);
  } catch (const Error& e) {
    bad(e.what());
  }
}

FitMode parse_mode(const std::string& s) {
  if (s == "fixed") return FitMode::Fixed;
  if (s == "adaptive") return FitMode::Adaptive;
  if (s == "two_step") return FitMode::TwoStep;
  if (s == "gibbs") return FitMode::Gibbs;
  bad("mode must be fixed, adaptive, two_step or gibbs");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  allow(j, {"mode", "K", "memory", "horizon", "link", "truth", "simulation", "events",
            "graph", "depth", "prior", "vi", "adaptive", "gibbs", "plot", "seed",
            "output", "result", "threads"},
        "config");
  ExperimentConfig c;
  if (j.contains("mode")) c.mode = parse_mode(get<std::string>(j, "mode", "config"));
  read(j, "memory", c.memory, "config");
  if (!(c.memory > 0.0)) bad("memory must be positive");
  if (j.contains("horizon")) {
    c.horizon = get<double>(j, "horizon", "config");
    if (!(*c.horizon >= 0.0)) bad("horizon must be nonnegative");
  }
  if (j.contains("link")) c.link = parse_link(j["link"]);
  if (j.contains("truth")) {
    c.truth = parse_truth(j["truth"], c.memory);
    c.dims = c.truth->dims();
  }
  if (j.contains("K")) {
    const int K = get<int>(j, "K", "config");
    if (K < 1) bad("K must be positive");
    if (c.truth && K != c.dims) bad("K disagrees with truth.nu");
    c.dims = K;
  }
  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    allow(s, {"burn_in", "max_events"}, "simulation");
    if (s.contains("burn_in")) c.burn_in = get<double>(s, "burn_in", "simulation");
    read(s, "max_events", c.max_events, "simulation");
  }
  if (j.contains("events")) c.events_path = get<std::string>(j, "events", "config");
  if (j.contains("graph")) {
    if (c.dims < 1) bad("graph needs K or truth");
    c.graph = parse_graph(j["graph"], c.dims);
  }
  read(j, "depth", c.depth, "config");
  if (c.depth < 0 || c.depth > 20) bad("depth must lie in 0..20");

  if (j.contains("prior")) {
    const auto& p = j["prior"];
    allow(p, {"nu_mean", "nu_sd", "weight_mean", "weight_sd"}, "prior");
    read(p, "nu_mean", c.prior.nu_mean, "prior");
    read(p, "nu_sd", c.prior.nu_sd, "prior");
    read(p, "weight_mean", c.prior.weight_mean, "prior");
    read(p, "weight_sd", c.prior.weight_sd, "prior");
    if (!(c.prior.nu_sd > 0.0) || !(c.prior.weight_sd > 0.0)) bad("prior sd must be positive");
  }
  if (j.contains("vi")) {
    const auto& v = j["vi"];
    allow(v, {"max_iter", "tol", "relative_tol", "quadrature", "n_quad", "init"}, "vi");
    read(v, "max_iter", c.vi.max_iter, "vi");
    read(v, "tol", c.vi.tol, "vi");
    read(v, "relative_tol", c.vi.relative_tol, "vi");
    if (v.contains("quadrature")) {
      const auto q = get<std::string>(v, "quadrature", "vi");
      if (q == "exact") c.vi.quadrature = QuadratureRule::Exact;
      else if (q == "gauss_legendre") c.vi.quadrature = QuadratureRule::GaussLegendre;
      else bad("vi.quadrature must be exact or gauss_legendre");
    }
    if (v.contains("n_quad") && !v["n_quad"].is_null()) c.vi.n_quad = get<int>(v, "n_quad", "vi");
    if (v.contains("init")) {
      const auto s = get<std::string>(v, "init", "vi");
      if (s == "prior_mean") c.vi.init = ViInit::PriorMean;
      else if (s == "prior") c.vi.init = ViInit::Prior;
      else bad("vi.init must be prior_mean or prior");
    }
    if (c.vi.max_iter < 1 || !(c.vi.tol > 0.0)) bad("vi needs max_iter >= 1 and tol > 0");
    if (c.vi.n_quad && *c.vi.n_quad < 1) bad("vi.n_quad must be positive");
  }
  if (j.contains("adaptive")) {
    const auto& a = j["adaptive"];
    allow(a, {"d_max", "threshold", "mode", "model_prior", "edge_prob"}, "adaptive");
    read(a, "d_max", c.adaptive.d_max, "adaptive");
    if (c.adaptive.d_max < 0 || c.adaptive.d_max > 20) bad("adaptive.d_max must lie in 0..20");
    if (a.contains("threshold")) {
      const auto& t = a["threshold"];
      if (t.is_string() && t.get<std::string>() == "auto") c.adaptive.threshold.reset();
      else if (t.is_number()) c.adaptive.threshold = t.get<double>();
      else bad("adaptive.threshold must be \"auto\" or a number");
    }
    if (a.contains("mode")) {
      const auto m = get<std::string>(a, "mode", "adaptive");
      if (m == "select") c.adaptive.mode = AdaptiveMode::Select;
      else if (m == "average") c.adaptive.mode = AdaptiveMode::Average;
      else bad("adaptive.mode must be select or average");
    }
    if (a.contains("model_prior")) {
      const auto m = get<std::string>(a, "model_prior", "adaptive");
      if (m == "uniform") c.adaptive.model_prior.kind = ModelPrior::Kind::Uniform;
      else if (m == "bernoulli") c.adaptive.model_prior.kind = ModelPrior::Kind::BernoulliUniform;
      else bad("adaptive.model_prior must be uniform or bernoulli");
    }
    read(a, "edge_prob", c.adaptive.model_prior.edge_prob, "adaptive");
    if (!(c.adaptive.model_prior.edge_prob > 0.0 && c.adaptive.model_prior.edge_prob < 1.0)) {
      bad("adaptive.edge_prob must lie in (0, 1)");
    }
  }
  if (j.contains("gibbs")) {
    const auto& g = j["gibbs"];
    allow(g, {"n_iter", "burn_in", "thin"}, "gibbs");
    read(g, "n_iter", c.gibbs.n_iter, "gibbs");
    read(g, "burn_in", c.gibbs.burn_in, "gibbs");
    read(g, "thin", c.gibbs.thin, "gibbs");
    try {
      c.gibbs.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  if (j.contains("plot")) {
    allow(j["plot"], {"points"}, "plot");
    read(j["plot"], "points", c.plot_points, "plot");
    if (c.plot_points < 1) bad("plot.points must be positive");
  }
  read(j, "seed", c.seed, "config");
  if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
  if (j.contains("result")) c.result_path = get<std::string>(j, "result", "config");
  read(j, "threads", c.threads, "config");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace hawkes_vb::cli
