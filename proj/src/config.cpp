#include "spfim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "spfim/errors.hpp"

namespace spfim {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "seed", "workers", "replicates", "n", "output", "format", "budget"}},
      {"model",
       {"kind", "mu", "sigma", "noise_seed", "theta", "a", "mean", "variance", "known_variance"}},
      {"estimator", {"method", "M", "N", "c", "perturbation", "perturbation_a", "perturbation_b"}},
      {"oracle", {"replicates", "seed"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& field, const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError(field + ": expected a finite number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& field, const std::string& s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> to_doubles(const std::string& field, const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(to_double(field, tok));
  if (out.empty()) throw ConfigError(field + ": expected a comma-separated list of numbers");
  return out;
}

bool to_bool(const std::string& field, const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(field + ": expected true or false, got '" + s + "'");
}

std::size_t packed_dim(const std::string& field, std::size_t len) {
  for (std::size_t d = 1; d * (d + 1) / 2 <= len; ++d)
    if (d * (d + 1) / 2 == len) return d;
  throw ConfigError(field + ": length " + std::to_string(len) +
                    " is not a packed triangle size d(d+1)/2");
}

}  // namespace

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::VarianceRatio: return "variance_ratio";
    case ExperimentKind::Timing: return "timing";
    case ExperimentKind::Accuracy: return "accuracy";
    case ExperimentKind::MNTradeoff: return "mn_tradeoff";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "variance_ratio") return ExperimentKind::VarianceRatio;
  if (s == "timing") return ExperimentKind::Timing;
  if (s == "accuracy") return ExperimentKind::Accuracy;
  if (s == "mn_tradeoff") return ExperimentKind::MNTradeoff;
  throw ConfigError("experiment.kind: unknown experiment '" + s +
                    "' (expected variance_ratio|timing|accuracy|mn_tradeoff)");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(section + "." + key + ": unknown key");
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig cfg;
  const auto kind = get("experiment.kind");
  if (!kind) throw ConfigError("experiment.kind: required field is missing");
  cfg.kind = parse_experiment_kind(*kind);

  switch (cfg.kind) {
    case ExperimentKind::VarianceRatio: cfg.replicates = 100000; break;
    case ExperimentKind::Timing: cfg.replicates = 10000; break;
    case ExperimentKind::Accuracy:
      cfg.replicates = 50;
      cfg.model.kind = "mixture";
      cfg.estimator.M = 2;
      cfg.estimator.N = 4000;
      break;
    case ExperimentKind::MNTradeoff: cfg.replicates = 10000; break;
  }

  if (auto v = get("experiment.seed")) cfg.seed = to_u64("experiment.seed", *v);
  if (auto v = get("experiment.workers")) cfg.workers = to_u64("experiment.workers", *v);
  if (auto v = get("experiment.replicates")) cfg.replicates = to_u64("experiment.replicates", *v);
  if (auto v = get("experiment.n")) {
    cfg.n_values.clear();
    for (const auto& tok : split_list(*v)) cfg.n_values.push_back(to_u64("experiment.n", tok));
  }
  if (auto v = get("experiment.output")) cfg.output = *v;
  if (auto v = get("experiment.format")) {
    if (*v == "csv") cfg.format = OutputFormat::Csv;
    else if (*v == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("experiment.format: expected csv or json, got '" + *v + "'");
  }
  if (auto v = get("experiment.budget")) cfg.budget = to_u64("experiment.budget", *v);

  if (auto v = get("model.kind")) cfg.model.kind = *v;
  if (auto v = get("model.mu")) cfg.model.mu = to_doubles("model.mu", *v);
  if (auto v = get("model.sigma")) cfg.model.sigma = to_doubles("model.sigma", *v);
  if (auto v = get("model.noise_seed")) cfg.model.noise_seed = to_u64("model.noise_seed", *v);
  if (auto v = get("model.theta")) cfg.model.mixture_theta = to_doubles("model.theta", *v);
  if (auto v = get("model.a")) cfg.model.quadratic_a = to_doubles("model.a", *v);
  if (auto v = get("model.mean")) cfg.model.gaussian_mean = to_double("model.mean", *v);
  if (auto v = get("model.variance")) cfg.model.gaussian_variance = to_double("model.variance", *v);
  if (auto v = get("model.known_variance"))
    cfg.model.gaussian_known_variance = to_bool("model.known_variance", *v);

  if (auto v = get("estimator.method")) {
    if (*v == "both") {
      cfg.methods = {Method::Standard, Method::IndependentPerturbation};
    } else {
      try {
        cfg.methods = {parse_method(*v)};
      } catch (const ValidationError&) {
        throw ConfigError("estimator.method: expected standard|independent|both, got '" + *v + "'");
      }
    }
  }
  if (auto v = get("estimator.M")) cfg.estimator.M = to_u64("estimator.M", *v);
  if (auto v = get("estimator.N")) cfg.estimator.N = to_u64("estimator.N", *v);
  if (auto v = get("estimator.c")) cfg.estimator.c = to_double("estimator.c", *v);
  const std::string pert = get("estimator.perturbation").value_or("bernoulli");
  if (pert == "bernoulli") {
    cfg.estimator.perturbation = PerturbationSpec::bernoulli();
  } else if (pert == "segmented_uniform") {
    const double a = to_double("estimator.perturbation_a",
                               get("estimator.perturbation_a").value_or("0.5"));
    const double b = to_double("estimator.perturbation_b",
                               get("estimator.perturbation_b").value_or("1.5"));
    try {
      cfg.estimator.perturbation = PerturbationSpec::segmented_uniform(a, b);
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("estimator.perturbation_a/b: ") + e.what());
    }
  } else {
    throw ConfigError("estimator.perturbation: expected bernoulli|segmented_uniform, got '" +
                      pert + "'");
  }

  if (auto v = get("oracle.replicates")) cfg.oracle_replicates = to_u64("oracle.replicates", *v);
  cfg.oracle_seed = cfg.seed;
  if (auto v = get("oracle.seed")) cfg.oracle_seed = to_u64("oracle.seed", *v);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw ConfigError("experiment.n: at least one dataset size is required");
  for (std::size_t n : n_values)
    if (n == 0) throw ConfigError("experiment.n: every n must be >= 1");
  if (replicates < 2) throw ConfigError("experiment.replicates: must be >= 2");
  if (budget == 0) throw ConfigError("experiment.budget: must be >= 1");
  if (oracle_replicates == 0) throw ConfigError("oracle.replicates: must be >= 1");
  if (estimator.M == 0) throw ConfigError("estimator.M: must be >= 1");
  if (estimator.N == 0) throw ConfigError("estimator.N: must be >= 1");
  if (!(estimator.c > 0.0)) throw ConfigError("estimator.c: must be positive");
  const std::string& k = model.kind;
  if (k == "spn") {
    const std::size_t d = model.mu.size();
    if (packed_dim("model.sigma", model.sigma.size()) != d) {
      throw ConfigError("model.sigma: packed length does not match model.mu");
    }
  } else if (k == "mixture") {
    if (model.mixture_theta.size() != 5) {
      throw ConfigError("model.theta: mixture needs [lambda, mu1, var1, mu2, var2]");
    }
  } else if (k == "quadratic") {
    packed_dim("model.a", model.quadratic_a.size());
  } else if (k != "gaussian") {
    throw ConfigError("model.kind: unknown model '" + k + "' (expected spn|mixture|quadratic|gaussian)");
  }
  // Builds once so invalid parameters surface as configuration errors.
  try {
    (void)build_model(model, n_values.front());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  auto join = [](const auto& xs) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    return os.str();
  };
  std::map<std::string, std::string> e;
  e["experiment.kind"] = experiment_kind_name(kind);
  e["experiment.seed"] = std::to_string(seed);
  e["experiment.replicates"] = std::to_string(replicates);
  e["experiment.n"] = join(n_values);
  e["experiment.budget"] = std::to_string(budget);
  e["model.kind"] = model.kind;
  if (model.kind == "spn") {
    e["model.mu"] = join(model.mu);
    e["model.sigma"] = join(model.sigma);
    e["model.noise_seed"] = std::to_string(model.noise_seed);
  } else if (model.kind == "mixture") {
    e["model.theta"] = join(model.mixture_theta);
  } else if (model.kind == "quadratic") {
    e["model.a"] = join(model.quadratic_a);
  } else {
    e["model.mean"] = join(std::vector<double>{model.gaussian_mean});
    e["model.variance"] = join(std::vector<double>{model.gaussian_variance});
    e["model.known_variance"] = model.gaussian_known_variance ? "true" : "false";
  }
  std::vector<std::string> names;
  for (Method m : methods) names.push_back(method_name(m));
  e["estimator.method"] = join(names);
  e["estimator.M"] = std::to_string(estimator.M);
  e["estimator.N"] = std::to_string(estimator.N);
  e["estimator.c"] = join(std::vector<double>{estimator.c});
  e["estimator.perturbation"] = estimator.perturbation.name();
  e["oracle.replicates"] = std::to_string(oracle_replicates);
  e["oracle.seed"] = std::to_string(oracle_seed);
  return e;
}

std::shared_ptr<const Model> build_model(const ModelSpec& spec, std::size_t n) {
  if (spec.kind == "spn") {
    const std::size_t d = spec.mu.size();
    SymmetricMatrix sigma = SymmetricMatrix::from_packed(spec.sigma, d);
    return spn_model(spec.mu, std::move(sigma), signal_plus_noise_covariances(n, spec.noise_seed, d));
  }
  if (spec.kind == "mixture") return mixture_model(spec.mixture_theta, n);
  if (spec.kind == "quadratic") {
    const std::size_t d = packed_dim("model.a", spec.quadratic_a.size());
    return quadratic_model(SymmetricMatrix::from_packed(spec.quadratic_a, d), n);
  }
  if (spec.kind == "gaussian") {
    return scalar_gaussian_model(spec.gaussian_mean, spec.gaussian_variance, n,
                                 spec.gaussian_known_variance);
  }
  throw ConfigError("model.kind: unknown model '" + spec.kind + "'");
}

}  // namespace spfim
