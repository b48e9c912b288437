// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers as arguments to run
// a subset, e.g. `spfim_acceptance 1 9`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spfim/errors.hpp"
#include "spfim/estimator.hpp"
#include "spfim/experiment.hpp"
#include "spfim/oracle.hpp"

using namespace spfim;

namespace {

// ---- pinned tolerances ----------------------------------------------------

constexpr double kExactTol = 1e-10;
constexpr double kExactRuntime = 1.0;

constexpr int kGradPoints = 100;
constexpr double kGradStep = 1e-5;
constexpr double kGradTol = 1e-6;
constexpr double kGradRuntime = 10.0;

constexpr std::size_t kOracleReplicates = 100000;
constexpr double kSpnOracleTol = 0.03;
constexpr double kGaussianOracleTol = 0.02;
constexpr double kOracleRuntime = 120.0;

constexpr std::size_t kRatioN = 30;
constexpr std::size_t kRatioReplicates = 100000;
constexpr double kMuRatioMax = 0.40;
constexpr double kSigmaRatioMax = 0.90;
constexpr double kRatioRuntime = 600.0;

constexpr std::size_t kSlopeReplicates = 50000;
constexpr double kSlopeLow = -1.5;
constexpr double kSlopeHigh = -0.5;
constexpr double kSlopeRuntime = 1800.0;

constexpr std::size_t kAccuracyM = 2;
constexpr std::size_t kAccuracyN = 4000;
constexpr std::size_t kAccuracyReplicates = 50;
constexpr std::size_t kAccuracyOracle = 1000000;
constexpr std::size_t kMixtureN = 30;
constexpr double kErrorRatioMax = 0.5;
constexpr double kTimeRatioLow = 1.0;
constexpr double kTimeRatioHigh = 3.0;
constexpr double kAccuracyRuntime = 1200.0;

constexpr std::size_t kBudget = 16;
constexpr std::size_t kTradeoffReplicates = 10000;
constexpr double kTradeoffSigmas = 3.0;
constexpr double kTradeoffRuntime = 900.0;

constexpr double kIdentityTol = 1e-12;
constexpr int kIdentityInstances = 100;
// The identity is algebraic, so any c exercises it; the rounding floor of the
// standard method's gradient difference scales as eps * |g| / (c * |H|) and
// sits near 1e-11 at the estimator default c = 1e-4. That value is reported
// alongside but not gated.
constexpr double kIdentityC = 1e-2;

constexpr std::uint64_t kSeed = 20240607;
constexpr std::uint64_t kNoiseSeed = 1;
constexpr double kC = 1e-4;

// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  const double scale = std::max(max_abs(a), max_abs(b));
  return scale == 0.0 ? diff : diff / scale;
}

ModelSpec spn_spec() {
  ModelSpec spec;
  spec.kind = "spn";
  spec.noise_seed = kNoiseSeed;
  return spec;
}

ModelSpec mixture_spec() {
  ModelSpec spec;
  spec.kind = "mixture";
  spec.mixture_theta = {0.2, 0.0, 4.0, 1.0, 9.0};
  return spec;
}

SymmetricMatrix random_spd(std::size_t p, RandomStream& rng) {
  std::vector<double> b(p * p);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  SymmetricMatrix a(p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t l = j; l < p; ++l) {
      double s = j == l ? 0.5 : 0.0;
      for (std::size_t k = 0; k < p; ++k) s += b[j * p + k] * b[l * p + k];
      a.set(j, l, s);
    }
  }
  return a;
}

// 1. Quadratic exactness.
Outcome exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(kSeed, 1, StreamPurpose::Setup);
  double worst_hessian = 0.0, worst_pattern = 0.0, worst_fim = 0.0, worst_var = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = 1 + trial % 5;
    const SymmetricMatrix a = random_spd(p, rng);
    const auto model = quadratic_model(a);
    const auto theta = model->nominal_theta();
    PseudoDataset data(1, 1);
    const double c = std::pow(10.0, rng.uniform(-4.0, 0.0));
    const auto spec = trial % 2 ? PerturbationSpec::segmented_uniform(0.5, 1.5)
                                : PerturbationSpec::bernoulli();
    const auto delta = sample_perturbation(spec, p, rng);

    // -1/2 [A d (1/d)^T + (1/d) (A d)^T]
    SymmetricMatrix expected(p);
    std::vector<double> ad(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = 0; l < p; ++l) ad[j] += a(j, l) * delta.delta[l];
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t l = j; l < p; ++l)
        expected.set(j, l, -0.5 * (ad[j] * delta.delta_inv[l] + ad[l] * delta.delta_inv[j]));
    const auto h = sp_hessian_estimate(*model, theta, data, delta, c);
    worst_hessian = std::max(worst_hessian, max_rel_diff(h.packed(), expected.packed()));

    // Averaging over every sign pattern gives exactly -A.
    SymmetricMatrix avg(p);
    const std::size_t patterns = std::size_t{1} << p;
    PerturbationVector d;
    d.delta.resize(p);
    d.delta_inv.resize(p);
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      for (std::size_t j = 0; j < p; ++j) d.delta[j] = d.delta_inv[j] = (mask >> j) & 1 ? -1.0 : 1.0;
      avg += sp_hessian_estimate(*model, theta, data, d, c);
    }
    avg *= -1.0 / static_cast<double>(patterns);
    worst_pattern = std::max(worst_pattern, max_rel_diff(avg.packed(), a.packed()));

    // estimate_fim: exact with zero variance wherever the estimate is
    // deterministic (every entry for p = 1; the diagonal of a diagonal A
    // under +/-1 perturbations).
    EstimatorConfig cfg;
    cfg.method = trial % 4 < 2 ? Method::Standard : Method::IndependentPerturbation;
    cfg.M = 1 + trial % 3;
    cfg.N = 20;
    cfg.c = c;
    cfg.seed = kSeed + trial;
    SymmetricMatrix diag_a(p);
    for (std::size_t j = 0; j < p; ++j) diag_a.set(j, j, a(j, j));
    const auto diag_model = quadratic_model(diag_a);
    const auto est = estimate_fim(*diag_model, diag_model->nominal_theta(), cfg, 1);
    for (std::size_t j = 0; j < p; ++j) {
      worst_fim = std::max(worst_fim, std::abs(est.mean(j, j) - a(j, j)) / a(j, j));
      worst_var = std::max(worst_var, std::sqrt(est.entry_variance(j, j)) / a(j, j));
    }
    if (p == 1) {
      cfg.perturbation = spec;
      const auto scalar = estimate_fim(*model, theta, cfg, 1);
      worst_fim = std::max(worst_fim, std::abs(scalar.mean(0, 0) - a(0, 0)) / a(0, 0));
      worst_var = std::max(worst_var, std::sqrt(scalar.entry_variance(0, 0)) / a(0, 0));
    }
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = worst_hessian <= kExactTol && worst_pattern <= kExactTol && worst_fim <= kExactTol &&
           worst_var <= kExactTol && secs < kExactRuntime;
  o.detail = "max rel err: H " + num(worst_hessian, 2) + ", pattern mean " + num(worst_pattern, 2) +
             ", F " + num(worst_fim, 2) + ", sd(F) " + num(worst_var, 2) + " (tol " +
             num(kExactTol) + "); " + num(secs, 3) + " s (limit " + num(kExactRuntime) + " s)";
  return o;
}

// 2. Analytic scores against central differences.
Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(kSeed, 2, StreamPurpose::Setup);
  const auto spn = build_model(spn_spec(), 30);
  const auto mix = mixture_model({0.2, 0.0, 4.0, 1.0, 9.0}, 1);
  double worst_spn = 0.0, worst_mix = 0.0;
  for (int i = 0; i < kGradPoints; ++i) {
    auto theta = spn->nominal_theta();
    for (std::size_t j = 0; j < 3; ++j) theta[j] += rng.uniform(-1.0, 1.0);
    for (std::size_t j = 3; j < 9; ++j) theta[j] += rng.uniform(-0.2, 0.2);
    const auto data = spn->sample_pseudo_data(theta, rng);
    const auto g = spn->grad_total(theta, data);
    const auto fd = fd_gradient(
        [&](std::span<const double> x) { return spn->log_likelihood(x, data); }, theta,
        {kGradStep});
    worst_spn = std::max(worst_spn, max_rel_diff(g, fd));
  }
  std::vector<double> g(5);
  for (int i = 0; i < kGradPoints; ++i) {
    const std::vector<double> theta{rng.uniform(0.1, 0.9), rng.uniform(-2, 2), rng.uniform(1, 6),
                                    rng.uniform(-2, 2), rng.uniform(1, 12)};
    const auto data = mix->sample_pseudo_data(theta, rng);
    mix->grad_per_datum(theta, 0, data.datum(0), g);
    const auto fd = fd_gradient(
        [&](std::span<const double> x) { return mix->log_density(x, 0, data.datum(0)); }, theta,
        {kGradStep});
    worst_mix = std::max(worst_mix, max_rel_diff(g, fd));
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = worst_spn < kGradTol && worst_mix < kGradTol && secs < kGradRuntime;
  o.detail = "max rel err spn " + num(worst_spn, 2) + ", mixture " + num(worst_mix, 2) +
             " over " + std::to_string(kGradPoints) + " points each (tol " + num(kGradTol) +
             "); " + num(secs, 3) + " s";
  return o;
}

// 3. Analytic FIMs against the Monte Carlo oracle.
Outcome oracle_cross_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spn = build_model(spn_spec(), 30);
  const auto& spn_model_ref = dynamic_cast<const SignalPlusNoiseModel&>(*spn);
  const auto theta = spn->nominal_theta();
  const auto truth = spn_analytic_fim(spn_model_ref, theta);
  const auto mc = mc_true_fim(*spn, theta, kOracleReplicates, kSeed);
  const double spn_err = relative_spectral_error(mc, truth);

  const auto gauss = scalar_gaussian_model(0.0, 4.0, 1, false);
  const auto g = mc_true_fim(*gauss, gauss->nominal_theta(), kOracleReplicates, kSeed);
  const double e00 = std::abs(g(0, 0) - 0.25) / 0.25;
  const double e11 = std::abs(g(1, 1) - 1.0 / 32.0) / (1.0 / 32.0);
  const double e01 = std::abs(g(0, 1)) / std::sqrt(0.25 / 32.0);
  const double gauss_err = std::max({e00, e11, e01});
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = spn_err < kSpnOracleTol && gauss_err < kGaussianOracleTol && secs < kOracleRuntime;
  o.detail = "spn rel spectral err " + num(spn_err, 3) + " (tol " + num(kSpnOracleTol) +
             "), gaussian max entry err " + num(gauss_err, 3) + " (tol " +
             num(kGaussianOracleTol) + "), R=" + std::to_string(kOracleReplicates) + "; " +
             num(secs, 3) + " s";
  return o;
}

ExperimentConfig variance_config(std::vector<std::size_t> ns, std::size_t replicates) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::VarianceRatio;
  cfg.model = spn_spec();
  cfg.n_values = std::move(ns);
  cfg.replicates = replicates;
  cfg.estimator.c = kC;
  cfg.seed = kSeed;
  return cfg;
}

// 4. Diagonal variance ratios at n = 30.
Outcome variance_ratios() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_variance_ratio(variance_config({kRatioN}, kRatioReplicates));
  bool ok = true;
  std::string ratios;
  for (const auto& v : r.variance) {
    if (v.method != Method::Standard) continue;
    const double limit = std::min(1.0, v.entry <= 3 ? kMuRatioMax : kSigmaRatioMax);
    ok = ok && v.ratio < limit;
    ratios += (ratios.empty() ? "" : " ") + num(v.ratio, 3);
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = ok && secs < kRatioRuntime;
  o.detail = "ratios j=1..9: " + ratios + " (mu < " + num(kMuRatioMax) + ", Sigma < " +
             num(kSigmaRatioMax) + "); " + num(secs, 3) + " s";
  return o;
}

// 5. Log-log slope of the ratio against n.
Outcome slope() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_variance_ratio(variance_config({30, 100, 200}, kSlopeReplicates));
  double mu_slope = 0.0;
  std::string slopes;
  for (const auto& s : r.slopes) {
    if (s.entry <= 3) mu_slope += s.slope / 3.0;
    slopes += (slopes.empty() ? "" : " ") + num(s.slope, 3);
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = mu_slope >= kSlopeLow && mu_slope <= kSlopeHigh && secs < kSlopeRuntime;
  o.detail = "mean mu-part slope " + num(mu_slope, 3) + " in [" + num(kSlopeLow) + ", " +
             num(kSlopeHigh) + "]; per-entry " + slopes + "; " + num(secs, 3) + " s";
  return o;
}

ExperimentConfig accuracy_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Accuracy;
  cfg.model = mixture_spec();
  cfg.n_values = {kMixtureN};
  cfg.replicates = kAccuracyReplicates;
  cfg.estimator.M = kAccuracyM;
  cfg.estimator.N = kAccuracyN;
  cfg.estimator.c = kC;
  cfg.oracle_replicates = kAccuracyOracle;
  cfg.seed = kSeed;
  cfg.oracle_seed = kSeed + 1;
  return cfg;
}

// 6. Mixture accuracy and cost of the two methods.
Outcome accuracy() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_accuracy(accuracy_config());
  double std_err = 0, ind_err = 0, std_sec = 0, ind_sec = 0;
  for (const auto& a : r.accuracy) {
    if (a.method == Method::Standard) {
      std_err = a.mean_error;
      std_sec = a.seconds;
    } else {
      ind_err = a.mean_error;
      ind_sec = a.seconds;
    }
  }
  const double err_ratio = ind_err / std_err;
  const double time_ratio = ind_sec / std_sec;
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = err_ratio < kErrorRatioMax && time_ratio >= kTimeRatioLow &&
           time_ratio <= kTimeRatioHigh && secs < kAccuracyRuntime;
  o.detail = "mean rel err standard " + num(std_err, 3) + ", independent " + num(ind_err, 3) +
             ", ratio " + num(err_ratio, 3) + " (< " + num(kErrorRatioMax) +
             "); time indep/standard " + num(time_ratio, 3) + " in [" + num(kTimeRatioLow) +
             ", " + num(kTimeRatioHigh) + "]; " + num(secs, 3) + " s";
  return o;
}

ExperimentConfig tradeoff_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MNTradeoff;
  cfg.model = spn_spec();
  cfg.n_values = {30};
  cfg.budget = kBudget;
  cfg.replicates = kTradeoffReplicates;
  cfg.estimator.c = kC;
  cfg.seed = kSeed;
  return cfg;
}

// 7. M = 1 minimizes the variance at a fixed budget.
Outcome tradeoff() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_mn_tradeoff(tradeoff_config());
  std::size_t violations = 0;
  std::string detail;
  for (Method method : {Method::Standard, Method::IndependentPerturbation}) {
    std::size_t local = 0;
    double worst = -1e300;
    for (const auto& base : r.tradeoff) {
      if (base.method != method || base.M != 1) continue;
      for (const auto& other : r.tradeoff) {
        if (other.method != method || other.entry != base.entry || other.M == 1) continue;
        const double sigma = std::hypot(base.std_error, other.std_error);
        const double z = (base.variance - other.variance) / sigma;
        worst = std::max(worst, z);
        if (z > kTradeoffSigmas) ++local;
      }
    }
    violations += local;
    detail += method_name(method) + ": " + std::to_string(local) + " violations, max z " +
              num(worst, 3) + "; ";
  }
  std::string ratio;
  for (const auto& t : r.tradeoff) {
    if (t.method != Method::Standard || t.entry != 1) continue;
    ratio += (ratio.empty() ? "" : " ") + std::string("M=") + std::to_string(t.M) + ":" +
             num(t.variance, 3);
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.pass = violations == 0 && secs < kTradeoffRuntime;
  o.detail = detail + "var(F_11) by M " + ratio + "; " + num(secs, 3) + " s";
  return o;
}

// Numerical content of a report, excluding wall times and timestamps.
std::string numeric_fingerprint(const ExperimentReport& r) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& v : r.variance)
    os << v.n << v.entry << int(v.method) << ' ' << v.variance << ' ' << v.std_error << ' '
       << v.ratio << '\n';
  for (const auto& s : r.slopes) os << s.entry << ' ' << s.slope << '\n';
  if (r.truth)
    for (double v : r.truth->packed()) os << v << ' ';
  for (const auto& a : r.accuracy) {
    for (double e : a.errors) os << e << ' ';
    for (double v : a.typical.packed()) os << v << ' ';
  }
  for (const auto& t : r.tradeoff)
    os << t.M << t.N << int(t.method) << t.entry << ' ' << t.variance << ' ' << t.std_error << '\n';
  return os.str();
}

// 8. Bit-identical results at 1, 2 and 8 workers.
Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ExperimentConfig> configs;
  configs.push_back(variance_config({30, 60}, 2000));
  auto timing = variance_config({30}, 1000);
  timing.kind = ExperimentKind::Timing;
  configs.push_back(timing);
  auto acc = accuracy_config();
  acc.replicates = 5;
  acc.estimator.N = 200;
  acc.oracle_replicates = 2000;
  configs.push_back(acc);
  auto mn = tradeoff_config();
  mn.replicates = 300;
  configs.push_back(mn);

  bool ok = true;
  std::string detail;
  for (auto cfg : configs) {
    std::vector<std::string> prints;
    for (std::size_t w : {1, 2, 8}) {
      cfg.workers = w;
      prints.push_back(numeric_fingerprint(run_experiment(cfg)));
    }
    const bool same = prints[0] == prints[1] && prints[0] == prints[2];
    ok = ok && same;
    detail += experiment_kind_name(cfg.kind) + (same ? " identical" : " DIFFERS") + "; ";
  }
  Outcome o;
  o.pass = ok;
  o.detail = detail + num(elapsed_since(t0), 3) + " s";
  return o;
}

// 9. Independent method with one shared perturbation equals the standard one.
double identity_gap(const Model& m, double c) {
  double worst = 0.0;
  for (int i = 0; i < kIdentityInstances; ++i) {
    RandomStream rng(kSeed, 900 + i, StreamPurpose::Setup);
    const auto theta = m.nominal_theta();
    const auto data = m.sample_pseudo_data(theta, rng);
    const auto delta = sample_perturbation(PerturbationSpec::bernoulli(), theta.size(), rng);
    const auto standard = sp_hessian_estimate(m, theta, data, delta, c);
    const std::vector<PerturbationVector> same(data.n, delta);
    const auto indep = sp_hessian_estimate_independent(m, theta, data, same, c);
    worst = std::max(worst, max_rel_diff(indep.packed(), standard.packed()));
  }
  return worst;
}

Outcome identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto quad = quadratic_model(
      SymmetricMatrix::from_packed(std::vector<double>{4.0, 1.0, 0.5, 3.0, 0.2, 2.0}, 3), 30);
  const auto spn = build_model(spn_spec(), 30);
  const auto mix = build_model(mixture_spec(), kMixtureN);
  std::string detail, at_default;
  bool ok = true;
  for (const Model* m : {static_cast<const Model*>(quad.get()), spn.get(), mix.get()}) {
    const double worst = identity_gap(*m, kIdentityC);
    ok = ok && worst <= kIdentityTol;
    detail += m->name() + " " + num(worst, 2) + "; ";
    at_default += m->name() + " " + num(identity_gap(*m, kC), 2) + "; ";
  }
  Outcome o;
  o.pass = ok;
  o.detail = "max rel diff at c=" + num(kIdentityC) + ": " + detail + "tol " + num(kIdentityTol) +
             " (c=" + num(kC) + ", not gated: " + at_default + ") " + num(elapsed_since(t0), 3) +
             " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quadratic exactness", exactness},
      {"score gradients vs finite differences", gradients},
      {"analytic FIM vs Monte Carlo oracle", oracle_cross_check},
      {"diagonal variance ratios, n=30", variance_ratios},
      {"ratio slope over n=30,100,200", slope},
      {"mixture accuracy and cost", accuracy},
      {"M=1 optimal at fixed budget", tradeoff},
      {"determinism across 1, 2, 8 workers", determinism},
      {"independent equals standard for shared perturbation", identity},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
