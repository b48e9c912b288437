#include "spfim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>

#include "spfim/errors.hpp"
#include "spfim/oracle.hpp"
#include "spfim/parallel.hpp"

namespace spfim {

namespace {

constexpr std::size_t kNoisyReplicates = 10000;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentReport start_report(const ExperimentConfig& config, ExperimentKind kind) {
  config.validate();
  ExperimentReport r;
  r.kind = kind;
  r.seed = config.seed;
  r.timestamp = utc_timestamp();
  r.config = config.echo();
  r.config["experiment.kind"] = experiment_kind_name(kind);
  r.parameter_names = build_model(config.model, config.n_values.front())->parameter_names();
  for (const auto& w : config.estimator.validate()) r.warnings.push_back(w);
  return r;
}

// Runs both methods at M = N = 1 over `replicates` draws for every n and
// fills variance and timing rows.
void variance_sweep(const ExperimentConfig& config, ExperimentReport& r) {
  if (config.replicates < kNoisyReplicates) {
    r.warnings.push_back("replicates = " + std::to_string(config.replicates) +
                         " < 10000; variance estimates will be noisy");
  }
  const std::vector<Method> methods{Method::Standard, Method::IndependentPerturbation};
  for (std::size_t n : config.n_values) {
    const auto model = build_model(config.model, n);
    const std::vector<double> theta = model->nominal_theta();
    const std::size_t p = model->parameter_dim();
    std::vector<FIMEstimate> est;
    for (Method m : methods) {
      EstimatorConfig e = config.estimator;
      e.method = m;
      e.M = 1;
      e.N = config.replicates;
      e.seed = config.seed;
      est.push_back(estimate_fim(*model, theta, e, config.workers));
      r.timing.push_back({n, m, est.back().wall_time_seconds, config.replicates});
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      for (std::size_t j = 0; j < p; ++j) {
        const double basic = est[0].entry_variance(j, j);
        const double indep = est[1].entry_variance(j, j);
        r.variance.push_back({n, j + 1, methods[mi], est[mi].entry_variance(j, j),
                              est[mi].entry_variance_se(j, j), variance_ratio(indep, basic)});
      }
    }
  }
  if (config.n_values.size() >= 2) {
    const std::size_t p = r.parameter_names.size();
    for (std::size_t j = 1; j <= p; ++j) {
      std::vector<double> xs, ys;
      for (const auto& v : r.variance) {
        if (v.entry != j || v.method != Method::Standard) continue;
        xs.push_back(static_cast<double>(v.n));
        ys.push_back(v.ratio);
      }
      r.slopes.push_back({j, log_log_slope(xs, ys)});
    }
  }
}

}  // namespace

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionError("log_log_slope: need at least two matched points");
  }
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ExperimentReport run_variance_ratio(const ExperimentConfig& config) {
  ExperimentReport r = start_report(config, ExperimentKind::VarianceRatio);
  variance_sweep(config, r);
  return r;
}

ExperimentReport run_timing(const ExperimentConfig& config) {
  ExperimentReport r = start_report(config, ExperimentKind::Timing);
  variance_sweep(config, r);
  return r;
}

ExperimentReport run_accuracy(const ExperimentConfig& config) {
  ExperimentReport r = start_report(config, ExperimentKind::Accuracy);
  const auto model = build_model(config.model, config.n_values.front());
  const std::vector<double> theta = model->nominal_theta();

  const SymmetricMatrix truth =
      mc_true_fim(*model, theta, config.oracle_replicates, config.oracle_seed, config.workers);
  r.truth = truth;

  const std::size_t rank = (config.replicates + 1) / 2;
  for (Method m : config.methods) {
    AccuracyRow row;
    row.method = m;
    std::vector<SymmetricMatrix> estimates;
    for (std::size_t rep = 0; rep < config.replicates; ++rep) {
      EstimatorConfig e = config.estimator;
      e.method = m;
      e.seed = mix_seed(config.seed, rep);
      FIMEstimate est = estimate_fim(*model, theta, e, config.workers);
      row.seconds += est.wall_time_seconds;
      row.errors.push_back(relative_spectral_error(est.mean, truth));
      estimates.push_back(std::move(est.mean));
    }
    row.mean_error =
        std::accumulate(row.errors.begin(), row.errors.end(), 0.0) / static_cast<double>(row.errors.size());
    std::vector<std::size_t> order(row.errors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row.errors[a] > row.errors[b]; });
    row.typical = estimates[order[rank - 1]];
    row.typical_rank = rank;
    r.accuracy.push_back(std::move(row));
  }
  return r;
}

ExperimentReport run_mn_tradeoff(const ExperimentConfig& config) {
  ExperimentReport r = start_report(config, ExperimentKind::MNTradeoff);
  if (config.replicates < kNoisyReplicates) {
    r.warnings.push_back("replicates = " + std::to_string(config.replicates) +
                         " < 10000; variance estimates will be noisy");
  }
  const auto model = build_model(config.model, config.n_values.front());
  const std::vector<double> theta = model->nominal_theta();
  const std::size_t p = model->parameter_dim();
  const std::size_t packed = SymmetricMatrix::packed_size(p);

  std::vector<std::size_t> divisors;
  for (std::size_t m = 1; m <= config.budget; ++m)
    if (config.budget % m == 0) divisors.push_back(m);
  if (divisors.size() == 1) {
    r.warnings.push_back("budget " + std::to_string(config.budget) + " has only M = 1");
  }

  for (Method method : config.methods) {
    for (std::size_t M : divisors) {
      EstimatorConfig base = config.estimator;
      base.method = method;
      base.M = M;
      base.N = config.budget / M;
      VarianceAccumulator acc = parallel_block_reduce<VarianceAccumulator>(
          config.replicates, config.workers,
          [&](std::size_t begin, std::size_t end) {
            HessianWorkspace ws;
            std::vector<double> buf(packed);
            std::vector<double> avg(packed);
            std::vector<double> diag(p);
            VarianceAccumulator local(p);
            for (std::size_t rep = begin; rep < end; ++rep) {
              EstimatorConfig e = base;
              e.seed = mix_seed(config.seed, rep);
              std::fill(avg.begin(), avg.end(), 0.0);
              for (std::size_t i = 0; i < e.N; ++i) {
                fim_replicate(*model, theta, e, i, ws, buf);
                for (std::size_t k = 0; k < packed; ++k) avg[k] += buf[k];
              }
              for (std::size_t j = 0; j < p; ++j) {
                diag[j] = avg[SymmetricMatrix::packed_index(p, j, j)] / static_cast<double>(e.N);
              }
              local.push(diag);
            }
            return local;
          },
          [](VarianceAccumulator& a, const VarianceAccumulator& b) { a.merge(b); });
      const auto var = acc.variance();
      const auto se = acc.variance_standard_error();
      for (std::size_t j = 0; j < p; ++j) {
        r.tradeoff.push_back({M, base.N, method, j + 1, var[j], se[j]});
      }
    }
  }
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::VarianceRatio: return run_variance_ratio(config);
    case ExperimentKind::Timing: return run_timing(config);
    case ExperimentKind::Accuracy: return run_accuracy(config);
    case ExperimentKind::MNTradeoff: return run_mn_tradeoff(config);
  }
  throw ConfigError("experiment.kind: unsupported");
}

}  // namespace spfim
