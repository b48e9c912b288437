#include "spfim/estimator.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "spfim/errors.hpp"
#include "spfim/parallel.hpp"

namespace spfim {

std::size_t default_workers() {
  if (const char* env = std::getenv("SPFIM_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string method_name(Method m) {
  return m == Method::Standard ? "standard" : "independent";
}

Method parse_method(const std::string& s) {
  if (s == "standard" || s == "basic") return Method::Standard;
  if (s == "independent" || s == "indep") return Method::IndependentPerturbation;
  throw ValidationError("unknown estimator method '" + s + "' (expected standard|independent)");
}

std::vector<std::string> EstimatorConfig::validate() const {
  if (M == 0) throw ValidationError("estimator: M must be >= 1");
  if (N == 0) throw ValidationError("estimator: N must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("estimator: c must be positive");
  std::vector<std::string> warnings;
  if (c > 0.1) warnings.push_back("estimator: c = " + std::to_string(c) + " is large; bias grows as c^2");
  return warnings;
}

void HessianWorkspace::resize(std::size_t p) {
  theta_plus.resize(p);
  theta_minus.resize(p);
  grad_plus.resize(p);
  grad_minus.resize(p);
  scaled.resize(p);
}

namespace {

void add_outer_sym(std::span<const double> scaled, std::span<const double> inv,
                   std::span<double> packed) {
  const std::size_t p = scaled.size();
  std::size_t k = 0;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t l = j; l < p; ++l, ++k) {
      packed[k] += 0.5 * (scaled[j] * inv[l] + scaled[l] * inv[j]);
    }
  }
}

void check_inputs(const Model& model, std::span<const double> theta, const PseudoDataset& data,
                  double c) {
  if (theta.size() != model.parameter_dim()) {
    throw DimensionError("sp_hessian_estimate: theta length does not match the model");
  }
  if (data.n != model.size() || data.datum_dim != model.datum_dim()) {
    throw DimensionError("sp_hessian_estimate: pseudo dataset shape does not match the model");
  }
  if (!(c > 0.0)) throw ValidationError("sp_hessian_estimate: c must be positive");
}

}  // namespace

void add_sp_hessian(const Model& model, std::span<const double> theta, const PseudoDataset& data,
                    const PerturbationVector& delta, double c, HessianWorkspace& ws,
                    std::span<double> packed) {
  const std::size_t p = theta.size();
  if (delta.size() != p) throw DimensionError("sp_hessian_estimate: perturbation length");
  ws.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    ws.theta_plus[j] = theta[j] + c * delta.delta[j];
    ws.theta_minus[j] = theta[j] - c * delta.delta[j];
  }
  model.grad_total(ws.theta_plus, data, ws.grad_plus);
  model.grad_total(ws.theta_minus, data, ws.grad_minus);
  const double inv_2c = 1.0 / (2.0 * c);
  for (std::size_t j = 0; j < p; ++j) ws.scaled[j] = (ws.grad_plus[j] - ws.grad_minus[j]) * inv_2c;
  add_outer_sym(ws.scaled, delta.delta_inv, packed);
}

void add_sp_hessian_independent(const Model& model, std::span<const double> theta,
                                const PseudoDataset& data,
                                std::span<const PerturbationVector> deltas, double c,
                                HessianWorkspace& ws, std::span<double> packed) {
  const std::size_t p = theta.size();
  if (deltas.size() != data.n) {
    throw DimensionError("sp_hessian_estimate_independent: need one perturbation per datum");
  }
  ws.resize(p);
  const double inv_2c = 1.0 / (2.0 * c);
  for (std::size_t t = 0; t < data.n; ++t) {
    const PerturbationVector& d = deltas[t];
    if (d.size() != p) throw DimensionError("sp_hessian_estimate_independent: perturbation length");
    for (std::size_t j = 0; j < p; ++j) {
      ws.theta_plus[j] = theta[j] + c * d.delta[j];
      ws.theta_minus[j] = theta[j] - c * d.delta[j];
    }
    model.grad_per_datum(ws.theta_plus, t, data.datum(t), ws.grad_plus);
    model.grad_per_datum(ws.theta_minus, t, data.datum(t), ws.grad_minus);
    for (std::size_t j = 0; j < p; ++j) ws.scaled[j] = (ws.grad_plus[j] - ws.grad_minus[j]) * inv_2c;
    add_outer_sym(ws.scaled, d.delta_inv, packed);
  }
}

SymmetricMatrix sp_hessian_estimate(const Model& model, std::span<const double> theta,
                                    const PseudoDataset& data, const PerturbationVector& delta,
                                    double c) {
  check_inputs(model, theta, data, c);
  SymmetricMatrix h(theta.size());
  HessianWorkspace ws;
  add_sp_hessian(model, theta, data, delta, c, ws, h.packed_mut());
  return h;
}

SymmetricMatrix sp_hessian_estimate_independent(const Model& model, std::span<const double> theta,
                                                const PseudoDataset& data,
                                                std::span<const PerturbationVector> deltas,
                                                double c) {
  check_inputs(model, theta, data, c);
  SymmetricMatrix h(theta.size());
  HessianWorkspace ws;
  add_sp_hessian_independent(model, theta, data, deltas, c, ws, h.packed_mut());
  return h;
}

void fim_replicate(const Model& model, std::span<const double> theta, const EstimatorConfig& config,
                   std::uint64_t outer_index, HessianWorkspace& ws, std::span<double> packed) {
  const std::size_t p = model.parameter_dim();
  const std::size_t n = model.size();
  std::fill(packed.begin(), packed.end(), 0.0);

  std::size_t k = 0;
  try {
    RandomStream data_rng(config.seed, outer_index, StreamPurpose::PseudoData);
    model.sample_pseudo_data(theta, data_rng, ws.data);
    RandomStream pert_rng(config.seed, outer_index, StreamPurpose::Perturbation);
    for (; k < config.M; ++k) {
      if (config.method == Method::Standard) {
        sample_perturbation_into(config.perturbation, p, pert_rng, ws.delta);
        add_sp_hessian(model, theta, ws.data, ws.delta, config.c, ws, packed);
      } else {
        ws.deltas.resize(n);
        for (auto& d : ws.deltas) sample_perturbation_into(config.perturbation, p, pert_rng, d);
        add_sp_hessian_independent(model, theta, ws.data, ws.deltas, config.c, ws, packed);
      }
    }
  } catch (const Error& e) {
    throw ReplicateError(outer_index, k, e.what());
  }
  const double scale = -1.0 / static_cast<double>(config.M);
  for (double& v : packed) v *= scale;
}

FIMEstimate estimate_fim(const Model& model, std::span<const double> theta,
                         const EstimatorConfig& config, std::size_t workers) {
  config.validate();
  if (theta.size() != model.parameter_dim()) {
    throw DimensionError("estimate_fim: theta length does not match the model");
  }
  const std::size_t p = model.parameter_dim();
  const std::size_t packed = SymmetricMatrix::packed_size(p);

  const auto start = std::chrono::steady_clock::now();
  VarianceAccumulator acc = parallel_block_reduce<VarianceAccumulator>(
      config.N, workers,
      [&](std::size_t begin, std::size_t end) {
        HessianWorkspace ws;
        std::vector<double> buf(packed);
        VarianceAccumulator local(packed);
        for (std::size_t i = begin; i < end; ++i) {
          fim_replicate(model, theta, config, i, ws, buf);
          local.push(buf);
        }
        return local;
      },
      [](VarianceAccumulator& a, const VarianceAccumulator& b) { a.merge(b); });
  const auto stop = std::chrono::steady_clock::now();

  FIMEstimate out;
  out.mean = SymmetricMatrix::from_packed(acc.mean(), p);
  out.entry_variance = SymmetricMatrix::from_packed(acc.variance(), p);
  out.entry_variance_se = SymmetricMatrix::from_packed(acc.variance_standard_error(), p);
  out.replicates_used = static_cast<std::size_t>(acc.count());
  out.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  return out;
}

}  // namespace spfim
