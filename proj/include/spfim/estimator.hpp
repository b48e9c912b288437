#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spfim/accumulator.hpp"
#include "spfim/matrix.hpp"
#include "spfim/models.hpp"
#include "spfim/perturbation.hpp"

namespace spfim {

enum class Method { Standard, IndependentPerturbation };

std::string method_name(Method m);
Method parse_method(const std::string& s);

struct EstimatorConfig {
  Method method = Method::Standard;
  // Hessian estimates averaged per pseudo dataset.
  std::size_t M = 1;
  // Pseudo datasets.
  std::size_t N = 1;
  double c = 1e-4;
  PerturbationSpec perturbation = PerturbationSpec::bernoulli();
  std::uint64_t seed = 0;

  // Throws ValidationError; returns warnings (e.g. a large c).
  std::vector<std::string> validate() const;
};

struct FIMEstimate {
  SymmetricMatrix mean;
  // Sample variance of each entry across the N inner-averaged terms.
  SymmetricMatrix entry_variance;
  SymmetricMatrix entry_variance_se;
  std::size_t replicates_used = 0;
  double wall_time_seconds = 0.0;
};

// Scratch buffers reused across replicates by one worker.
struct HessianWorkspace {
  std::vector<double> theta_plus;
  std::vector<double> theta_minus;
  std::vector<double> grad_plus;
  std::vector<double> grad_minus;
  std::vector<double> scaled;
  PerturbationVector delta;
  std::vector<PerturbationVector> deltas;
  PseudoDataset data;

  void resize(std::size_t p);
};

// Symmetrized simultaneous-perturbation Hessian estimate from two total
// gradient evaluations at theta +/- c*delta.
SymmetricMatrix sp_hessian_estimate(const Model& model, std::span<const double> theta,
                                    const PseudoDataset& data, const PerturbationVector& delta,
                                    double c);

// Sum over data of per-datum estimates, each with its own perturbation.
SymmetricMatrix sp_hessian_estimate_independent(const Model& model, std::span<const double> theta,
                                                const PseudoDataset& data,
                                                std::span<const PerturbationVector> deltas,
                                                double c);

// Adds the estimate into `packed` (upper-triangle storage) without
// allocating; the two functions above are thin wrappers over these.
void add_sp_hessian(const Model& model, std::span<const double> theta, const PseudoDataset& data,
                    const PerturbationVector& delta, double c, HessianWorkspace& ws,
                    std::span<double> packed);
void add_sp_hessian_independent(const Model& model, std::span<const double> theta,
                                const PseudoDataset& data,
                                std::span<const PerturbationVector> deltas, double c,
                                HessianWorkspace& ws, std::span<double> packed);

// Writes -(1/M) sum_k H_{k|i} for outer replicate i into `packed`. Draws the
// pseudo dataset and perturbations from streams derived from (seed, i).
void fim_replicate(const Model& model, std::span<const double> theta, const EstimatorConfig& config,
                   std::uint64_t outer_index, HessianWorkspace& ws, std::span<double> packed);

// Monte Carlo FIM estimate averaged over M inner and N outer replicates.
// workers = 0 picks the default; results do not depend on the worker count.
FIMEstimate estimate_fim(const Model& model, std::span<const double> theta,
                         const EstimatorConfig& config, std::size_t workers = 0);

}  // namespace spfim
