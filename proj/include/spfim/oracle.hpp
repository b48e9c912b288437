#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spfim/matrix.hpp"
#include "spfim/models.hpp"

namespace spfim {

struct FDConfig {
  double step = 1e-5;
};

using ScalarFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<void(std::span<const double>, std::span<double>)>;

// Central differences, one coordinate at a time.
std::vector<double> fd_gradient(const ScalarFunction& f, std::span<const double> theta,
                                const FDConfig& fd = {});

// Second-order central stencil on function values, symmetrized.
SymmetricMatrix fd_hessian(const ScalarFunction& f, std::span<const double> theta,
                           const FDConfig& fd = {});

// Central differences of an analytic gradient, symmetrized.
SymmetricMatrix fd_hessian_from_gradient(const GradientFunction& grad, std::size_t p,
                                         std::span<const double> theta, const FDConfig& fd = {});

// Hessian of the total log-likelihood: analytic when the model has one,
// otherwise finite differences of the analytic gradient.
SymmetricMatrix model_hessian(const Model& model, std::span<const double> theta,
                              const PseudoDataset& data, const FDConfig& fd = {});

// -(1/R) sum_r H(theta | Z_r) over fresh pseudo datasets. Deterministic in
// the seed and independent of the worker count.
SymmetricMatrix mc_true_fim(const Model& model, std::span<const double> theta,
                            std::size_t replicates, std::uint64_t seed, std::size_t workers = 0);

// ||estimate - truth|| / ||truth|| in the spectral norm.
double relative_spectral_error(const SymmetricMatrix& estimate, const SymmetricMatrix& truth);

}  // namespace spfim
