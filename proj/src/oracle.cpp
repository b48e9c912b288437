#include "spfim/oracle.hpp"

#include <cmath>
#include <string>

#include "spfim/accumulator.hpp"
#include "spfim/errors.hpp"
#include "spfim/parallel.hpp"

namespace spfim {

namespace {

double eval_checked(const ScalarFunction& f, std::span<const double> x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw OracleError("finite-difference oracle: non-finite function value");
  return v;
}

void require_step(const FDConfig& fd) {
  if (!(fd.step > 0.0)) throw ValidationError("FDConfig: step must be positive");
}

}  // namespace

std::vector<double> fd_gradient(const ScalarFunction& f, std::span<const double> theta,
                                const FDConfig& fd) {
  require_step(fd);
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    x[j] = theta[j] + fd.step;
    const double fp = eval_checked(f, x);
    x[j] = theta[j] - fd.step;
    const double fm = eval_checked(f, x);
    x[j] = theta[j];
    g[j] = (fp - fm) / (2.0 * fd.step);
  }
  return g;
}

SymmetricMatrix fd_hessian(const ScalarFunction& f, std::span<const double> theta,
                           const FDConfig& fd) {
  require_step(fd);
  const std::size_t p = theta.size();
  const double h = fd.step;
  std::vector<double> x(theta.begin(), theta.end());
  const double f0 = eval_checked(f, x);
  SymmetricMatrix out(p);
  for (std::size_t j = 0; j < p; ++j) {
    x[j] = theta[j] + h;
    const double fp = eval_checked(f, x);
    x[j] = theta[j] - h;
    const double fm = eval_checked(f, x);
    x[j] = theta[j];
    out.set(j, j, (fp - 2.0 * f0 + fm) / (h * h));
    for (std::size_t l = j + 1; l < p; ++l) {
      auto at = [&](double sj, double sl) {
        x[j] = theta[j] + sj * h;
        x[l] = theta[l] + sl * h;
        const double v = eval_checked(f, x);
        x[j] = theta[j];
        x[l] = theta[l];
        return v;
      };
      out.set(j, l, (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h));
    }
  }
  return out;
}

SymmetricMatrix fd_hessian_from_gradient(const GradientFunction& grad, std::size_t p,
                                         std::span<const double> theta, const FDConfig& fd) {
  require_step(fd);
  if (theta.size() != p) throw DimensionError("fd_hessian_from_gradient: theta length");
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> gp(p), gm(p);
  std::vector<double> jac(p * p);
  for (std::size_t j = 0; j < p; ++j) {
    x[j] = theta[j] + fd.step;
    grad(x, gp);
    x[j] = theta[j] - fd.step;
    grad(x, gm);
    x[j] = theta[j];
    for (std::size_t l = 0; l < p; ++l) {
      const double v = (gp[l] - gm[l]) / (2.0 * fd.step);
      if (!std::isfinite(v)) throw OracleError("fd_hessian_from_gradient: non-finite gradient");
      jac[l * p + j] = v;
    }
  }
  SymmetricMatrix out(p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = j; l < p; ++l) out.set(j, l, 0.5 * (jac[j * p + l] + jac[l * p + j]));
  return out;
}

SymmetricMatrix model_hessian(const Model& model, std::span<const double> theta,
                              const PseudoDataset& data, const FDConfig& fd) {
  if (auto h = model.analytic_hessian(theta, data)) return *h;
  return fd_hessian_from_gradient(
      [&](std::span<const double> x, std::span<double> g) { model.grad_total(x, data, g); },
      model.parameter_dim(), theta, fd);
}

SymmetricMatrix mc_true_fim(const Model& model, std::span<const double> theta,
                            std::size_t replicates, std::uint64_t seed, std::size_t workers) {
  if (replicates == 0) throw ValidationError("mc_true_fim: replicates must be positive");
  if (theta.size() != model.parameter_dim()) throw DimensionError("mc_true_fim: theta length");
  const std::size_t p = model.parameter_dim();
  VarianceAccumulator acc = parallel_block_reduce<VarianceAccumulator>(
      replicates, workers,
      [&](std::size_t begin, std::size_t end) {
        VarianceAccumulator local(SymmetricMatrix::packed_size(p));
        PseudoDataset data;
        for (std::size_t r = begin; r < end; ++r) {
          try {
            RandomStream rng(seed, r, StreamPurpose::Oracle);
            model.sample_pseudo_data(theta, rng, data);
            SymmetricMatrix h = model_hessian(model, theta, data);
            h *= -1.0;
            local.push(h.packed());
          } catch (const Error& e) {
            throw ReplicateError(r, 0, std::string("mc_true_fim: ") + e.what());
          }
        }
        return local;
      },
      [](VarianceAccumulator& a, const VarianceAccumulator& b) { a.merge(b); });
  return SymmetricMatrix::from_packed(acc.mean(), p);
}

double relative_spectral_error(const SymmetricMatrix& estimate, const SymmetricMatrix& truth) {
  if (estimate.dim() != truth.dim()) throw DimensionError("relative_spectral_error: dim mismatch");
  const double denom = spectral_norm(truth);
  if (!(denom > 0.0)) throw ValidationError("relative_spectral_error: truth has zero norm");
  return spectral_norm(estimate - truth) / denom;
}

}  // namespace spfim
