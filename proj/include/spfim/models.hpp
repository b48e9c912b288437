#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spfim/matrix.hpp"
#include "spfim/random.hpp"

namespace spfim {

// n independent data vectors, each of length datum_dim, stored contiguously.
struct PseudoDataset {
  std::size_t n = 0;
  std::size_t datum_dim = 0;
  std::vector<double> values;

  PseudoDataset() = default;
  PseudoDataset(std::size_t n_, std::size_t dim) : n(n_), datum_dim(dim), values(n_ * dim, 0.0) {}

  std::span<const double> datum(std::size_t t) const {
    return {values.data() + t * datum_dim, datum_dim};
  }
  std::span<double> datum(std::size_t t) { return {values.data() + t * datum_dim, datum_dim}; }
};

// A statistical model with n independent (not necessarily identically
// distributed) observations. The log-likelihood is the sum of per-datum
// log-densities, so every gradient decomposes over data.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  // p
  virtual std::size_t parameter_dim() const = 0;
  // n
  virtual std::size_t size() const = 0;
  virtual std::size_t datum_dim() const = 0;
  virtual std::vector<double> nominal_theta() const = 0;
  // Meaning of each theta coordinate, in packing order.
  virtual std::vector<std::string> parameter_names() const = 0;

  virtual void sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                                  PseudoDataset& out) const = 0;
  PseudoDataset sample_pseudo_data(std::span<const double> theta, RandomStream& rng) const;

  virtual double log_density(std::span<const double> theta, std::size_t t,
                             std::span<const double> z) const = 0;
  // Overwrites out with d/dtheta log p(z_t | theta).
  virtual void grad_per_datum(std::span<const double> theta, std::size_t t,
                              std::span<const double> z, std::span<double> out) const = 0;
  // Overwrites out with the sum of per-datum gradients.
  virtual void grad_total(std::span<const double> theta, const PseudoDataset& data,
                          std::span<double> out) const;

  double log_likelihood(std::span<const double> theta, const PseudoDataset& data) const;
  std::vector<double> grad_total(std::span<const double> theta, const PseudoDataset& data) const;

  virtual std::optional<SymmetricMatrix> analytic_hessian(std::span<const double>,
                                                          const PseudoDataset&) const {
    return std::nullopt;
  }
  virtual std::optional<SymmetricMatrix> analytic_fim(std::span<const double>) const {
    return std::nullopt;
  }

 protected:
  void check_theta(std::span<const double> theta) const;
};

// z_t ~ N(mu, Sigma + P_t). theta packs as [mu_1..mu_d, upper triangle of
// Sigma row-major], so p = d + d(d+1)/2 (p = 9 for d = 3).
class SignalPlusNoiseModel final : public Model {
 public:
  static constexpr std::size_t kMaxDatumDim = 8;

  SignalPlusNoiseModel(std::vector<double> mu, SymmetricMatrix sigma,
                       std::vector<SymmetricMatrix> noise_covs);

  std::string name() const override { return "spn"; }
  std::size_t parameter_dim() const override { return d_ + SymmetricMatrix::packed_size(d_); }
  std::size_t size() const override { return noise_.size(); }
  std::size_t datum_dim() const override { return d_; }
  std::vector<double> nominal_theta() const override;
  std::vector<std::string> parameter_names() const override;

  void sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                          PseudoDataset& out) const override;
  using Model::sample_pseudo_data;
  double log_density(std::span<const double> theta, std::size_t t,
                     std::span<const double> z) const override;
  void grad_per_datum(std::span<const double> theta, std::size_t t, std::span<const double> z,
                      std::span<double> out) const override;
  std::optional<SymmetricMatrix> analytic_fim(std::span<const double> theta) const override;

  const std::vector<SymmetricMatrix>& noise_covariances() const { return noise_; }
  const SymmetricMatrix& sigma() const { return sigma_; }
  const std::vector<double>& mu() const { return mu_; }

  // Sigma with 2 on the diagonal and 0.5 elsewhere.
  static SymmetricMatrix reference_sigma(std::size_t d = 3);

 private:
  std::size_t d_;
  std::vector<double> mu_;
  SymmetricMatrix sigma_;
  std::vector<SymmetricMatrix> noise_;
  std::vector<LowerTriangularFactor> nominal_factors_;
};

// P_i = sqrt(i) * U^T U for i = 1..n, with one d x d matrix U of uniform(0,1)
// entries drawn from the seed and shared by every i.
std::vector<SymmetricMatrix> signal_plus_noise_covariances(std::size_t n, std::uint64_t seed,
                                                           std::size_t d = 3);

std::shared_ptr<const SignalPlusNoiseModel> spn_model(std::vector<double> mu, SymmetricMatrix sigma,
                                                      std::vector<SymmetricMatrix> noise_covs);

SymmetricMatrix spn_analytic_fim(const SignalPlusNoiseModel& model, std::span<const double> theta);

// Two-component scalar Gaussian mixture, theta = [lambda, mu1, var1, mu2, var2].
class MixtureModel final : public Model {
 public:
  MixtureModel(std::vector<double> theta, std::size_t n);

  std::string name() const override { return "mixture"; }
  std::size_t parameter_dim() const override { return 5; }
  std::size_t size() const override { return n_; }
  std::size_t datum_dim() const override { return 1; }
  std::vector<double> nominal_theta() const override { return theta_; }
  std::vector<std::string> parameter_names() const override;

  void sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                          PseudoDataset& out) const override;
  using Model::sample_pseudo_data;
  double log_density(std::span<const double> theta, std::size_t t,
                     std::span<const double> z) const override;
  void grad_per_datum(std::span<const double> theta, std::size_t t, std::span<const double> z,
                      std::span<double> out) const override;

 private:
  std::vector<double> theta_;
  std::size_t n_;
};

std::shared_ptr<const MixtureModel> mixture_model(std::vector<double> theta, std::size_t n);

// Per-datum log-likelihood -1/2 theta^T A theta, independent of the data.
// The Hessian is the constant -n A.
class QuadraticModel final : public Model {
 public:
  QuadraticModel(SymmetricMatrix a, std::size_t n, std::vector<double> nominal);

  std::string name() const override { return "quadratic"; }
  std::size_t parameter_dim() const override { return a_.dim(); }
  std::size_t size() const override { return n_; }
  std::size_t datum_dim() const override { return 1; }
  std::vector<double> nominal_theta() const override { return nominal_; }
  std::vector<std::string> parameter_names() const override;

  void sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                          PseudoDataset& out) const override;
  using Model::sample_pseudo_data;
  double log_density(std::span<const double> theta, std::size_t t,
                     std::span<const double> z) const override;
  void grad_per_datum(std::span<const double> theta, std::size_t t, std::span<const double> z,
                      std::span<double> out) const override;
  std::optional<SymmetricMatrix> analytic_hessian(std::span<const double> theta,
                                                  const PseudoDataset& data) const override;
  std::optional<SymmetricMatrix> analytic_fim(std::span<const double> theta) const override;

  const SymmetricMatrix& matrix() const { return a_; }

 private:
  SymmetricMatrix a_;
  std::size_t n_;
  std::vector<double> nominal_;
};

// A must be SPD. The nominal theta defaults to (1, 2, ..., p).
std::shared_ptr<const QuadraticModel> quadratic_model(SymmetricMatrix a, std::size_t n = 1,
                                                      std::vector<double> nominal = {});

// Scalar N(mu, var) observations. With a known variance theta = [mu];
// otherwise theta = [mu, var].
class ScalarGaussianModel final : public Model {
 public:
  ScalarGaussianModel(double mu, double var, std::size_t n, bool variance_known);

  std::string name() const override { return "gaussian"; }
  std::size_t parameter_dim() const override { return known_ ? 1 : 2; }
  std::size_t size() const override { return n_; }
  std::size_t datum_dim() const override { return 1; }
  std::vector<double> nominal_theta() const override;
  std::vector<std::string> parameter_names() const override;

  void sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                          PseudoDataset& out) const override;
  using Model::sample_pseudo_data;
  double log_density(std::span<const double> theta, std::size_t t,
                     std::span<const double> z) const override;
  void grad_per_datum(std::span<const double> theta, std::size_t t, std::span<const double> z,
                      std::span<double> out) const override;
  std::optional<SymmetricMatrix> analytic_hessian(std::span<const double> theta,
                                                  const PseudoDataset& data) const override;
  std::optional<SymmetricMatrix> analytic_fim(std::span<const double> theta) const override;

 private:
  double mu_;
  double var_;
  std::size_t n_;
  bool known_;
};

std::shared_ptr<const ScalarGaussianModel> scalar_gaussian_model(double mu, double var,
                                                                 std::size_t n,
                                                                 bool variance_known);

}  // namespace spfim
