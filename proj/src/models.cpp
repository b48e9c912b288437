#include "spfim/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "spfim/errors.hpp"

namespace spfim {

namespace {

constexpr std::size_t kStackParams = 64;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Dense Cholesky workspace for the small per-datum covariance S_t.
struct SmallSpd {
  static constexpr std::size_t kMax = SignalPlusNoiseModel::kMaxDatumDim;
  std::size_t d = 0;
  std::array<double, kMax * kMax> l{};

  double& at(std::size_t i, std::size_t j) { return l[i * kMax + j]; }
  double at(std::size_t i, std::size_t j) const { return l[i * kMax + j]; }

  // Factors the dense lower triangle currently stored in l.
  void factor(std::size_t t) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = at(j, j);
      for (std::size_t k = 0; k < j; ++k) s -= at(j, k) * at(j, k);
      if (!(s > 0.0)) {
        throw NotPositiveDefiniteError("signal-plus-noise: covariance Sigma + P_" +
                                       std::to_string(t + 1) + " is not positive definite");
      }
      const double ljj = std::sqrt(s);
      at(j, j) = ljj;
      for (std::size_t i = j + 1; i < d; ++i) {
        double v = at(i, j);
        for (std::size_t k = 0; k < j; ++k) v -= at(i, k) * at(j, k);
        at(i, j) = v / ljj;
      }
    }
  }

  void solve(double* b) const {
    for (std::size_t i = 0; i < d; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= at(i, k) * b[k];
      b[i] = s / at(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < d; ++k) s -= at(k, i) * b[k];
      b[i] = s / at(i, i);
    }
  }

  double log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += std::log(at(i, i));
    return 2.0 * s;
  }

  // Dense row-major inverse into w (kMax stride).
  void inverse(std::array<double, kMax * kMax>& w) const {
    std::array<double, kMax> col{};
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t i = 0; i < d; ++i) col[i] = (i == c) ? 1.0 : 0.0;
      solve(col.data());
      for (std::size_t i = 0; i < d; ++i) w[i * kMax + c] = col[i];
    }
  }
};

// Loads S_t = Sigma(theta) + P_t into the workspace and factors it.
void load_covariance(std::size_t d, std::span<const double> theta, const SymmetricMatrix& noise,
                     std::size_t t, SmallSpd& s) {
  s.d = d;
  const double* sigma = theta.data() + d;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      s.at(i, j) = sigma[SymmetricMatrix::packed_index(d, j, i)] + noise(j, i);
    }
  }
  s.factor(t);
}

double normal_pdf(double z, double mu, double var) {
  const double e = z - mu;
  return std::exp(-0.5 * e * e / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

void require_spd(const SymmetricMatrix& m, const std::string& what) {
  try {
    (void)cholesky(m);
  } catch (const NotPositiveDefiniteError&) {
    throw NotPositiveDefiniteError(what + " is not positive definite");
  }
}

void require_psd(const SymmetricMatrix& m, const std::string& what) {
  const auto eig = symmetric_eigenvalues(m);
  const double scale = std::max(std::abs(eig.front()), std::abs(eig.back()));
  if (eig.front() < -1e-12 * scale) {
    throw NotPositiveDefiniteError(what + " is not positive semi-definite");
  }
}

}  // namespace

PseudoDataset Model::sample_pseudo_data(std::span<const double> theta, RandomStream& rng) const {
  PseudoDataset out(size(), datum_dim());
  sample_pseudo_data(theta, rng, out);
  return out;
}

void Model::grad_total(std::span<const double> theta, const PseudoDataset& data,
                       std::span<double> out) const {
  const std::size_t p = parameter_dim();
  std::array<double, kStackParams> stack{};
  std::vector<double> heap;
  std::span<double> g;
  if (p <= kStackParams) {
    g = std::span<double>(stack.data(), p);
  } else {
    heap.resize(p);
    g = heap;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < data.n; ++t) {
    grad_per_datum(theta, t, data.datum(t), g);
    for (std::size_t j = 0; j < p; ++j) out[j] += g[j];
  }
}

std::vector<double> Model::grad_total(std::span<const double> theta,
                                      const PseudoDataset& data) const {
  check_theta(theta);
  if (data.n != size() || data.datum_dim != datum_dim()) {
    throw DimensionError(name() + ": pseudo dataset shape does not match the model");
  }
  std::vector<double> out(parameter_dim());
  grad_total(theta, data, out);
  return out;
}

double Model::log_likelihood(std::span<const double> theta, const PseudoDataset& data) const {
  check_theta(theta);
  double s = 0.0;
  for (std::size_t t = 0; t < data.n; ++t) s += log_density(theta, t, data.datum(t));
  return s;
}

void Model::check_theta(std::span<const double> theta) const {
  if (theta.size() != parameter_dim()) {
    throw DimensionError(name() + ": theta has length " + std::to_string(theta.size()) +
                         ", expected " + std::to_string(parameter_dim()));
  }
}

// ---------------------------------------------------------------------------
// Signal plus noise

SignalPlusNoiseModel::SignalPlusNoiseModel(std::vector<double> mu, SymmetricMatrix sigma,
                                           std::vector<SymmetricMatrix> noise_covs)
    : d_(mu.size()), mu_(std::move(mu)), sigma_(std::move(sigma)), noise_(std::move(noise_covs)) {
  if (d_ == 0 || d_ > kMaxDatumDim) {
    throw DimensionError("spn_model: mean dimension must be in 1.." +
                         std::to_string(kMaxDatumDim));
  }
  if (sigma_.dim() != d_) throw DimensionError("spn_model: Sigma dimension does not match mu");
  if (noise_.empty()) throw DimensionError("spn_model: need at least one noise covariance");
  require_spd(sigma_, "spn_model: Sigma");
  nominal_factors_.reserve(noise_.size());
  for (std::size_t t = 0; t < noise_.size(); ++t) {
    if (noise_[t].dim() != d_) throw DimensionError("spn_model: noise covariance dimension");
    require_psd(noise_[t], "spn_model: noise covariance P_" + std::to_string(t + 1));
    const SymmetricMatrix s = sigma_ + noise_[t];
    require_spd(s, "spn_model: Sigma + P_" + std::to_string(t + 1));
    nominal_factors_.push_back(cholesky(s));
  }
}

std::vector<double> SignalPlusNoiseModel::nominal_theta() const {
  std::vector<double> theta(mu_);
  theta.insert(theta.end(), sigma_.packed().begin(), sigma_.packed().end());
  return theta;
}

std::vector<std::string> SignalPlusNoiseModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < d_; ++a) names.push_back("mu" + std::to_string(a + 1));
  for (std::size_t a = 0; a < d_; ++a)
    for (std::size_t b = a; b < d_; ++b)
      names.push_back("Sigma" + std::to_string(a + 1) + std::to_string(b + 1));
  return names;
}

void SignalPlusNoiseModel::sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                                              PseudoDataset& out) const {
  check_theta(theta);
  if (out.n != size() || out.datum_dim != d_) out = PseudoDataset(size(), d_);
  const std::span<const double> mean = theta.first(d_);
  const bool nominal = std::equal(theta.begin() + d_, theta.end(), sigma_.packed().begin());
  if (nominal) {
    for (std::size_t t = 0; t < size(); ++t) mvn_sample_into(mean, nominal_factors_[t], rng, out.datum(t));
    return;
  }
  const SymmetricMatrix sigma = SymmetricMatrix::from_packed(theta.subspan(d_), d_);
  for (std::size_t t = 0; t < size(); ++t) {
    LowerTriangularFactor l;
    try {
      l = cholesky(sigma + noise_[t]);
    } catch (const NotPositiveDefiniteError&) {
      throw NotPositiveDefiniteError("signal-plus-noise: covariance Sigma + P_" +
                                     std::to_string(t + 1) + " is not positive definite");
    }
    mvn_sample_into(mean, l, rng, out.datum(t));
  }
}

double SignalPlusNoiseModel::log_density(std::span<const double> theta, std::size_t t,
                                         std::span<const double> z) const {
  SmallSpd s;
  load_covariance(d_, theta, noise_[t], t, s);
  std::array<double, kMaxDatumDim> e{};
  for (std::size_t a = 0; a < d_; ++a) e[a] = z[a] - theta[a];
  std::array<double, kMaxDatumDim> u = e;
  s.solve(u.data());
  double quad = 0.0;
  for (std::size_t a = 0; a < d_; ++a) quad += e[a] * u[a];
  return -0.5 * (static_cast<double>(d_) * kLog2Pi + s.log_det() + quad);
}

void SignalPlusNoiseModel::grad_per_datum(std::span<const double> theta, std::size_t t,
                                          std::span<const double> z, std::span<double> out) const {
  SmallSpd s;
  load_covariance(d_, theta, noise_[t], t, s);
  std::array<double, kMaxDatumDim> u{};
  for (std::size_t a = 0; a < d_; ++a) u[a] = z[a] - theta[a];
  s.solve(u.data());
  std::array<double, SmallSpd::kMax * SmallSpd::kMax> w{};
  s.inverse(w);

  for (std::size_t a = 0; a < d_; ++a) out[a] = u[a];
  // 1/2 (e^T W E_ab W e - tr(W E_ab)), where E_ab has ones at (a,b) and (b,a).
  std::size_t k = d_;
  for (std::size_t a = 0; a < d_; ++a) {
    for (std::size_t b = a; b < d_; ++b, ++k) {
      const double g = u[a] * u[b] - w[a * SmallSpd::kMax + b];
      out[k] = (a == b) ? 0.5 * g : g;
    }
  }
}

std::optional<SymmetricMatrix> SignalPlusNoiseModel::analytic_fim(
    std::span<const double> theta) const {
  return spn_analytic_fim(*this, theta);
}

SymmetricMatrix SignalPlusNoiseModel::reference_sigma(std::size_t d) {
  SymmetricMatrix s(d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) s.set(a, b, a == b ? 2.0 : 0.5);
  return s;
}

std::vector<SymmetricMatrix> signal_plus_noise_covariances(std::size_t n, std::uint64_t seed,
                                                           std::size_t d) {
  if (n == 0) throw DimensionError("signal_plus_noise_covariances: n must be positive");
  RandomStream rng(seed, 0, StreamPurpose::Setup);
  std::vector<double> u(d * d);
  for (double& x : u) x = rng.uniform01();
  SymmetricMatrix utu(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += u[r * d + a] * u[r * d + b];
      utu.set(a, b, s);
    }
  }
  std::vector<SymmetricMatrix> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.push_back(std::sqrt(static_cast<double>(i)) * utu);
  return out;
}

std::shared_ptr<const SignalPlusNoiseModel> spn_model(std::vector<double> mu, SymmetricMatrix sigma,
                                                      std::vector<SymmetricMatrix> noise_covs) {
  return std::make_shared<const SignalPlusNoiseModel>(std::move(mu), std::move(sigma),
                                                      std::move(noise_covs));
}

SymmetricMatrix spn_analytic_fim(const SignalPlusNoiseModel& model, std::span<const double> theta) {
  if (theta.size() != model.parameter_dim()) {
    throw DimensionError("spn_analytic_fim: theta length does not match the model");
  }
  const std::size_t d = model.datum_dim();
  const std::size_t p = model.parameter_dim();
  constexpr std::size_t kM = SmallSpd::kMax;

  // Positions carried by each covariance coordinate's basis matrix E_ab.
  struct Coord {
    std::size_t a, b;
  };
  std::vector<Coord> coords;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) coords.push_back({a, b});

  SymmetricMatrix fim(p);
  for (std::size_t t = 0; t < model.size(); ++t) {
    SmallSpd s;
    load_covariance(d, theta, model.noise_covariances()[t], t, s);
    std::array<double, kM * kM> w{};
    s.inverse(w);
    auto W = [&](std::size_t i, std::size_t j) { return w[i * kM + j]; };

    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) fim.set(a, b, fim(a, b) + W(a, b));

    // tr(W E_ab W E_cd) = sum over (i,j) in E_ab, (k,l) in E_cd of W_jk W_li.
    for (std::size_t x = 0; x < coords.size(); ++x) {
      for (std::size_t y = x; y < coords.size(); ++y) {
        const auto [a, b] = coords[x];
        const auto [c, e] = coords[y];
        std::array<std::pair<std::size_t, std::size_t>, 2> pos_ab{{{a, b}, {b, a}}};
        std::array<std::pair<std::size_t, std::size_t>, 2> pos_cd{{{c, e}, {e, c}}};
        const std::size_t n_ab = (a == b) ? 1 : 2;
        const std::size_t n_cd = (c == e) ? 1 : 2;
        double tr = 0.0;
        for (std::size_t q = 0; q < n_ab; ++q)
          for (std::size_t r = 0; r < n_cd; ++r)
            tr += W(pos_ab[q].second, pos_cd[r].first) * W(pos_cd[r].second, pos_ab[q].first);
        const std::size_t jx = d + x;
        const std::size_t jy = d + y;
        fim.set(jx, jy, fim(jx, jy) + 0.5 * tr);
      }
    }
  }
  return fim;
}

// ---------------------------------------------------------------------------
// Mixture

MixtureModel::MixtureModel(std::vector<double> theta, std::size_t n)
    : theta_(std::move(theta)), n_(n) {
  if (theta_.size() != 5) throw DimensionError("mixture_model: theta must have 5 entries");
  if (n_ == 0) throw DimensionError("mixture_model: n must be positive");
  for (double v : theta_)
    if (!std::isfinite(v)) throw ValidationError("mixture_model: theta has non-finite entries");
  if (!(theta_[0] > 0.0 && theta_[0] < 1.0)) {
    throw ValidationError("mixture_model: lambda must lie in (0, 1)");
  }
  if (!(theta_[2] > 0.0) || !(theta_[4] > 0.0)) {
    throw ValidationError("mixture_model: component variances must be positive");
  }
}

std::vector<std::string> MixtureModel::parameter_names() const {
  return {"lambda", "mu1", "var1", "mu2", "var2"};
}

void MixtureModel::sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                                      PseudoDataset& out) const {
  check_theta(theta);
  if (out.n != n_ || out.datum_dim != 1) out = PseudoDataset(n_, 1);
  const double sd1 = std::sqrt(theta[2]);
  const double sd2 = std::sqrt(theta[4]);
  for (std::size_t t = 0; t < n_; ++t) {
    const bool first = rng.uniform01() < theta[0];
    const double w = rng.standard_normal();
    out.values[t] = first ? theta[1] + sd1 * w : theta[3] + sd2 * w;
  }
}

double MixtureModel::log_density(std::span<const double> theta, std::size_t,
                                 std::span<const double> z) const {
  const double f =
      theta[0] * normal_pdf(z[0], theta[1], theta[2]) + (1.0 - theta[0]) * normal_pdf(z[0], theta[3], theta[4]);
  return std::log(f);
}

void MixtureModel::grad_per_datum(std::span<const double> theta, std::size_t,
                                  std::span<const double> z, std::span<double> out) const {
  const double lambda = theta[0];
  const double mu1 = theta[1], var1 = theta[2];
  const double mu2 = theta[3], var2 = theta[4];
  const double phi1 = normal_pdf(z[0], mu1, var1);
  const double phi2 = normal_pdf(z[0], mu2, var2);
  const double f = lambda * phi1 + (1.0 - lambda) * phi2;
  const double w1 = lambda * phi1 / f;
  const double w2 = (1.0 - lambda) * phi2 / f;
  const double e1 = z[0] - mu1;
  const double e2 = z[0] - mu2;
  out[0] = (phi1 - phi2) / f;
  out[1] = w1 * e1 / var1;
  out[2] = w1 * (e1 * e1 - var1) / (2.0 * var1 * var1);
  out[3] = w2 * e2 / var2;
  out[4] = w2 * (e2 * e2 - var2) / (2.0 * var2 * var2);
}

std::shared_ptr<const MixtureModel> mixture_model(std::vector<double> theta, std::size_t n) {
  return std::make_shared<const MixtureModel>(std::move(theta), n);
}

// ---------------------------------------------------------------------------
// Quadratic

QuadraticModel::QuadraticModel(SymmetricMatrix a, std::size_t n, std::vector<double> nominal)
    : a_(std::move(a)), n_(n), nominal_(std::move(nominal)) {
  if (n_ == 0) throw DimensionError("quadratic_model: n must be positive");
  require_spd(a_, "quadratic_model: A");
  if (nominal_.empty()) {
    nominal_.resize(a_.dim());
    for (std::size_t j = 0; j < a_.dim(); ++j) nominal_[j] = static_cast<double>(j + 1);
  }
  if (nominal_.size() != a_.dim()) throw DimensionError("quadratic_model: nominal theta length");
}

std::vector<std::string> QuadraticModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < a_.dim(); ++j) names.push_back("theta" + std::to_string(j + 1));
  return names;
}

void QuadraticModel::sample_pseudo_data(std::span<const double>, RandomStream&,
                                        PseudoDataset& out) const {
  if (out.n != n_ || out.datum_dim != 1) out = PseudoDataset(n_, 1);
  std::fill(out.values.begin(), out.values.end(), 0.0);
}

double QuadraticModel::log_density(std::span<const double> theta, std::size_t,
                                   std::span<const double>) const {
  double s = 0.0;
  for (std::size_t j = 0; j < a_.dim(); ++j)
    for (std::size_t l = 0; l < a_.dim(); ++l) s += theta[j] * a_(j, l) * theta[l];
  return -0.5 * s;
}

void QuadraticModel::grad_per_datum(std::span<const double> theta, std::size_t,
                                    std::span<const double>, std::span<double> out) const {
  for (std::size_t j = 0; j < a_.dim(); ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < a_.dim(); ++l) s += a_(j, l) * theta[l];
    out[j] = -s;
  }
}

std::optional<SymmetricMatrix> QuadraticModel::analytic_hessian(std::span<const double>,
                                                                const PseudoDataset&) const {
  return -static_cast<double>(n_) * a_;
}

std::optional<SymmetricMatrix> QuadraticModel::analytic_fim(std::span<const double>) const {
  return static_cast<double>(n_) * a_;
}

std::shared_ptr<const QuadraticModel> quadratic_model(SymmetricMatrix a, std::size_t n,
                                                      std::vector<double> nominal) {
  return std::make_shared<const QuadraticModel>(std::move(a), n, std::move(nominal));
}

// ---------------------------------------------------------------------------
// Scalar Gaussian

ScalarGaussianModel::ScalarGaussianModel(double mu, double var, std::size_t n, bool variance_known)
    : mu_(mu), var_(var), n_(n), known_(variance_known) {
  if (n_ == 0) throw DimensionError("scalar_gaussian_model: n must be positive");
  if (!(var_ > 0.0)) throw ValidationError("scalar_gaussian_model: variance must be positive");
}

std::vector<double> ScalarGaussianModel::nominal_theta() const {
  if (known_) return {mu_};
  return {mu_, var_};
}

std::vector<std::string> ScalarGaussianModel::parameter_names() const {
  if (known_) return {"mu"};
  return {"mu", "var"};
}

void ScalarGaussianModel::sample_pseudo_data(std::span<const double> theta, RandomStream& rng,
                                             PseudoDataset& out) const {
  check_theta(theta);
  if (out.n != n_ || out.datum_dim != 1) out = PseudoDataset(n_, 1);
  const double sd = std::sqrt(known_ ? var_ : theta[1]);
  for (std::size_t t = 0; t < n_; ++t) out.values[t] = theta[0] + sd * rng.standard_normal();
}

double ScalarGaussianModel::log_density(std::span<const double> theta, std::size_t,
                                        std::span<const double> z) const {
  const double var = known_ ? var_ : theta[1];
  const double e = z[0] - theta[0];
  return -0.5 * (kLog2Pi + std::log(var) + e * e / var);
}

void ScalarGaussianModel::grad_per_datum(std::span<const double> theta, std::size_t,
                                         std::span<const double> z, std::span<double> out) const {
  const double var = known_ ? var_ : theta[1];
  const double e = z[0] - theta[0];
  out[0] = e / var;
  if (!known_) out[1] = (e * e - var) / (2.0 * var * var);
}

std::optional<SymmetricMatrix> ScalarGaussianModel::analytic_hessian(
    std::span<const double> theta, const PseudoDataset& data) const {
  SymmetricMatrix h(parameter_dim());
  const double var = known_ ? var_ : theta[1];
  for (std::size_t t = 0; t < data.n; ++t) {
    const double e = data.values[t] - theta[0];
    h.set(0, 0, h(0, 0) - 1.0 / var);
    if (!known_) {
      h.set(0, 1, h(0, 1) - e / (var * var));
      h.set(1, 1, h(1, 1) + 0.5 / (var * var) - e * e / (var * var * var));
    }
  }
  return h;
}

std::optional<SymmetricMatrix> ScalarGaussianModel::analytic_fim(
    std::span<const double> theta) const {
  const double var = known_ ? var_ : theta[1];
  const double n = static_cast<double>(n_);
  if (known_) return n * SymmetricMatrix::identity(1) * (1.0 / var);
  const std::vector<double> diag{n / var, n / (2.0 * var * var)};
  return SymmetricMatrix::diagonal(diag);
}

std::shared_ptr<const ScalarGaussianModel> scalar_gaussian_model(double mu, double var,
                                                                 std::size_t n,
                                                                 bool variance_known) {
  return std::make_shared<const ScalarGaussianModel>(mu, var, n, variance_known);
}

}  // namespace spfim
