#include "spfim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spfim/random.hpp"

namespace spfim {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiOffTolerance = 1e-15;

void require_finite(const SymmetricMatrix& m, const char* op) {
  if (!m.all_finite()) {
    throw ValidationError(std::string(op) + ": matrix has non-finite entries");
  }
}

// Cyclic Jacobi on a dense row-major copy; returns the diagonal after
// convergence (unsorted).
std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& m) {
  const std::size_t p = m.dim();
  std::vector<double> a = m.to_dense();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * p + j]; };

  double total = 0.0;
  for (double v : a) total += v * v;
  const double threshold = kJacobiOffTolerance * kJacobiOffTolerance * total;

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (off <= threshold) break;

    for (std::size_t q = 0; q + 1 < p; ++q) {
      for (std::size_t r = q + 1; r < p; ++r) {
        const double apq = at(q, r);
        if (apq == 0.0) continue;
        const double theta = (at(r, r) - at(q, q)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < p; ++k) {
          const double akq = at(k, q);
          const double akr = at(k, r);
          at(k, q) = c * akq - s * akr;
          at(k, r) = s * akq + c * akr;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double aqk = at(q, k);
          const double ark = at(r, k);
          at(q, k) = c * aqk - s * ark;
          at(r, k) = s * aqk + c * ark;
        }
      }
    }
  }

  std::vector<double> eig(p);
  for (std::size_t i = 0; i < p; ++i) eig[i] = at(i, i);
  return eig;
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::size_t dim) : dim_(dim), packed_(packed_size(dim), 0.0) {
  if (dim == 0) throw DimensionError("SymmetricMatrix: dimension must be positive");
}

SymmetricMatrix SymmetricMatrix::from_packed(std::span<const double> packed, std::size_t dim) {
  if (dim == 0) throw DimensionError("sym_from_packed: dimension must be positive");
  if (packed.size() != packed_size(dim)) {
    throw DimensionError("sym_from_packed: packed length " + std::to_string(packed.size()) +
                         " does not match dim " + std::to_string(dim) + " (expected " +
                         std::to_string(packed_size(dim)) + ")");
  }
  SymmetricMatrix m(dim);
  std::copy(packed.begin(), packed.end(), m.packed_.begin());
  if (!m.all_finite()) throw ValidationError("sym_from_packed: non-finite entry");
  return m;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  SymmetricMatrix m(dim);
  for (std::size_t j = 0; j < dim; ++j) m.set(j, j, 1.0);
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix m(diag.size());
  for (std::size_t j = 0; j < diag.size(); ++j) m.set(j, j, diag[j]);
  return m;
}

SymmetricMatrix SymmetricMatrix::from_dense_upper(std::span<const double> dense, std::size_t dim) {
  if (dense.size() != dim * dim) throw DimensionError("from_dense_upper: size mismatch");
  SymmetricMatrix m(dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t l = j; l < dim; ++l) m.set(j, l, dense[j * dim + l]);
  return m;
}

double SymmetricMatrix::get(std::size_t j, std::size_t l) const {
  if (j >= dim_ || l >= dim_) throw DimensionError("SymmetricMatrix::get: index out of range");
  return packed_[index(j, l)];
}

void SymmetricMatrix::set(std::size_t j, std::size_t l, double value) {
  if (j >= dim_ || l >= dim_) throw DimensionError("SymmetricMatrix::set: index out of range");
  packed_[index(j, l)] = value;
}

std::vector<double> SymmetricMatrix::to_dense() const {
  std::vector<double> out(dim_ * dim_);
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t l = 0; l < dim_; ++l) out[j * dim_ + l] = (*this)(j, l);
  return out;
}

std::vector<double> SymmetricMatrix::diagonal_values() const {
  std::vector<double> out(dim_);
  for (std::size_t j = 0; j < dim_; ++j) out[j] = (*this)(j, j);
  return out;
}

bool SymmetricMatrix::all_finite() const {
  return std::all_of(packed_.begin(), packed_.end(), [](double v) { return std::isfinite(v); });
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  if (other.dim_ != dim_) throw DimensionError("SymmetricMatrix: dimension mismatch in +");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] += other.packed_[i];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) {
  if (other.dim_ != dim_) throw DimensionError("SymmetricMatrix: dimension mismatch in -");
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] -= other.packed_[i];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double scale) {
  for (double& v : packed_) v *= scale;
  return *this;
}

LowerTriangularFactor::LowerTriangularFactor(std::size_t dim, std::vector<double> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim * (dim + 1) / 2) {
    throw DimensionError("LowerTriangularFactor: entry count does not match dimension");
  }
}

SymmetricMatrix LowerTriangularFactor::reconstruct() const {
  SymmetricMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += (*this)(i, k) * (*this)(j, k);
      m.set(i, j, s);
    }
  }
  return m;
}

void LowerTriangularFactor::multiply(std::span<const double> w, std::span<double> out) const {
  if (w.size() != dim_ || out.size() != dim_) {
    throw DimensionError("LowerTriangularFactor::multiply: dimension mismatch");
  }
  for (std::size_t i = dim_; i-- > 0;) {
    double s = 0.0;
    const double* row = entries_.data() + i * (i + 1) / 2;
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * w[k];
    out[i] = s;
  }
}

void LowerTriangularFactor::solve_in_place(std::span<double> b) const {
  if (b.size() != dim_) throw DimensionError("LowerTriangularFactor::solve: dimension mismatch");
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= (*this)(i, k) * b[k];
    b[i] = s / (*this)(i, i);
  }
  for (std::size_t i = dim_; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < dim_; ++k) s -= (*this)(k, i) * b[k];
    b[i] = s / (*this)(i, i);
  }
}

double LowerTriangularFactor::log_determinant() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += std::log((*this)(i, i));
  return 2.0 * s;
}

SymmetricMatrix sym_from_packed(std::span<const double> packed, std::size_t dim) {
  return SymmetricMatrix::from_packed(packed, dim);
}

double spectral_norm(const SymmetricMatrix& m) {
  require_finite(m, "spectral_norm");
  double best = 0.0;
  for (double e : jacobi_eigenvalues(m)) best = std::max(best, std::abs(e));
  return best;
}

std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& m) {
  require_finite(m, "symmetric_eigenvalues");
  auto eig = jacobi_eigenvalues(m);
  std::sort(eig.begin(), eig.end());
  return eig;
}

LowerTriangularFactor cholesky(const SymmetricMatrix& m) {
  require_finite(m, "cholesky");
  const std::size_t p = m.dim();
  std::vector<double> l(p * (p + 1) / 2, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return l[i * (i + 1) / 2 + j]; };
  for (std::size_t j = 0; j < p; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= at(j, k) * at(j, k);
    if (!(d > 0.0)) {
      throw NotPositiveDefiniteError("cholesky: non-positive pivot " + std::to_string(d) +
                                     " at column " + std::to_string(j));
    }
    const double djj = std::sqrt(d);
    at(j, j) = djj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
      at(i, j) = s / djj;
    }
  }
  return LowerTriangularFactor(p, std::move(l));
}

std::vector<double> mvn_sample(std::span<const double> mean, const LowerTriangularFactor& chol,
                               RandomStream& rng) {
  std::vector<double> out(mean.size());
  mvn_sample_into(mean, chol, rng, out);
  return out;
}

void mvn_sample_into(std::span<const double> mean, const LowerTriangularFactor& chol,
                     RandomStream& rng, std::span<double> out) {
  const std::size_t d = chol.dim();
  if (mean.size() != d || out.size() != d) throw DimensionError("mvn_sample: dimension mismatch");
  // Draw w into out first, then overwrite from the bottom row up.
  for (std::size_t i = 0; i < d; ++i) out[i] = rng.standard_normal();
  chol.multiply(out, out);
  for (std::size_t i = 0; i < d; ++i) out[i] += mean[i];
}

double frobenius_norm(const SymmetricMatrix& m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.dim(); ++j)
    for (std::size_t l = 0; l < m.dim(); ++l) s += m(j, l) * m(j, l);
  return std::sqrt(s);
}

}  // namespace spfim
