#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spfim/errors.hpp"

namespace spfim {

class RandomStream;

// Symmetric p x p matrix stored as its upper triangle, row-major:
// (0,0) (0,1) ... (0,p-1) (1,1) ... (p-1,p-1).
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim);

  static SymmetricMatrix from_packed(std::span<const double> packed, std::size_t dim);
  static SymmetricMatrix identity(std::size_t dim);
  static SymmetricMatrix diagonal(std::span<const double> diag);
  // Takes the upper triangle of a dense row-major p x p array.
  static SymmetricMatrix from_dense_upper(std::span<const double> dense, std::size_t dim);

  static constexpr std::size_t packed_size(std::size_t dim) { return dim * (dim + 1) / 2; }
  static constexpr std::size_t packed_index(std::size_t dim, std::size_t j, std::size_t l) {
    if (j > l) {
      const std::size_t t = j;
      j = l;
      l = t;
    }
    return j * (2 * dim - j + 1) / 2 + (l - j);
  }

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t j, std::size_t l) const { return packed_[index(j, l)]; }
  double get(std::size_t j, std::size_t l) const;
  void set(std::size_t j, std::size_t l, double value);

  std::span<const double> packed() const { return packed_; }
  std::span<double> packed_mut() { return packed_; }

  std::vector<double> to_dense() const;
  std::vector<double> diagonal_values() const;
  bool all_finite() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator-=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double scale);

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend SymmetricMatrix operator*(SymmetricMatrix a, double s) { return a *= s; }
  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t index(std::size_t j, std::size_t l) const {
    return packed_index(dim_, j, l);
  }

  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

// Lower-triangular Cholesky factor, row-major lower triangle:
// (0,0) (1,0) (1,1) (2,0) ...
class LowerTriangularFactor {
 public:
  LowerTriangularFactor() = default;
  LowerTriangularFactor(std::size_t dim, std::vector<double> entries);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return j <= i ? entries_[i * (i + 1) / 2 + j] : 0.0;
  }
  std::span<const double> entries() const { return entries_; }

  // L * L^T.
  SymmetricMatrix reconstruct() const;
  // out = L * w
  void multiply(std::span<const double> w, std::span<double> out) const;
  // Solves (L L^T) x = b in place.
  void solve_in_place(std::span<double> b) const;
  double log_determinant() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

SymmetricMatrix sym_from_packed(std::span<const double> packed, std::size_t dim);

// Largest eigenvalue magnitude, via cyclic Jacobi rotations on a dense copy.
double spectral_norm(const SymmetricMatrix& m);

// All eigenvalues in ascending order (same Jacobi solver).
std::vector<double> symmetric_eigenvalues(const SymmetricMatrix& m);

LowerTriangularFactor cholesky(const SymmetricMatrix& m);

// mean + L * w with w drawn i.i.d. standard normal from the stream.
std::vector<double> mvn_sample(std::span<const double> mean, const LowerTriangularFactor& chol,
                               RandomStream& rng);
void mvn_sample_into(std::span<const double> mean, const LowerTriangularFactor& chol,
                     RandomStream& rng, std::span<double> out);

double frobenius_norm(const SymmetricMatrix& m);

}  // namespace spfim
