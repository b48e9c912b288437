#include "spfim/accumulator.hpp"

#include <cmath>

#include "spfim/errors.hpp"

namespace spfim {

VarianceAccumulator::VarianceAccumulator(std::size_t dim)
    : mean_(dim, 0.0), m2_(dim, 0.0), m3_(dim, 0.0), m4_(dim, 0.0) {}

void VarianceAccumulator::push(std::span<const double> x) {
  if (x.size() != dim()) throw DimensionError("VarianceAccumulator::push: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * (n - 1.0);
    mean_[i] += delta_n;
    m4_[i] += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_[i] -
              4.0 * delta_n * m3_[i];
    m3_[i] += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_[i];
    m2_[i] += term1;
  }
}

void VarianceAccumulator::merge(const VarianceAccumulator& other) {
  // A default-constructed accumulator has no dimension yet and adopts any.
  if (dim() != 0 && other.dim() != 0 && other.dim() != dim()) {
    throw DimensionError("merge_accumulators: dimension mismatch");
  }
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double d = other.mean_[i] - mean_[i];
    const double d2 = d * d;
    const double m2a = m2_[i], m2b = other.m2_[i];
    const double m3a = m3_[i], m3b = other.m3_[i];
    m4_[i] += other.m4_[i] + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
              6.0 * d2 * (na * na * m2b + nb * nb * m2a) / (n * n) +
              4.0 * d * (na * m3b - nb * m3a) / n;
    m3_[i] += m3b + d * d2 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * m2b - nb * m2a) / n;
    m2_[i] += m2b + d2 * na * nb / n;
    mean_[i] = (na * mean_[i] + nb * other.mean_[i]) / n;
  }
  count_ += other.count_;
}

std::vector<double> VarianceAccumulator::variance() const {
  std::vector<double> out(dim(), 0.0);
  if (count_ < 2) return out;
  const double denom = static_cast<double>(count_ - 1);
  for (std::size_t i = 0; i < dim(); ++i) out[i] = m2_[i] / denom;
  return out;
}

std::vector<double> VarianceAccumulator::variance_standard_error() const {
  std::vector<double> out(dim(), 0.0);
  if (count_ < 4) return out;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < dim(); ++i) {
    const double s2 = m2_[i] / (n - 1.0);
    const double mu4 = m4_[i] / n;
    const double v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    out[i] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return out;
}

VarianceAccumulator merge_accumulators(const VarianceAccumulator& a, const VarianceAccumulator& b) {
  if (a.count() != 0 && b.count() != 0 && a.dim() != b.dim()) {
    throw DimensionError("merge_accumulators: dimension mismatch");
  }
  VarianceAccumulator out = a;
  out.merge(b);
  return out;
}

}  // namespace spfim
