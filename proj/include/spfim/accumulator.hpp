#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spfim {

// Element-wise one-pass moment accumulator (Welford updates plus the
// pairwise merge rules for central moments up to order four). Each element
// of a pushed vector is tracked independently.
class VarianceAccumulator {
 public:
  VarianceAccumulator() = default;
  explicit VarianceAccumulator(std::size_t dim);

  void push(std::span<const double> x);
  void merge(const VarianceAccumulator& other);

  std::size_t dim() const { return mean_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  // Sum of squared deviations from the running mean.
  const std::vector<double>& sum_squares() const { return m2_; }

  // Unbiased sample variance (zero when count < 2).
  std::vector<double> variance() const;
  // Standard error of the sample variance, from the fourth central moment.
  std::vector<double> variance_standard_error() const;

  friend bool operator==(const VarianceAccumulator&, const VarianceAccumulator&) = default;

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<double> m3_;
  std::vector<double> m4_;
};

VarianceAccumulator merge_accumulators(const VarianceAccumulator& a, const VarianceAccumulator& b);

}  // namespace spfim
