#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spfim/random.hpp"

namespace spfim {

enum class PerturbationKind { BernoulliPM1, SegmentedUniform };

// Distribution of the i.i.d. components of a simultaneous-perturbation
// vector. Both supported kinds are symmetric about zero, bounded, and keep
// E|1/delta| finite.
class PerturbationSpec {
 public:
  static PerturbationSpec bernoulli();
  // Uniform magnitude on [a, b] with a random sign; requires 0 < a < b.
  static PerturbationSpec segmented_uniform(double a, double b);

  PerturbationKind kind() const { return kind_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  // var(delta_l / delta_j) for l != j.
  double ratio_variance() const { return v_; }
  double magnitude_bound() const { return b_; }
  std::string name() const;

  double draw(RandomStream& rng) const {
    if (kind_ == PerturbationKind::BernoulliPM1) return rng.bernoulli_pm1();
    const double mag = rng.uniform(a_, b_);
    return rng.bernoulli_pm1() * mag;
  }

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;

 private:
  PerturbationSpec(PerturbationKind kind, double a, double b, double v)
      : kind_(kind), a_(a), b_(b), v_(v) {}

  PerturbationKind kind_;
  double a_;
  double b_;
  double v_;
};

struct PerturbationVector {
  std::vector<double> delta;
  std::vector<double> delta_inv;

  std::size_t size() const { return delta.size(); }
};

PerturbationVector sample_perturbation(const PerturbationSpec& spec, std::size_t p,
                                       RandomStream& rng);

// Refills an existing vector without reallocating when the size matches.
void sample_perturbation_into(const PerturbationSpec& spec, std::size_t p, RandomStream& rng,
                              PerturbationVector& out);

// One vector per datum index t, drawn in order t = 0..n-1 from the stream.
std::vector<PerturbationVector> sample_independent_perturbations(const PerturbationSpec& spec,
                                                                 std::size_t p, std::size_t n,
                                                                 RandomStream& rng);

}  // namespace spfim
