#include "spfim/perturbation.hpp"

#include <cmath>

#include "spfim/errors.hpp"

namespace spfim {

PerturbationSpec PerturbationSpec::bernoulli() {
  return PerturbationSpec(PerturbationKind::BernoulliPM1, 1.0, 1.0, 1.0);
}

PerturbationSpec PerturbationSpec::segmented_uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b))) {
    throw ValidationError("segmented_uniform: bounds must be finite");
  }
  if (!(a > 0.0)) {
    throw ValidationError("segmented_uniform: lower bound must be > 0 (E|1/delta| is infinite)");
  }
  if (!(b > a)) throw ValidationError("segmented_uniform: requires a < b");
  // E[d^2] * E[1/d^2] for |d| ~ U(a, b).
  const double second = (b * b * b - a * a * a) / (3.0 * (b - a));
  const double inv_second = 1.0 / (a * b);
  return PerturbationSpec(PerturbationKind::SegmentedUniform, a, b, second * inv_second);
}

std::string PerturbationSpec::name() const {
  return kind_ == PerturbationKind::BernoulliPM1 ? "bernoulli" : "segmented_uniform";
}

void sample_perturbation_into(const PerturbationSpec& spec, std::size_t p, RandomStream& rng,
                              PerturbationVector& out) {
  if (p == 0) throw DimensionError("sample_perturbation: p must be positive");
  out.delta.resize(p);
  out.delta_inv.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double d = spec.draw(rng);
    out.delta[j] = d;
    out.delta_inv[j] = 1.0 / d;
  }
}

PerturbationVector sample_perturbation(const PerturbationSpec& spec, std::size_t p,
                                       RandomStream& rng) {
  PerturbationVector v;
  sample_perturbation_into(spec, p, rng, v);
  return v;
}

std::vector<PerturbationVector> sample_independent_perturbations(const PerturbationSpec& spec,
                                                                 std::size_t p, std::size_t n,
                                                                 RandomStream& rng) {
  if (n == 0) throw DimensionError("sample_independent_perturbations: n must be positive");
  std::vector<PerturbationVector> out(n);
  for (auto& v : out) sample_perturbation_into(spec, p, rng, v);
  return out;
}

}  // namespace spfim
