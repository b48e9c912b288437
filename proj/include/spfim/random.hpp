#pragma once

#include <cstdint>
#include <random>

namespace spfim {

// Independent sub-stream families hanging off one experiment seed.
enum class StreamPurpose : std::uint32_t {
  PseudoData = 1,
  Perturbation = 2,
  Oracle = 3,
  Setup = 4,
};

// A caller-owned random stream. Streams are derived from (seed, index,
// purpose) rather than split sequentially, so the draws seen by replicate i
// do not depend on which worker runs it or on how many replicates ran first.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose);

  double uniform01();
  double uniform(double a, double b);
  double standard_normal();
  // +1 or -1 with equal probability.
  double bernoulli_pm1();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace spfim
