#include "spfim/random.hpp"

namespace spfim {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t index, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    purpose};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : engine_(seeded_engine(seed, 0, 0)) {}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose)
    : engine_(seeded_engine(seed, index, static_cast<std::uint32_t>(purpose))) {}

double RandomStream::uniform01() { return unit_(engine_); }

double RandomStream::uniform(double a, double b) { return a + (b - a) * unit_(engine_); }

double RandomStream::standard_normal() { return normal_(engine_); }

double RandomStream::bernoulli_pm1() {
  if (bits_left_ == 0) {
    bits_ = engine_();
    bits_left_ = 64;
  }
  const double out = (bits_ & 1u) ? 1.0 : -1.0;
  bits_ >>= 1;
  --bits_left_;
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace spfim
