#pragma once

#include <cstdint>
#include <random>

namespace wildqr {

// splitmix64 finalizer; used to derive independent substream seeds so that
// replicate b of a run seeded with s always sees the same stream regardless
// of thread count or execution order.
std::uint64_t mix64(std::uint64_t v);
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t subindex);

// Standard normal cdf and its inverse (Acklam rational approximation with one
// Halley refinement, accurate to ~1e-15).
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

// Deterministic variate source. Distribution transforms are explicit inverse
// cdf maps, not std::*_distribution, so draws are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed ^ 0x9e3779b97f4a7c15ull)) {}

  // strictly inside (0,1)
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform()); }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace wildqr
