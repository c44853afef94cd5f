#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace mlcvm {

// Seeded generator with platform-independent derived distributions.
//
// std::mt19937_64 output is fixed by the standard, but the standard
// distributions are not, so uniform reals, bounded integers and normals are
// computed here: 53-bit uniforms, rejection-sampled integers and the
// Marsaglia polar method for Gaussians.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  // Normal(mean, stddev^2).
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::span<T> items) {
    // Fisher-Yates, high index down.
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer over (base, stream); used to give independent
// streams to epochs, sub-corpora, languages and labels.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a(std::string_view text);

}  // namespace mlcvm
