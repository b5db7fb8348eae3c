#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace gazkit {

// Platform-independent draws on top of any 64-bit URBG; the std
// distributions are implementation-defined, which would break seeded
// reproducibility across standard libraries.
using Rng = std::mt19937_64;

template <class Urbg>
double uniform01(Urbg& rng) {
  static_assert(Urbg::max() - Urbg::min() == ~std::uint64_t{0}, "needs a full 64-bit generator");
  return static_cast<double>((rng() - Urbg::min()) >> 11) * 0x1.0p-53;
}

template <class Urbg>
double uniform(Urbg& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

template <class Urbg>
std::size_t uniform_index(Urbg& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

template <class Urbg>
bool bernoulli(Urbg& rng, double p) {
  return uniform01(rng) < p;
}

}  // namespace gazkit
