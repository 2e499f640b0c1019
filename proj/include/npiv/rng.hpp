#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace npiv {

//! SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Hashes an ordered tuple of integers into a single 64-bit key.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts)
{
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) {
    h = mix64(h ^ mix64(p));
  }
  return h;
}

//! Counter-based generator: draw i is mix64(key + i * golden). A stream is
//! fully determined by its key, so streams keyed by (seed, replication,
//! purpose) are independent of scheduling. Satisfies
//! UniformRandomBitGenerator.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive_key({seed, stream})) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace npiv
