#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace truecal {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th output of stream (seed, stream) is a pure
// function of (seed, stream, i), so trials can be evaluated in any order or in
// parallel and still reproduce bit-for-bit. Satisfies
// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t counter() const noexcept { return counter_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }

  // Uniform integer in [0, bound) by rejection, so no modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - (max() % bound);
    std::uint64_t x = 0;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Index drawn from a probability vector (assumed to sum to 1).
  std::size_t categorical(std::span<const double> probs) noexcept {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t r = 0; r < probs.size(); ++r) {
      acc += probs[r];
      if (u < acc) return r;
    }
    // Rounding left u above the running total: fall back to the last class
    // with positive mass.
    for (std::size_t r = probs.size(); r-- > 0;) {
      if (probs[r] > 0.0) return r;
    }
    return probs.size() - 1;
  }

  // Flat Dirichlet(1, ..., 1) draw via normalized exponentials.
  std::vector<double> dirichlet_flat(std::size_t k) noexcept {
    std::vector<double> out(k);
    double total = 0.0;
    for (auto& x : out) {
      x = -std::log(uniform_open_zero());
      total += x;
    }
    for (auto& x : out) x /= total;
    return out;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace truecal
