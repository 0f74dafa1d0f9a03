#pragma once

// Counter-based random streams. A stream is a pure function of
// (seed, walker lineage id, step), so the numbers a walker sees do not depend
// on how walkers are scheduled across threads.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bose2d::dmc {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t lineage, std::uint64_t step) noexcept
      : state_(hash_combine(hash_combine(seed, lineage), step)) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal, Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Id of the k-th copy of a walker produced by branching at `step`; copy 0 keeps its parent's id.
inline constexpr std::uint64_t child_lineage(std::uint64_t parent, std::uint64_t step,
                                             std::uint64_t copy) noexcept {
  return copy == 0 ? parent : hash_combine(hash_combine(parent, step), copy);
}

} // namespace bose2d::dmc
