#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace concord {

// Deterministic splitmix64 generator. Kept self-contained so that results
// are reproducible across standard-library implementations; std::*
// distributions make no such guarantee.
class rng {
 public:
  explicit rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream derived from (master, stream_id). Streams with
  // different ids are decorrelated by the splitmix finalizer.
  static rng derived(std::uint64_t master, std::uint64_t stream_id) {
    rng g(master ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    g.next();  // burn one output to separate nearby seeds
    return g;
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r < bound) return r % n;
    }
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t int_range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller; second value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  // m distinct indices sampled uniformly from [0, n), returned sorted.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

  // Index sampled proportionally to non-negative weights. Falls back to the
  // first positive weight if rounding exhausts the accumulator.
  std::size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0 && weights[i] > 0.0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return 0;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace concord
