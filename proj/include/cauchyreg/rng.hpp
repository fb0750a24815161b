#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace cauchyreg {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Order-sensitive 64-bit hash combiner used for stream and cell keys.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return detail::splitmix64(seed ^ detail::splitmix64(value + detail::kGolden));
}

/// Deterministic random stream keyed by (master_seed, stream_index, lane).
///
/// The generator state is derived by hashing the key, so stream r of an
/// experiment is available without drawing streams 0..r-1, and the same key
/// produces the same variates regardless of thread count. Each stream is a
/// xoshiro256** generator; normals come from the Marsaglia polar method
/// (no trigonometric calls), cached in pairs.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index, std::uint64_t lane = 0)
      : master_seed_(master_seed), stream_index_(stream_index), lane_(lane) {
    std::uint64_t s = hash_combine(hash_combine(master_seed, stream_index), lane);
    for (auto& word : state_) {
      s += detail::kGolden;
      word = detail::splitmix64(s);
    }
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }
  std::uint64_t lane() const { return lane_; }

  // Independent stream for an auxiliary source of randomness (volatility
  // chain, jumps) belonging to the same replication.
  RngStream substream(std::uint64_t lane) const {
    return RngStream(master_seed_, stream_index_, hash_combine(lane_, lane + 1));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Poisson draw by sequential inversion; intended for small means
  // (jump counts per observation interval).
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson mean must be nonnegative");
    if (mean == 0.0) return 0;
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t lane_;
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Pair of standard normals with correlation rho: the second draw is
/// rho * first + sqrt(1 - rho^2) * independent normal.
inline std::pair<double, double> draw_correlated_normals(RngStream& stream, double rho) {
  if (!(std::fabs(rho) <= 1.0)) throw std::domain_error("correlation must lie in [-1, 1]");
  const double first = stream.normal();
  const double independent = stream.normal();
  return {first, rho * first + std::sqrt(1.0 - rho * rho) * independent};
}

}  // namespace cauchyreg
