#pragma once

#include <cstdint>
#include <cmath>

namespace confadj::rng {

inline constexpr std::uint64_t golden64 = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer: a bijective mix with full avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Counter-based generator: every variate is a pure function of
// (seed, stream, rep, slot).  Draws are reproducible regardless of
// evaluation order or thread count, and independent streams never collide
// because the key itself is mixed before use.
//
// Slot widths per variate: uniform/exponential 1, normal 2 (Box–Muller
// pair).  Callers own the slot arithmetic.
class stream {
 public:
  stream(std::uint64_t seed, std::uint32_t stream_id, std::uint64_t rep = 0)
      : key_(mix64(mix64(seed ^ (golden64 * (rep + 1))) +
                   (stream_id + 1) * 0xD1B54A32D192ED03ull)) {}

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform(std::uint64_t slot) const {
    const std::uint64_t bits = mix64(key_ + golden64 * (slot + 1));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal; consumes slots {slot, slot+1}.
  double normal(std::uint64_t slot) const {
    const double u1 = uniform(slot);
    const double u2 = uniform(slot + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Exponential with unit rate.
  double exponential(std::uint64_t slot) const {
    return -std::log(uniform(slot));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

} // namespace confadj::rng
