#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

namespace temperflow {

// splitmix64 finalizer (Steele, Lea, Flood 2014); also used as a key mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based 64-bit generator. One `Rng` is a stream; sub-streams are
// derived from (seed, a, b, c) keys so that per-(iteration, particle) draws
// do not depend on execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by Box-Muller; two uniforms per draw, no caching, so the
  // draw count per event is fixed.
  double next_gaussian() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Eigen::VectorXd gaussian_vector(int d) {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z[i] = next_gaussian();
    return z;
  }

 private:
  std::uint64_t state_;
};

// Purpose tags keep logically distinct draws on distinct sub-streams.
enum class RngTag : std::uint64_t {
  init = 1,
  move = 2,
  resample = 3,
  reference = 4,
};

inline Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, RngTag tag) {
  std::uint64_t h = mix64(seed ^ 0xA0761D6478BD642Full);
  h = mix64(h ^ (a + 0xE7037ED1A0B428DBull));
  h = mix64(h ^ (b + 0x8EBC6AF09C88C6E3ull));
  h = mix64(h ^ (static_cast<std::uint64_t>(tag) + 0x589965CC75374CC3ull));
  return Rng(h);
}

}  // namespace temperflow
