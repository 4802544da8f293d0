#ifndef FNLS_RNG_HPP
#define FNLS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fnls {

/// Deterministic per-sample random stream.
///
/// Stream derivation contract: the generator state is produced from
/// (master_seed, stream_id) alone, by running SplitMix64 over
/// master_seed ^ (stream_id + 1) * 0x9E3779B97F4A7C15. Sample index i of a
/// run always uses stream_id = phase_offset + i, so every draw is a pure
/// function of (master_seed, stream_id, position) and ensembles reproduce
/// exactly under any worker count or scheduling.
///
/// Core generator: xoshiro256++ (Blackman & Vigna, public domain).
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t x = master_seed ^ ((stream_id + 1) * 0x9E3779B97F4A7C15ULL);
    for (auto& word : state_) word = splitmix64(x);
    // xoshiro must not start at the all-zero state
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair and
  /// caches the second value, so a stream's output sequence is fixed.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]: safe for log
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stream-id bases for the phases of multi-phase experiments, so the same
/// master seed never reuses a stream across phases.
namespace stream_phase {
inline constexpr std::uint64_t samples = 0;
inline constexpr std::uint64_t initial_data = std::uint64_t(1) << 32;
inline constexpr std::uint64_t auxiliary = std::uint64_t(2) << 32;
}  // namespace stream_phase

}  // namespace fnls

#endif
