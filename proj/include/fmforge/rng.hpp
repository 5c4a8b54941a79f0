#pragma once

#include <cmath>
#include <cstdint>

namespace fmforge {

// Named purposes for derived RNG streams. A single master seed plus a
// (purpose, index) pair addresses every random stream in a run, so parallel
// trials and batches stay reproducible regardless of scheduling.
enum class StreamPurpose : std::uint64_t {
  kTrialInit = 1,
  kBatch = 2,
  kTraining = 3,
  kCrossValidation = 4,
  kTest = 5,
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based stream built on splitmix64. Bit-identical output on any
// platform with IEEE-754 doubles; no libstdc++ distribution dependence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamPurpose purpose, std::uint64_t index = 0) {
    std::uint64_t s = master_seed;
    state_ = detail::splitmix64(s);
    s = state_ ^ (static_cast<std::uint64_t>(purpose) * 0xd6e8feb86659fd93ULL);
    state_ = detail::splitmix64(s);
    s = state_ ^ (index * 0xa5a5a5a5a5a5a5a5ULL);
    state_ = detail::splitmix64(s);
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one spare value cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    // avoid log(0)
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable 64-bit tag for logging which stream produced a batch.
inline std::uint64_t stream_tag(std::uint64_t master_seed, StreamPurpose purpose,
                                std::uint64_t index) {
  RngStream s(master_seed, purpose, index);
  return s.next_u64();
}

}  // namespace fmforge
