#pragma once

#include <complex>
#include <cstdint>

namespace boxplus {

// Deterministic random stream (xoshiro256++ state seeded through SplitMix64).
// Gaussians come from cartesian Box-Muller so that identical seeds give
// identical bytes on every platform; std::normal_distribution does not
// guarantee that across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // uniform on [0, 1)
  double next_double();

  // standard normal N(0, 1)
  double next_gaussian();

  // complex gaussian with E|z|^2 = 1 (real and imaginary parts N(0, 1/2))
  std::complex<double> next_complex_gaussian();

  std::uint64_t initial_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double cached_gaussian_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Counter scheme for fanning a master seed out to independent per-trial
// streams: stream(master, tag, index). `tag` identifies the experiment or
// sub-experiment, `index` the trial. Changing trial order never changes the
// stream a trial sees.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);
RngStream derive_stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

// FNV-1a of a label, for readable experiment tags.
std::uint64_t tag_from_label(const char* label);

}  // namespace boxplus
