#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace gaussmc {

// SplitMix64 finalizer. Full avalanche on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Reproducible random stream keyed by (seed, stream id, substream).
///
/// The engine is xoshiro256**; its state is filled from a SplitMix64 sequence
/// started at a key derived by mixing the three identifiers, so streams for
/// different replications need no coordination. Gaussians use the Marsaglia
/// polar method (one cached spare). Indices are drawn by multiply-shift with
/// rejection, which is exactly uniform.
///
/// A stream is a value: copying it forks an identical sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t substream() const noexcept { return substream_; }

  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1) with 53 random bits.
  double next_uniform() noexcept;

  double next_gaussian() noexcept;

  // Uniform on {0, ..., d-1}. d must be positive.
  std::size_t next_index(std::size_t d);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t substream_;
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gaussmc
