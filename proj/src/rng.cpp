#include "gaussmc/rng.hpp"

#include <cmath>

#include "gaussmc/errors.hpp"

namespace gaussmc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream) noexcept
    : seed_(seed), stream_id_(stream_id), substream_(substream) {
  std::uint64_t key = mix64(seed + kGolden);
  key = mix64(key ^ (stream_id * 0xD1B54A32D192ED03ULL + kGolden));
  key = mix64(key ^ (substream * 0x8CB92BA72F3D8DD7ULL + 0x632BE59BD9B4E019ULL));
  for (auto& word : s_) {
    key += kGolden;
    word = mix64(key);
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_uniform() noexcept {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  const auto k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

namespace {
__extension__ typedef unsigned __int128 u128;
}

std::size_t RngStream::next_index(std::size_t d) {
  if (d == 0) throw ArgumentError("next_index: d must be positive");
  const auto range = static_cast<std::uint64_t>(d);
  // Lemire's multiply-shift; reject the low band that would bias the result.
  u128 product = static_cast<u128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      product = static_cast<u128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

}  // namespace gaussmc
