#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace covertree {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A generator is fully determined by a 64-bit key and a 64-bit stream id;
/// the 128-bit counter is (block index, stream id). Two generators with the
/// same key and different stream ids produce independent sequences, so any
/// replica can be regenerated without replaying the others.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 2) refill();
    return buffer_[pos_++];
  }

  /// Raw block function.
  static Block block(Block counter, Key key) noexcept;

  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t blocks_used() const noexcept { return block_index_; }

 private:
  void refill() noexcept;

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
};

using Rng = Philox4x32;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream id for (kind, a, b, c); e.g. ("tstar", n, replica).
constexpr std::uint64_t stream_id(std::string_view kind, std::uint64_t a = 0,
                                  std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char ch : kind) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  h = mix64(h ^ mix64(a));
  h = mix64(h ^ mix64(b + 0x632BE59BD9B4E019ull));
  return mix64(h ^ mix64(c + 0x85157AF5ull));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) noexcept {
  return Rng(mix64(master_seed), stream);
}

}  // namespace covertree
