#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace brw {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A generator is identified by a 64-bit key and a 64-bit stream id; the
/// remaining 64 bits of the 128-bit counter enumerate output blocks.  Two
/// generators with distinct (key, stream) pairs never share a counter value,
/// so substreams derived from one master seed are statistically independent
/// and can be handed to workers in any order.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x32(std::uint64_t key = 0, std::uint64_t stream = 0) noexcept;

  result_type operator()() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  /// One raw 4x32 block for counter `ctr` and key `key`.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

using Rng = Philox4x32;

/// Substream `index` of master seed `seed`.  Replicate i of any experiment
/// draws from substream(seed, i) only, which is what makes results
/// independent of the worker count.
inline Rng substream(std::uint64_t seed, std::uint64_t index) noexcept { return Rng(seed, index); }

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng) noexcept;

/// Uniform integer in [0, n); n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) noexcept;

inline constexpr std::string_view kRngDescription =
    "philox4x32-10; key = master seed, counter[2..3] = replicate index";

}  // namespace brw
