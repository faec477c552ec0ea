#pragma once

#include <array>
#include <cstdint>

namespace gsr {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/**
 * Counter-based uniform stream keyed by (seed, stream id).
 *
 * Draw k of stream i is a pure function of (seed, i, k), so replications can
 * run in any order or on any thread and still see the same numbers.
 */
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_id_(stream_id) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t draws() const noexcept { return draw_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t draw_ = 0;
};

}  // namespace gsr
