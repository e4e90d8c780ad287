#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace mlmcq {

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Identifies one independent stream under a given seed.
struct StreamId {
  std::uint32_t level = 0;      // < 2^16
  std::uint64_t sample = 0;     // < 2^48
  std::uint32_t replicate = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Counter-based random stream keyed by (seed, level, sample, replicate).
///
/// The Philox key is the 64-bit seed; the counter packs the stream id together
/// with a per-stream block index, so every (seed, id, draw) triple maps to a
/// unique counter. Streams are plain values: copying one forks an identical
/// replay, and no state is shared between streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id);

  /// Next 64 random bits. Each Philox block yields two words.
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal by inverse-CDF transform of uniform().
  double normal() noexcept;
  std::pair<double, double> normal_pair() noexcept;

  /// Number of 64-bit words consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const StreamId& id() const noexcept { return id_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  StreamId id_;
  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::uint64_t draws_ = 0;
};

/// Two standard normals from the stream, in draw order.
inline std::pair<double, double> normal_pair(RngStream& stream) noexcept {
  return stream.normal_pair();
}

}  // namespace mlmcq
