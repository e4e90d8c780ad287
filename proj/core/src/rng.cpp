#include "mlmcq/rng.hpp"

#include "mlmcq/errors.hpp"
#include "mlmcq/normal.hpp"

namespace mlmcq {
namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

constexpr std::uint64_t kMaxSample = std::uint64_t{1} << 48;
constexpr std::uint32_t kMaxLevel = 1u << 16;

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, StreamId id) : seed_(seed), id_(id) {
  if (id.sample >= kMaxSample) throw InvalidArgument("stream sample index must be < 2^48");
  if (id.level >= kMaxLevel) throw InvalidArgument("stream level must be < 2^16");
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  counter_ = {0u, static_cast<std::uint32_t>(id.sample),
              static_cast<std::uint32_t>(id.sample >> 32) | (id.level << 16), id.replicate};
}

void RngStream::refill() noexcept {
  counter_[0] = block_++;
  const auto out = Philox4x32::generate(counter_, key_);
  buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
  buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
  buffered_ = 2;
}

std::uint64_t RngStream::next_u64() noexcept {
  if (buffered_ == 0) refill();
  ++draws_;
  return buffer_[2 - buffered_--];
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double RngStream::normal() noexcept { return inverse_normal_cdf(uniform()); }

std::pair<double, double> RngStream::normal_pair() noexcept {
  const double u1 = normal();
  const double u2 = normal();
  return {u1, u2};
}

}  // namespace mlmcq
