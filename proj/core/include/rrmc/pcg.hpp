#pragma once

// Reversible permuted congruential generator.
//
// The generator is the 128-bit-state / 64-bit-output XSL-RR member of the PCG
// family with the reference default multiplier. Stepping backwards inverts the
// underlying LCG recurrence with a precomputed inverse multiplier, so previous
// values cost exactly as much as next values: one 128-bit multiply, one add and
// one output permutation.
//
// Output convention follows the reference 128-bit engine: next() advances the
// state and permutes the new state; prev() permutes the current state and then
// retreats. A next() followed by prev() therefore returns the same value and
// restores the state bit for bit.

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace rrmc {

__extension__ typedef unsigned __int128 uint128;

constexpr uint128 make_uint128(std::uint64_t high, std::uint64_t low) noexcept {
  return (static_cast<uint128>(high) << 64) | low;
}

constexpr std::uint64_t high_bits(uint128 v) noexcept { return static_cast<std::uint64_t>(v >> 64); }
constexpr std::uint64_t low_bits(uint128 v) noexcept { return static_cast<std::uint64_t>(v); }

/// Inverse of an odd integer modulo 2^B, where B is the bit width of UInt.
///
/// Newton/Hensel lifting: x0 = a is correct modulo 8 for every odd a and each
/// iteration x <- x(2 - ax) doubles the number of correct low bits.
template <typename UInt>
constexpr UInt modular_inverse(UInt a) {
  static_assert(std::is_unsigned_v<UInt> || std::is_same_v<UInt, uint128>);
  if ((a & 1u) == 0) {
    throw std::invalid_argument("modular_inverse: even value has no inverse modulo a power of two");
  }
  UInt x = a;
  for (int i = 0; i < 8 && static_cast<UInt>(a * x) != UInt{1}; ++i) {
    x = static_cast<UInt>(x * static_cast<UInt>(UInt{2} - static_cast<UInt>(a * x)));
  }
  return x;
}

/// Runtime-width variant: inverse of odd `a` modulo 2^bits, bits in [1, 128].
uint128 modular_inverse(uint128 a, unsigned bits);

/// LCG parameters with the precomputed inverse multiplier.
template <typename UInt>
struct BasicLcgParams {
  UInt multiplier;
  UInt increment;
  UInt inverse_multiplier;

  /// Throws std::invalid_argument unless both constants are odd.
  static constexpr BasicLcgParams make(UInt multiplier, UInt increment) {
    if ((multiplier & 1u) == 0 || (increment & 1u) == 0) {
      throw std::invalid_argument("LCG multiplier and increment must both be odd");
    }
    return {multiplier, increment, modular_inverse<UInt>(multiplier)};
  }

  constexpr UInt advance(UInt state) const noexcept {
    return static_cast<UInt>(multiplier * state + increment);
  }
  constexpr UInt retreat(UInt state) const noexcept {
    return static_cast<UInt>(inverse_multiplier * static_cast<UInt>(state - increment));
  }

  friend constexpr bool operator==(const BasicLcgParams&, const BasicLcgParams&) = default;
};

using LcgParams = BasicLcgParams<uint128>;

/// Selects one of 2^64 streams through the LCG increment.
struct StreamId {
  std::uint64_t selector = 0;

  constexpr uint128 increment() const noexcept { return (static_cast<uint128>(selector) << 1) | 1u; }
  friend constexpr bool operator==(StreamId, StreamId) = default;
};

/// XSL-RR 128/64: xor-fold the halves, rotate right by the top six state bits.
constexpr std::uint64_t output_permutation(uint128 state) noexcept {
  const auto folded = high_bits(state) ^ low_bits(state);
  const auto rot = static_cast<int>(state >> 122);
  return std::rotr(folded, rot);
}

inline constexpr uint128 kPcgDefaultMultiplier = make_uint128(0x2360ed051fc65da4ULL, 0x4385df649fccf645ULL);
inline constexpr uint128 kPcgDefaultInverseMultiplier = modular_inverse<uint128>(kPcgDefaultMultiplier);

/// Reversible PCG-XSL-RR-128/64. Satisfies UniformRandomBitGenerator.
///
/// Only the state and increment are stored (32 bytes); the multiplier pair is
/// shared by every instance.
class ReversiblePcg64 {
 public:
  using result_type = std::uint64_t;

  static constexpr uint128 multiplier = kPcgDefaultMultiplier;
  static constexpr uint128 inverse_multiplier = kPcgDefaultInverseMultiplier;

  /// Reference seeding recipe: state 0, install increment, advance, add the
  /// initial state, advance.
  constexpr ReversiblePcg64(uint128 init_state, StreamId stream) noexcept : increment_(stream.increment()) {
    state_ = advance(0);
    state_ += init_state;
    state_ = advance(state_);
  }

  constexpr ReversiblePcg64() noexcept : ReversiblePcg64(0, StreamId{}) {}

  /// Wraps a raw state without running the seeding recipe.
  static constexpr ReversiblePcg64 from_state(uint128 state, uint128 increment) noexcept {
    ReversiblePcg64 g;
    g.state_ = state;
    g.increment_ = increment | 1u;
    return g;
  }

  constexpr result_type next() noexcept {
    state_ = advance(state_);
    return output_permutation(state_);
  }

  constexpr result_type prev() noexcept {
    const auto value = output_permutation(state_);
    state_ = retreat(state_);
    return value;
  }

  constexpr result_type operator()() noexcept { return next(); }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr uint128 state() const noexcept { return state_; }
  constexpr uint128 increment() const noexcept { return increment_; }
  constexpr LcgParams params() const noexcept { return {multiplier, increment_, inverse_multiplier}; }

  friend constexpr bool operator==(const ReversiblePcg64&, const ReversiblePcg64&) = default;

 private:
  constexpr uint128 advance(uint128 s) const noexcept { return multiplier * s + increment_; }
  constexpr uint128 retreat(uint128 s) const noexcept { return inverse_multiplier * (s - increment_); }

  uint128 state_ = 0;
  uint128 increment_ = 1;
};

/// Same construction at 8 or 16 bits, small enough to enumerate every state.
template <typename UInt>
class ToyPcg {
  static_assert(std::is_same_v<UInt, std::uint8_t> || std::is_same_v<UInt, std::uint16_t>);

 public:
  static constexpr int bits = std::numeric_limits<UInt>::digits;
  static constexpr int half = bits / 2;
  using result_type = UInt;

  constexpr ToyPcg(BasicLcgParams<UInt> params, UInt state) noexcept : params_(params), state_(state) {}

  /// Multiplier congruent to 1 mod 4 so that the period is 2^bits.
  static constexpr BasicLcgParams<UInt> default_params() {
    if constexpr (bits == 8) {
      return BasicLcgParams<UInt>::make(141, 77);
    } else {
      return BasicLcgParams<UInt>::make(12829, 47989);
    }
  }

  /// Half-width xor fold rotated by the top log2(half) state bits.
  static constexpr UInt output(UInt state) noexcept {
    constexpr int rot_bits = std::countr_zero(static_cast<unsigned>(half));
    constexpr UInt mask = static_cast<UInt>((1u << half) - 1u);
    const auto folded = static_cast<UInt>(((state >> half) ^ state) & mask);
    const int rot = state >> (bits - rot_bits);
    return static_cast<UInt>(((folded >> rot) | (folded << (half - rot))) & mask);
  }

  constexpr UInt next() noexcept {
    state_ = params_.advance(state_);
    return output(state_);
  }

  constexpr UInt prev() noexcept {
    const auto value = output(state_);
    state_ = params_.retreat(state_);
    return value;
  }

  constexpr UInt state() const noexcept { return state_; }
  constexpr const BasicLcgParams<UInt>& params() const noexcept { return params_; }

 private:
  BasicLcgParams<UInt> params_;
  UInt state_;
};

}  // namespace rrmc
