#pragma once

// Distribution sampling on top of a reversible bit source.
//
// Every sampler draws its primary 64-bit values through draw(gen, direction),
// so the same code produces a forward sequence or replays it backwards. The
// uniform and exponential samplers consume exactly one primary draw. The
// normal sampler runs a Ziggurat accept-reject loop whose accept decision is a
// pure function of the primary draw; any extra uniforms it needs come from an
// auxiliary xoshiro256+ generator seeded from that draw.

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rrmc {

enum class Direction { Forward, Reverse };

template <typename G>
concept ReversibleBitSource = requires(G g) {
  { g.next() } -> std::convertible_to<std::uint64_t>;
  { g.prev() } -> std::convertible_to<std::uint64_t>;
};

template <ReversibleBitSource G>
inline std::uint64_t draw(G& gen, Direction direction) {
  return direction == Direction::Forward ? gen.next() : gen.prev();
}

/// Top 53 bits scaled by 2^-53; exact, result in [0, 1).
constexpr double u64_to_unit_f64(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

template <ReversibleBitSource G>
inline double sample_uniform(G& gen, Direction direction) {
  return u64_to_unit_f64(draw(gen, direction));
}

/// Inverse-CDF transform of a unit uniform to Exp(rate).
inline double exponential_from_unit(double phi, double rate) noexcept { return -std::log(1.0 - phi) / rate; }

template <ReversibleBitSource G>
inline double sample_exponential(G& gen, Direction direction, double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("sample_exponential: rate must be positive");
  }
  return exponential_from_unit(sample_uniform(gen, direction), rate);
}

// ---------------------------------------------------------------------------
// Auxiliary generator

constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256+; forward only, used for the extra uniforms of rejected proposals.
class Xoshiro256Plus {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256Plus(const std::uint64_t (&words)[4]) noexcept
      : s_{words[0], words[1], words[2], words[3]} {
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
      s_[0] = 0x9e3779b97f4a7c15ULL;
    }
  }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = s_[0] + s_[3];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  constexpr std::uint64_t operator()() noexcept { return next(); }
  /// Uniform in (0, 1]; never zero, so safe under log().
  constexpr double unit_open_zero() noexcept { return 1.0 - u64_to_unit_f64(next()); }
  constexpr double unit() noexcept { return u64_to_unit_f64(next()); }

  constexpr const std::uint64_t* words() const noexcept { return s_; }
  friend constexpr bool operator==(const Xoshiro256Plus&, const Xoshiro256Plus&) = default;

 private:
  std::uint64_t s_[4];
};

/// Fills the 256-bit state with four chained splitmix64 outputs of `seed`.
constexpr Xoshiro256Plus splitmix_expand(std::uint64_t seed) noexcept {
  std::uint64_t x = seed;
  const std::uint64_t w0 = splitmix64(x);
  const std::uint64_t w1 = splitmix64(x);
  const std::uint64_t w2 = splitmix64(x);
  const std::uint64_t w3 = splitmix64(x);
  const std::uint64_t words[4] = {w0, w1, w2, w3};
  return Xoshiro256Plus(words);
}

/// Marsaglia's tail method beyond `r`. Returns sign * (r + x) with x >= 0.
inline double marsaglia_tail(Xoshiro256Plus& aux, double r, double sign) {
  for (;;) {
    const double x = -std::log(aux.unit_open_zero()) / r;
    const double y = -std::log(aux.unit_open_zero());
    if (2.0 * y > x * x) {
      return sign * (r + x);
    }
  }
}

// ---------------------------------------------------------------------------
// Ziggurat

/// Layer edges and heights of a Ziggurat covering exp(-x^2/2).
///
/// Layer z in [0, Z-2] is the rectangle [0, edge(z+1)] x (height(z+1), height(z)].
/// Layer Z-1 is the base strip [0, edge(Z)] x (0, height(Z-1)] plus the tail
/// beyond r = edge(Z-1). Every layer has area common_area().
class ZigguratTable {
 public:
  /// Root-finds the tail start so that the top layer closes at height 1.
  /// Z must be a power of two in [8, 128]. Throws std::invalid_argument for a
  /// bad Z and std::runtime_error if the closure residual does not converge.
  explicit ZigguratTable(unsigned layers = 128);

  /// Process-wide Z = 128 table.
  static const ZigguratTable& standard();

  unsigned layers() const noexcept { return layers_; }
  std::uint64_t layer_mask() const noexcept { return layers_ - 1; }
  double edge(unsigned z) const noexcept { return edges_[z]; }
  double height(unsigned z) const noexcept { return heights_[z]; }
  double tail_start() const noexcept { return edges_[layers_ - 1]; }
  double common_area() const noexcept { return area_; }
  std::span<const double> edges() const noexcept { return edges_; }
  std::span<const double> heights() const noexcept { return heights_; }

  /// Area of layer z recomputed from the stored edges and heights.
  double layer_area(unsigned z) const;

 private:
  unsigned layers_;
  double area_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> heights_;
};

enum class AttemptPath { Fast, Wedge, Tail };

struct AttemptOutcome {
  bool accepted = false;
  double sample = 0.0;
  AttemptPath path = AttemptPath::Fast;
};

namespace zigbits {
inline constexpr unsigned kSignBit = 7;
inline constexpr unsigned kMagnitudeShift = 11;
}  // namespace zigbits

/// Copies the sign bit of zeta onto a nonnegative value without branching;
/// a data-dependent sign branch mispredicts half the time.
inline double apply_sign_bit(double magnitude, std::uint64_t zeta) noexcept {
  const std::uint64_t flip = ((zeta >> zigbits::kSignBit) & 1u) << 63;
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(magnitude) ^ flip);
}

/// One Ziggurat proposal from a single primary draw; referentially transparent.
///
/// Bits 0..log2(Z)-1 select the layer, bit 7 the sign and bits 11..63 the
/// 53-bit magnitude. Rejected-region decisions use an auxiliary generator
/// seeded by splitmix_expand(zeta).
inline AttemptOutcome ziggurat_attempt(std::uint64_t zeta, const ZigguratTable& table) {
  const auto z = static_cast<unsigned>(zeta & table.layer_mask());
  const double u = u64_to_unit_f64(zeta);
  const double magnitude = u * table.edge(z + 1);

  if (magnitude < table.edge(z)) {
    return {true, apply_sign_bit(magnitude, zeta), AttemptPath::Fast};
  }
  auto aux = splitmix_expand(zeta);
  if (z == table.layers() - 1) {
    return {true, apply_sign_bit(marsaglia_tail(aux, table.tail_start(), 1.0), zeta), AttemptPath::Tail};
  }
  const double lower = table.height(z + 1);
  const double psi = lower + (table.height(z) - lower) * aux.unit();
  if (psi < std::exp(-0.5 * magnitude * magnitude)) {
    return {true, apply_sign_bit(magnitude, zeta), AttemptPath::Wedge};
  }
  return {false, 0.0, AttemptPath::Wedge};
}

struct NormalDraw {
  double value;
  std::uint32_t primary_draws;
};

/// Standard normal sample plus the number of primary draws it consumed.
///
/// Reverse mode replays a forward sequence backwards bit for bit. The
/// rejected draws preceding the first forward sample are left unconsumed by
/// the last reverse call; rewind them with rewind() if state closure matters.
template <ReversibleBitSource G>
inline NormalDraw sample_normal_counted(G& gen, Direction direction,
                                        const ZigguratTable& table = ZigguratTable::standard()) {
  std::uint32_t draws = 0;
  for (;;) {
    ++draws;
    const auto outcome = ziggurat_attempt(draw(gen, direction), table);
    if (outcome.accepted) {
      return {outcome.sample, draws};
    }
  }
}

template <ReversibleBitSource G>
inline double sample_normal(G& gen, Direction direction, const ZigguratTable& table = ZigguratTable::standard()) {
  return sample_normal_counted(gen, direction, table).value;
}

/// Steps `count` primary draws backwards.
template <ReversibleBitSource G>
inline void rewind(G& gen, std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) {
    gen.prev();
  }
}

}  // namespace rrmc
