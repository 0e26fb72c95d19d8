#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rrmc/sampling.hpp"

namespace rrmc::tools {

enum class Distribution { Uniform, Exponential, Normal };

std::string_view to_string(Distribution d);
std::string_view to_string(Direction d);
Distribution parse_distribution(std::string_view name);
Direction parse_direction(std::string_view name);

/// One distribution checked by the round-trip harness.
struct RoundtripCase {
  Distribution dist;
  double rate = 1.0;
  std::string label() const;
};

/// Uniform, exponential with rate 1 and 2.5, normal.
std::vector<RoundtripCase> default_roundtrip_cases();

struct RoundtripFailure {
  std::string label;
  /// Index of the first forward value the reverse pass failed to reproduce,
  /// or `count` when only the final generator state differs.
  std::size_t index;
};

/// Draws `count` values forward, then `count` values in reverse, and checks
/// that the reverse values mirror the forward ones bitwise and that the
/// generator returns to its starting state once the rejections preceding the
/// first normal sample are rewound.
///
/// `corrupt_after_forward` is a test hook: when set, that bit of the state is
/// flipped between the two passes.
std::optional<RoundtripFailure> roundtrip_check(const RoundtripCase& c, std::size_t count, std::uint64_t seed,
                                                std::optional<unsigned> corrupt_after_forward = std::nullopt);

struct BenchRecord {
  std::size_t count;
  Distribution dist;
  Direction mode;
  double min_seconds;
};

struct BenchProtocol {
  std::size_t runs = 55;
  std::size_t discard = 5;
};

/// Times `count` draws of each mode `protocol.runs` times, drops the first
/// `protocol.discard` timings and keeps the minimum of the rest. Runs of the
/// different modes are interleaved on one generator, so a reverse run replays
/// the draws of the forward run before it and slow phases of the machine hit
/// every mode alike.
std::vector<BenchRecord> bench_distribution(Distribution dist, std::span<const Direction> modes, std::size_t count,
                                            std::uint64_t seed, const BenchProtocol& protocol = {});

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

/// Writes exactly `bytes` bytes of little-endian forward outputs. Returns
/// false as soon as the stream reports a write failure.
bool write_raw_stream(std::ostream& out, std::size_t bytes, std::uint64_t seed, std::uint64_t stream);

}  // namespace rrmc::tools
