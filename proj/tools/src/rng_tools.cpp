#include "rrmc/tools/rng_tools.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "rrmc/pcg.hpp"

namespace rrmc::tools {

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::Uniform:
      return "uniform";
    case Distribution::Exponential:
      return "exponential";
    case Distribution::Normal:
      return "normal";
  }
  return "unknown";
}

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

Distribution parse_distribution(std::string_view name) {
  if (name == "uniform") return Distribution::Uniform;
  if (name == "exponential") return Distribution::Exponential;
  if (name == "normal") return Distribution::Normal;
  throw std::invalid_argument(fmt::format("unknown distribution '{}'", name));
}

Direction parse_direction(std::string_view name) {
  if (name == "forward") return Direction::Forward;
  if (name == "reverse") return Direction::Reverse;
  throw std::invalid_argument(fmt::format("unknown mode '{}'", name));
}

std::string RoundtripCase::label() const {
  if (dist == Distribution::Exponential) {
    return fmt::format("exponential(R={})", rate);
  }
  return std::string(to_string(dist));
}

std::vector<RoundtripCase> default_roundtrip_cases() {
  return {{Distribution::Uniform}, {Distribution::Exponential, 1.0}, {Distribution::Exponential, 2.5},
          {Distribution::Normal}};
}

namespace {

double draw_value(Distribution dist, double rate, ReversiblePcg64& gen, Direction dir) {
  switch (dist) {
    case Distribution::Uniform:
      return sample_uniform(gen, dir);
    case Distribution::Exponential:
      return sample_exponential(gen, dir, rate);
    case Distribution::Normal:
      return sample_normal(gen, dir);
  }
  return 0.0;
}

template <Distribution D>
double timed_loop(ReversiblePcg64& gen, Direction dir, std::size_t count) {
  double sink = 0.0;
  if (dir == Direction::Forward) {
    for (std::size_t i = 0; i < count; ++i) sink += draw_value(D, 1.0, gen, Direction::Forward);
  } else {
    for (std::size_t i = 0; i < count; ++i) sink += draw_value(D, 1.0, gen, Direction::Reverse);
  }
  return sink;
}

}  // namespace

std::optional<RoundtripFailure> roundtrip_check(const RoundtripCase& c, std::size_t count, std::uint64_t seed,
                                                std::optional<unsigned> corrupt_after_forward) {
  ReversiblePcg64 gen(seed, StreamId{0});
  const ReversiblePcg64 start = gen;

  std::vector<std::uint64_t> forward(count);
  // Rejections before the first normal sample are not replayed in reverse.
  std::uint32_t leading = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0 && c.dist == Distribution::Normal) {
      const auto first = sample_normal_counted(gen, Direction::Forward);
      leading = first.primary_draws - 1;
      forward[i] = std::bit_cast<std::uint64_t>(first.value);
    } else {
      forward[i] = std::bit_cast<std::uint64_t>(draw_value(c.dist, c.rate, gen, Direction::Forward));
    }
  }
  if (corrupt_after_forward) {
    gen = ReversiblePcg64::from_state(gen.state() ^ (uint128{1} << (*corrupt_after_forward % 128)), gen.increment());
  }
  for (std::size_t i = count; i-- > 0;) {
    const auto v = std::bit_cast<std::uint64_t>(draw_value(c.dist, c.rate, gen, Direction::Reverse));
    if (v != forward[i]) {
      return RoundtripFailure{c.label(), i};
    }
  }
  rewind(gen, leading);
  if (gen != start) {
    return RoundtripFailure{c.label(), count};
  }
  return std::nullopt;
}

std::vector<BenchRecord> bench_distribution(Distribution dist, std::span<const Direction> modes, std::size_t count,
                                            std::uint64_t seed, const BenchProtocol& protocol) {
  using clock = std::chrono::steady_clock;
  if (protocol.discard >= protocol.runs) {
    throw std::invalid_argument("bench protocol keeps no runs");
  }
  ReversiblePcg64 gen(seed, StreamId{0});
  volatile double sink = 0.0;
  std::vector<double> best(modes.size(), std::numeric_limits<double>::infinity());
  for (std::size_t run = 0; run < protocol.runs; ++run) {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto t0 = clock::now();
      double s = 0.0;
      switch (dist) {
        case Distribution::Uniform:
          s = timed_loop<Distribution::Uniform>(gen, modes[i], count);
          break;
        case Distribution::Exponential:
          s = timed_loop<Distribution::Exponential>(gen, modes[i], count);
          break;
        case Distribution::Normal:
          s = timed_loop<Distribution::Normal>(gen, modes[i], count);
          break;
      }
      const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
      sink = sink + s;
      if (run >= protocol.discard) {
        best[i] = std::min(best[i], seconds);
      }
    }
  }
  std::vector<BenchRecord> records;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    records.push_back({count, dist, modes[i], best[i]});
  }
  return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "count,dist,mode,min_seconds\n";
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{:.9g}\n", r.count, to_string(r.dist), to_string(r.mode), r.min_seconds);
  }
}

bool write_raw_stream(std::ostream& out, std::size_t bytes, std::uint64_t seed, std::uint64_t stream) {
  ReversiblePcg64 gen(seed, StreamId{stream});
  std::array<char, 8 * 512> buffer;
  while (bytes > 0) {
    const std::size_t chunk = std::min(bytes, buffer.size());
    for (std::size_t off = 0; off < chunk; off += 8) {
      std::uint64_t v = gen.next();
      for (std::size_t b = 0; b < 8; ++b) {
        buffer[off + b] = static_cast<char>(v & 0xff);
        v >>= 8;
      }
    }
    out.write(buffer.data(), static_cast<std::streamsize>(chunk));
    if (!out) {
      return false;
    }
    bytes -= chunk;
  }
  out.flush();
  return static_cast<bool>(out);
}

}  // namespace rrmc::tools
