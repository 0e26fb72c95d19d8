#pragma once

// Shared types for the cooled periodic-rod particle model.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrmc/pcg.hpp"

namespace rrmc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// theta0(x) = amplitude * sin(2 pi modes x / L) + offset, positive when offset > amplitude >= 0.
struct Theta0Profile {
  double amplitude = 50.0;
  double offset = 90.0;
  int modes = 4;

  double operator()(double x, double length) const;
  /// Integral of theta0 over [0, x].
  double cumulative(double x, double length) const;
};

struct SimConfig {
  double length = 10.0;
  double dx = 0.01;
  double dt = 0.001;
  std::size_t steps = 1000;  // T; end time is steps * dt
  std::size_t particles = 100000;
  double nu = 1.0;
  std::uint64_t seed = 0;
  Theta0Profile theta0{};
  unsigned threads = 1;

  std::size_t cells() const;
  double end_time() const { return static_cast<double>(steps) * dt; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// L = 10, dx = 0.01, dt = 0.001, end time 1, nu = 1, theta0 = 50 sin(8 pi x / L) + 90.
  static SimConfig reference();
  /// Same physics on a coarse grid: N = 100 cells, T = 200 steps, P = 10^4.
  static SimConfig desk();
};

/// Parses INI-style `key = value` lines on top of `base`. Recognised keys:
/// L, dx, dt, t_end, particles, nu, seed, theta0_amplitude, theta0_offset,
/// theta0_modes, threads. `#` and `;` start comments.
SimConfig parse_config(std::istream& in, SimConfig base = SimConfig::reference());
SimConfig load_config(const std::filesystem::path& path, SimConfig base = SimConfig::reference());

/// Uniform periodic grid of half-open cells [n dx, (n+1) dx), n = 0..N-1.
struct Grid {
  double length;
  double dx;
  std::size_t cells;

  explicit Grid(const SimConfig& cfg) : length(cfg.length), dx(cfg.dx), cells(cfg.cells()) {}
  Grid(double length_, double dx_, std::size_t cells_) : length(length_), dx(dx_), cells(cells_) {}

  /// Zero-based index of the cell containing x in [0, L). Edges are the
  /// floating-point products n * dx, so a position equal to an edge belongs
  /// to the cell that starts there.
  std::size_t cell_of(double x) const noexcept {
    auto n = static_cast<std::size_t>(x / dx);
    if (n >= cells) {
      n = cells - 1;
    }
    if (x < static_cast<double>(n) * dx) {
      --n;
    } else if (n + 1 < cells && x >= static_cast<double>(n + 1) * dx) {
      ++n;
    }
    return n;
  }

  double edge(std::size_t n) const noexcept { return static_cast<double>(n) * dx; }
  double center(std::size_t n) const noexcept { return (static_cast<double>(n) + 0.5) * dx; }
  double distance_to_edge(double x) const noexcept;
};

/// Periodic wrap into [0, L).
inline double wrap_position(double x, double length) noexcept {
  if (x >= 0.0 && x < length) {
    return x;
  }
  x = std::fmod(x, length);
  if (x < 0.0) {
    x += length;
  }
  if (x >= length) {
    x -= length;
  }
  return x;
}

/// Piecewise-constant cooling rate, one value per cell.
struct Control {
  std::vector<double> rates;

  Control() = default;
  explicit Control(std::vector<double> values) : rates(std::move(values)) {}
  static Control zeros(std::size_t cells) { return Control(std::vector<double>(cells, 0.0)); }

  std::size_t size() const noexcept { return rates.size(); }
  double at(const Grid& grid, double x) const noexcept { return rates[grid.cell_of(x)]; }
};

/// Binned temperature estimate, (T+1) rows of N cells.
class TemperatureField {
 public:
  TemperatureField() = default;
  TemperatureField(std::size_t steps, std::size_t cells, double dx, double dt)
      : steps_(steps), cells_(cells), dx_(dx), dt_(dt), values_((steps + 1) * cells, 0.0) {}

  std::size_t steps() const noexcept { return steps_; }
  std::size_t cells() const noexcept { return cells_; }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }

  std::span<double> row(std::size_t tau) noexcept { return {values_.data() + tau * cells_, cells_}; }
  std::span<const double> row(std::size_t tau) const noexcept { return {values_.data() + tau * cells_, cells_}; }
  double at(std::size_t tau, std::size_t n) const noexcept { return values_[tau * cells_ + n]; }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t bytes() const noexcept { return values_.capacity() * sizeof(double); }

 private:
  std::size_t steps_ = 0;
  std::size_t cells_ = 0;
  double dx_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> values_;
};

/// Monte Carlo state at one time level: positions, weights, per-particle generators.
struct ParticleEnsemble {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<ReversiblePcg64> rng;

  std::size_t size() const noexcept { return x.size(); }
  std::size_t bytes() const noexcept {
    return x.capacity() * sizeof(double) + w.capacity() * sizeof(double) + rng.capacity() * sizeof(ReversiblePcg64);
  }
};

/// Generator of particle p: initial state = base seed, stream = p.
inline ReversiblePcg64 particle_generator(std::uint64_t base_seed, std::size_t particle) noexcept {
  return ReversiblePcg64(base_seed, StreamId{static_cast<std::uint64_t>(particle)});
}

}  // namespace rrmc
