#pragma once

// Forward particle simulation of the cooled periodic rod.
//
// Each particle p owns the generator particle_generator(seed, p). It draws one
// uniform for its initial position and then one standard normal per time step,
// so its whole trajectory is a function of (seed, p) alone. Positions diffuse
// by sqrt(2 dt) * xi with periodic wrap; weights decay by exp(-dt u(x_new)).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrmc/heat_model.hpp"

namespace rrmc {

inline double diffusion_step(double x, double xi, double dt, double length) noexcept {
  return wrap_position(x + std::sqrt(2.0 * dt) * xi, length);
}

/// W * exp(-dt * u(x_new)).
inline double reweight_step(double w, double x_new, const Grid& grid, const Control& control, double dt) noexcept {
  return w * std::exp(-dt * control.at(grid, x_new));
}

/// Inverse-CDF position sampling from theta0 on a 10 N point piecewise-linear
/// CDF table. Consumes exactly one forward uniform from each generator.
std::vector<double> sample_initial_positions(const SimConfig& cfg, std::span<ReversiblePcg64> generators);

struct InitialWeights {
  std::vector<double> w;
  std::size_t empty_cells = 0;
};

/// Gives every particle in cell n the weight theta_hat0[n] * dx / count_n so
/// that binning reproduces theta_hat0 on all occupied cells.
InitialWeights assign_initial_weights(std::span<const double> positions, const Grid& grid,
                                      std::span<const double> theta_hat0);

/// theta0 evaluated at the cell centres.
std::vector<double> initial_profile(const SimConfig& cfg);

/// Bins weighted particles: row[n] = sum_{p in n} W_p / dx.
void deposit(std::span<const double> positions, std::span<const double> weights, const Grid& grid,
             std::span<double> row);

/// Trapezoid-in-time objective plus the quadratic regulariser.
double objective(const TemperatureField& field, const Control& control, double nu);

/// Particle-major (T+1) x P history of positions and weights.
struct PathHistory {
  std::size_t steps = 0;
  std::size_t particles = 0;
  std::vector<double> x;
  std::vector<double> w;

  PathHistory() = default;
  PathHistory(std::size_t steps_, std::size_t particles_)
      : steps(steps_), particles(particles_), x((steps_ + 1) * particles_), w((steps_ + 1) * particles_) {}

  std::size_t index(std::size_t p, std::size_t tau) const noexcept { return p * (steps + 1) + tau; }
  std::size_t bytes() const noexcept { return (x.capacity() + w.capacity()) * sizeof(double); }

  static std::size_t bytes_for(std::size_t steps, std::size_t particles) noexcept {
    return 2 * (steps + 1) * particles * sizeof(double);
  }
};

enum class PathRecording { FinalOnly, Full };

struct ForwardResult {
  ParticleEnsemble final_state;
  TemperatureField field;
  double objective = 0.0;
  /// Rejected primary draws preceding each particle's first normal sample.
  std::vector<std::uint32_t> leading_rejections;
  std::size_t empty_cells = 0;
  std::optional<PathHistory> history;

  /// Bytes held by path-related storage: field, final ensemble, rejection
  /// counts and (when recorded) the full history.
  std::size_t path_storage_bytes() const noexcept;
};

/// Runs initialisation and T time steps. Throws ConfigError on invalid input.
ForwardResult run_forward(const SimConfig& cfg, const Control& control,
                          PathRecording recording = PathRecording::FinalOnly);

}  // namespace rrmc
