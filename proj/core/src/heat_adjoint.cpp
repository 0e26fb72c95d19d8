#include "rrmc/heat_adjoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <string>

#include "rrmc/parallel.hpp"

namespace rrmc {

ReverseStep reverse_path_step(double x_next, double w_next, ReversiblePcg64& rng, const Grid& grid,
                              const Control& control, double dt) {
  return reverse_path_step(x_next, w_next, std::exp(dt * control.at(grid, x_next)), rng, std::sqrt(2.0 * dt),
                           grid.length, ZigguratTable::standard());
}

ReversiblePaths::ReversiblePaths(ParticleEnsemble& final_state, std::span<const std::uint32_t> leading_rejections,
                                 const Grid& grid, const Control& control, double dt, std::size_t steps)
    : ensemble_(&final_state),
      leading_(leading_rejections),
      grid_(grid),
      growth_(grid.cells),
      scale_(std::sqrt(2.0 * dt)),
      steps_(steps),
      table_(&ZigguratTable::standard()) {
  for (std::size_t n = 0; n < grid.cells; ++n) {
    growth_[n] = std::exp(dt * control.rates[n]);
  }
}

ReversiblePaths::Cursor::Cursor(const ReversiblePaths& owner, std::size_t particle)
    : owner_(&owner),
      rng_(&owner.ensemble_->rng[particle]),
      point_{owner.ensemble_->x[particle], owner.ensemble_->w[particle]},
      leading_(owner.leading_[particle]) {}

namespace {

constexpr double kEdgeProximity = 1e-8;
constexpr std::size_t kChunk = 256;

}  // namespace

template <PathProvider Provider>
SweepStats adjoint_sweep(Provider& provider, const TemperatureField& field, const Grid& grid, const Control& control,
                         unsigned threads, std::span<double> gradient) {
  const std::size_t steps = provider.steps();
  const std::size_t cells = grid.cells;
  const double dt = field.dt();

  std::vector<double> decay(cells);
  for (std::size_t n = 0; n < cells; ++n) {
    decay[n] = std::exp(-dt * control.rates[n]);
  }

  const auto groups = ParticleGroups::for_particles(provider.particles());
  std::vector<double> partial(groups.groups * cells, 0.0);
  std::vector<std::size_t> edge_counts(groups.groups, 0);

  // Particles of a chunk step back in lockstep so each field row is reused
  // across the chunk while it is in cache.
  using Cursor = decltype(provider.cursor(0));
  parallel_for(threads, groups.groups, [&](std::size_t g) {
    double* gpart = partial.data() + g * cells;
    std::size_t near_edge = 0;
    std::vector<Cursor> cursors;
    std::vector<PathPoint> next(kChunk);
    std::vector<double> adjoint(kChunk);
    cursors.reserve(kChunk);
    const std::size_t end = groups.end(g);
    for (std::size_t c0 = groups.begin(g); c0 < end; c0 += kChunk) {
      const std::size_t width = std::min(kChunk, end - c0);
      cursors.clear();
      for (std::size_t i = 0; i < width; ++i) {
        cursors.push_back(provider.cursor(c0 + i));
      }
      if (steps > 0) {
        const auto last = field.row(steps);
        for (std::size_t i = 0; i < width; ++i) {
          next[i] = cursors[i].point();
          adjoint[i] = terminal_adjoint(last[grid.cell_of(next[i].x)], dt);
        }
        for (std::size_t tau = steps; tau-- > 0;) {
          const auto row = field.row(tau);
          for (std::size_t i = 0; i < width; ++i) {
            const std::size_t n_next = grid.cell_of(next[i].x);
            gpart[n_next] += dt * next[i].w * adjoint[i];
            cursors[i].step_back();
            const PathPoint current = cursors[i].point();
            if (grid.distance_to_edge(current.x) < kEdgeProximity) {
              ++near_edge;
            }
            if (tau >= 1) {
              adjoint[i] = adjoint_step(adjoint[i], decay[n_next], row[grid.cell_of(current.x)], dt);
            }
            next[i] = current;
          }
        }
      }
      for (auto& c : cursors) {
        c.finish();
      }
    }
    edge_counts[g] = near_edge;
  });

  SweepStats stats;
  for (std::size_t g = 0; g < groups.groups; ++g) {
    for (std::size_t n = 0; n < cells; ++n) {
      gradient[n] += partial[g * cells + n];
    }
    stats.edge_proximity_count += edge_counts[g];
  }
  return stats;
}

template SweepStats adjoint_sweep<StoredPaths>(StoredPaths&, const TemperatureField&, const Grid&, const Control&,
                                               unsigned, std::span<double>);
template SweepStats adjoint_sweep<ReversiblePaths>(ReversiblePaths&, const TemperatureField&, const Grid&,
                                                   const Control&, unsigned, std::span<double>);

std::vector<double> adjoint_weight_history(const PathHistory& history, const TemperatureField& field,
                                           const Grid& grid, const Control& control) {
  const std::size_t steps = history.steps;
  const double dt = field.dt();
  std::vector<double> adjoint(history.x.size(), 0.0);
  if (steps == 0) {
    return adjoint;
  }
  for (std::size_t p = 0; p < history.particles; ++p) {
    auto at = [&](std::size_t tau) { return history.index(p, tau); };
    adjoint[at(steps)] = terminal_adjoint(field.at(steps, grid.cell_of(history.x[at(steps)])), dt);
    for (std::size_t tau = steps - 1; tau >= 1; --tau) {
      const double decay = std::exp(-dt * control.at(grid, history.x[at(tau + 1)]));
      adjoint[at(tau)] = adjoint_step(adjoint[at(tau + 1)], decay, field.at(tau, grid.cell_of(history.x[at(tau)])), dt);
    }
  }
  return adjoint;
}

std::size_t path_storage_estimate(const SimConfig& cfg, GradientMode mode) {
  const std::size_t cells = cfg.cells();
  const std::size_t per_particle = 2 * sizeof(double) + sizeof(ReversiblePcg64) + sizeof(std::uint32_t);
  std::size_t bytes = (cfg.steps + 1) * cells * sizeof(double) + cfg.particles * per_particle;
  if (mode == GradientMode::Stored) {
    bytes += PathHistory::bytes_for(cfg.steps, cfg.particles);
  }
  return bytes;
}

GradientResult compute_gradient(const SimConfig& cfg, const Control& control, GradientMode mode,
                                const GradientOptions& options) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  const Grid grid(cfg);

  const auto required = path_storage_estimate(cfg, mode);
  if (options.path_budget_bytes != 0 && required > options.path_budget_bytes) {
    throw ResourceLimitError("path storage of " + std::to_string(required) + " bytes exceeds budget of " +
                                 std::to_string(options.path_budget_bytes) + " bytes",
                             required, options.path_budget_bytes);
  }

  GradientResult result;
  const auto t0 = clock::now();
  ForwardResult forward;
  try {
    forward = run_forward(cfg, control, mode == GradientMode::Stored ? PathRecording::Full : PathRecording::FinalOnly);
  } catch (const std::bad_alloc&) {
    throw ResourceLimitError("allocation of " + std::to_string(required) + " bytes of path storage failed", required,
                             options.path_budget_bytes);
  }
  const auto t1 = clock::now();

  result.objective = forward.objective;
  result.diagnostics.peak_path_bytes = forward.path_storage_bytes();
  result.diagnostics.empty_cells = forward.empty_cells;
  result.gradient.assign(grid.cells, 0.0);

  SweepStats stats;
  if (mode == GradientMode::Stored) {
    StoredPaths paths(*forward.history);
    stats = adjoint_sweep(paths, forward.field, grid, control, cfg.threads, result.gradient);
  } else {
    ReversiblePaths paths(forward.final_state, forward.leading_rejections, grid, control, cfg.dt, cfg.steps);
    stats = adjoint_sweep(paths, forward.field, grid, control, cfg.threads, result.gradient);
    std::size_t mismatches = 0;
    for (std::size_t p = 0; p < cfg.particles; ++p) {
      if (forward.final_state.rng[p] != particle_generator(cfg.seed, p)) {
        ++mismatches;
      }
    }
    result.diagnostics.generator_mismatches = mismatches;
  }
  for (std::size_t n = 0; n < grid.cells; ++n) {
    result.gradient[n] += cfg.nu * cfg.dx * control.rates[n];
  }
  const auto t2 = clock::now();

  result.diagnostics.edge_proximity_count = stats.edge_proximity_count;
  result.diagnostics.constraint_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.diagnostics.adjoint_seconds = std::chrono::duration<double>(t2 - t1).count();
  return result;
}

FiniteDifferenceReport finite_difference_check(const SimConfig& cfg, const Control& control, std::size_t directions,
                                               double step, std::uint64_t direction_seed, GradientMode mode) {
  const auto gradient = compute_gradient(cfg, control, mode).gradient;
  ReversiblePcg64 rng(direction_seed, StreamId{0x6469726563ULL});

  FiniteDifferenceReport report;
  for (std::size_t k = 0; k < directions; ++k) {
    std::vector<double> direction(control.size());
    for (auto& d : direction) {
      d = sample_normal(rng, Direction::Forward);
    }
    Control plus = control;
    Control minus = control;
    double directional = 0.0;
    for (std::size_t n = 0; n < control.size(); ++n) {
      plus.rates[n] += step * direction[n];
      minus.rates[n] -= step * direction[n];
      directional += gradient[n] * direction[n];
    }
    const double fd = (run_forward(cfg, plus).objective - run_forward(cfg, minus).objective) / (2.0 * step);
    const double rel = std::abs(directional - fd) / std::max(std::abs(fd), 1e-300);
    report.adjoint_directional.push_back(directional);
    report.fd_directional.push_back(fd);
    report.relative_errors.push_back(rel);
    report.max_relative_error = std::max(report.max_relative_error, rel);
  }
  return report;
}

}  // namespace rrmc
