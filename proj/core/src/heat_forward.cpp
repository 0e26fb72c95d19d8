#include "rrmc/heat_forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrmc/parallel.hpp"
#include "rrmc/sampling.hpp"

namespace rrmc {

std::vector<double> initial_profile(const SimConfig& cfg) {
  const Grid grid(cfg);
  std::vector<double> profile(grid.cells);
  for (std::size_t n = 0; n < grid.cells; ++n) {
    profile[n] = cfg.theta0(grid.center(n), cfg.length);
  }
  return profile;
}

std::vector<double> sample_initial_positions(const SimConfig& cfg, std::span<ReversiblePcg64> generators) {
  const std::size_t intervals = 10 * cfg.cells();
  const double h = cfg.length / static_cast<double>(intervals);
  const double total = cfg.theta0.cumulative(cfg.length, cfg.length);

  std::vector<double> cdf(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    cdf[i] = cfg.theta0.cumulative(static_cast<double>(i) * h, cfg.length) / total;
  }
  cdf.front() = 0.0;
  cdf.back() = 1.0;

  const double below_length = std::nextafter(cfg.length, 0.0);
  std::vector<double> positions(generators.size());
  for (std::size_t p = 0; p < generators.size(); ++p) {
    const double u = sample_uniform(generators[p], Direction::Forward);
    // First node strictly above u; u < 1 so the index stays in range.
    const auto upper = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto i = static_cast<std::size_t>(upper - cdf.begin()) - 1;
    const double span = cdf[i + 1] - cdf[i];
    const double frac = span > 0.0 ? (u - cdf[i]) / span : 0.0;
    positions[p] = std::min((static_cast<double>(i) + frac) * h, below_length);
  }
  return positions;
}

InitialWeights assign_initial_weights(std::span<const double> positions, const Grid& grid,
                                      std::span<const double> theta_hat0) {
  std::vector<std::size_t> counts(grid.cells, 0);
  std::vector<std::size_t> cell(positions.size());
  for (std::size_t p = 0; p < positions.size(); ++p) {
    cell[p] = grid.cell_of(positions[p]);
    ++counts[cell[p]];
  }
  InitialWeights out;
  out.w.resize(positions.size());
  for (std::size_t p = 0; p < positions.size(); ++p) {
    out.w[p] = theta_hat0[cell[p]] * grid.dx / static_cast<double>(counts[cell[p]]);
  }
  out.empty_cells = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), std::size_t{0}));
  return out;
}

void deposit(std::span<const double> positions, std::span<const double> weights, const Grid& grid,
             std::span<double> row) {
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t p = 0; p < positions.size(); ++p) {
    row[grid.cell_of(positions[p])] += weights[p];
  }
  for (auto& v : row) {
    v /= grid.dx;
  }
}

double objective(const TemperatureField& field, const Control& control, double nu) {
  const std::size_t steps = field.steps();
  double time_sum = 0.0;
  for (std::size_t tau = 0; tau <= steps; ++tau) {
    double sq = 0.0;
    for (double v : field.row(tau)) {
      sq += v * v;
    }
    const double weight = (tau == 0 || tau == steps) ? 0.5 : 1.0;
    time_sum += weight * field.dx() * 0.5 * sq;
  }
  double reg = 0.0;
  for (double u : control.rates) {
    reg += u * u;
  }
  return field.dt() * time_sum + nu * field.dx() * 0.5 * reg;
}

std::size_t ForwardResult::path_storage_bytes() const noexcept {
  std::size_t bytes = field.bytes() + final_state.bytes() + leading_rejections.capacity() * sizeof(std::uint32_t);
  if (history) {
    bytes += history->bytes();
  }
  return bytes;
}

namespace {

// Time steps advanced per visit of a particle chunk, and chunk width.
constexpr std::size_t kTimeBlock = 32;
constexpr std::size_t kChunk = 256;

}  // namespace

ForwardResult run_forward(const SimConfig& cfg, const Control& control, PathRecording recording) {
  cfg.validate();
  const Grid grid(cfg);
  const std::size_t cells = grid.cells;
  const std::size_t steps = cfg.steps;
  const std::size_t count = cfg.particles;
  if (control.size() != cells) {
    throw ConfigError("control has " + std::to_string(control.size()) + " entries, grid has " +
                      std::to_string(cells) + " cells");
  }

  std::vector<double> decay(cells);
  for (std::size_t n = 0; n < cells; ++n) {
    decay[n] = std::exp(-cfg.dt * control.rates[n]);
  }

  ForwardResult result;
  auto& ens = result.final_state;
  ens.rng.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    ens.rng.push_back(particle_generator(cfg.seed, p));
  }
  ens.x = sample_initial_positions(cfg, ens.rng);
  auto weights = assign_initial_weights(ens.x, grid, initial_profile(cfg));
  ens.w = std::move(weights.w);
  result.empty_cells = weights.empty_cells;

  result.field = TemperatureField(steps, cells, cfg.dx, cfg.dt);
  deposit(ens.x, ens.w, grid, result.field.row(0));
  result.leading_rejections.assign(count, 0);

  PathHistory* history = nullptr;
  if (recording == PathRecording::Full) {
    result.history.emplace(steps, count);
    history = &*result.history;
    for (std::size_t p = 0; p < count; ++p) {
      history->x[history->index(p, 0)] = ens.x[p];
      history->w[history->index(p, 0)] = ens.w[p];
    }
  }

  const auto groups = ParticleGroups::for_particles(count);
  const ZigguratTable& table = ZigguratTable::standard();
  const double scale = std::sqrt(2.0 * cfg.dt);
  const double length = cfg.length;
  std::vector<double> partial(groups.groups * kTimeBlock * cells);

  for (std::size_t t0 = 0; t0 < steps; t0 += kTimeBlock) {
    const std::size_t block = std::min(kTimeBlock, steps - t0);
    parallel_for(cfg.threads, groups.groups, [&](std::size_t g) {
      double* part = partial.data() + g * kTimeBlock * cells;
      std::fill(part, part + block * cells, 0.0);
      const std::size_t end = groups.end(g);
      for (std::size_t c0 = groups.begin(g); c0 < end; c0 += kChunk) {
        const std::size_t c1 = std::min(c0 + kChunk, end);
        for (std::size_t s = 0; s < block; ++s) {
          const std::size_t tau = t0 + s + 1;
          double* prow = part + s * cells;
          for (std::size_t p = c0; p < c1; ++p) {
            const auto xi = sample_normal_counted(ens.rng[p], Direction::Forward, table);
            if (tau == 1) {
              result.leading_rejections[p] = xi.primary_draws - 1;
            }
            const double x = wrap_position(ens.x[p] + scale * xi.value, length);
            const std::size_t n = grid.cell_of(x);
            const double w = ens.w[p] * decay[n];
            ens.x[p] = x;
            ens.w[p] = w;
            prow[n] += w;
            if (history) {
              history->x[history->index(p, tau)] = x;
              history->w[history->index(p, tau)] = w;
            }
          }
        }
      }
    });
    for (std::size_t s = 0; s < block; ++s) {
      auto row = result.field.row(t0 + s + 1);
      for (std::size_t g = 0; g < groups.groups; ++g) {
        const double* prow = partial.data() + (g * kTimeBlock + s) * cells;
        for (std::size_t n = 0; n < cells; ++n) {
          row[n] += prow[n];
        }
      }
      for (auto& v : row) {
        v /= grid.dx;
      }
    }
  }

  result.objective = objective(result.field, control, cfg.nu);
  return result;
}

}  // namespace rrmc
