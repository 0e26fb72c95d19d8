#pragma once

// Discrete adjoint of the particle scheme.
//
// The adjoint weight obeys
//   W*_T = -dt c_T Theta_T(X_T),
//   W*_tau = exp(-dt u(X_{tau+1})) W*_{tau+1} - dt c_tau Theta_tau(X_tau),
// with trapezoid factors c_0 = c_T = 1/2 and 1 elsewhere. The position adjoint
// vanishes identically because the control and the binning are piecewise
// constant in space. Each step contributes dt W_{tau+1} W*_{tau+1} to the
// gradient entry of the cell holding X_{tau+1}.
//
// The sweep needs positions in reverse time order. StoredPaths reads them from
// a recorded history; ReversiblePaths recomputes them from the final ensemble
// by replaying every particle's normal draws backwards.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrmc/heat_forward.hpp"
#include "rrmc/heat_model.hpp"
#include "rrmc/sampling.hpp"

namespace rrmc {

enum class GradientMode { Stored, Reversible };

/// Raised when a path mode cannot run within its resource limits.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, std::size_t required, std::size_t budget)
      : std::runtime_error(what), required_bytes(required), budget_bytes(budget) {}

  std::size_t required_bytes;
  std::size_t budget_bytes;
};

struct PathPoint {
  double x;
  double w;
};

struct ReverseStep {
  PathPoint point;
  double xi;
};

/// Undoes one diffusion + reweighting step using the replayed normal draw.
inline ReverseStep reverse_path_step(double x_next, double w_next, double growth_at_next, ReversiblePcg64& rng,
                                     double scale, double length, const ZigguratTable& table) {
  const double xi = sample_normal(rng, Direction::Reverse, table);
  return {{wrap_position(x_next - scale * xi, length), w_next * growth_at_next}, xi};
}

ReverseStep reverse_path_step(double x_next, double w_next, ReversiblePcg64& rng, const Grid& grid,
                              const Control& control, double dt);

inline double terminal_adjoint(double theta_at_particle, double dt, double trapezoid = 0.5) noexcept {
  return -dt * trapezoid * theta_at_particle;
}

inline double adjoint_step(double adjoint_next, double decay_at_next, double theta_at_current, double dt,
                           double trapezoid = 1.0) noexcept {
  return decay_at_next * adjoint_next - dt * trapezoid * theta_at_current;
}

struct GradientIncrement {
  std::size_t cell;
  double value;
};

inline GradientIncrement gradient_contribution(double w_next, double x_next, double adjoint_next, double dt,
                                               const Grid& grid) noexcept {
  return {grid.cell_of(x_next), dt * w_next * adjoint_next};
}

// ---------------------------------------------------------------------------
// Path providers

template <typename C>
concept PathCursor = requires(C& c, const C& cc) {
  { cc.point() } -> std::convertible_to<PathPoint>;
  c.step_back();
  c.finish();
};

template <typename P>
concept PathProvider = requires(P& provider, const P& cp, std::size_t p) {
  { cp.particles() } -> std::convertible_to<std::size_t>;
  { cp.steps() } -> std::convertible_to<std::size_t>;
  { provider.cursor(p) } -> PathCursor;
};

/// Reads (X, W) from a recorded history. Memory grows with P * T.
class StoredPaths {
 public:
  explicit StoredPaths(const PathHistory& history) : history_(&history) {}

  class Cursor {
   public:
    Cursor(const PathHistory& history, std::size_t particle)
        : x_(history.x.data() + history.index(particle, 0)),
          w_(history.w.data() + history.index(particle, 0)),
          tau_(history.steps) {}

    PathPoint point() const noexcept { return {x_[tau_], w_[tau_]}; }
    void step_back() noexcept { --tau_; }
    void finish() noexcept {}

   private:
    const double* x_;
    const double* w_;
    std::size_t tau_;
  };

  std::size_t particles() const noexcept { return history_->particles; }
  std::size_t steps() const noexcept { return history_->steps; }
  Cursor cursor(std::size_t p) const { return Cursor(*history_, p); }

 private:
  const PathHistory* history_;
};

/// Recomputes (X, W) backwards from the final ensemble. Memory grows with P.
///
/// finish() rewinds the draws that preceded each particle's first normal
/// sample, so after a full sweep every generator is back at its seeded state.
class ReversiblePaths {
 public:
  ReversiblePaths(ParticleEnsemble& final_state, std::span<const std::uint32_t> leading_rejections,
                  const Grid& grid, const Control& control, double dt, std::size_t steps);

  class Cursor {
   public:
    Cursor(const ReversiblePaths& owner, std::size_t particle);

    PathPoint point() const noexcept { return point_; }
    double last_increment() const noexcept { return xi_; }
    void step_back() {
      const auto step = reverse_path_step(point_.x, point_.w, owner_->growth_[owner_->grid_.cell_of(point_.x)], *rng_,
                                          owner_->scale_, owner_->grid_.length, *owner_->table_);
      point_ = step.point;
      xi_ = step.xi;
    }
    /// Rewinds the leading rejections and the initial-position uniform.
    void finish() { rewind(*rng_, std::uint64_t{leading_} + 1); }

   private:
    const ReversiblePaths* owner_;
    ReversiblePcg64* rng_;
    PathPoint point_;
    double xi_ = 0.0;
    std::uint32_t leading_;
  };

  std::size_t particles() const noexcept { return ensemble_->size(); }
  std::size_t steps() const noexcept { return steps_; }
  Cursor cursor(std::size_t p) const { return Cursor(*this, p); }

 private:
  ParticleEnsemble* ensemble_;
  std::span<const std::uint32_t> leading_;
  Grid grid_;
  std::vector<double> growth_;
  double scale_;
  std::size_t steps_;
  const ZigguratTable* table_;
};

static_assert(PathProvider<StoredPaths>);
static_assert(PathProvider<ReversiblePaths>);

struct SweepStats {
  std::size_t edge_proximity_count = 0;
};

/// Backward sweep over all particles of `provider`; adds the particle sums to
/// `gradient` (regulariser not included). Deterministic for any thread count.
template <PathProvider Provider>
SweepStats adjoint_sweep(Provider& provider, const TemperatureField& field, const Grid& grid, const Control& control,
                         unsigned threads, std::span<double> gradient);

/// Adjoint weights W*_{p,tau} for tau = 1..T along a recorded history, laid
/// out like the history (entries for tau = 0 are zero). Meant for inspecting
/// small instances.
std::vector<double> adjoint_weight_history(const PathHistory& history, const TemperatureField& field,
                                           const Grid& grid, const Control& control);

// ---------------------------------------------------------------------------
// Gradient driver

struct GradientOptions {
  /// Upper bound on path-storage bytes; 0 means unlimited.
  std::size_t path_budget_bytes = 0;
};

struct GradientDiagnostics {
  std::size_t peak_path_bytes = 0;
  double constraint_seconds = 0.0;
  double adjoint_seconds = 0.0;
  /// Reconstructed positions within 1e-8 of a cell edge.
  std::size_t edge_proximity_count = 0;
  std::size_t empty_cells = 0;
  /// Reversible mode only: generators not back at their seeded state.
  std::optional<std::size_t> generator_mismatches;
};

struct GradientResult {
  std::vector<double> gradient;
  double objective = 0.0;
  GradientDiagnostics diagnostics;
};

/// Bytes of path storage the given mode allocates for `cfg`.
std::size_t path_storage_estimate(const SimConfig& cfg, GradientMode mode);

/// Forward run followed by the adjoint sweep. Throws ResourceLimitError when
/// the mode's path storage exceeds the budget or cannot be allocated.
GradientResult compute_gradient(const SimConfig& cfg, const Control& control, GradientMode mode,
                                const GradientOptions& options = {});

/// Directional-derivative check of the adjoint gradient against central
/// finite differences of the frozen-seed objective.
struct FiniteDifferenceReport {
  std::vector<double> adjoint_directional;
  std::vector<double> fd_directional;
  std::vector<double> relative_errors;
  double max_relative_error = 0.0;
};

FiniteDifferenceReport finite_difference_check(const SimConfig& cfg, const Control& control, std::size_t directions,
                                               double step, std::uint64_t direction_seed,
                                               GradientMode mode = GradientMode::Reversible);

}  // namespace rrmc
