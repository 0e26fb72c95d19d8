#pragma once

// Gradient descent on the discrete objective.
//
// Frozen mode reuses the configured seed every iteration, so the objective is
// a fixed smooth function of the control and a rejected step (objective went
// up) is retried with half the step size. Resample mode draws a new seed per
// iteration and never rejects.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrmc/heat_adjoint.hpp"
#include "rrmc/heat_model.hpp"

namespace rrmc {

enum class SeedMode { Frozen, Resample };

struct OptimizerConfig {
  std::size_t iterations = 50;
  double step_size = 1e-2;
  SeedMode seed_mode = SeedMode::Frozen;
  /// Empty means all zeros.
  std::optional<Control> initial;
  GradientMode gradient_mode = GradientMode::Reversible;
  int max_halvings = 5;

  void validate() const;
};

/// u - eta * g. Throws std::invalid_argument on a size mismatch.
Control gd_step(const Control& u, std::span<const double> g, double eta);

struct IterationRecord {
  std::size_t iteration;
  double objective;
  double grad_norm;
  double seconds;
};

struct OptimizationHistory {
  std::vector<IterationRecord> records;
};

struct OptimizationResult {
  Control control;
  OptimizationHistory history;
  /// Step size in force after any halvings.
  double final_step_size = 0.0;
};

/// Thrown when a frozen-mode step keeps increasing the objective after the
/// allowed number of halvings.
class StepHalvingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Record k holds the objective and gradient norm at the control the k-th
/// step starts from, so history.records.size() == iterations.
OptimizationResult run_optimization(const SimConfig& cfg, const OptimizerConfig& opt);

double l2_norm(std::span<const double> v);

}  // namespace rrmc
