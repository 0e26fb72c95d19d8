#include "rrmc/optimize.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace rrmc {

void OptimizerConfig::validate() const {
  if (iterations < 1) {
    throw ConfigError("iterations must be at least 1");
  }
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step size must be positive");
  }
  if (max_halvings < 0) {
    throw ConfigError("max halvings must be non-negative");
  }
}

Control gd_step(const Control& u, std::span<const double> g, double eta) {
  if (g.size() != u.size()) {
    throw std::invalid_argument("gradient has " + std::to_string(g.size()) + " entries, control has " +
                                std::to_string(u.size()));
  }
  Control next = u;
  for (std::size_t n = 0; n < g.size(); ++n) {
    next.rates[n] -= eta * g[n];
  }
  return next;
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) {
    sum += x * x;
  }
  return std::sqrt(sum);
}

OptimizationResult run_optimization(const SimConfig& cfg, const OptimizerConfig& opt) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  opt.validate();

  OptimizationResult result;
  result.control = opt.initial.value_or(Control::zeros(cfg.cells()));
  if (result.control.size() != cfg.cells()) {
    throw ConfigError("initial control has " + std::to_string(result.control.size()) + " entries, grid has " +
                      std::to_string(cfg.cells()) + " cells");
  }
  double eta = opt.step_size;

  SimConfig run = cfg;
  const auto start = clock::now();
  auto current = compute_gradient(run, result.control, opt.gradient_mode);

  for (std::size_t k = 1; k <= opt.iterations; ++k) {
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.history.records.push_back({k, current.objective, l2_norm(current.gradient), seconds});

    if (opt.seed_mode == SeedMode::Resample) {
      result.control = gd_step(result.control, current.gradient, eta);
      if (k < opt.iterations) {
        run.seed = cfg.seed + k;
        current = compute_gradient(run, result.control, opt.gradient_mode);
      }
      continue;
    }

    for (int halvings = 0;; ++halvings) {
      Control candidate = gd_step(result.control, current.gradient, eta);
      auto next = compute_gradient(run, candidate, opt.gradient_mode);
      if (next.objective <= current.objective) {
        result.control = std::move(candidate);
        current = std::move(next);
        break;
      }
      if (halvings == opt.max_halvings) {
        throw StepHalvingError("objective increased at iteration " + std::to_string(k) + " after " +
                               std::to_string(halvings) + " step halvings");
      }
      eta *= 0.5;
    }
  }
  result.final_step_size = eta;
  return result;
}

}  // namespace rrmc
