#include "rrmc/tools/scaling.hpp"

#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace rrmc::tools {

std::string_view to_string(GradientMode mode) { return mode == GradientMode::Stored ? "stored" : "reversible"; }

GradientMode parse_gradient_mode(std::string_view name) {
  if (name == "stored") return GradientMode::Stored;
  if (name == "reversible") return GradientMode::Reversible;
  throw std::invalid_argument(fmt::format("unknown gradient mode '{}'", name));
}

ScalingRecord scaling_cell(const SimConfig& base, std::size_t particles, GradientMode mode,
                           std::size_t memory_budget) {
  SimConfig cfg = base;
  cfg.particles = particles;
  const auto control = Control::zeros(cfg.cells());
  try {
    const auto result = compute_gradient(cfg, control, mode, GradientOptions{memory_budget});
    const auto& d = result.diagnostics;
    return {particles, mode, d.constraint_seconds, d.adjoint_seconds, d.constraint_seconds + d.adjoint_seconds,
            d.peak_path_bytes, "ok"};
  } catch (const ResourceLimitError& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {particles, mode, nan, nan, nan, e.required_bytes, "over_budget"};
  }
}

std::vector<ScalingRecord> run_scaling(const SimConfig& base, const std::vector<std::size_t>& batch_sizes,
                                       const std::vector<GradientMode>& modes, std::size_t memory_budget) {
  std::vector<ScalingRecord> records;
  for (auto p : batch_sizes) {
    for (auto mode : modes) {
      records.push_back(scaling_cell(base, p, mode, memory_budget));
    }
  }
  return records;
}

void write_scaling_header(std::ostream& out) {
  out << "particles,mode,constraint_seconds,adjoint_seconds,total_seconds,peak_path_bytes,status\n";
}

void write_scaling_row(std::ostream& out, const ScalingRecord& r) {
  out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{},{}\n", r.particles, to_string(r.mode), r.constraint_seconds,
                     r.adjoint_seconds, r.total_seconds, r.peak_path_bytes, r.status);
  out.flush();
}

}  // namespace rrmc::tools
