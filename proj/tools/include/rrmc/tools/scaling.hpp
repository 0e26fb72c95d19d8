#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "rrmc/heat_adjoint.hpp"

namespace rrmc::tools {

struct ScalingRecord {
  std::size_t particles;
  GradientMode mode;
  double constraint_seconds;
  double adjoint_seconds;
  double total_seconds;
  std::size_t peak_path_bytes;
  /// "ok", or "over_budget" for a cell skipped by the memory guard. Skipped
  /// cells carry NaN timings and the estimated byte count.
  std::string status;
};

std::string_view to_string(GradientMode mode);
GradientMode parse_gradient_mode(std::string_view name);

/// Runs compute_gradient for every (P, mode) pair in the given order.
/// `memory_budget` of 0 disables the guard.
std::vector<ScalingRecord> run_scaling(const SimConfig& base, const std::vector<std::size_t>& batch_sizes,
                                       const std::vector<GradientMode>& modes, std::size_t memory_budget);

ScalingRecord scaling_cell(const SimConfig& base, std::size_t particles, GradientMode mode,
                           std::size_t memory_budget);

void write_scaling_header(std::ostream& out);
void write_scaling_row(std::ostream& out, const ScalingRecord& r);

}  // namespace rrmc::tools
