#pragma once

// CSV writers for the heat commands. Cell indices are written 1-based.

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rrmc/heat_model.hpp"
#include "rrmc/optimize.hpp"

namespace rrmc::tools {

/// `tau,n,theta`; all rows, or only tau = T when `final_only`.
void write_field_csv(std::ostream& out, const TemperatureField& field, bool final_only = false);

/// `n,u,grad`.
void write_gradient_csv(std::ostream& out, const Control& control, std::span<const double> gradient);

/// `iter,objective,grad_norm,seconds`.
void write_history_csv(std::ostream& out, const OptimizationHistory& history);

/// `n,x_center,u`.
void write_control_csv(std::ostream& out, const Control& control, const Grid& grid);

/// Reads a control written by write_control_csv. Throws ConfigError on
/// malformed input or a cell count different from `cells`.
Control read_control_csv(std::istream& in, std::size_t cells);

using StatLine = std::pair<std::string, std::string>;

/// key=value lines.
void write_stats(std::ostream& out, const std::vector<StatLine>& stats);

std::string format_real(double v);

}  // namespace rrmc::tools
