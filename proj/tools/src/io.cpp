#include "rrmc/tools/io.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

namespace rrmc::tools {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

void write_field_csv(std::ostream& out, const TemperatureField& field, bool final_only) {
  out << "tau,n,theta\n";
  const std::size_t first = final_only ? field.steps() : 0;
  fmt::memory_buffer buf;
  for (std::size_t tau = first; tau <= field.steps(); ++tau) {
    const auto row = field.row(tau);
    for (std::size_t n = 0; n < row.size(); ++n) {
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g}\n", tau, n + 1, row[n]);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  }
}

void write_gradient_csv(std::ostream& out, const Control& control, std::span<const double> gradient) {
  out << "n,u,grad\n";
  for (std::size_t n = 0; n < gradient.size(); ++n) {
    out << fmt::format("{},{:.17g},{:.17g}\n", n + 1, control.rates[n], gradient[n]);
  }
}

void write_history_csv(std::ostream& out, const OptimizationHistory& history) {
  out << "iter,objective,grad_norm,seconds\n";
  for (const auto& r : history.records) {
    out << fmt::format("{},{:.17g},{:.17g},{:.6f}\n", r.iteration, r.objective, r.grad_norm, r.seconds);
  }
}

void write_control_csv(std::ostream& out, const Control& control, const Grid& grid) {
  out << "n,x_center,u\n";
  for (std::size_t n = 0; n < control.size(); ++n) {
    out << fmt::format("{},{:.17g},{:.17g}\n", n + 1, grid.center(n), control.rates[n]);
  }
}

Control read_control_csv(std::istream& in, std::size_t cells) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,", 0) != 0) {
    throw ConfigError("control CSV: missing header");
  }
  std::vector<double> rates(cells, 0.0);
  std::vector<bool> seen(cells, false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) {
      fields.push_back(f);
    }
    if (fields.size() < 2) {
      throw ConfigError(fmt::format("control CSV line {}: expected at least 2 fields", lineno));
    }
    std::size_t n = 0;
    const auto& idx = fields.front();
    if (std::from_chars(idx.data(), idx.data() + idx.size(), n).ec != std::errc{} || n < 1 || n > cells) {
      throw ConfigError(fmt::format("control CSV line {}: bad cell index '{}'", lineno, idx));
    }
    try {
      rates[n - 1] = std::stod(fields.back());
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("control CSV line {}: bad value '{}'", lineno, fields.back()));
    }
    seen[n - 1] = true;
  }
  for (std::size_t n = 0; n < cells; ++n) {
    if (!seen[n]) {
      throw ConfigError(fmt::format("control CSV: no value for cell {}", n + 1));
    }
  }
  return Control(std::move(rates));
}

void write_stats(std::ostream& out, const std::vector<StatLine>& stats) {
  for (const auto& [key, value] : stats) {
    out << key << '=' << value << '\n';
  }
}

}  // namespace rrmc::tools
