#include "rrmc/heat_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

namespace rrmc {

double Theta0Profile::operator()(double x, double length) const {
  return amplitude * std::sin(2.0 * std::numbers::pi * modes * x / length) + offset;
}

double Theta0Profile::cumulative(double x, double length) const {
  if (modes == 0 || amplitude == 0.0) {
    return offset * x;
  }
  const double k = 2.0 * std::numbers::pi * modes / length;
  return offset * x + amplitude * (1.0 - std::cos(k * x)) / k;
}

std::size_t SimConfig::cells() const {
  if (!(dx > 0.0) || !(length > 0.0)) {
    return 0;
  }
  return static_cast<std::size_t>(std::llround(length / dx));
}

void SimConfig::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError("L must be positive and finite");
  }
  if (!(dx > 0.0) || dx > length) {
    throw ConfigError("dx must be in (0, L]");
  }
  const auto n = cells();
  if (n == 0 || std::abs(static_cast<double>(n) * dx - length) > 1e-9 * length) {
    throw ConfigError("L / dx must be a positive integer");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt must be positive");
  }
  if (particles < 1) {
    throw ConfigError("particles must be at least 1");
  }
  if (!(nu >= 0.0)) {
    throw ConfigError("nu must be nonnegative");
  }
  if (!(theta0.amplitude >= 0.0) || !(theta0.offset > theta0.amplitude)) {
    throw ConfigError("theta0 must stay positive: require offset > amplitude >= 0");
  }
  if (theta0.modes < 0) {
    throw ConfigError("theta0_modes must be nonnegative");
  }
}

SimConfig SimConfig::reference() { return SimConfig{}; }

SimConfig SimConfig::desk() {
  SimConfig cfg;
  cfg.dx = 0.1;
  cfg.dt = 0.005;
  cfg.steps = 200;
  cfg.particles = 10000;
  return cfg;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, int line) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("line " + std::to_string(line) + ": invalid value for '" + key + "': " + text);
  }
  return value;
}

}  // namespace

SimConfig parse_config(std::istream& in, SimConfig cfg) {
  std::string raw;
  int line = 0;
  double t_end = -1.0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const auto content = trim(std::string_view(raw).substr(0, comment));
    if (content.empty() || content.front() == '[') {
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = trim(std::string_view(content).substr(eq + 1));
    if (key == "L") {
      cfg.length = parse_number<double>(key, value, line);
    } else if (key == "dx") {
      cfg.dx = parse_number<double>(key, value, line);
    } else if (key == "dt") {
      cfg.dt = parse_number<double>(key, value, line);
    } else if (key == "t_end") {
      t_end = parse_number<double>(key, value, line);
    } else if (key == "particles") {
      cfg.particles = parse_number<std::size_t>(key, value, line);
    } else if (key == "nu") {
      cfg.nu = parse_number<double>(key, value, line);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value, line);
    } else if (key == "theta0_amplitude") {
      cfg.theta0.amplitude = parse_number<double>(key, value, line);
    } else if (key == "theta0_offset") {
      cfg.theta0.offset = parse_number<double>(key, value, line);
    } else if (key == "theta0_modes") {
      cfg.theta0.modes = parse_number<int>(key, value, line);
    } else if (key == "threads") {
      cfg.threads = parse_number<unsigned>(key, value, line);
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (t_end >= 0.0) {
    if (!(cfg.dt > 0.0)) {
      throw ConfigError("dt must be positive");
    }
    const double steps = t_end / cfg.dt;
    const auto rounded = std::llround(steps);
    if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, steps)) {
      throw ConfigError("t_end must be an integer multiple of dt");
    }
    cfg.steps = static_cast<std::size_t>(rounded);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  return parse_config(in, base);
}

double Grid::distance_to_edge(double x) const noexcept {
  const auto n = cell_of(x);
  return std::min(x - edge(n), edge(n + 1) - x);
}

}  // namespace rrmc
