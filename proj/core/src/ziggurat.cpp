#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "rrmc/sampling.hpp"

namespace rrmc {
namespace {

double density(double x) { return std::exp(-0.5 * x * x); }

// Integral of exp(-x^2/2) over [r, inf).
double tail_integral(double r) {
  return std::sqrt(std::numbers::pi / 2.0) * std::erfc(r / std::numbers::sqrt2);
}

struct Layers {
  double area;
  std::vector<double> edges;
  std::vector<double> heights;
  double closure;  // 1 - h_0 as built from the base upwards
};

// Builds the layers upwards from tail start r. Returns nullopt when an
// intermediate height reaches 1 (r too small).
std::optional<Layers> build_from_tail(double r, unsigned layers) {
  Layers out;
  out.area = r * density(r) + tail_integral(r);
  out.edges.assign(layers + 1, 0.0);
  out.heights.assign(layers + 1, 0.0);
  out.edges[layers - 1] = r;
  out.heights[layers - 1] = density(r);
  for (unsigned z = layers - 2;; --z) {
    const double h = out.heights[z + 1] + out.area / out.edges[z + 1];
    if (z == 0) {
      out.closure = 1.0 - h;
      break;
    }
    if (h >= 1.0) {
      return std::nullopt;
    }
    out.heights[z] = h;
    out.edges[z] = std::sqrt(-2.0 * std::log(h));
  }
  out.edges[0] = 0.0;
  out.heights[0] = 1.0;
  out.edges[layers] = out.area / density(r);
  out.heights[layers] = 0.0;
  return out;
}

// Negative when the stack overshoots height 1.
double closure_residual(double r, unsigned layers) {
  const auto built = build_from_tail(r, layers);
  return built ? built->closure : -1.0;
}

}  // namespace

ZigguratTable::ZigguratTable(unsigned layers) : layers_(layers) {
  if (layers < 8 || layers > 128 || !std::has_single_bit(layers)) {
    throw std::invalid_argument("ZigguratTable: layer count must be a power of two in [8, 128], got " +
                                std::to_string(layers));
  }
  double lo = 0.25;
  double hi = 12.0;
  if (!(closure_residual(lo, layers) < 0.0 && closure_residual(hi, layers) > 0.0)) {
    throw std::runtime_error("ZigguratTable: closure condition not bracketed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (closure_residual(mid, layers) < 0.0 ? lo : hi) = mid;
  }
  const double r = std::abs(closure_residual(lo, layers)) < std::abs(closure_residual(hi, layers)) ? lo : hi;
  auto built = build_from_tail(r, layers);
  // Relative to the topmost layer height the residual must be at the 1e-14 level.
  if (!built || std::abs(built->closure) > 1e-14 * layers) {
    throw std::runtime_error("ZigguratTable: root finder did not converge");
  }
  area_ = built->area;
  edges_ = std::move(built->edges);
  heights_ = std::move(built->heights);
}

const ZigguratTable& ZigguratTable::standard() {
  static const ZigguratTable table(128);
  return table;
}

double ZigguratTable::layer_area(unsigned z) const {
  if (z + 1 == layers_) {
    return tail_start() * heights_[z] + tail_integral(tail_start());
  }
  return edges_[z + 1] * (heights_[z] - heights_[z + 1]);
}

}  // namespace rrmc
