#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "rrmc/heat_forward.hpp"
#include "rrmc/sampling.hpp"
#include "stats.hpp"

namespace rrmc {
namespace {

SimConfig small_config() {
  SimConfig cfg = SimConfig::desk();
  cfg.particles = 2000;
  cfg.steps = 20;
  return cfg;
}

TEST(Theta0, ProfileAndCumulative) {
  const Theta0Profile th;
  EXPECT_DOUBLE_EQ(th(0.0, 10.0), 90.0);
  EXPECT_NEAR(th(0.625, 10.0), 140.0, 1e-12);  // sin(8 pi x / 10) peaks at x = 0.625
  EXPECT_NEAR(th.cumulative(10.0, 10.0), 900.0, 1e-9);
  // Midpoint-rule check of the closed-form integral.
  const double x = 3.3;
  const int m = 200000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += th((i + 0.5) * x / m, 10.0);
  EXPECT_NEAR(th.cumulative(x, 10.0), sum * x / m, 1e-6);
}

TEST(SimConfig, Presets) {
  const auto ref = SimConfig::reference();
  EXPECT_EQ(ref.cells(), 1000u);
  EXPECT_EQ(ref.steps, 1000u);
  EXPECT_DOUBLE_EQ(ref.end_time(), 1.0);
  EXPECT_DOUBLE_EQ(ref.nu, 1.0);
  const auto desk = SimConfig::desk();
  EXPECT_EQ(desk.cells(), 100u);
  EXPECT_EQ(desk.steps, 200u);
  EXPECT_EQ(desk.particles, 10000u);
  EXPECT_DOUBLE_EQ(desk.end_time(), 1.0);
}

TEST(SimConfig, Validation) {
  auto bad = [](auto mutate) {
    SimConfig cfg = SimConfig::desk();
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](SimConfig& c) { c.dx = 0.3; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.dt = 0.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.particles = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.theta0.amplitude = 90.0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](SimConfig& c) { c.theta0.amplitude = -1.0; }).validate(), ConfigError);
  EXPECT_NO_THROW(SimConfig::reference().validate());
}

TEST(ParseConfig, KeysCommentsAndEndTime) {
  std::istringstream in(R"(# heat run
[rod]
L = 5
dx = 0.05   ; twenty cells per unit
dt = 0.01
t_end = 0.5
particles = 1234
nu = 0.25
seed = 99
theta0_amplitude = 10
theta0_offset = 20
theta0_modes = 2
)");
  const auto cfg = parse_config(in);
  EXPECT_DOUBLE_EQ(cfg.length, 5.0);
  EXPECT_EQ(cfg.cells(), 100u);
  EXPECT_EQ(cfg.steps, 50u);
  EXPECT_EQ(cfg.particles, 1234u);
  EXPECT_DOUBLE_EQ(cfg.nu, 0.25);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_DOUBLE_EQ(cfg.theta0.amplitude, 10.0);
  EXPECT_DOUBLE_EQ(cfg.theta0.offset, 20.0);
  EXPECT_EQ(cfg.theta0.modes, 2);
}

TEST(ParseConfig, Errors) {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("dx = abc\n"), ConfigError);
  EXPECT_THROW(parse("just words\n"), ConfigError);
  EXPECT_THROW(parse("dt = 0.003\nt_end = 1\n"), ConfigError);
  EXPECT_THROW(parse("theta0_offset = 10\n"), ConfigError);
  EXPECT_NO_THROW(parse(""));
}

TEST(Grid, HalfOpenCells) {
  const Grid grid(SimConfig::reference());
  EXPECT_EQ(grid.cell_of(0.0), 0u);
  EXPECT_EQ(grid.cell_of(std::nextafter(10.0, 0.0)), 999u);
  for (std::size_t n = 1; n < grid.cells; ++n) {
    ASSERT_EQ(grid.cell_of(grid.edge(n)), n);
    ASSERT_EQ(grid.cell_of(std::nextafter(grid.edge(n), 0.0)), n - 1);
  }
  EXPECT_NEAR(grid.distance_to_edge(0.0125), 0.0025, 1e-15);
}

TEST(Wrap, IntoDomain) {
  EXPECT_EQ(wrap_position(3.0, 10.0), 3.0);
  EXPECT_EQ(wrap_position(10.0, 10.0), 0.0);
  EXPECT_NEAR(wrap_position(-0.5, 10.0), 9.5, 1e-15);
  EXPECT_NEAR(wrap_position(23.25, 10.0), 3.25, 1e-14);
  const double tiny = wrap_position(-1e-300, 10.0);
  EXPECT_GE(tiny, 0.0);
  EXPECT_LT(tiny, 10.0);
}

TEST(Steps, DiffusionAndReweight) {
  EXPECT_EQ(diffusion_step(2.5, 0.0, 0.001, 10.0), 2.5);
  EXPECT_EQ(diffusion_step(0.5, 10.0, 0.5, 10.0), 0.5);

  const Grid grid(10.0, 1.0, 10);
  const auto zero = Control::zeros(10);
  EXPECT_EQ(reweight_step(2.0, 3.5, grid, zero, 0.1), 2.0);
  const Control three(std::vector<double>(10, 3.0));
  EXPECT_NEAR(reweight_step(2.0, 3.5, grid, three, 0.1), 1.4816, 1e-4);
  EXPECT_DOUBLE_EQ(reweight_step(2.0, 3.5, grid, three, 0.1), 2.0 * std::exp(-0.3));
}

TEST(InitialPositions, FlatProfileIsUniform) {
  SimConfig cfg = SimConfig::desk();
  cfg.theta0.amplitude = 0.0;
  cfg.particles = 100000;
  std::vector<ReversiblePcg64> gens;
  for (std::size_t p = 0; p < cfg.particles; ++p) gens.push_back(particle_generator(cfg.seed, p));
  auto shadow = gens;
  const auto x = sample_initial_positions(cfg, gens);
  for (std::size_t p = 0; p < x.size(); ++p) {
    ASSERT_GE(x[p], 0.0);
    ASSERT_LT(x[p], cfg.length);
    shadow[p].next();
    ASSERT_EQ(shadow[p], gens[p]);
  }
  const double d = testing::ks_statistic(x, [&](double v) { return v / cfg.length; });
  EXPECT_LT(d, testing::ks_critical_0001(x.size()));
}

TEST(InitialPositions, ReferenceProfileChiSquare) {
  SimConfig cfg = SimConfig::reference();
  cfg.particles = 1000000;
  std::vector<ReversiblePcg64> gens;
  gens.reserve(cfg.particles);
  for (std::size_t p = 0; p < cfg.particles; ++p) gens.push_back(particle_generator(cfg.seed, p));
  const auto x = sample_initial_positions(cfg, gens);
  const Grid grid(cfg);
  std::vector<double> counts(grid.cells, 0.0);
  for (double v : x) counts[grid.cell_of(v)] += 1.0;
  const double total = cfg.theta0.cumulative(cfg.length, cfg.length);
  double chi2 = 0.0;
  for (std::size_t n = 0; n < grid.cells; ++n) {
    const double prob = (cfg.theta0.cumulative(grid.edge(n + 1), cfg.length) -
                         cfg.theta0.cumulative(grid.edge(n), cfg.length)) / total;
    const double expected = prob * static_cast<double>(cfg.particles);
    chi2 += (counts[n] - expected) * (counts[n] - expected) / expected;
  }
  // Wilson-Hilferty upper 0.001 quantile for 999 degrees of freedom.
  const double k = static_cast<double>(grid.cells - 1);
  const double z = 3.090232;
  const double critical = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
  EXPECT_LT(chi2, critical);
}

TEST(InitialWeights, OnePerCellAndExactBinning) {
  const Grid grid(10.0, 1.0, 10);
  std::vector<double> theta_hat(10);
  for (std::size_t n = 0; n < 10; ++n) theta_hat[n] = 80.0 + static_cast<double>(n);
  std::vector<double> one_each(10);
  for (std::size_t n = 0; n < 10; ++n) one_each[n] = static_cast<double>(n) + 0.5;
  const auto w = assign_initial_weights(one_each, grid, theta_hat);
  for (std::size_t n = 0; n < 10; ++n) EXPECT_EQ(w.w[n], theta_hat[n] * grid.dx);
  EXPECT_EQ(w.empty_cells, 0u);

  // Uneven occupancy with two empty cells.
  const std::vector<double> x{0.1, 0.2, 0.3, 2.5, 2.6, 4.4, 5.5, 6.6, 7.7, 9.9, 9.1};
  const auto w2 = assign_initial_weights(x, grid, theta_hat);
  EXPECT_EQ(w2.empty_cells, 3u);
  std::vector<double> row(10);
  deposit(x, w2.w, grid, row);
  for (std::size_t n : {0u, 2u, 4u, 5u, 6u, 7u, 9u}) EXPECT_NEAR(row[n], theta_hat[n], 1e-12 * theta_hat[n]);
  for (std::size_t n : {1u, 3u, 8u}) EXPECT_EQ(row[n], 0.0);
}

TEST(InitialWeights, ReferenceGridOccupancy) {
  SimConfig cfg = SimConfig::reference();
  cfg.particles = 1000000;
  cfg.steps = 0;
  const auto r = run_forward(cfg, Control::zeros(cfg.cells()));
  EXPECT_LE(static_cast<double>(r.empty_cells), 0.001 * static_cast<double>(cfg.cells()));
  const auto theta_hat = initial_profile(cfg);
  for (std::size_t n = 0; n < cfg.cells(); ++n) {
    ASSERT_NEAR(r.field.at(0, n), theta_hat[n], 1e-11 * theta_hat[n]);
  }
}

TEST(Deposit, SingleParticleAndMass) {
  const Grid grid(1.0, 0.125, 8);
  std::vector<double> row(8);
  const std::vector<double> x{0.3};  // third cell, 1-based
  const std::vector<double> w{1.0};
  deposit(x, w, grid, row);
  for (std::size_t n = 0; n < 8; ++n) EXPECT_EQ(row[n], n == 2 ? 8.0 : 0.0);

  // A particle on the edge k dx belongs to the cell that starts there.
  const std::vector<double> edge{0.25};
  deposit(edge, w, grid, row);
  EXPECT_EQ(row[2], 8.0);

  ReversiblePcg64 gen(4, StreamId{4});
  std::vector<double> xs(1000), ws(1000);
  for (auto& v : xs) v = sample_uniform(gen, Direction::Forward);
  for (auto& v : ws) v = sample_uniform(gen, Direction::Forward);
  deposit(xs, ws, grid, row);
  const double mass = std::accumulate(row.begin(), row.end(), 0.0) * grid.dx;
  EXPECT_NEAR(mass, std::accumulate(ws.begin(), ws.end(), 0.0), 1e-12);
}

TEST(Objective, ClosedForms) {
  TemperatureField zero(4, 5, 0.2, 0.1);
  Control u = Control::zeros(5);
  EXPECT_EQ(objective(zero, u, 1.0), 0.0);
  u.rates[0] = 2.0;
  EXPECT_DOUBLE_EQ(objective(zero, u, 1.0), 1.0 * 0.2 * 2.0);

  TemperatureField c(4, 5, 0.2, 0.1);
  for (std::size_t tau = 0; tau <= 4; ++tau)
    for (auto& v : c.row(tau)) v = 3.0;
  EXPECT_NEAR(objective(c, Control::zeros(5), 1.0), 0.1 * 4 * 0.2 * 5 * 0.5 * 9.0, 1e-14);
}

TEST(RunForward, ZeroStepsObjective) {
  SimConfig cfg = small_config();
  cfg.steps = 0;
  Control u = Control::zeros(cfg.cells());
  u.rates[3] = 1.5;
  const auto r = run_forward(cfg, u);
  EXPECT_EQ(r.field.steps(), 0u);
  const auto theta_hat = initial_profile(cfg);
  double sq = 0.0;
  for (std::size_t n = 0; n < cfg.cells(); ++n) {
    EXPECT_NEAR(r.field.at(0, n), theta_hat[n], 1e-12 * theta_hat[n]);
    sq += r.field.at(0, n) * r.field.at(0, n);
  }
  const double expected = cfg.dt * 0.5 * cfg.dx * 0.5 * sq + cfg.nu * cfg.dx * 0.5 * 1.5 * 1.5;
  EXPECT_NEAR(r.objective, expected, 1e-12 * expected);
}

TEST(RunForward, WeightConservationAndDomain) {
  const SimConfig cfg = small_config();
  const auto r = run_forward(cfg, Control::zeros(cfg.cells()), PathRecording::Full);
  double w0 = 0.0;
  for (std::size_t p = 0; p < cfg.particles; ++p) w0 += r.history->w[r.history->index(p, 0)];
  for (std::size_t tau = 0; tau <= cfg.steps; ++tau) {
    double mass = 0.0;
    for (double v : r.field.row(tau)) mass += v * cfg.dx;
    ASSERT_NEAR(mass, w0, 1e-12 * w0);
    for (std::size_t p = 0; p < cfg.particles; ++p) {
      const double x = r.history->x[r.history->index(p, tau)];
      ASSERT_GE(x, 0.0);
      ASSERT_LT(x, cfg.length);
    }
  }
}

TEST(RunForward, ConstantControlDecay) {
  const SimConfig cfg = small_config();
  const Control c(std::vector<double>(cfg.cells(), 2.0));
  const auto r = run_forward(cfg, c, PathRecording::Full);
  const double factor = std::exp(-2.0 * static_cast<double>(cfg.steps) * cfg.dt);
  for (std::size_t p = 0; p < cfg.particles; ++p) {
    const double w0 = r.history->w[r.history->index(p, 0)];
    ASSERT_NEAR(r.final_state.w[p], w0 * factor, 1e-13 * w0);
  }
}

TEST(RunForward, HistoryMatchesFinalState) {
  const SimConfig cfg = small_config();
  const auto full = run_forward(cfg, Control::zeros(cfg.cells()), PathRecording::Full);
  const auto lean = run_forward(cfg, Control::zeros(cfg.cells()));
  EXPECT_FALSE(lean.history.has_value());
  EXPECT_EQ(full.objective, lean.objective);
  for (std::size_t p = 0; p < cfg.particles; ++p) {
    ASSERT_EQ(full.history->x[full.history->index(p, cfg.steps)], lean.final_state.x[p]);
    ASSERT_EQ(lean.final_state.x[p], full.final_state.x[p]);
    ASSERT_EQ(lean.final_state.rng[p], full.final_state.rng[p]);
  }
  EXPECT_GE(full.path_storage_bytes(), lean.path_storage_bytes() + 16 * cfg.particles * cfg.steps);
}

TEST(RunForward, ThreadCountInvariance) {
  SimConfig cfg = SimConfig::desk();
  cfg.steps = 50;
  Control u = Control::zeros(cfg.cells());
  for (std::size_t n = 0; n < u.size(); ++n) u.rates[n] = 0.01 * static_cast<double>(n % 7);
  cfg.threads = 1;
  const auto a = run_forward(cfg, u);
  cfg.threads = 4;
  const auto b = run_forward(cfg, u);
  EXPECT_EQ(a.objective, b.objective);
  ASSERT_EQ(a.field.values().size(), b.field.values().size());
  for (std::size_t i = 0; i < a.field.values().size(); ++i) ASSERT_EQ(a.field.values()[i], b.field.values()[i]);
}

TEST(RunForward, RejectsMismatchedControl) {
  const SimConfig cfg = small_config();
  EXPECT_THROW(run_forward(cfg, Control::zeros(3)), ConfigError);
}

TEST(RunForward, BrownianVariance) {
  SimConfig cfg;
  cfg.length = 1000.0;
  cfg.dx = 1.0;
  cfg.dt = 0.01;
  cfg.steps = 10;
  cfg.particles = 1000000;
  cfg.seed = 3;
  const auto r = run_forward(cfg, Control::zeros(cfg.cells()), PathRecording::Full);
  double sum = 0.0, sq = 0.0;
  for (std::size_t p = 0; p < cfg.particles; ++p) {
    const double d = std::remainder(r.final_state.x[p] - r.history->x[r.history->index(p, 0)], cfg.length);
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(cfg.particles);
  const double var = sq / n - (sum / n) * (sum / n);
  const double expected = 2.0 * static_cast<double>(cfg.steps) * cfg.dt;
  EXPECT_NEAR(var / expected, 1.0, 0.02);
}

// RMS error against the analytic single-mode decay, accumulated over seeds.
double decay_rms(SimConfig cfg, std::size_t seeds) {
  const Grid grid(cfg);
  const double k = 2.0 * std::numbers::pi * cfg.theta0.modes / cfg.length;
  const double t = cfg.end_time();
  double sq = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    cfg.seed = 1000 + s;
    const auto r = run_forward(cfg, Control::zeros(grid.cells));
    for (std::size_t n = 0; n < grid.cells; ++n) {
      const double exact = cfg.theta0.offset + cfg.theta0.amplitude * std::exp(-k * k * t) * std::sin(k * grid.center(n));
      const double e = r.field.at(cfg.steps, n) - exact;
      sq += e * e;
    }
  }
  return std::sqrt(sq / static_cast<double>(seeds * grid.cells));
}

TEST(RunForward, ErrorShrinksLikeInverseSqrtP) {
  // Both sizes keep hundreds of particles per cell, where the 1/count
  // weight inflation is negligible, and many seeds are pooled so the ratio
  // estimate itself is tight. One step already moves most particles across
  // a cell edge.
  SimConfig cfg = SimConfig::desk();
  cfg.steps = 1;
  cfg.particles = 30000;
  const double coarse = decay_rms(cfg, 600);
  cfg.particles = 300000;
  const double fine = decay_rms(cfg, 600);
  const double ratio = coarse / fine;
  EXPECT_GE(ratio, 1.3);
  EXPECT_LE(ratio, 3.2);
}

}  // namespace
}  // namespace rrmc
