#include "rrmc/tools/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rrmc/heat_adjoint.hpp"
#include "rrmc/heat_forward.hpp"
#include "rrmc/optimize.hpp"
#include "rrmc/parallel.hpp"
#include "rrmc/tools/io.hpp"
#include "rrmc/tools/rng_tools.hpp"
#include "rrmc/tools/scaling.hpp"

namespace rrmc::tools {

namespace fs = std::filesystem;

namespace {

/// Accepts plain integers and integral scientific notation such as 1e6.
std::size_t parse_count(const std::string& text) {
  std::size_t pos = 0;
  const double v = std::stod(text, &pos);
  if (pos != text.size() || !(v >= 0.0) || v != std::floor(v) || v > 1e18) {
    throw ConfigError(fmt::format("'{}' is not a non-negative integer", text));
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_counts(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    out.push_back(parse_count(s));
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  return f;
}

struct HeatOptions {
  std::string config;
  std::string preset = "reference";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> particles;
  unsigned threads = default_thread_count();
  std::string out = ".";
};

SimConfig resolve_config(const HeatOptions& o) {
  SimConfig base;
  if (o.preset == "reference") {
    base = SimConfig::reference();
  } else if (o.preset == "desk") {
    base = SimConfig::desk();
  } else {
    throw ConfigError(fmt::format("unknown preset '{}'", o.preset));
  }
  SimConfig cfg = o.config.empty() ? base : load_config(o.config, base);
  if (o.seed) cfg.seed = *o.seed;
  if (o.particles) cfg.particles = parse_count(*o.particles);
  cfg.threads = std::max(1u, o.threads);
  cfg.validate();
  return cfg;
}

void add_heat_options(CLI::App* cmd, HeatOptions& o) {
  cmd->add_option("--config", o.config, "INI-style config file")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "Base parameters before --config is applied")
      ->check(CLI::IsMember({"reference", "desk"}));
  cmd->add_option("--seed", o.seed, "Base seed (overrides config)");
  cmd->add_option("--particles", o.particles, "Particle count (overrides config)");
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

Control initial_control(const std::string& path, std::size_t cells) {
  if (path.empty()) {
    return Control::zeros(cells);
  }
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read control file '{}'", path));
  }
  return read_control_csv(in, cells);
}

void emit_stats(std::ostream& out, const fs::path& dir, const std::vector<StatLine>& stats) {
  write_stats(out, stats);
  auto f = open_output(dir / "stats.txt");
  write_stats(f, stats);
}

std::vector<StatLine> gradient_stats(const GradientResult& r) {
  const auto& d = r.diagnostics;
  std::vector<StatLine> s{{"objective", format_real(r.objective)},
                          {"peak_path_bytes", std::to_string(d.peak_path_bytes)},
                          {"constraint_seconds", fmt::format("{:.6f}", d.constraint_seconds)},
                          {"adjoint_seconds", fmt::format("{:.6f}", d.adjoint_seconds)},
                          {"edge_proximity_count", std::to_string(d.edge_proximity_count)},
                          {"empty_cells", std::to_string(d.empty_cells)}};
  if (d.generator_mismatches) {
    s.emplace_back("generator_mismatches", std::to_string(*d.generator_mismatches));
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reversible random numbers and adjoint Monte Carlo for a cooled rod", "rrmc"};
  app.require_subcommand(1);
  // Set by the selected subcommand's callback.
  std::function<int()> action;

  // rng ---------------------------------------------------------------------
  auto* rng = app.add_subcommand("rng", "Reversible generator utilities");
  rng->require_subcommand(1);

  std::string roundtrip_count = "1000000";
  std::uint64_t roundtrip_seed = 0;
  std::optional<unsigned> corrupt_bit;
  auto* roundtrip = rng->add_subcommand("roundtrip", "Check that reverse draws mirror forward draws bitwise");
  roundtrip->add_option("--count", roundtrip_count, "Draws per distribution")->capture_default_str();
  roundtrip->add_option("--seed", roundtrip_seed, "Generator seed")->capture_default_str();
  roundtrip->add_option("--corrupt-bit", corrupt_bit, "Test hook: flip this state bit between the passes");
  roundtrip->callback([&] {
    action = [&] {
      const auto count = parse_count(roundtrip_count);
      if (count < 1) {
        throw ConfigError("--count must be at least 1");
      }
      for (const auto& c : default_roundtrip_cases()) {
        if (auto failure = roundtrip_check(c, count, roundtrip_seed, corrupt_bit)) {
          err << fmt::format("mismatch: dist={} index={}\n", failure->label, failure->index);
          return kExitVerification;
        }
        out << fmt::format("ok: dist={} count={}\n", c.label(), count);
      }
      return kExitOk;
    };
  });

  std::vector<std::string> bench_dists{"uniform", "exponential", "normal"};
  std::vector<std::string> bench_modes{"forward", "reverse"};
  std::vector<std::string> bench_counts{"1000", "10000", "100000", "1000000", "10000000"};
  std::uint64_t bench_seed = 0;
  BenchProtocol protocol;
  std::string bench_out;
  auto* bench_rng = rng->add_subcommand("bench", "Min-of-N timings of forward and reverse sampling");
  bench_rng->add_option("--dist", bench_dists, "Distributions")
      ->delimiter(',')
      ->check(CLI::IsMember({"uniform", "exponential", "normal"}));
  bench_rng->add_option("--mode", bench_modes, "Directions")->delimiter(',')->check(CLI::IsMember({"forward", "reverse"}));
  bench_rng->add_option("--counts", bench_counts, "Draw counts K")->delimiter(',');
  bench_rng->add_option("--seed", bench_seed, "Generator seed")->capture_default_str();
  bench_rng->add_option("--runs", protocol.runs, "Timings per cell")->capture_default_str();
  bench_rng->add_option("--discard", protocol.discard, "Leading timings dropped")->capture_default_str();
  bench_rng->add_option("--out", bench_out, "CSV path (default: standard output)");
  bench_rng->callback([&] {
    action = [&] {
      const auto counts = parse_counts(bench_counts);
      for (auto k : counts) {
        if (k < 1000 || k > 100000000) {
          throw ConfigError(fmt::format("count {} outside [1e3, 1e8]", k));
        }
      }
      std::vector<Direction> modes;
      for (const auto& m : bench_modes) {
        modes.push_back(parse_direction(m));
      }
      std::vector<BenchRecord> records;
      for (auto k : counts) {
        for (const auto& d : bench_dists) {
          const auto cell = bench_distribution(parse_distribution(d), modes, k, bench_seed, protocol);
          records.insert(records.end(), cell.begin(), cell.end());
        }
      }
      if (bench_out.empty()) {
        write_bench_csv(out, records);
      } else {
        auto f = open_output(bench_out);
        write_bench_csv(f, records);
      }
      return kExitOk;
    };
  });

  std::string stream_bytes;
  std::uint64_t stream_seed = 0;
  std::uint64_t stream_id = 0;
  auto* stream = rng->add_subcommand("stream", "Raw little-endian 64-bit outputs on standard output");
  stream->add_option("--bytes", stream_bytes, "Number of bytes")->required();
  stream->add_option("--seed", stream_seed, "Initial state")->capture_default_str();
  stream->add_option("--stream", stream_id, "Stream selector")->capture_default_str();
  stream->callback([&] {
    action = [&] {
      const auto bytes = parse_count(stream_bytes);
      if (bytes < 1) {
        throw ConfigError("--bytes must be positive");
      }
      if (!write_raw_stream(out, bytes, stream_seed, stream_id)) {
        err << "output closed before all bytes were written\n";
        return kExitVerification;
      }
      return kExitOk;
    };
  });

  // heat --------------------------------------------------------------------
  auto* heat = app.add_subcommand("heat", "Cooled-rod simulation, gradient and optimization");
  heat->require_subcommand(1);
  HeatOptions heat_opts;

  bool final_only = false;
  auto* simulate = heat->add_subcommand("simulate", "Forward run; writes field.csv");
  add_heat_options(simulate, heat_opts);
  std::string sim_control;
  simulate->add_option("--control", sim_control, "Control CSV (n,x_center,u); default all zeros");
  simulate->add_flag("--final-only", final_only, "Write only the tau = T row");
  simulate->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(heat_opts);
      const auto control = initial_control(sim_control, cfg.cells());
      const auto result = run_forward(cfg, control);
      const fs::path dir = heat_opts.out;
      auto f = open_output(dir / "field.csv");
      write_field_csv(f, result.field, final_only);
      emit_stats(out, dir,
                 {{"objective", format_real(result.objective)},
                  {"empty_cells", std::to_string(result.empty_cells)},
                  {"peak_path_bytes", std::to_string(result.path_storage_bytes())}});
      return kExitOk;
    };
  });

  std::string grad_mode = "reversible";
  std::string grad_control;
  std::size_t fd_check = 0;
  double fd_step = 1e-5;
  double fd_tolerance = 1e-4;
  std::uint64_t fd_seed = 1;
  std::size_t grad_budget = 0;
  auto* gradient = heat->add_subcommand("gradient", "Adjoint gradient; writes gradient.csv");
  add_heat_options(gradient, heat_opts);
  gradient->add_option("--mode", grad_mode, "Path mode")->check(CLI::IsMember({"stored", "reversible"}))->capture_default_str();
  gradient->add_option("--control", grad_control, "Control CSV (n,x_center,u); default all zeros");
  gradient->add_option("--fd-check", fd_check, "Random directions for the finite-difference check");
  gradient->add_option("--fd-step", fd_step, "Central-difference step")->capture_default_str();
  gradient->add_option("--fd-tolerance", fd_tolerance, "Maximum accepted relative error")->capture_default_str();
  gradient->add_option("--fd-seed", fd_seed, "Seed for the check directions")->capture_default_str();
  gradient->add_option("--memory-budget", grad_budget, "Path-storage budget in bytes (0: unlimited)");
  gradient->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(heat_opts);
      const auto control = initial_control(grad_control, cfg.cells());
      const auto mode = parse_gradient_mode(grad_mode);
      const auto result = compute_gradient(cfg, control, mode, GradientOptions{grad_budget});
      const fs::path dir = heat_opts.out;
      auto f = open_output(dir / "gradient.csv");
      write_gradient_csv(f, control, result.gradient);
      auto stats = gradient_stats(result);
      int status = kExitOk;
      if (fd_check > 0) {
        const auto report = finite_difference_check(cfg, control, fd_check, fd_step, fd_seed, mode);
        stats.emplace_back("fd_directions", std::to_string(fd_check));
        stats.emplace_back("fd_max_relative_error", fmt::format("{:.3e}", report.max_relative_error));
        if (!(report.max_relative_error < fd_tolerance)) {
          status = kExitVerification;
        }
      }
      emit_stats(out, dir, stats);
      return status;
    };
  });

  OptimizerConfig opt;
  std::string opt_mode = "reversible";
  std::string seed_mode = "frozen";
  std::string opt_control;
  auto* optimize = heat->add_subcommand("optimize", "Gradient descent; writes history.csv and control.csv");
  add_heat_options(optimize, heat_opts);
  optimize->add_option("--iterations", opt.iterations, "Descent iterations")->capture_default_str();
  optimize->add_option("--step", opt.step_size, "Initial step size")->capture_default_str();
  optimize->add_option("--seed-mode", seed_mode, "frozen or resample")
      ->check(CLI::IsMember({"frozen", "resample"}))
      ->capture_default_str();
  optimize->add_option("--mode", opt_mode, "Path mode")->check(CLI::IsMember({"stored", "reversible"}))->capture_default_str();
  optimize->add_option("--max-halvings", opt.max_halvings, "Frozen-mode step halvings per iteration")->capture_default_str();
  optimize->add_option("--control", opt_control, "Initial control CSV; default all zeros");
  optimize->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(heat_opts);
      opt.seed_mode = seed_mode == "frozen" ? SeedMode::Frozen : SeedMode::Resample;
      opt.gradient_mode = parse_gradient_mode(opt_mode);
      opt.initial = initial_control(opt_control, cfg.cells());
      const auto result = run_optimization(cfg, opt);
      const fs::path dir = heat_opts.out;
      auto h = open_output(dir / "history.csv");
      write_history_csv(h, result.history);
      auto c = open_output(dir / "control.csv");
      write_control_csv(c, result.control, Grid(cfg));
      const auto& last = result.history.records.back();
      emit_stats(out, dir,
                 {{"iterations", std::to_string(result.history.records.size())},
                  {"first_objective", format_real(result.history.records.front().objective)},
                  {"last_objective", format_real(last.objective)},
                  {"first_grad_norm", format_real(result.history.records.front().grad_norm)},
                  {"last_grad_norm", format_real(last.grad_norm)},
                  {"final_step_size", format_real(result.final_step_size)}});
      return kExitOk;
    };
  });

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Heat benchmarks");
  bench->require_subcommand(1);
  HeatOptions scale_opts;
  std::vector<std::string> batch_sizes{"10000", "100000", "1000000"};
  std::vector<std::string> scale_modes{"stored", "reversible"};
  std::size_t scale_budget = 0;
  std::string scale_out;
  auto* scaling = bench->add_subcommand("scaling", "Stored vs reversible gradient cost over batch sizes");
  scaling->add_option("--config", scale_opts.config, "INI-style config file")->check(CLI::ExistingFile);
  scaling->add_option("--preset", scale_opts.preset, "Base parameters")->check(CLI::IsMember({"reference", "desk"}));
  scaling->add_option("--seed", scale_opts.seed, "Base seed");
  scaling->add_option("--threads", scale_opts.threads, "Worker threads")->capture_default_str();
  scaling->add_option("--batch-sizes", batch_sizes, "Ascending particle counts")->delimiter(',');
  scaling->add_option("--modes", scale_modes, "Path modes")->delimiter(',')->check(CLI::IsMember({"stored", "reversible"}));
  scaling->add_option("--memory-budget", scale_budget, "Path-storage budget in bytes (0: unlimited)");
  scaling->add_option("--out", scale_out, "CSV path (default: standard output)");
  scaling->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(scale_opts);
      const auto sizes = parse_counts(batch_sizes);
      if (!std::is_sorted(sizes.begin(), sizes.end())) {
        throw ConfigError("--batch-sizes must be ascending");
      }
      std::vector<GradientMode> modes;
      for (const auto& m : scale_modes) {
        modes.push_back(parse_gradient_mode(m));
      }
      std::ofstream file;
      std::ostream* sink = &out;
      if (!scale_out.empty()) {
        file = open_output(scale_out);
        sink = &file;
      }
      write_scaling_header(*sink);
      for (auto p : sizes) {
        for (auto m : modes) {
          write_scaling_row(*sink, scaling_cell(cfg, p, m, scale_budget));
        }
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    err << fmt::format("resource limit: {} (required_bytes={} budget_bytes={})\n", e.what(), e.required_bytes,
                       e.budget_bytes);
    return kExitVerification;
  } catch (const StepHalvingError& e) {
    err << "optimizer: " << e.what() << '\n';
    return kExitVerification;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  }
}

}  // namespace rrmc::tools
