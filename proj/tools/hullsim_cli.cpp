// Command line front end for the convex hull simulation laboratory.
//
// Subcommands:
//   simulate         constructed-sequence convergence run
//   goodman          i.i.d. Gaussian baseline run
//   tailbound        analytic vs exact tail table
//   partition-check  quota partition diagnostics
//   hull2d           2D demo run that dumps normalized hull vertices
//
// Exit codes: 0 success, 1 config or usage error, 2 runtime or I/O error,
// 3 invariant violation.

#include "hullsim/runner.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::atomic<bool> g_interrupt{false};

void handle_sigint(int) { g_interrupt.store(true, std::memory_order_relaxed); }

struct CommonOpts {
  std::string config;
  std::vector<uint64_t> seeds;
  long long n_max = 0;
  std::string out;
  int threads = -1;
  bool lenient = false;
  bool emit_default = false;
};

void add_common_options(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("--config", opts->config, "JSON config file");
  sub->add_option("--seed", opts->seeds, "seed list override (comma separated)")->delimiter(',');
  sub->add_option("--n", opts->n_max, "drop checkpoints larger than this value");
  sub->add_option("--out", opts->out, "output directory override");
  sub->add_option("--threads", opts->threads, "worker thread count (0 = hardware)");
  sub->add_flag("--lenient", opts->lenient, "warn on unknown config keys instead of failing");
  sub->add_flag("--emit-default-config", opts->emit_default,
                "print the default config for this subcommand and exit");
}

void truncate_grid(std::vector<long long>& grid, long long n_max) {
  while (!grid.empty() && grid.back() > n_max) grid.pop_back();
}

hullsim::ExperimentConfig effective_config(hullsim::RunMode mode, const CommonOpts& opts) {
  hullsim::ExperimentConfig cfg = opts.config.empty()
                                      ? hullsim::default_config(mode)
                                      : hullsim::parse_config(opts.config, opts.lenient);
  cfg.mode = mode;
  if (!opts.seeds.empty()) cfg.seeds = opts.seeds;
  if (opts.n_max > 0) {
    truncate_grid(cfg.checkpoints, opts.n_max);
    truncate_grid(cfg.tail_n, opts.n_max);
  }
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.threads >= 0) cfg.threads = opts.threads;
  hullsim::validate_config(cfg);
  cfg.interrupt_flag = &g_interrupt;
  return cfg;
}

int run_convergence(hullsim::RunMode mode, const CommonOpts& opts) {
  const hullsim::ExperimentConfig cfg = effective_config(mode, opts);
  const hullsim::ConvergenceReport report = mode == hullsim::RunMode::Goodman
                                                ? hullsim::run_goodman(cfg)
                                                : hullsim::run_counterexample(cfg);
  const std::filesystem::path out_dir(cfg.out_dir);
  hullsim::write_report_csv(report, out_dir / "report.csv");
  hullsim::write_summary_csv(report, out_dir / "summary.csv");
  std::printf("wrote %s (%zu rows)\n", (out_dir / "report.csv").c_str(), report.rows.size());
  std::printf("wrote %s (%zu rows)\n", (out_dir / "summary.csv").c_str(),
              report.aggregates.size());
  if (report.interrupted) {
    std::fprintf(stderr, "interrupted: partial results flushed\n");
    return 2;
  }
  return 0;
}

int run_tail(const CommonOpts& opts) {
  const hullsim::ExperimentConfig cfg = effective_config(hullsim::RunMode::Tailbound, opts);
  const auto rows = hullsim::run_tailbound(cfg);
  const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "tailbound.csv";
  hullsim::write_tailbound_csv(rows, path);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
  return 0;
}

int run_partition(const CommonOpts& opts) {
  const hullsim::ExperimentConfig cfg = effective_config(hullsim::RunMode::PartitionCheck, opts);
  const auto rows = hullsim::run_partition_check(cfg);
  const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "partition.csv";
  hullsim::write_partition_csv(rows, path);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
  return 0;
}

int dispatch(hullsim::RunMode mode, const CommonOpts& opts) {
  if (opts.emit_default) {
    std::cout << hullsim::config_to_json(hullsim::default_config(mode)).dump(2) << "\n";
    return 0;
  }
  switch (mode) {
    case hullsim::RunMode::Tailbound: return run_tail(opts);
    case hullsim::RunMode::PartitionCheck: return run_partition(opts);
    default: return run_convergence(mode, opts);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);
  CLI::App app{"convex hull scaling simulation laboratory"};
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* help;
    hullsim::RunMode mode;
  };
  const SubSpec subs[] = {
      {"simulate", "run the constructed-sequence convergence experiment",
       hullsim::RunMode::Counterexample},
      {"goodman", "run the i.i.d. Gaussian baseline", hullsim::RunMode::Goodman},
      {"tailbound", "tabulate the analytic tail bound against the exact tail",
       hullsim::RunMode::Tailbound},
      {"partition-check", "verify quota partition discrepancies",
       hullsim::RunMode::PartitionCheck},
      {"hull2d", "2D demo run dumping normalized hull vertices", hullsim::RunMode::Hull2dDemo},
  };

  std::vector<std::pair<hullsim::RunMode, CommonOpts*>> parsed;
  std::vector<std::unique_ptr<CommonOpts>> storage;
  for (const SubSpec& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    storage.push_back(std::make_unique<CommonOpts>());
    CommonOpts* opts = storage.back().get();
    add_common_options(sub, opts);
    const hullsim::RunMode mode = spec.mode;
    sub->callback([&parsed, mode, opts]() { parsed.emplace_back(mode, opts); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (parsed.empty()) {
    std::fprintf(stderr, "error: missing subcommand\n");
    return 1;
  }

  try {
    return dispatch(parsed.front().first, *parsed.front().second);
  } catch (const hullsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const hullsim::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
