#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "anthracnose/config.hpp"
#include "anthracnose/runner.hpp"

namespace fs = std::filesystem;
using namespace anthracnose;

namespace {

void print_record(const RunRecord& r, const fs::path& dir) {
  if (!r.ok) {
    std::printf("FAILED  %-48s %s\n", r.scenario.id().c_str(), r.error.c_str());
    return;
  }
  std::printf("%-7s %-48s rel_err=%-11.4g overshoot=%-9.2g %6.2fs  %s\n",
              r.passed() ? "ok" : "CHECK", r.scenario.id().c_str(), r.final_rel_err,
              r.overshoot.max(), r.wall_seconds, dir.string().c_str());
}

int report_batch(const BatchResult& b) {
  int bad = 0;
  for (std::size_t i = 0; i < b.records.size(); ++i) {
    print_record(b.records[i], b.directories[i]);
    bad += b.records[i].passed() ? 0 : 1;
  }
  std::printf("%zu runs, %d with failures\n", b.records.size(), bad);
  return bad == 0 ? 0 : 1;
}

// A run directory, or a directory whose children are run directories.
std::vector<fs::path> run_dirs(const fs::path& dir) {
  if (fs::exists(dir / "summary.txt")) return {dir};
  std::vector<fs::path> out;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.txt")) out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no run directories under " + dir.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anthracnose within-host and spatial models with state observers"};
  app.require_subcommand(1);

  std::string config_path, out_flag, matrix, run_dir, params_path;
  unsigned jobs = 0;
  double t_end = -1.0;
  int grid_n = 0, grid_dim = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a configuration file");
  validate_cmd->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);

  auto* run_cmd = app.add_subcommand("run", "run every scenario of a configuration file");
  run_cmd->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", out_flag, "output root (default $ANTHRACNOSE_OUTPUT_ROOT or runs)");
  run_cmd->add_option("-j,--jobs", jobs, "worker threads (0: one per core)");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a reference scenario matrix");
  sweep_cmd->add_option("matrix", matrix, "paper-ode, paper-pde or table1-grid")
      ->required()
      ->check(CLI::IsMember({"paper-ode", "paper-pde", "table1-grid"}));
  sweep_cmd->add_option("-c,--config", params_path, "take parameters from this file")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--out", out_flag, "output root (default $ANTHRACNOSE_OUTPUT_ROOT or runs)");
  sweep_cmd->add_option("-j,--jobs", jobs, "worker threads (0: one per core)");
  sweep_cmd->add_option("--t-end", t_end, "final time")->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--grid-n", grid_n, "cells per side for spatial runs")->check(CLI::Range(2, 4096));
  sweep_cmd->add_option("--grid-dim", grid_dim, "1 or 2")->check(CLI::Range(1, 2));
  auto* seed_opt = sweep_cmd->add_option("--seed", seed, "anisotropy seed");

  auto* check_cmd = app.add_subcommand("check", "re-verify stored runs from their files");
  check_cmd->add_option("run-dir", run_dir, "run directory or output root")->required();

  auto* plot_cmd = app.add_subcommand("plot", "redraw the SVG plots of stored runs");
  plot_cmd->add_option("run-dir", run_dir, "run directory or output root")->required();

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    if (*validate_cmd) {
      const Config c = load_config(config_path);
      const ValidationReport report = validate(c.params);
      for (const auto& v : report.violations) {
        std::printf("warning [%s] %s\n", v.hypothesis.c_str(), v.message.c_str());
      }
      std::printf("%s: valid, %zu scenarios\n", config_path.c_str(), c.scenarios.size());
      return 0;
    }
    if (*run_cmd) {
      const Config c = load_config(config_path);
      return report_batch(run_batch(c, output_root(out_flag), jobs));
    }
    if (*sweep_cmd) {
      Config c = params_path.empty() ? parse_config("") : load_config(params_path);
      if (t_end >= 0.0) c.run.t_end = t_end;
      if (grid_n > 0) c.run.grid_n = grid_n;
      if (grid_dim > 0) c.run.grid_dim = grid_dim;
      if (seed_given) c.params.base.seed = seed;
      c.scenarios = scenario_matrix(parse_matrix_kind(matrix), c.run);
      return report_batch(run_batch(c, output_root(out_flag), jobs));
    }
    if (*check_cmd) {
      int bad = 0;
      for (const auto& dir : run_dirs(run_dir)) {
        const auto problems = check_run_dir(dir);
        std::printf("%-6s %s\n", problems.empty() ? "ok" : "FAILED", dir.string().c_str());
        for (const auto& p : problems) std::printf("       %s\n", p.c_str());
        bad += problems.empty() ? 0 : 1;
      }
      return bad == 0 ? 0 : 1;
    }
    if (*plot_cmd) {
      for (const auto& dir : run_dirs(run_dir)) {
        replot_run_dir(dir);
        std::printf("plotted %s\n", dir.string().c_str());
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
