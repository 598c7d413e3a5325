#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anthracnose/config.hpp"
#include "anthracnose/integrate.hpp"
#include "anthracnose/metrics.hpp"
#include "anthracnose/svg_plot.hpp"

namespace anthracnose {

/// Tolerance on |e - envelope| / |e(0)| for the natural observer.
inline constexpr double kNaturalEnvelopeTolerance = 1e-3;
/// Allowed PDE/ODE mismatch for spatially constant runs.
inline constexpr double kReductionTolerance = 1e-6;

/// Natural observer: the error obeys e' = -alpha w e exactly.
struct NaturalEnvelopeResult {
  double max_deviation = 0.0;  // max |e(t) - envelope(t)| / |e(0)|
  double at_time = 0.0;
  bool pass = false;
};

struct RunRecord {
  Scenario scenario;
  bool ok = false;
  std::string error;  // set when the run failed

  std::size_t steps = 0;
  std::size_t samples = 0;
  double final_theta = 0.0;      // PDE: spatial mean
  double final_theta_hat = 0.0;  // PDE: spatial mean
  double final_abs_err = 0.0;    // PDE: spatial mean
  double final_rel_err = 0.0;    // PDE: spatial mean
  Overshoot overshoot;
  bool box_ok = false;
  ConditionReport conditions;

  std::optional<NaturalEnvelopeResult> natural_envelope;  // ODE, k1 = k2 = 0, exact
  std::optional<EnvelopeCheck> squared_envelope;          // ODE, k1 = 0 < k2, exact
  std::optional<EnvelopeCheck> l2_envelope;               // PDE, k1 = 0, inf alpha > 0
  std::optional<double> reduction_deviation;              // PDE with uniform coefficients

  double wall_seconds = 0.0;
  std::string csv;
  std::uint64_t csv_hash = 0;

  /// False when the run failed or any recorded check failed.
  bool passed() const;
};

/// 64-bit FNV-1a of the bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Runs one scenario in memory. Failures are caught and recorded.
RunRecord run_scenario(const Scenario& s, const SpatialParameterSet& sp);

/// Parsed trajectory CSV.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> values(std::string_view name) const;
};

/// Throws std::invalid_argument on ragged rows or non-numeric cells.
CsvTable parse_csv(std::string_view text);

std::vector<std::string> csv_header(ModelKind model);

enum class PlotKind { kEstimate, kError };

/// Plot of theta and its estimate, or of the relative error. PDE tables
/// give min/mean/max series.
PlotSpec make_plot(const CsvTable& table, ModelKind model, PlotKind kind, const std::string& title);
void emit_plot(const RunRecord& record, PlotKind kind, const std::filesystem::path& path);

/// RunRecord as "key = value" lines.
std::string format_summary(const RunRecord& record);
std::map<std::string, std::string> parse_summary(std::string_view text);

/// Writes config.txt, trajectory.csv, summary.txt, estimate.svg and
/// error.svg into `dir`, creating it if needed.
void write_run(const RunRecord& record, const SpatialParameterSet& sp,
               const std::filesystem::path& dir);

struct BatchResult {
  std::vector<RunRecord> records;
  std::vector<std::filesystem::path> directories;
};

/// Runs every scenario of `config` on `jobs` worker threads (0 means one per
/// hardware thread) and writes each into its own subdirectory of `root`.
BatchResult run_batch(const Config& config, const std::filesystem::path& root, unsigned jobs = 0);

/// The output root: `flag` if nonempty, else $ANTHRACNOSE_OUTPUT_ROOT, else "runs".
std::filesystem::path output_root(const std::string& flag);

/// Re-verifies a run directory from its stored files alone. Returns the
/// failed checks; empty means the directory is consistent.
std::vector<std::string> check_run_dir(const std::filesystem::path& dir);

/// Rewrites the SVG plots of a run directory from its CSV.
void replot_run_dir(const std::filesystem::path& dir);

}  // namespace anthracnose
