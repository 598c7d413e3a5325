#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anthracnose/forcing.hpp"
#include "anthracnose/integrate.hpp"

namespace anthracnose {

enum class ModelKind { kOde, kPde };

/// One simulation of truth plus observer. The observer always starts at
/// theta_hat = 0, v_hat = v0.
struct Scenario {
  std::string name;  // empty means derived from the values below
  ModelKind model = ModelKind::kOde;
  double theta0 = 0.05;
  double v0 = 0.05;
  double rho0 = 0.05;
  double k1 = 0.0;
  double k2 = 0.0;
  MeasurementMode measurement = MeasurementMode::kExact;
  Scheme scheme = Scheme::kEuler;
  int grid_dim = 2;
  int grid_n = 32;
  double t_end = 1.0;
  int record_stride = 10;
  bool clamp = true;

  /// `name` if set, otherwise a directory-safe name built from the values.
  std::string id() const;
  bool operator==(const Scenario&) const = default;
};

/// Run-wide defaults applied to scenarios that do not override them.
struct RunSettings {
  double t_end = 1.0;
  int record_stride = 10;
  int grid_dim = 2;
  int grid_n = 32;
  bool operator==(const RunSettings&) const = default;
};

struct Config {
  SpatialParameterSet params = SpatialParameterSet::table2();
  RunSettings run;
  std::vector<Scenario> scenarios;
  bool operator==(const Config&) const = default;
};

/// All problems found while reading a configuration, one per entry, each
/// prefixed with "<source>:<line>:" (or "<source>:" for checks that involve
/// several keys).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses and validates a configuration. Keys that are absent keep their
/// reference defaults; b2, b3 and eta_star are derived from the other
/// constants unless given explicitly.
Config parse_config(std::string_view text, const std::string& source = "<config>");
Config load_config(const std::filesystem::path& path);

/// Serializes every value at full precision; parse_config inverts it exactly.
std::string write_config(const Config& config);

std::string format_scenario(const Scenario& s);
/// Parses the value of a `scenario =` line. Throws std::invalid_argument.
Scenario parse_scenario(std::string_view spec, const RunSettings& defaults);

/// Problems with a scenario's initial data or gains (empty when fine).
std::vector<std::string> check_scenario(const Scenario& s, const ParameterSet& p);

enum class MatrixKind { kPaperOde, kPaperPde, kTable1Grid, kCustom };

/// Value lists crossed by the custom matrix; rho0 > theta0 is filtered out.
struct CustomGrid {
  ModelKind model = ModelKind::kOde;
  std::vector<double> theta0, v0, rho0;
  std::vector<std::pair<double, double>> gains;
};

/// The four (k1, k2) pairs of the reference study.
std::vector<std::pair<double, double>> reference_gain_pairs();

/// Scenario list for a matrix kind. paper_ode crosses the four figure
/// initial pairs with every rho0 in {0.25, 0.5, 0.75} not above theta0
/// (theta0 itself when none qualifies) and the four gain pairs; paper_pde
/// uses rho0 = theta0.
std::vector<Scenario> scenario_matrix(MatrixKind kind, const RunSettings& settings = {},
                                      const CustomGrid& custom = {});

MatrixKind parse_matrix_kind(std::string_view name);

}  // namespace anthracnose
