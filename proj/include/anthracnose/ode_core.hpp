#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anthracnose/forcing.hpp"

namespace anthracnose {

/// True state of the within-host model. The rot volume is rho * v.
struct ModelState {
  double theta = 0.0;  // inhibition rate
  double v = 0.0;      // berry volume
  double rho = 0.0;    // rot proportion

  double rot_volume() const { return rho * v; }
  bool operator==(const ModelState&) const = default;
};

struct ObserverState {
  double theta_hat = 0.0;
  double v_hat = 0.0;
  bool operator==(const ObserverState&) const = default;
};

/// What the observer is allowed to see.
struct Measurement {
  double v = 0.0;
  double rho = 0.0;
  double drho_dt = 0.0;
  bool operator==(const Measurement&) const = default;
};

/// Time-only factors of the forcing, evaluated once per instant.
struct TimeForcing {
  double season1 = 0.0;  // (1 - cos(c_i t)) (t - d_i)^2
  double season2 = 0.0;
  double season3 = 0.0;
  double control = 0.0;  // u(t)
  double eta = 1.0;
};

TimeForcing time_forcing(double t, const ParameterSet& p);

/// Pointwise coefficients after any spatial modulation. The within-host
/// model uses unit modulation; the spatial model scales by q_i(x) and the
/// radial control factor.
struct LocalForcing {
  double alpha = 0.0;
  double w = 1.0;
  double beta_rate = 0.0;   // beta(t, x, theta) = beta_rate p2(theta)
  double gamma_rate = 0.0;  // gamma_bar = gamma_rate (theta - kappa rho) v
  double eta = 1.0;

  double beta(double theta, const ParameterSet& p) const;
  double gamma_bar(double theta, double v, double rho, const ParameterSet& p) const;
};

LocalForcing local_forcing(const TimeForcing& tf, double q1, double q2, double q3,
                           double control_factor, const ParameterSet& p);
LocalForcing local_forcing(double t, const ParameterSet& p);

/// 1 on the open interval (0, 1), 0 elsewhere.
double delta_indicator(double x);

// Pointwise kernels shared by the within-host and spatial models.
namespace kernel {

ModelState model_rhs(const LocalForcing& f, const ModelState& s, const ParameterSet& p);
double drho_dt(const LocalForcing& f, const ModelState& s, const ParameterSet& p);
double phi1(double theta_hat, double v_hat, const Measurement& m, const ParameterSet& p);
double phi2(const LocalForcing& f, double theta_hat, const Measurement& m, const ParameterSet& p);
double phi3(const LocalForcing& f, double theta_hat, double v_hat, const ParameterSet& p);
ObserverState observer_rhs(const LocalForcing& f, const ObserverState& o, const Measurement& m,
                           double k1, double k2, const ParameterSet& p);

}  // namespace kernel

/// Right-hand side of the within-host model. Throws std::domain_error when
/// 1 + epsilon - theta <= 0.
ModelState model_rhs(double t, const ModelState& s, const ParameterSet& p);

double phi1(double t, double theta_hat, double v_hat, const Measurement& m, const ParameterSet& p);
double phi2(double t, double theta_hat, const Measurement& m, const ParameterSet& p);
/// Throws std::domain_error when 1 + epsilon - theta_hat <= 0.
double phi3(double t, double theta_hat, double v_hat, const ParameterSet& p);

/// Observer right-hand side using the gains p.k1 and p.k2.
ObserverState observer_rhs(double t, const ObserverState& o, const Measurement& m,
                           const ParameterSet& p);

enum class MeasurementMode { kExact, kFiniteDifference };

struct PreviousSample {
  ModelState state;
  double t = 0.0;
};

/// Builds the measurement seen by the observer. Exact mode takes drho_dt
/// from the model; finite-difference mode uses a backward difference and
/// throws std::invalid_argument without `prev`.
Measurement make_measurement(double t, const ModelState& s, MeasurementMode mode,
                             const std::optional<PreviousSample>& prev, const ParameterSet& p);

struct OdeSample {
  double t = 0.0;
  ModelState truth;
  ObserverState observer;
  Measurement measurement;
};

/// Running infimum of one diagnostic quantity.
struct InfimumStat {
  double value = std::numeric_limits<double>::infinity();
  double at_time = std::numeric_limits<double>::quiet_NaN();
  std::size_t samples = 0;

  void add(double x, double t);
  bool informative() const { return samples > 0; }
  bool positive() const { return informative() && value > 0.0; }
};

/// Empirical check of the observer convergence conditions along a run.
struct ConditionReport {
  InfimumStat alpha;             // inf alpha
  std::vector<double> alpha_zero_times;  // sampled local minima where alpha ~ 0
  InfimumStat coercivity;        // inf |gbar(theta)-gbar(theta_hat)| / |theta-theta_hat|
  InfimumStat stability_k1;      // k2 == 0 stability expression
  InfimumStat stability_k1k2;    // stability expression with the k2 phi2 term
  InfimumStat dominance_margin;  // inf k2 |phi2| - k1 phi1
  std::size_t singular_points = 0;
  std::size_t total_points = 0;

  std::string to_string() const;
};

/// Points with v or alpha (1 - theta w) below this are excluded from the
/// stability infima and counted in `singular_points`.
inline constexpr double kSingularThreshold = 1e-9;

ConditionReport check_conditions(std::span<const OdeSample> trajectory, const ParameterSet& p);

/// Sampled local minima of alpha that fall below `rel_threshold * max alpha`.
std::vector<double> near_zero_minima(std::span<const double> times,
                                     std::span<const double> values, double rel_threshold);

}  // namespace anthracnose
