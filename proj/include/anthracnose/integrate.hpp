#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anthracnose/ode_core.hpp"
#include "anthracnose/pde_core.hpp"

namespace anthracnose {

enum class Scheme { kEuler, kRk4 };

/// A derivative or state component became NaN or infinite.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& component, double t)
      : std::runtime_error("non-finite value in " + component + " at t=" + std::to_string(t)),
        component_(component) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

// y += a x, and the name of the first non-finite component, for every state
// type the integrator handles.
inline void axpy(double a, const double& x, double& y) { y += a * x; }
inline std::optional<std::string> first_nonfinite(const double& x) {
  if (std::isfinite(x)) return std::nullopt;
  return "x";
}
void axpy(double a, const ModelState& x, ModelState& y);
void axpy(double a, const ObserverState& x, ObserverState& y);
void axpy(double a, const Field& x, Field& y);
void axpy(double a, const SpatialTruth& x, SpatialTruth& y);
void axpy(double a, const SpatialObserver& x, SpatialObserver& y);
std::optional<std::string> first_nonfinite(const ModelState& s);
std::optional<std::string> first_nonfinite(const ObserverState& s);
std::optional<std::string> first_nonfinite(const Field& f);
std::optional<std::string> first_nonfinite(const SpatialTruth& s);
std::optional<std::string> first_nonfinite(const SpatialObserver& s);

template <class S>
concept StateVector = std::copyable<S> && requires(double a, const S& x, S& y) {
  axpy(a, x, y);
  { first_nonfinite(x) } -> std::same_as<std::optional<std::string>>;
};

/// Truth and observer advanced as one system.
template <StateVector T, StateVector O>
struct Coupled {
  T truth;
  O observer;
};

template <StateVector T, StateVector O>
void axpy(double a, const Coupled<T, O>& x, Coupled<T, O>& y) {
  axpy(a, x.truth, y.truth);
  axpy(a, x.observer, y.observer);
}

template <StateVector T, StateVector O>
std::optional<std::string> first_nonfinite(const Coupled<T, O>& c) {
  if (auto bad = first_nonfinite(c.truth)) return "truth." + *bad;
  if (auto bad = first_nonfinite(c.observer)) return "observer." + *bad;
  return std::nullopt;
}

namespace detail {

template <StateVector S>
const S& checked(const S& k, double t) {
  if (auto bad = first_nonfinite(k)) throw NonFiniteError(*bad, t);
  return k;
}

inline void require_positive_step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

}  // namespace detail

template <StateVector S, class Rhs>
S step_euler(Rhs&& rhs, double t, const S& s, double dt) {
  detail::require_positive_step(dt);
  const S k = rhs(t, s);
  S out = s;
  axpy(dt, detail::checked(k, t), out);
  return out;
}

template <StateVector S, class Rhs>
S step_rk4(Rhs&& rhs, double t, const S& s, double dt) {
  detail::require_positive_step(dt);
  const double half = 0.5 * dt;
  const S k1 = rhs(t, s);
  S tmp = s;
  axpy(half, detail::checked(k1, t), tmp);
  const S k2 = rhs(t + half, tmp);
  tmp = s;
  axpy(half, detail::checked(k2, t + half), tmp);
  const S k3 = rhs(t + half, tmp);
  tmp = s;
  axpy(dt, detail::checked(k3, t + half), tmp);
  const S k4 = rhs(t + dt, tmp);
  detail::checked(k4, t + dt);
  S out = s;
  axpy(dt / 6.0, k1, out);
  axpy(dt / 3.0, k2, out);
  axpy(dt / 3.0, k3, out);
  axpy(dt / 6.0, k4, out);
  return out;
}

template <StateVector S, class Rhs>
S step(Scheme scheme, Rhs&& rhs, double t, const S& s, double dt) {
  return scheme == Scheme::kRk4 ? step_rk4(std::forward<Rhs>(rhs), t, s, dt)
                                : step_euler(std::forward<Rhs>(rhs), t, s, dt);
}

/// Largest pre-clamp excursion of each component outside its box.
struct Overshoot {
  double theta = 0.0, v = 0.0, rho = 0.0, theta_hat = 0.0, v_hat = 0.0;

  double max() const { return std::max({theta, v, rho, theta_hat, v_hat}); }
};

/// Records how far `x` left [lo, hi] into `worst`; clamps when `apply`.
inline void clamp_into(double& x, double lo, double hi, double& worst, bool apply) {
  const double out = std::max(lo - x, x - hi);
  if (out > worst) worst = out;
  if (apply) x = std::clamp(x, lo, hi);
}

/// Overshoot allowed before a run counts as failed.
inline constexpr double kOvershootTolerance = 1e-6;

struct SimulationOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-4;
  Scheme scheme = Scheme::kEuler;
  int record_stride = 10;
  bool clamp = true;
  MeasurementMode measurement = MeasurementMode::kExact;
};

/// Number of steps of size dt in [t0, t1]; throws when t1 < t0.
std::size_t step_count(double t0, double t1, double dt);

template <class Sample>
struct Trajectory {
  std::vector<double> times;
  std::vector<Sample> samples;
  Overshoot overshoot;
  std::size_t steps = 0;

  bool box_ok() const { return overshoot.max() <= kOvershootTolerance; }
};

/// A coupled truth/observer system the integrator can drive.
template <class Sys>
concept CoupledSystem = requires(const Sys& sys, double t, const typename Sys::Truth& s,
                                 const typename Sys::Observer& o,
                                 const typename Sys::Measurement& m, typename Sys::Truth& sm,
                                 typename Sys::Observer& om, Overshoot& ov) {
  { sys.truth_rhs(t, s) } -> std::same_as<typename Sys::Truth>;
  { sys.measure(t, s) } -> std::same_as<typename Sys::Measurement>;
  { sys.measure_difference(t, s, s, t) } -> std::same_as<typename Sys::Measurement>;
  { sys.observer_rhs(t, o, m) } -> std::same_as<typename Sys::Observer>;
  { sys.make_sample(t, s, o, m) } -> std::same_as<typename Sys::Sample>;
  sys.clamp(sm, om, ov, true);
  sys.check_step(t);
};

/// Advances truth and observer in lockstep. At step n the measurement is
/// built from the truth at t_n (and t_{n-1} in finite-difference mode), so
/// the observer never sees truth from later steps.
template <CoupledSystem Sys>
Trajectory<typename Sys::Sample> simulate(const Sys& sys, typename Sys::Truth truth0,
                                          typename Sys::Observer observer0,
                                          const SimulationOptions& opt) {
  using Truth = typename Sys::Truth;
  using Observer = typename Sys::Observer;
  using Meas = typename Sys::Measurement;
  using State = Coupled<Truth, Observer>;

  if (opt.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  detail::require_positive_step(opt.dt);
  sys.check_step(opt.dt);
  const std::size_t n_steps = step_count(opt.t0, opt.t1, opt.dt);
  const auto stride = static_cast<std::size_t>(opt.record_stride);

  Trajectory<typename Sys::Sample> traj;
  traj.steps = n_steps;
  traj.times.reserve(n_steps / stride + 1);
  traj.samples.reserve(n_steps / stride + 1);

  State state{std::move(truth0), std::move(observer0)};
  sys.clamp(state.truth, state.observer, traj.overshoot, opt.clamp);

  std::optional<std::pair<Truth, double>> prev;
  for (std::size_t n = 0;; ++n) {
    const double t = opt.t0 + static_cast<double>(n) * opt.dt;
    const bool exact = opt.measurement == MeasurementMode::kExact || !prev;
    const Meas m = exact ? sys.measure(t, state.truth)
                         : sys.measure_difference(t, state.truth, prev->first, prev->second);
    if (n % stride == 0) {
      traj.times.push_back(t);
      traj.samples.push_back(sys.make_sample(t, state.truth, state.observer, m));
    }
    if (n == n_steps) break;

    if (opt.measurement == MeasurementMode::kFiniteDifference) prev.emplace(state.truth, t);
    if (opt.scheme == Scheme::kEuler) {
      const State k{sys.truth_rhs(t, state.truth), sys.observer_rhs(t, state.observer, m)};
      axpy(opt.dt, detail::checked(k, t), state);
    } else {
      const bool resynth = opt.measurement == MeasurementMode::kExact;
      auto rhs = [&](double tt, const State& x) -> State {
        Truth dt_truth = sys.truth_rhs(tt, x.truth);
        if (resynth) {
          return {std::move(dt_truth), sys.observer_rhs(tt, x.observer, sys.measure(tt, x.truth))};
        }
        return {std::move(dt_truth), sys.observer_rhs(tt, x.observer, m)};
      };
      state = step_rk4(rhs, t, state, opt.dt);
    }
    sys.clamp(state.truth, state.observer, traj.overshoot, opt.clamp);
  }
  return traj;
}

/// Truth-only run returning the truth state at every recorded time.
template <CoupledSystem Sys>
std::vector<typename Sys::Truth> simulate_truth(const Sys& sys, typename Sys::Truth truth0,
                                                const SimulationOptions& opt) {
  using Truth = typename Sys::Truth;
  if (opt.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  const std::size_t n_steps = step_count(opt.t0, opt.t1, opt.dt);
  const auto stride = static_cast<std::size_t>(opt.record_stride);
  std::vector<Truth> out;
  out.reserve(n_steps / stride + 1);
  Overshoot ignored;
  Truth s = std::move(truth0);
  auto rhs = [&](double tt, const Truth& x) { return sys.truth_rhs(tt, x); };
  for (std::size_t n = 0;; ++n) {
    const double t = opt.t0 + static_cast<double>(n) * opt.dt;
    if (n % stride == 0) out.push_back(s);
    if (n == n_steps) break;
    s = step(opt.scheme, rhs, t, s, opt.dt);
    sys.clamp_truth(s, ignored, opt.clamp);
  }
  return out;
}

/// Within-host model and its observer, gains taken from `params`.
struct OdeSystem {
  using Truth = ModelState;
  using Observer = ObserverState;
  using Measurement = anthracnose::Measurement;
  using Sample = OdeSample;

  ParameterSet params;

  Truth truth_rhs(double t, const Truth& s) const { return model_rhs(t, s, params); }
  Measurement measure(double t, const Truth& s) const;
  Measurement measure_difference(double t, const Truth& s, const Truth& prev, double t_prev) const;
  Observer observer_rhs(double t, const Observer& o, const Measurement& m) const {
    return anthracnose::observer_rhs(t, o, m, params);
  }
  Sample make_sample(double t, const Truth& s, const Observer& o, const Measurement& m) const {
    return {t, s, o, m};
  }
  void clamp_truth(Truth& s, Overshoot& ov, bool apply) const;
  void clamp(Truth& s, Observer& o, Overshoot& ov, bool apply) const;
  /// Throws std::invalid_argument when a gain exceeds 1/(10 dt).
  void check_step(double dt) const;
};

/// Spatial model and observer on a fixed grid.
struct PdeSystem {
  using Truth = SpatialTruth;
  using Observer = SpatialObserver;
  using Measurement = SpatialMeasurement;
  using Sample = SpatialSample;

  Grid grid;
  SpatialParameterSet params;
  SpatialCoefficients coeffs;

  PdeSystem(Grid g, SpatialParameterSet sp);

  Truth truth_rhs(double t, const Truth& s) const {
    return spatial_model_rhs(t, s, grid, coeffs, params);
  }
  Measurement measure(double t, const Truth& s) const {
    return spatial_measurement_exact(t, s, coeffs, params);
  }
  Measurement measure_difference(double t, const Truth& s, const Truth& prev, double t_prev) const;
  Observer observer_rhs(double t, const Observer& o, const Measurement& m) const {
    return spatial_observer_rhs(t, o, m, grid, coeffs, params);
  }
  Sample make_sample(double t, const Truth& s, const Observer& o, const Measurement& m) const {
    return {t, {s, o}, m};
  }
  void clamp_truth(Truth& s, Overshoot& ov, bool apply) const;
  void clamp(Truth& s, Observer& o, Overshoot& ov, bool apply) const;
  /// Gain cap plus the diffusion limit dt <= 0.9 h^2 / (2 dim D).
  void check_step(double dt) const;

  SpatialTruth uniform_truth(const ModelState& s) const;
  SpatialObserver uniform_observer(const ObserverState& o) const;
};

/// d v / d theta(0) per recorded sample, by central differences of two
/// truth runs started from theta(0) +/- delta.
std::vector<Field> theta_sensitivity(const PdeSystem& sys, const SpatialTruth& truth0,
                                     const SimulationOptions& opt, double delta = 1e-4);

}  // namespace anthracnose
