#include "anthracnose/integrate.hpp"

#include <cmath>
#include <sstream>

namespace anthracnose {

void axpy(double a, const ModelState& x, ModelState& y) {
  y.theta += a * x.theta;
  y.v += a * x.v;
  y.rho += a * x.rho;
}

void axpy(double a, const ObserverState& x, ObserverState& y) {
  y.theta_hat += a * x.theta_hat;
  y.v_hat += a * x.v_hat;
}

void axpy(double a, const Field& x, Field& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: field size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void axpy(double a, const SpatialTruth& x, SpatialTruth& y) {
  axpy(a, x.theta, y.theta);
  axpy(a, x.v, y.v);
  axpy(a, x.rho, y.rho);
}

void axpy(double a, const SpatialObserver& x, SpatialObserver& y) {
  axpy(a, x.theta_hat, y.theta_hat);
  axpy(a, x.v_hat, y.v_hat);
}

std::optional<std::string> first_nonfinite(const ModelState& s) {
  if (!std::isfinite(s.theta)) return "theta";
  if (!std::isfinite(s.v)) return "v";
  if (!std::isfinite(s.rho)) return "rho";
  return std::nullopt;
}

std::optional<std::string> first_nonfinite(const ObserverState& s) {
  if (!std::isfinite(s.theta_hat)) return "theta_hat";
  if (!std::isfinite(s.v_hat)) return "v_hat";
  return std::nullopt;
}

std::optional<std::string> first_nonfinite(const Field& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) return "[" + std::to_string(i) + "]";
  }
  return std::nullopt;
}

namespace {

std::optional<std::string> named(const char* name, const Field& f) {
  if (auto bad = first_nonfinite(f)) return name + *bad;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> first_nonfinite(const SpatialTruth& s) {
  if (auto b = named("theta", s.theta)) return b;
  if (auto b = named("v", s.v)) return b;
  return named("rho", s.rho);
}

std::optional<std::string> first_nonfinite(const SpatialObserver& s) {
  if (auto b = named("theta_hat", s.theta_hat)) return b;
  return named("v_hat", s.v_hat);
}

std::size_t step_count(double t0, double t1, double dt) {
  if (!(t1 >= t0)) throw std::invalid_argument("simulation needs t1 >= t0");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  // The slack absorbs representation error in (t1 - t0) / dt, e.g. 1 / 1e-4.
  return static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
}

namespace {

void check_gain_cap(double gain, double dt) {
  const double cap = 1.0 / (10.0 * dt);
  if (gain > cap) {
    std::ostringstream os;
    os << "gain " << gain << " exceeds the explicit-stepping cap 1/(10 dt) = " << cap;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

Measurement OdeSystem::measure(double t, const Truth& s) const {
  return make_measurement(t, s, MeasurementMode::kExact, std::nullopt, params);
}

Measurement OdeSystem::measure_difference(double t, const Truth& s, const Truth& prev,
                                          double t_prev) const {
  return make_measurement(t, s, MeasurementMode::kFiniteDifference, PreviousSample{prev, t_prev},
                          params);
}

void OdeSystem::clamp_truth(Truth& s, Overshoot& ov, bool apply) const {
  clamp_into(s.theta, 0.0, 1.0, ov.theta, apply);
  clamp_into(s.v, 0.0, params.v_max, ov.v, apply);
  clamp_into(s.rho, 0.0, 1.0, ov.rho, apply);
}

void OdeSystem::clamp(Truth& s, Observer& o, Overshoot& ov, bool apply) const {
  clamp_truth(s, ov, apply);
  clamp_into(o.theta_hat, 0.0, 1.0, ov.theta_hat, apply);
  clamp_into(o.v_hat, 0.0, params.v_max, ov.v_hat, apply);
}

void OdeSystem::check_step(double dt) const { check_gain_cap(std::max(params.k1, params.k2), dt); }

PdeSystem::PdeSystem(Grid g, SpatialParameterSet sp)
    : grid(g), params(std::move(sp)), coeffs(SpatialCoefficients::build(grid, params)) {}

SpatialMeasurement PdeSystem::measure_difference(double t, const Truth& s, const Truth& prev,
                                                 double t_prev) const {
  if (!(t > t_prev)) throw std::invalid_argument("finite-difference measurement needs t > t_prev");
  SpatialMeasurement m{s.v, s.rho, Field(s.rho.size())};
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    m.drho_dt[i] = (s.rho[i] - prev.rho[i]) / (t - t_prev);
  }
  return m;
}

void PdeSystem::clamp_truth(Truth& s, Overshoot& ov, bool apply) const {
  const double vmax = params.base.v_max;
  for (std::size_t i = 0; i < s.theta.size(); ++i) {
    clamp_into(s.theta[i], 0.0, 1.0, ov.theta, apply);
    clamp_into(s.v[i], 0.0, vmax, ov.v, apply);
    clamp_into(s.rho[i], 0.0, 1.0, ov.rho, apply);
  }
}

void PdeSystem::clamp(Truth& s, Observer& o, Overshoot& ov, bool apply) const {
  clamp_truth(s, ov, apply);
  const double vmax = params.base.v_max;
  for (std::size_t i = 0; i < o.theta_hat.size(); ++i) {
    clamp_into(o.theta_hat[i], 0.0, 1.0, ov.theta_hat, apply);
    clamp_into(o.v_hat[i], 0.0, vmax, ov.v_hat, apply);
  }
}

void PdeSystem::check_step(double dt) const {
  double gain = 0.0;
  for (double k : coeffs.gain1.values) gain = std::max(gain, k);
  for (double k : coeffs.gain2.values) gain = std::max(gain, k);
  check_gain_cap(gain, dt);
  const double d = params.diffusivity;
  if (d > 0.0) {
    const double limit = 0.9 * grid.h() * grid.h() / (2.0 * grid.dim() * d);
    if (dt > limit) {
      std::ostringstream os;
      os << "dt=" << dt << " violates the diffusion limit 0.9 h^2/(2 dim D) = " << limit;
      throw std::invalid_argument(os.str());
    }
  }
}

SpatialTruth PdeSystem::uniform_truth(const ModelState& s) const {
  const std::size_t n = grid.cells();
  return {Field(n, s.theta), Field(n, s.v), Field(n, s.rho)};
}

SpatialObserver PdeSystem::uniform_observer(const ObserverState& o) const {
  const std::size_t n = grid.cells();
  return {Field(n, o.theta_hat), Field(n, o.v_hat)};
}

std::vector<Field> theta_sensitivity(const PdeSystem& sys, const SpatialTruth& truth0,
                                     const SimulationOptions& opt, double delta) {
  SpatialTruth up = truth0, down = truth0;
  for (double& x : up.theta.values) x = std::min(x + delta, 1.0);
  for (double& x : down.theta.values) x = std::max(x - delta, 0.0);
  const auto a = simulate_truth(sys, std::move(up), opt);
  const auto b = simulate_truth(sys, std::move(down), opt);
  std::vector<Field> out;
  out.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    Field f(a[k].v.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      // Perturbations are clipped at the box edge, so use the actual spread.
      const double spread = a.front().theta[i] - b.front().theta[i];
      f[i] = spread > 0.0 ? (a[k].v[i] - b[k].v[i]) / spread : 0.0;
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace anthracnose
