#include "anthracnose/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace anthracnose {

TimeForcing time_forcing(double t, const ParameterSet& p) {
  TimeForcing tf;
  tf.season1 = seasonal(t, p.c1, p.d1);
  tf.season2 = seasonal(t, p.c2, p.d2);
  tf.season3 = seasonal(t, p.c3, p.d3);
  tf.control = eval_control(t, p);
  tf.eta = eval_eta(t, p);
  return tf;
}

LocalForcing local_forcing(const TimeForcing& tf, double q1, double q2, double q3,
                           double control_factor, const ParameterSet& p) {
  LocalForcing f;
  f.alpha = p.p1 + p.b1 * q1 * tf.season1;
  f.w = eval_w_from_control(control_factor * tf.control, p.sigma);
  f.beta_rate = p.b2 * q2 * tf.season2;
  f.gamma_rate = p.b3 * q3 * tf.season3;
  f.eta = tf.eta;
  return f;
}

LocalForcing local_forcing(double t, const ParameterSet& p) {
  return local_forcing(time_forcing(t, p), 1.0, 1.0, 1.0, 1.0, p);
}

double LocalForcing::beta(double theta, const ParameterSet& p) const {
  return beta_rate * eval_p2(theta, p.p2_mode);
}

double LocalForcing::gamma_bar(double theta, double v, double rho, const ParameterSet& p) const {
  return gamma_rate * (theta - p.kappa * rho) * v;
}

double delta_indicator(double x) { return (x > 0.0 && x < 1.0) ? 1.0 : 0.0; }

namespace {

double capacity(double theta, double eta, const ParameterSet& p, const char* who) {
  const double room = 1.0 + p.epsilon - theta;
  if (!(room > 0.0)) {
    std::ostringstream os;
    os << who << ": 1 + epsilon - theta = " << room << " is not positive";
    throw std::domain_error(os.str());
  }
  return room * eta * p.v_max;
}

}  // namespace

namespace kernel {

double drho_dt(const LocalForcing& f, const ModelState& s, const ParameterSet& p) {
  return f.gamma_bar(s.theta, s.v, s.rho, p) * (1.0 - s.rho);
}

ModelState model_rhs(const LocalForcing& f, const ModelState& s, const ParameterSet& p) {
  ModelState d;
  d.theta = f.alpha * (1.0 - f.w * s.theta);
  d.v = f.beta(s.theta, p) * (1.0 - s.v / capacity(s.theta, f.eta, p, "model_rhs"));
  d.rho = drho_dt(f, s, p);
  return d;
}

double phi1(double theta_hat, double v_hat, const Measurement& m, const ParameterSet& p) {
  if (m.v <= v_hat && delta_indicator(theta_hat) != 0.0 && v_hat > 0.0) {
    return (1.0 - m.v / v_hat) * (1.0 + p.epsilon - theta_hat);
  }
  return 0.0;
}

double phi2(const LocalForcing& f, double theta_hat, const Measurement& m, const ParameterSet& p) {
  if (delta_indicator(theta_hat) == 0.0) return 0.0;
  return m.drho_dt - f.gamma_bar(theta_hat, m.v, m.rho, p) * (1.0 - m.rho);
}

double phi3(const LocalForcing& f, double theta_hat, double v_hat, const ParameterSet& p) {
  return 1.0 - v_hat / capacity(theta_hat, f.eta, p, "phi3");
}

ObserverState observer_rhs(const LocalForcing& f, const ObserverState& o, const Measurement& m,
                           double k1, double k2, const ParameterSet& p) {
  ObserverState d;
  d.theta_hat = f.alpha * (1.0 - f.w * o.theta_hat);
  // Zero gains contribute nothing, even if the branch value were degenerate.
  if (k1 != 0.0) d.theta_hat += k1 * phi1(o.theta_hat, o.v_hat, m, p);
  if (k2 != 0.0) d.theta_hat += k2 * phi2(f, o.theta_hat, m, p);
  d.v_hat = f.beta(o.theta_hat, p) * phi3(f, o.theta_hat, o.v_hat, p);
  return d;
}

}  // namespace kernel

ModelState model_rhs(double t, const ModelState& s, const ParameterSet& p) {
  return kernel::model_rhs(local_forcing(t, p), s, p);
}

double phi1(double /*t*/, double theta_hat, double v_hat, const Measurement& m,
            const ParameterSet& p) {
  return kernel::phi1(theta_hat, v_hat, m, p);
}

double phi2(double t, double theta_hat, const Measurement& m, const ParameterSet& p) {
  return kernel::phi2(local_forcing(t, p), theta_hat, m, p);
}

double phi3(double t, double theta_hat, double v_hat, const ParameterSet& p) {
  return kernel::phi3(local_forcing(t, p), theta_hat, v_hat, p);
}

ObserverState observer_rhs(double t, const ObserverState& o, const Measurement& m,
                           const ParameterSet& p) {
  return kernel::observer_rhs(local_forcing(t, p), o, m, p.k1, p.k2, p);
}

Measurement make_measurement(double t, const ModelState& s, MeasurementMode mode,
                             const std::optional<PreviousSample>& prev, const ParameterSet& p) {
  Measurement m{s.v, s.rho, 0.0};
  switch (mode) {
    case MeasurementMode::kExact:
      m.drho_dt = kernel::drho_dt(local_forcing(t, p), s, p);
      break;
    case MeasurementMode::kFiniteDifference:
      if (!prev) throw std::invalid_argument("finite-difference measurement needs a previous sample");
      if (!(t > prev->t)) throw std::invalid_argument("finite-difference measurement needs t > t_prev");
      m.drho_dt = (s.rho - prev->state.rho) / (t - prev->t);
      break;
  }
  return m;
}

void InfimumStat::add(double x, double t) {
  ++samples;
  if (x < value) {
    value = x;
    at_time = t;
  }
}

std::vector<double> near_zero_minima(std::span<const double> times,
                                     std::span<const double> values, double rel_threshold) {
  std::vector<double> out;
  if (values.empty()) return out;
  const double peak = *std::max_element(values.begin(), values.end());
  const double cut = rel_threshold * std::max(peak, 0.0);
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || values[i] <= values[i - 1];
    const bool right = i + 1 == n || values[i] < values[i + 1];
    if (left && right && values[i] <= cut) out.push_back(times[i]);
  }
  return out;
}

std::string ConditionReport::to_string() const {
  std::ostringstream os;
  os.precision(9);
  auto line = [&os](const char* name, const InfimumStat& s) {
    os << name << " = ";
    if (s.informative()) {
      os << s.value << " (t=" << s.at_time << ", samples=" << s.samples << ")";
    } else {
      os << "no informative samples";
    }
    os << '\n';
  };
  line("inf_alpha", alpha);
  os << "alpha_zero_times =";
  for (double t : alpha_zero_times) os << ' ' << t;
  os << '\n';
  line("coercivity", coercivity);
  line("stability_k1", stability_k1);
  line("stability_k1k2", stability_k1k2);
  line("dominance_margin", dominance_margin);
  os << "singular_points = " << singular_points << " of " << total_points << '\n';
  return os.str();
}

ConditionReport check_conditions(std::span<const OdeSample> trajectory, const ParameterSet& p) {
  ConditionReport report;
  std::vector<double> times, alphas;
  times.reserve(trajectory.size());
  alphas.reserve(trajectory.size());

  for (const OdeSample& s : trajectory) {
    const LocalForcing f = local_forcing(s.t, p);
    const double th = s.truth.theta;
    const double th_hat = s.observer.theta_hat;
    const Measurement& m = s.measurement;
    ++report.total_points;

    report.alpha.add(f.alpha, s.t);
    times.push_back(s.t);
    alphas.push_back(f.alpha);

    const double err = th - th_hat;
    if (err != 0.0) {
      const double dg = f.gamma_bar(th, m.v, m.rho, p) - f.gamma_bar(th_hat, m.v, m.rho, p);
      report.coercivity.add(std::abs(dg) / std::abs(err), s.t);
    }

    const double p1v = kernel::phi1(th_hat, s.observer.v_hat, m, p);
    const double p2v = kernel::phi2(f, th_hat, m, p);
    report.dominance_margin.add(p.k2 * std::abs(p2v) - p.k1 * p1v, s.t);

    const double k1d = p.k1 * delta_indicator(th_hat);
    double base = f.alpha * f.w + k1d;
    if (k1d != 0.0) {
      const double one_minus = 1.0 - th * f.w;
      if (m.v < kSingularThreshold || std::abs(one_minus) < kSingularThreshold ||
          std::abs(f.alpha * one_minus) < kSingularThreshold) {
        ++report.singular_points;
        continue;
      }
      const double gap = f.eta * p.v_max * (1.0 + p.epsilon - th) - m.v;
      base += k1d * f.beta(th, p) * gap / (f.alpha * f.eta * m.v * p.v_max * one_minus);
    }
    report.stability_k1.add(base, s.t);
    report.stability_k1k2.add(base + p.k2 * p2v, s.t);
  }
  report.alpha_zero_times = near_zero_minima(times, alphas, 1e-8);
  return report;
}

}  // namespace anthracnose
