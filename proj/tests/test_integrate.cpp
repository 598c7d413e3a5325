#include <gtest/gtest.h>

#include <cmath>

#include "anthracnose/integrate.hpp"

using namespace anthracnose;

namespace {

auto decay = [](double, const double& x) { return -x; };
auto zero = [](double, const ModelState&) { return ModelState{}; };

double integrate_decay(Scheme scheme, double dt) {
  double x = 1.0;
  const auto n = step_count(0.0, 1.0, dt);
  for (std::size_t i = 0; i < n; ++i) x = step(scheme, decay, static_cast<double>(i) * dt, x, dt);
  return x;
}

ModelState final_truth(Scheme scheme, double dt) {
  OdeSystem sys{ParameterSet::table1()};
  SimulationOptions opt;
  opt.dt = dt;
  opt.scheme = scheme;
  opt.record_stride = 1;
  opt.clamp = false;
  return simulate_truth(sys, ModelState{0.75, 0.5, 0.25}, opt).back();
}

double distance(const ModelState& a, const ModelState& b) {
  return std::sqrt(std::pow(a.theta - b.theta, 2) + std::pow(a.v - b.v, 2) +
                   std::pow(a.rho - b.rho, 2));
}

// Truth whose dynamics change from t_switch on; the observer must not
// notice before the switch.
struct SwitchedSystem : OdeSystem {
  double t_switch = 0.50005;
  Truth truth_rhs(double t, const Truth& s) const {
    Truth d = model_rhs(t, s, params);
    if (t >= t_switch) d.theta += 5.0;
    return d;
  }
};

}  // namespace

TEST(Euler, ZeroRhsKeepsState) {
  const ModelState s{0.3, 0.2, 0.1};
  EXPECT_EQ(step_euler(zero, 0.0, s, 1e-3), s);
}

TEST(Euler, LinearDecayOneStep) { EXPECT_DOUBLE_EQ(step_euler(decay, 0.0, 1.0, 1e-4), 0.9999); }

TEST(Euler, LinearDecayYear) {
  EXPECT_NEAR(integrate_decay(Scheme::kEuler, 1e-4), std::exp(-1.0), 1e-4 * std::exp(-1.0));
}

TEST(Euler, RejectsNonPositiveStep) {
  EXPECT_THROW(step_euler(decay, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Rk4, ZeroRhsKeepsState) {
  const ModelState s{0.3, 0.2, 0.1};
  EXPECT_EQ(step_rk4(zero, 0.0, s, 1e-2), s);
}

TEST(Rk4, LinearDecayYear) {
  EXPECT_NEAR(integrate_decay(Scheme::kRk4, 1e-2), std::exp(-1.0), 1e-8);
}

TEST(Rk4, AgreesWithEulerToSecondOrder) {
  auto rhs = [](double t, const double& x) { return std::sin(t) - x * x; };
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const double diff = std::abs(step_rk4(rhs, 0.3, 0.7, dt) - step_euler(rhs, 0.3, 0.7, dt));
    EXPECT_LE(diff, 2.0 * dt * dt);
  }
}

TEST(Steppers, NonFiniteDerivativeNamesComponent) {
  auto bad = [](double, const ModelState&) {
    return ModelState{0.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
  };
  try {
    step_euler(bad, 0.25, ModelState{}, 1e-3);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.component(), "v");
  }
  EXPECT_THROW(step_rk4(bad, 0.25, ModelState{}, 1e-3), NonFiniteError);
}

TEST(StepCount, Values) {
  EXPECT_EQ(step_count(0.0, 1.0, 1e-4), 10000u);
  EXPECT_EQ(step_count(0.0, 0.0, 1e-4), 0u);
  EXPECT_EQ(step_count(0.0, 0.3, 0.1), 3u);
  EXPECT_THROW(step_count(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST(Simulate, ZeroDurationGivesOneSample) {
  OdeSystem sys{ParameterSet::table1()};
  SimulationOptions opt;
  opt.t1 = 0.0;
  const auto traj = simulate(sys, ModelState{0.5, 0.5, 0.25}, ObserverState{0.0, 0.5}, opt);
  ASSERT_EQ(traj.samples.size(), 1u);
  EXPECT_EQ(traj.times.front(), 0.0);
}

TEST(Simulate, SampleCountAndUniformTimes) {
  OdeSystem sys{ParameterSet::table1()};
  for (int stride : {1, 7, 10, 333}) {
    SimulationOptions opt;
    opt.t1 = 0.25;
    opt.record_stride = stride;
    const auto traj = simulate(sys, ModelState{0.5, 0.5, 0.25}, ObserverState{0.0, 0.5}, opt);
    EXPECT_EQ(traj.samples.size(), 2500u / static_cast<unsigned>(stride) + 1);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      EXPECT_DOUBLE_EQ(traj.times[i], static_cast<double>(i * static_cast<unsigned>(stride)) * 1e-4);
      EXPECT_EQ(traj.samples[i].t, traj.times[i]);
    }
  }
}

TEST(Simulate, ClampOnOffAgree) {
  auto p = ParameterSet::table1();
  p.k2 = 1e3;
  OdeSystem sys{p};
  SimulationOptions on, off;
  off.clamp = false;
  for (const ModelState& init : {ModelState{0.05, 0.05, 0.05}, ModelState{0.75, 0.5, 0.5}}) {
    const auto a = simulate(sys, init, ObserverState{0.0, init.v}, on);
    const auto b = simulate(sys, init, ObserverState{0.0, init.v}, off);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      ASSERT_NEAR(a.samples[i].truth.theta, b.samples[i].truth.theta, 1e-6);
      ASSERT_NEAR(a.samples[i].truth.v, b.samples[i].truth.v, 1e-6);
      ASSERT_NEAR(a.samples[i].truth.rho, b.samples[i].truth.rho, 1e-6);
      ASSERT_NEAR(a.samples[i].observer.theta_hat, b.samples[i].observer.theta_hat, 1e-6);
      ASSERT_NEAR(a.samples[i].observer.v_hat, b.samples[i].observer.v_hat, 1e-6);
    }
    EXPECT_TRUE(b.box_ok());
  }
}

TEST(Simulate, Deterministic) {
  auto p = ParameterSet::table1();
  p.k1 = 1e3;
  p.k2 = 1e3;
  OdeSystem sys{p};
  SimulationOptions opt;
  opt.measurement = MeasurementMode::kFiniteDifference;
  const auto a = simulate(sys, ModelState{0.75, 0.05, 0.25}, ObserverState{0.0, 0.05}, opt);
  const auto b = simulate(sys, ModelState{0.75, 0.05, 0.25}, ObserverState{0.0, 0.05}, opt);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ASSERT_EQ(a.samples[i].truth, b.samples[i].truth);
    ASSERT_EQ(a.samples[i].observer, b.samples[i].observer);
  }
}

TEST(Simulate, MeasurementCausality) {
  auto p = ParameterSet::table1();
  p.k1 = 1e3;
  p.k2 = 1e3;
  for (auto mode : {MeasurementMode::kExact, MeasurementMode::kFiniteDifference}) {
    SimulationOptions opt;
    opt.record_stride = 1;
    opt.measurement = mode;
    OdeSystem plain{p};
    SwitchedSystem switched;
    switched.params = p;
    const auto a = simulate(plain, ModelState{0.75, 0.5, 0.25}, ObserverState{0.0, 0.5}, opt);
    const auto b = simulate(switched, ModelState{0.75, 0.5, 0.25}, ObserverState{0.0, 0.5}, opt);
    // Truth differs from step 5002 on; the observer reads it one step later.
    const std::size_t n_switch = 5001;
    for (std::size_t n = 0; n <= n_switch + 1; ++n) {
      ASSERT_EQ(a.samples[n].observer, b.samples[n].observer) << "step " << n;
    }
    EXPECT_NE(a.samples[n_switch + 1].truth, b.samples[n_switch + 1].truth);
    // Exact mode sees theta through drho_dt at once; differencing waits for rho.
    const std::size_t seen = mode == MeasurementMode::kExact ? n_switch + 2 : n_switch + 3;
    EXPECT_EQ(a.samples[seen - 1].observer, b.samples[seen - 1].observer);
    EXPECT_NE(a.samples[seen].observer, b.samples[seen].observer);
  }
}

TEST(Simulate, GainCapRechecked) {
  auto p = ParameterSet::table1();
  p.k1 = 2e3;
  OdeSystem sys{p};
  EXPECT_THROW(simulate(sys, ModelState{0.5, 0.5, 0.25}, ObserverState{0.0, 0.5}, {}),
               std::invalid_argument);
}

TEST(Simulate, DiffusionLimitEnforced) {
  auto sp = SpatialParameterSet::table2();
  sp.diffusivity = 1.0;
  const PdeSystem sys(Grid(2, 64), sp);
  EXPECT_THROW(simulate(sys, sys.uniform_truth({0.5, 0.5, 0.25}), sys.uniform_observer({0.0, 0.5}),
                        {}),
               std::invalid_argument);
  sp.diffusivity = 1e-2;
  EXPECT_NO_THROW(PdeSystem(Grid(2, 64), sp).check_step(1e-4));
}

struct PoisonedSystem : OdeSystem {
  Truth truth_rhs(double t, const Truth& s) const {
    Truth d = model_rhs(t, s, params);
    if (t > 0.3) d.rho = std::numeric_limits<double>::infinity();
    return d;
  }
};

TEST(Simulate, NonFiniteStateAborts) {
  PoisonedSystem sys;
  sys.params = ParameterSet::table1();
  for (Scheme scheme : {Scheme::kEuler, Scheme::kRk4}) {
    SimulationOptions opt;
    opt.scheme = scheme;
    try {
      simulate(sys, ModelState{0.5, 0.5, 0.25}, ObserverState{0.0, 0.5}, opt);
      FAIL() << "expected NonFiniteError";
    } catch (const NonFiniteError& e) {
      EXPECT_EQ(e.component(), "truth.rho");
    }
  }
}

TEST(Convergence, StepHalvingRatios) {
  const ModelState ref = final_truth(Scheme::kRk4, 1.0 / 40000);
  const double e1 = distance(final_truth(Scheme::kEuler, 1.0 / 200), ref);
  const double e2 = distance(final_truth(Scheme::kEuler, 1.0 / 400), ref);
  const double e3 = distance(final_truth(Scheme::kEuler, 1.0 / 800), ref);
  for (double r : {e1 / e2, e2 / e3}) {
    EXPECT_GE(r, 1.0);
    EXPECT_LE(r, 4.0);
  }
  const double r1 = distance(final_truth(Scheme::kRk4, 1.0 / 200), ref);
  const double r2 = distance(final_truth(Scheme::kRk4, 1.0 / 400), ref);
  const double r3 = distance(final_truth(Scheme::kRk4, 1.0 / 800), ref);
  for (double r : {r1 / r2, r2 / r3}) {
    EXPECT_GE(r, 8.0);
    EXPECT_LE(r, 32.0);
  }
}

TEST(Sensitivity, UniformRunIsSpatiallyConstant) {
  auto sp = SpatialParameterSet::table2();
  sp.uniform_coefficients = true;
  const PdeSystem sys(Grid(1, 4), sp);
  SimulationOptions opt;
  opt.t1 = 0.2;
  const auto sens = theta_sensitivity(sys, sys.uniform_truth({0.5, 0.3, 0.2}), opt);
  ASSERT_EQ(sens.size(), 201u);
  for (const auto& f : sens) {
    for (double x : f.values) {
      ASSERT_TRUE(std::isfinite(x));
      ASSERT_EQ(x, f[0]);
    }
  }
  EXPECT_LT(sens.back()[0], 0.0);  // more inhibition, smaller berry
}
