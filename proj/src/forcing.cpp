#include "anthracnose/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace anthracnose {

double default_b2(double v_max, double epsilon, double eta_star) {
  return v_max * std::log(1e5 * v_max * (1.0 - epsilon * eta_star)) / 2.0;
}

double default_b3(double v_max) { return v_max * std::log(1e5 * v_max); }

ParameterSet ParameterSet::table1() {
  constexpr double pi = std::numbers::pi;
  ParameterSet p;
  p.epsilon = 1e-4;
  p.eta_star = 1.0 / (1.0 + p.epsilon);
  p.v_max = 1.0;
  p.b1 = 5.0 * std::log(10.0);
  p.b2 = default_b2(p.v_max, p.epsilon, p.eta_star);
  p.b3 = default_b3(p.v_max);
  p.c1 = p.c2 = p.c3 = 10.0 * pi;
  p.d1 = p.d2 = p.d3 = 0.75;
  p.omega1 = 25.0 * pi;
  p.omega2 = 10.0;
  p.phase1 = 0.6;
  p.phase2 = 0.4;
  p.sigma = 0.9;
  p.kappa = 1.0;
  p.k1 = 0.0;
  p.k2 = 0.0;
  p.p1 = 0.0;
  p.p2_mode = P2Mode::kLinear;
  p.dt = 1e-4;
  p.seed = 1;
  return p;
}

SpatialParameterSet SpatialParameterSet::table2() {
  SpatialParameterSet sp;
  sp.base = ParameterSet::table1();
  return sp;
}

double eval_control(double t, const ParameterSet& p) {
  const double a = t - p.phase1;
  const double b = t - p.phase2;
  const double s = std::sin(p.omega1 * a * a);
  return s * s * std::exp(-p.omega2 * b * b);
}

double eval_w_from_control(double u, double sigma) {
  const double denom = 1.0 - sigma * u;
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "w = 1/(1 - sigma u) is singular: sigma=" << sigma << ", u=" << u;
    throw std::domain_error(os.str());
  }
  return 1.0 / denom;
}

double eval_w(double t, const ParameterSet& p) {
  return eval_w_from_control(eval_control(t, p), p.sigma);
}

double seasonal(double t, double c, double d) {
  const double dd = t - d;
  return (1.0 - std::cos(c * t)) * dd * dd;
}

double eval_alpha(double t, const ParameterSet& p) { return p.p1 + p.b1 * seasonal(t, p.c1, p.d1); }

double eval_p2(double theta, P2Mode mode) {
  const double x = 2.0 - theta;
  return mode == P2Mode::kSquared ? x * x : x;
}

double eval_beta(double t, double theta, const ParameterSet& p) {
  return p.b2 * seasonal(t, p.c2, p.d2) * eval_p2(theta, p.p2_mode);
}

double eval_gamma_bar(double t, double theta, double v, double rho, const ParameterSet& p) {
  return p.b3 * seasonal(t, p.c3, p.d3) * (theta - p.kappa * rho) * v;
}

double eval_eta(double /*t*/, const ParameterSet& p) {
  switch (p.eta_mode) {
    case EtaMode::kConstant:
      return p.eta_value;
    case EtaMode::kInverseOnePlusEpsilon:
      break;
  }
  return 1.0 / (1.0 + p.epsilon);
}

Matrix gen_anisotropy(std::uint64_t seed, int dim, double scale) {
  if (dim < 1) throw std::invalid_argument("gen_anisotropy: dim must be positive");
  std::mt19937_64 engine(seed);
  Matrix m;
  m.dim = dim;
  m.a.resize(static_cast<std::size_t>(dim * dim));
  for (double& x : m.a) {
    // 53 random bits, so the draw is identical across standard libraries.
    const double u01 = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    x = scale * u01;
  }
  return m;
}

Matrix anisotropy_matrix(const SpatialParameterSet& sp, int index, int dim) {
  return gen_anisotropy(sp.base.seed + static_cast<std::uint64_t>(index), dim, sp.anisotropy_scale);
}

double anisotropic_radius2(const Matrix& m, std::span<const double> x,
                           std::span<const double> center) {
  const auto n = static_cast<std::size_t>(m.dim);
  if (x.size() != n || (!center.empty() && center.size() != n)) {
    throw std::invalid_argument("anisotropic_radius2: dimension mismatch");
  }
  double r2 = 0.0;
  for (int r = 0; r < m.dim; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double xc = center.empty() ? 0.0 : center[c];
      acc += m(r, static_cast<int>(c)) * (x[c] - xc);
    }
    r2 += acc * acc;
  }
  return r2;
}

namespace {

std::span<const double> q_center(const SpatialParameterSet& sp, int i) {
  const auto idx = static_cast<std::size_t>(i - 1);
  if (idx < sp.q_centers.size()) return sp.q_centers[idx];
  return {};
}

}  // namespace

double eval_q(std::span<const double> x, int i, const SpatialParameterSet& sp) {
  if (i < 1 || i > 3) throw std::invalid_argument("eval_q: index must be 1, 2 or 3");
  if (sp.uniform_coefficients) return 1.0;
  const Matrix m = anisotropy_matrix(sp, i, static_cast<int>(x.size()));
  const double s = std::sin(anisotropic_radius2(m, x, q_center(sp, i)));
  return (s * s + 1.0) / 2.0;
}

double eval_control_spatial(double t, std::span<const double> x, const SpatialParameterSet& sp) {
  const double u = eval_control(t, sp.base);
  if (sp.uniform_coefficients) return u;
  const Matrix m = anisotropy_matrix(sp, 0, static_cast<int>(x.size()));
  const double s = std::sin(anisotropic_radius2(m, x, sp.control_center));
  return s * s * u;
}

bool ValidationReport::ok() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::kError; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << (v.severity == Severity::kError ? "error" : "warning") << " [" << v.hypothesis
       << "] " << v.message << '\n';
  }
  return os.str();
}

namespace {

class Collector {
 public:
  void error(std::string id, std::string msg) {
    report_.violations.push_back({std::move(id), std::move(msg), Severity::kError});
  }
  void warning(std::string id, std::string msg) {
    report_.violations.push_back({std::move(id), std::move(msg), Severity::kWarning});
  }
  void require(bool cond, const char* id, const std::string& msg) {
    if (!cond) error(id, msg);
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

std::string fmt(const char* name, double value) {
  std::ostringstream os;
  os << name << "=" << value;
  return os.str();
}

constexpr int kTimeSamples = 1001;
constexpr int kStateSamples = 11;

void check_ranges(const ParameterSet& p, Collector& out) {
  const std::pair<const char*, double> all[] = {
      {"b1", p.b1},         {"b2", p.b2},         {"b3", p.b3},       {"c1", p.c1},
      {"c2", p.c2},         {"c3", p.c3},         {"d1", p.d1},       {"d2", p.d2},
      {"d3", p.d3},         {"omega1", p.omega1}, {"omega2", p.omega2}, {"phase1", p.phase1},
      {"phase2", p.phase2}, {"sigma", p.sigma},   {"epsilon", p.epsilon},
      {"eta_star", p.eta_star}, {"eta_value", p.eta_value}, {"v_max", p.v_max},
      {"kappa", p.kappa},   {"k1", p.k1},         {"k2", p.k2},       {"p1", p.p1},
      {"dt", p.dt}};
  for (const auto& [name, value] : all) {
    if (!std::isfinite(value)) out.error("range", fmt(name, value) + " is not finite");
  }

  for (const auto& [name, value] : {std::pair{"b1", p.b1}, {"b2", p.b2}, {"b3", p.b3},
                                    {"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}}) {
    out.require(value > 0.0, "range", fmt(name, value) + " must be positive");
  }
  for (const auto& [name, value] : {std::pair{"d1", p.d1}, {"d2", p.d2}, {"d3", p.d3},
                                    {"phase1", p.phase1}, {"phase2", p.phase2}}) {
    out.require(value >= 0.0 && value <= 1.0, "range", fmt(name, value) + " must lie in [0,1]");
  }
  out.require(p.omega1 >= 0.0, "range", fmt("omega1", p.omega1) + " must be nonnegative");
  out.require(p.omega2 >= 0.0, "range", fmt("omega2", p.omega2) + " must be nonnegative");
  out.require(p.v_max > 0.0, "range", fmt("v_max", p.v_max) + " must be positive");
  out.require(p.kappa >= 0.0, "H3", fmt("kappa", p.kappa) +
                                        " must be nonnegative (gamma_bar decreasing in rho)");
  out.require(p.dt > 0.0, "range", fmt("dt", p.dt) + " must be positive");

  if (p.sigma >= 1.0) {
    out.error("w-singularity",
              fmt("sigma", p.sigma) + ": w = 1/(1 - sigma u) is singular where u = 1");
  } else if (!(p.sigma > 0.0)) {
    out.error("range", fmt("sigma", p.sigma) + " must lie in (0,1)");
  }

  if (!(p.epsilon >= 0.0)) {
    out.error("H5", fmt("epsilon", p.epsilon) + " must be nonnegative");
  } else if (p.epsilon > 0.1) {
    out.warning("H5", fmt("epsilon", p.epsilon) + " is meant to be much smaller than 1");
  }
}

void check_forcing_samples(const ParameterSet& p, Collector& out) {
  if (!(p.eta_star > 0.0 && p.eta_star < 1.0)) {
    out.error("H5", fmt("eta_star", p.eta_star) + " must lie in (0,1)");
  }
  const double eta_hi = 1.0 / (1.0 + std::max(p.epsilon, 0.0));
  bool eta_bad = false, alpha_bad = false, beta_bad = false, gamma_bad = false,
       gamma_mono = false, beta_mono = false;
  for (int i = 0; i < kTimeSamples; ++i) {
    const double t = static_cast<double>(i) / (kTimeSamples - 1);
    const double eta = eval_eta(t, p);
    // Relative slack absorbs the rounding of eta_star = 1/(1+eps) in configs.
    if (!(eta >= p.eta_star * (1.0 - 1e-12) && eta <= eta_hi * (1.0 + 1e-12))) eta_bad = true;
    const double a = eval_alpha(t, p);
    if (!(a >= 0.0) || !std::isfinite(a)) alpha_bad = true;
    if (i % 10 != 0) continue;
    for (int j = 0; j < kStateSamples; ++j) {
      const double th = static_cast<double>(j) / (kStateSamples - 1);
      const double b = eval_beta(t, th, p);
      if (!(b >= 0.0)) beta_bad = true;
      if (j > 0 && b > eval_beta(t, th - 0.1, p)) beta_mono = true;
      for (int k = 0; k < kStateSamples; ++k) {
        const double v = p.v_max * static_cast<double>(k) / (kStateSamples - 1);
        if (!(eval_gamma_bar(t, th, v, 0.0, p) >= 0.0)) gamma_bad = true;
        if (eval_gamma_bar(t, 0.0, v, 0.0, p) != 0.0 || eval_gamma_bar(t, th, 0.0, 0.5, p) != 0.0)
          gamma_bad = true;
        if (j > 0 && eval_gamma_bar(t, th, v, 0.5, p) < eval_gamma_bar(t, th - 0.1, v, 0.5, p))
          gamma_mono = true;
      }
    }
  }
  if (eta_bad) out.error("H5", "eta(t) leaves [eta_star, 1/(1+epsilon)] on the sampled year");
  if (alpha_bad) out.error("H4", "alpha(t) is negative or not finite on the sampled year");
  if (beta_bad) out.error("H6", "beta(t, theta) is negative on the sampled grid");
  if (beta_mono) out.error("H6", "beta(t, theta) is not nonincreasing in theta");
  if (gamma_bad) out.error("H2", "gamma_bar must vanish at (theta=0, rho=0) and at v=0, and be "
                                 "nonnegative at rho=0");
  if (gamma_mono) out.error("H3", "gamma_bar is not increasing in theta");
}

void check_gains(const ParameterSet& p, Collector& out) {
  out.require(p.k1 >= 0.0 && p.k2 >= 0.0, "H15",
              "observer gains must be nonnegative: " + fmt("k1", p.k1) + ", " + fmt("k2", p.k2));
  if (p.dt > 0.0) {
    const double cap = 1.0 / (10.0 * p.dt);
    const double k = std::max(p.k1, p.k2);
    if (k > cap) {
      std::ostringstream os;
      os << "gain " << k << " exceeds the explicit-stepping cap 1/(10 dt) = " << cap;
      out.error("gain-cap", os.str());
    }
  }
}

}  // namespace

ValidationReport validate(const ParameterSet& p) {
  Collector out;
  check_ranges(p, out);
  check_forcing_samples(p, out);
  check_gains(p, out);
  return out.take();
}

ValidationReport validate(const SpatialParameterSet& sp) {
  ValidationReport report = validate(sp.base);
  Collector out;
  out.require(std::isfinite(sp.diffusivity) && sp.diffusivity >= 0.0, "H12",
              fmt("diffusivity", sp.diffusivity) + " must be nonnegative");
  out.require(std::isfinite(sp.anisotropy_scale) && sp.anisotropy_scale >= 0.0, "range",
              fmt("anisotropy_scale", sp.anisotropy_scale) + " must be nonnegative");
  out.require(sp.control_center.size() <= 2, "range", "control_center has more than 2 coordinates");
  out.require(sp.q_centers.size() <= 3, "range", "at most three q centers");
  for (const auto& c : sp.q_centers) {
    out.require(c.size() <= 2, "range", "q center has more than 2 coordinates");
  }
  for (auto& v : out.take().violations) report.violations.push_back(std::move(v));
  return report;
}

}  // namespace anthracnose
