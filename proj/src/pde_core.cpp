#include "anthracnose/pde_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anthracnose {

Grid::Grid(int dim, int n) : dim_(dim), n_(n), h_(0.0), cells_(0) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
  if (n < 2) throw std::invalid_argument("Grid: need at least 2 cells per axis");
  h_ = 1.0 / n;
  cells_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

std::array<double, 2> Grid::center(std::size_t cell) const {
  const auto nn = static_cast<std::size_t>(n_);
  const double x = (static_cast<double>(cell % nn) + 0.5) * h_;
  if (dim_ == 1) return {x, 0.0};
  const double y = (static_cast<double>(cell / nn) + 0.5) * h_;
  return {x, y};
}

SpatialCoefficients SpatialCoefficients::build(const Grid& g, const SpatialParameterSet& sp) {
  SpatialCoefficients c;
  const std::size_t cells = g.cells();
  c.q1 = Field(cells, 1.0);
  c.q2 = Field(cells, 1.0);
  c.q3 = Field(cells, 1.0);
  c.control_factor = Field(cells, 1.0);
  c.gain1 = Field(cells, sp.base.k1);
  c.gain2 = Field(cells, sp.base.k2);
  if (sp.uniform_coefficients) return c;

  const int dim = g.dim();
  const Matrix m0 = anisotropy_matrix(sp, 0, dim);
  const Matrix mq[3] = {anisotropy_matrix(sp, 1, dim), anisotropy_matrix(sp, 2, dim),
                        anisotropy_matrix(sp, 3, dim)};
  Field* qs[3] = {&c.q1, &c.q2, &c.q3};
  for (std::size_t i = 0; i < cells; ++i) {
    const auto xc = g.center(i);
    const std::span<const double> x(xc.data(), static_cast<std::size_t>(dim));
    const double s0 = std::sin(anisotropic_radius2(m0, x, sp.control_center));
    c.control_factor[i] = s0 * s0;
    for (int k = 0; k < 3; ++k) {
      std::span<const double> center;
      if (static_cast<std::size_t>(k) < sp.q_centers.size()) center = sp.q_centers[k];
      const double s = std::sin(anisotropic_radius2(mq[k], x, center));
      (*qs[k])[i] = (s * s + 1.0) / 2.0;
    }
  }
  return c;
}

Field laplacian_neumann(const Field& f, const Grid& g, double diffusivity) {
  if (f.size() != g.cells()) throw std::invalid_argument("laplacian_neumann: field/grid mismatch");
  Field out(f.size(), 0.0);
  if (diffusivity == 0.0) return out;
  const double scale = diffusivity / (g.h() * g.h());
  const auto n = static_cast<std::size_t>(g.n());
  // Face fluxes f[j] - f[i] are added to one cell and subtracted from the
  // other; boundary faces carry no flux.
  auto face = [&](std::size_t i, std::size_t j) {
    const double flux = scale * (f[j] - f[i]);
    out[i] += flux;
    out[j] -= flux;
  };
  if (g.dim() == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) face(i, i + 1);
    return out;
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) {
      const std::size_t i = r * n + col;
      if (col + 1 < n) face(i, i + 1);
      if (r + 1 < n) face(i, i + n);
    }
  }
  return out;
}

LocalForcing cell_forcing(const TimeForcing& tf, const SpatialCoefficients& c, std::size_t i,
                          const ParameterSet& p) {
  return local_forcing(tf, c.q1[i], c.q2[i], c.q3[i], c.control_factor[i], p);
}

namespace {

ModelState truth_at(const SpatialTruth& s, std::size_t i) {
  return {s.theta[i], s.v[i], s.rho[i]};
}

void check_shape(const SpatialTruth& s, const Grid& g) {
  const std::size_t n = g.cells();
  if (s.theta.size() != n || s.v.size() != n || s.rho.size() != n) {
    throw std::invalid_argument("spatial state does not match grid");
  }
}

}  // namespace

SpatialTruth spatial_model_rhs(double t, const SpatialTruth& s, const Grid& g,
                               const SpatialCoefficients& c, const SpatialParameterSet& sp) {
  check_shape(s, g);
  const ParameterSet& p = sp.base;
  const TimeForcing tf = time_forcing(t, p);
  SpatialTruth d{laplacian_neumann(s.theta, g, sp.diffusivity), Field(g.cells()), Field(g.cells())};
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const ModelState r = kernel::model_rhs(cell_forcing(tf, c, i, p), truth_at(s, i), p);
    d.theta[i] += r.theta;
    d.v[i] = r.v;
    d.rho[i] = r.rho;
  }
  return d;
}

SpatialMeasurement spatial_measurement_exact(double t, const SpatialTruth& s,
                                             const SpatialCoefficients& c,
                                             const SpatialParameterSet& sp) {
  const ParameterSet& p = sp.base;
  const TimeForcing tf = time_forcing(t, p);
  SpatialMeasurement m{s.v, s.rho, Field(s.v.size())};
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    m.drho_dt[i] = kernel::drho_dt(cell_forcing(tf, c, i, p), truth_at(s, i), p);
  }
  return m;
}

SpatialObserver spatial_observer_rhs(double t, const SpatialObserver& o,
                                     const SpatialMeasurement& m, const Grid& g,
                                     const SpatialCoefficients& c, const SpatialParameterSet& sp) {
  const std::size_t n = g.cells();
  if (o.theta_hat.size() != n || o.v_hat.size() != n || m.v.size() != n) {
    throw std::invalid_argument("spatial observer state does not match grid");
  }
  const ParameterSet& p = sp.base;
  const TimeForcing tf = time_forcing(t, p);
  SpatialObserver d{laplacian_neumann(o.theta_hat, g, sp.diffusivity), Field(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Measurement mi{m.v[i], m.rho[i], m.drho_dt[i]};
    const ObserverState r = kernel::observer_rhs(cell_forcing(tf, c, i, p),
                                                 {o.theta_hat[i], o.v_hat[i]}, mi, c.gain1[i],
                                                 c.gain2[i], p);
    d.theta_hat[i] += r.theta_hat;
    d.v_hat[i] = r.v_hat;
  }
  return d;
}

SpatialObserver spatial_observer_rhs(double t, const SpatialSystemState& s, const Grid& g,
                                     const SpatialCoefficients& c, const SpatialParameterSet& sp) {
  return spatial_observer_rhs(t, s.observer, spatial_measurement_exact(t, s.truth, c, sp), g, c,
                              sp);
}

Aggregates spatial_aggregates(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("spatial_aggregates: empty field");
  Aggregates a{values[0], 0.0, values[0]};
  double sum = 0.0;
  for (double x : values) {
    a.min = std::min(a.min, x);
    a.max = std::max(a.max, x);
    sum += x;
  }
  a.mean = sum / static_cast<double>(values.size());
  // Rounding in the sum must not push the mean outside [min, max].
  a.mean = std::clamp(a.mean, a.min, a.max);
  return a;
}

double l2_norm(const Field& f, const Grid& g) {
  double sum = 0.0;
  for (double x : f.values) sum += x * x;
  return std::sqrt(std::pow(g.h(), g.dim()) * sum);
}

ConditionReport check_conditions_spatial(std::span<const SpatialSample> trajectory,
                                         std::span<const Field> theta_sensitivity,
                                         const Grid& g, const SpatialCoefficients& c,
                                         const SpatialParameterSet& sp) {
  const ParameterSet& p = sp.base;
  const bool have_sens = theta_sensitivity.size() == trajectory.size();
  ConditionReport report;
  std::vector<double> times, alpha_min;

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const SpatialSample& s = trajectory[k];
    const TimeForcing tf = time_forcing(s.t, p);
    double amin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const LocalForcing f = cell_forcing(tf, c, i, p);
      const double th = s.state.truth.theta[i];
      const double th_hat = s.state.observer.theta_hat[i];
      const Measurement m{s.measurement.v[i], s.measurement.rho[i], s.measurement.drho_dt[i]};
      const double k1 = c.gain1[i];
      const double k2 = c.gain2[i];
      ++report.total_points;

      report.alpha.add(f.alpha, s.t);
      amin = std::min(amin, f.alpha);

      const double err = th - th_hat;
      if (err != 0.0) {
        const double dg = f.gamma_bar(th, m.v, m.rho, p) - f.gamma_bar(th_hat, m.v, m.rho, p);
        report.coercivity.add(std::abs(dg) / std::abs(err), s.t);
      }

      const double p1v = kernel::phi1(th_hat, s.state.observer.v_hat[i], m, p);
      const double p2v = kernel::phi2(f, th_hat, m, p);
      report.dominance_margin.add(k2 * std::abs(p2v) - k1 * p1v, s.t);

      const double k1d = k1 * delta_indicator(th_hat);
      double base = f.alpha * f.w;
      if (k1d != 0.0) {
        if (!have_sens || m.v < kSingularThreshold) {
          ++report.singular_points;
          continue;
        }
        const double dv = theta_sensitivity[k][i];
        base += k1d * (m.v + (1.0 + p.epsilon - th) * dv) / m.v;
      }
      report.stability_k1.add(base, s.t);
      report.stability_k1k2.add(base + k2 * p2v, s.t);
    }
    times.push_back(s.t);
    alpha_min.push_back(amin);
  }
  report.alpha_zero_times = near_zero_minima(times, alpha_min, 1e-8);
  return report;
}

}  // namespace anthracnose
