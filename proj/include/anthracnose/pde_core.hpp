#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anthracnose/forcing.hpp"
#include "anthracnose/ode_core.hpp"

namespace anthracnose {

/// Cell-centered uniform grid on the unit interval (dim 1) or unit square
/// (dim 2). Cells are stored x-fastest.
class Grid {
 public:
  Grid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t cells() const { return cells_; }
  std::array<double, 2> center(std::size_t cell) const;

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int n_;
  double h_;
  std::size_t cells_;
};

/// One scalar per grid cell.
struct Field {
  std::vector<double> values;

  Field() = default;
  explicit Field(std::size_t cells, double fill = 0.0) : values(cells, fill) {}
  explicit Field(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Field&) const = default;
};

struct SpatialTruth {
  Field theta, v, rho;
};

struct SpatialObserver {
  Field theta_hat, v_hat;
};

struct SpatialSystemState {
  SpatialTruth truth;
  SpatialObserver observer;
};

struct SpatialMeasurement {
  Field v, rho, drho_dt;
};

/// Spatial modulation of the forcing, precomputed once per grid.
struct SpatialCoefficients {
  Field q1, q2, q3;
  Field control_factor;
  Field gain1, gain2;  // K1, K2

  static SpatialCoefficients build(const Grid& g, const SpatialParameterSet& sp);
};

/// D times the five-point (or three-point) Laplacian with zero-flux ghost
/// reflection. The cell sum of the result telescopes to zero.
Field laplacian_neumann(const Field& f, const Grid& g, double diffusivity);

/// Pointwise forcing of cell `i` at the instant described by `tf`.
LocalForcing cell_forcing(const TimeForcing& tf, const SpatialCoefficients& c, std::size_t i,
                          const ParameterSet& p);

SpatialTruth spatial_model_rhs(double t, const SpatialTruth& s, const Grid& g,
                               const SpatialCoefficients& c, const SpatialParameterSet& sp);

SpatialMeasurement spatial_measurement_exact(double t, const SpatialTruth& s,
                                             const SpatialCoefficients& c,
                                             const SpatialParameterSet& sp);

SpatialObserver spatial_observer_rhs(double t, const SpatialObserver& o,
                                     const SpatialMeasurement& m, const Grid& g,
                                     const SpatialCoefficients& c, const SpatialParameterSet& sp);

/// Observer right-hand side fed with exact measurements of `s.truth`.
SpatialObserver spatial_observer_rhs(double t, const SpatialSystemState& s, const Grid& g,
                                     const SpatialCoefficients& c, const SpatialParameterSet& sp);

struct Aggregates {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Throws std::invalid_argument on an empty input.
Aggregates spatial_aggregates(std::span<const double> values);
inline Aggregates spatial_aggregates(const Field& f) { return spatial_aggregates(f.values); }

/// Discrete L2(U) norm: sqrt(h^dim * sum f^2).
double l2_norm(const Field& f, const Grid& g);

struct SpatialSample {
  double t = 0.0;
  SpatialSystemState state;
  SpatialMeasurement measurement;
};

/// Spatial version of the convergence-condition check. `theta_sensitivity`
/// holds one d v / d theta field per sample; when absent the K1 stability
/// terms cannot be evaluated and those cells count as singular.
ConditionReport check_conditions_spatial(std::span<const SpatialSample> trajectory,
                                         std::span<const Field> theta_sensitivity,
                                         const Grid& g, const SpatialCoefficients& c,
                                         const SpatialParameterSet& sp);

}  // namespace anthracnose
