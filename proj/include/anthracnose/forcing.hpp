#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anthracnose {

enum class EtaMode { kInverseOnePlusEpsilon, kConstant };
enum class P2Mode { kLinear, kSquared };

/// Coefficients of the within-host model, the control signal and the observer.
///
/// Time is normalized so that one cultivation year is t in [0, 1]. The
/// defaults returned by `table1()` are the reference simulation constants.
struct ParameterSet {
  // Amplitudes, pulsations and peak times of alpha, beta and gamma.
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;

  // u(t) = sin^2(omega1 (t - phase1)^2) exp(-omega2 (t - phase2)^2)
  double omega1 = 0.0, omega2 = 0.0;
  double phase1 = 0.0, phase2 = 0.0;

  double sigma = 0.0;    // w = 1 / (1 - sigma u)
  double epsilon = 0.0;  // minimal-volume regularizer
  double eta_star = 0.0; // lower bound of eta(t)
  EtaMode eta_mode = EtaMode::kInverseOnePlusEpsilon;
  double eta_value = 1.0;  // used when eta_mode == kConstant
  double v_max = 1.0;
  double kappa = 0.0;  // rot feedback in gamma_bar

  double k1 = 0.0, k2 = 0.0;  // observer gains
  double p1 = 0.0;            // constant offset of alpha, >= 0
  P2Mode p2_mode = P2Mode::kLinear;

  double dt = 1e-4;
  std::uint64_t seed = 1;

  static ParameterSet table1();

  bool operator==(const ParameterSet&) const = default;
};

/// b2 = v_max ln(1e5 v_max (1 - epsilon eta_star)) / 2
double default_b2(double v_max, double epsilon, double eta_star);
/// b3 = v_max ln(1e5 v_max)
double default_b3(double v_max);

/// Row-major square matrix used for the radial anisotropy of u and q_i.
struct Matrix {
  int dim = 0;
  std::vector<double> a;

  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * dim + c)]; }
  bool operator==(const Matrix&) const = default;
};

struct SpatialParameterSet {
  ParameterSet base;
  double diffusivity = 1e-2;       // A = D I
  double anisotropy_scale = 5.0;   // entries of M, M_i drawn from [0, scale)
  std::vector<double> control_center;               // x0; empty means origin
  std::vector<std::vector<double>> q_centers;       // x_1..x_3; empty means origin
  // q_i == 1 and spatial control factor == 1 everywhere.
  bool uniform_coefficients = false;

  static SpatialParameterSet table2();

  bool operator==(const SpatialParameterSet&) const = default;
};

// Forcing terms. All are pure functions of their arguments.

double eval_control(double t, const ParameterSet& p);
/// Throws std::domain_error when sigma u(t) >= 1.
double eval_w(double t, const ParameterSet& p);
double eval_w_from_control(double u, double sigma);
double eval_alpha(double t, const ParameterSet& p);
/// (1 - cos(c t)) (t - d)^2, the common seasonal shape of alpha, beta, gamma.
double seasonal(double t, double c, double d);
double eval_p2(double theta, P2Mode mode);
double eval_beta(double t, double theta, const ParameterSet& p);
double eval_gamma_bar(double t, double theta, double v, double rho, const ParameterSet& p);
double eval_eta(double t, const ParameterSet& p);

/// Entries i.i.d. uniform on [0, scale), a pure function of the arguments.
Matrix gen_anisotropy(std::uint64_t seed, int dim, double scale);

/// Anisotropy matrices of a spatial run: index 0 is M (control), 1..3 are M_i.
Matrix anisotropy_matrix(const SpatialParameterSet& sp, int index, int dim);

/// Squared norm ||m (x - center)||^2; an empty center means the origin.
double anisotropic_radius2(const Matrix& m, std::span<const double> x,
                           std::span<const double> center);

/// q_i(x) = (sin^2(||M_i (x - x_i)||^2) + 1) / 2, i in {1, 2, 3}.
double eval_q(std::span<const double> x, int i, const SpatialParameterSet& sp);
/// sin^2(||M (x - x0)||^2) u(t).
double eval_control_spatial(double t, std::span<const double> x, const SpatialParameterSet& sp);

enum class Severity { kWarning, kError };

struct Violation {
  std::string hypothesis;  // "H5", "gain-cap", ...
  std::string message;
  Severity severity = Severity::kError;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const;
  std::string to_string() const;
};

ValidationReport validate(const ParameterSet& p);
ValidationReport validate(const SpatialParameterSet& sp);

}  // namespace anthracnose
