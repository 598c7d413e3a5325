#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "anthracnose/pde_core.hpp"

namespace anthracnose {

/// Floor used for relative errors when theta is near zero.
inline constexpr double kRelativeErrorFloor = 1e-3;

/// |theta - theta_hat| / max(|theta|, floor). Throws when floor <= 0.
double relative_abs_error(double theta, double theta_hat, double floor = kRelativeErrorFloor);

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> abs_error;
  std::vector<double> rel_error;
};

/// Spatial min/mean/max of the pointwise absolute and relative errors.
struct SpatialErrorSeries {
  std::vector<double> times;
  std::vector<Aggregates> abs_error;
  std::vector<Aggregates> rel_error;
};

ErrorSeries error_series(std::span<const OdeSample> samples);
SpatialErrorSeries error_series(std::span<const SpatialSample> samples);

using TimeFunction = std::function<double(double)>;

/// Composite Simpson rule; `panels` is rounded up to an even count >= 2.
double simpson(const TimeFunction& f, double a, double b, std::size_t panels);

inline constexpr std::size_t kEnvelopePanels = 10000;

/// e0 exp(-int_0^t alpha w ds).
double analytic_envelope(double t, const TimeFunction& alpha, const TimeFunction& w, double e0,
                         std::size_t panels = kEnvelopePanels);

/// The envelope at each of the sorted `times` (starting at 0), integrating
/// piecewise so the whole span uses at least `panels` Simpson panels.
std::vector<double> analytic_envelope_series(std::span<const double> times,
                                             const TimeFunction& alpha, const TimeFunction& w,
                                             double e0, std::size_t panels = kEnvelopePanels);

/// e0_norm^2 exp(-2 t inf_alpha), the bound on the squared L2 error.
double l2_envelope(double t, double inf_alpha, double e0_norm);

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DecayFit {
  double rate = 0.0;       // -slope of ln(error) against t
  double intercept = 0.0;  // ln(error) at t = 0
  double residual_rms = 0.0;
  std::size_t samples = 0;
  bool truncated = false;  // an exact zero ended the fitted prefix
};

/// Least-squares exponential decay rate over samples with t in [t_lo, t_hi].
/// Fits the positive prefix; throws InsufficientDataError below 10 samples.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> errors,
                        double t_lo, double t_hi);

struct EnvelopeCheck {
  bool pass = true;
  std::size_t worst_index = 0;
  double worst_margin = 0.0;  // max of series - envelope (1 + tol)
};

/// Verifies series[i] <= envelope[i] (1 + tol) for all i.
EnvelopeCheck envelope_check(std::span<const double> series, std::span<const double> envelope,
                             double tol = 1e-3);

}  // namespace anthracnose
