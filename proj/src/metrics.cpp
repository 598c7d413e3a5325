#include "anthracnose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anthracnose {

double relative_abs_error(double theta, double theta_hat, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("relative_abs_error: floor must be positive");
  return std::abs(theta - theta_hat) / std::max(std::abs(theta), floor);
}

ErrorSeries error_series(std::span<const OdeSample> samples) {
  ErrorSeries e;
  for (const auto& s : samples) {
    e.times.push_back(s.t);
    e.abs_error.push_back(std::abs(s.truth.theta - s.observer.theta_hat));
    e.rel_error.push_back(relative_abs_error(s.truth.theta, s.observer.theta_hat));
  }
  return e;
}

SpatialErrorSeries error_series(std::span<const SpatialSample> samples) {
  SpatialErrorSeries e;
  std::vector<double> abs, rel;
  for (const auto& s : samples) {
    const Field& th = s.state.truth.theta;
    const Field& th_hat = s.state.observer.theta_hat;
    abs.resize(th.size());
    rel.resize(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
      abs[i] = std::abs(th[i] - th_hat[i]);
      rel[i] = relative_abs_error(th[i], th_hat[i]);
    }
    e.times.push_back(s.t);
    e.abs_error.push_back(spatial_aggregates(abs));
    e.rel_error.push_back(spatial_aggregates(rel));
  }
  return e;
}

double simpson(const TimeFunction& f, double a, double b, std::size_t panels) {
  std::size_t n = std::max<std::size_t>(panels, 2);
  if (n % 2 != 0) ++n;
  if (a == b) return 0.0;
  const double h = (b - a) / static_cast<double>(n);
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double y = f(a + static_cast<double>(i) * h);
    (i % 2 ? odd : even) += y;
  }
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

double analytic_envelope(double t, const TimeFunction& alpha, const TimeFunction& w, double e0,
                         std::size_t panels) {
  if (t < 0.0) throw std::invalid_argument("analytic_envelope: t must be nonnegative");
  const auto rate = [&](double s) { return alpha(s) * w(s); };
  return e0 * std::exp(-simpson(rate, 0.0, t, panels));
}

std::vector<double> analytic_envelope_series(std::span<const double> times,
                                             const TimeFunction& alpha, const TimeFunction& w,
                                             double e0, std::size_t panels) {
  std::vector<double> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  const double span = times.back();
  const auto rate = [&](double s) { return alpha(s) * w(s); };
  double q = 0.0;
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) throw std::invalid_argument("analytic_envelope_series: times must be sorted");
    if (t > prev && span > 0.0) {
      const auto n = static_cast<std::size_t>(
          std::ceil(static_cast<double>(panels) * (t - prev) / span));
      q += simpson(rate, prev, t, n);
    }
    prev = t;
    out.push_back(e0 * std::exp(-q));
  }
  return out;
}

double l2_envelope(double t, double inf_alpha, double e0_norm) {
  if (inf_alpha < 0.0) throw std::invalid_argument("l2_envelope: inf_alpha must be nonnegative");
  return e0_norm * e0_norm * std::exp(-2.0 * t * inf_alpha);
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> errors,
                        double t_lo, double t_hi) {
  if (times.size() != errors.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  DecayFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(errors[i] > 0.0)) {
      fit.truncated = true;
      break;
    }
    xs.push_back(times[i]);
    ys.push_back(std::log(errors[i]));
  }
  if (xs.size() < 10) {
    throw InsufficientDataError("fit_decay_rate: fewer than 10 positive samples in window");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InsufficientDataError("fit_decay_rate: all samples at one time");
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  fit.samples = xs.size();
  return fit;
}

EnvelopeCheck envelope_check(std::span<const double> series, std::span<const double> envelope,
                             double tol) {
  if (series.size() != envelope.size()) {
    throw std::invalid_argument("envelope_check: series and envelope lengths differ");
  }
  EnvelopeCheck out;
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double margin = series[i] - envelope[i] * (1.0 + tol);
    if (margin > out.worst_margin) {
      out.worst_margin = margin;
      out.worst_index = i;
    }
  }
  out.pass = series.empty() || out.worst_margin <= 0.0;
  if (series.empty()) out.worst_margin = 0.0;
  return out;
}

}  // namespace anthracnose
