#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcgauge/cantor.hpp"
#include "qcgauge/geometry.hpp"

namespace qcgauge {

struct TraceSample {
  LogScale scale;
  double value = 0.0;
  double log_increment = 0.0;  // log |f(z0 + r) - f(z0)|
  double cumulative_arg = 0.0;
  bool flagged = false;
};

struct ExponentTrace {
  ComplexPoint point;
  std::vector<TraceSample> samples;
  double fitted_limit = 0.0;
  double fit_residual = 0.0;
};

template <typename P>
concept IncrementProbe = requires(const P& p, double log_r, double angle) {
  { p.increment(log_r, angle) } -> std::same_as<Increment>;
};

/// Probe over any point-evaluable map, by direct subtraction.
template <typename F>
class MapProbe {
 public:
  MapProbe(F f, ComplexPoint z0) : f_(std::move(f)), z0_(z0), f0_(f_(z0)) {}

  Increment increment(double log_r, double angle) const {
    Complex diff = f_(z0_ + std::polar(std::exp(log_r), angle)) - f0_;
    double mag = std::abs(diff);
    return {mag > 0.0 ? std::log(mag) : -std::numeric_limits<double>::infinity(), std::arg(diff)};
  }

  ComplexPoint point() const { return z0_; }

 private:
  F f_;
  ComplexPoint z0_;
  ComplexPoint f0_;
};

namespace detail {

inline void check_decreasing(const std::vector<LogScale>& scales) {
  if (scales.empty()) throw std::invalid_argument("at least one scale is required");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1])) throw std::invalid_argument("scales must be strictly decreasing");
}

inline void summarize(ExponentTrace& trace) {
  trace.fitted_limit = trace.samples.back().value;
  std::size_t from = trace.samples.size() >= 3 ? trace.samples.size() - 3 : 0;
  double lo = trace.samples[from].value, hi = lo;
  for (std::size_t i = from; i < trace.samples.size(); ++i) {
    lo = std::min(lo, trace.samples[i].value);
    hi = std::max(hi, trace.samples[i].value);
  }
  trace.fit_residual = hi - lo;
}

inline double wrap_pi(double x) {
  double y = std::remainder(x, 2.0 * std::numbers::pi);
  return y;
}

}  // namespace detail

/// log|f(z0 + r) - f(z0)| / log r at each scale along the ray at `angle`.
template <IncrementProbe P>
ExponentTrace stretch_trace(const P& probe, ComplexPoint z0, const std::vector<LogScale>& scales,
                            double angle = 0.0) {
  detail::check_decreasing(scales);
  ExponentTrace trace;
  trace.point = z0;
  for (const auto& s : scales) {
    Increment inc = probe.increment(s.log_value(), angle);
    if (!std::isfinite(inc.log_abs)) throw std::domain_error("degenerate increment");
    TraceSample sample;
    sample.scale = s;
    sample.log_increment = inc.log_abs;
    sample.value = inc.log_abs / s.log_value();
    trace.samples.push_back(sample);
  }
  detail::summarize(trace);
  return trace;
}

template <typename F>
  requires std::invocable<const F&, ComplexPoint>
ExponentTrace stretch_trace(F f, ComplexPoint z0, const std::vector<LogScale>& scales, double angle = 0.0) {
  return stretch_trace(MapProbe<F>(std::move(f), z0), z0, scales, angle);
}

struct RotationOptions {
  double anchor_radius = 4.0;
  int samples_per_decade = 64;
  int max_refinement = 30;
  double max_step = 1.0;  // radians allowed between consecutive samples
};

/// Cumulative argument of f(z0 + r e^{i angle}) - f(z0), unwrapped along the
/// ray from the anchor radius inwards, divided by log |f(z0 + r) - f(z0)|.
/// The cumulative argument is measured relative to the ray direction.
template <IncrementProbe P>
ExponentTrace rotation_trace(const P& probe, ComplexPoint z0, const std::vector<LogScale>& scales,
                             const RotationOptions& opt = {}, double angle = 0.0) {
  detail::check_decreasing(scales);
  if (opt.samples_per_decade < 1) throw std::invalid_argument("samples per decade must be positive");
  const double step = std::log(10.0) / opt.samples_per_decade;
  double pos = std::log(opt.anchor_radius);
  double unwrapped = probe.increment(pos, angle).arg;
  double previous = unwrapped;

  auto advance = [&](double target) {
    // Walk from pos down to target in steps of at most `step`, refining
    // any step whose wrapped argument change is too large.
    while (pos > target) {
      double next = std::max(target, pos - step);
      double h = pos - next;
      int depth = 0;
      for (;;) {
        double candidate = pos - h;
        double a = probe.increment(candidate, angle).arg;
        double delta = detail::wrap_pi(a - previous);
        if (std::abs(delta) <= opt.max_step) {
          unwrapped += delta;
          previous = a;
          pos = candidate;
          break;
        }
        if (++depth > opt.max_refinement) throw std::domain_error("ray passes too near a singular center");
        h *= 0.5;
      }
    }
  };

  ExponentTrace trace;
  trace.point = z0;
  for (const auto& s : scales) {
    if (s.log_value() > pos) throw std::invalid_argument("scales must lie below the anchor radius");
    advance(s.log_value());
    Increment inc = probe.increment(s.log_value(), angle);
    if (!std::isfinite(inc.log_abs)) throw std::domain_error("degenerate increment");
    TraceSample sample;
    sample.scale = s;
    sample.log_increment = inc.log_abs;
    sample.cumulative_arg = unwrapped - angle;
    sample.value = sample.cumulative_arg / inc.log_abs;
    trace.samples.push_back(sample);
  }
  detail::summarize(trace);
  return trace;
}

template <typename F>
  requires std::invocable<const F&, ComplexPoint>
ExponentTrace rotation_trace(F f, ComplexPoint z0, const std::vector<LogScale>& scales,
                             int ray_samples_per_decade, double angle = 0.0) {
  RotationOptions opt;
  opt.samples_per_decade = ray_samples_per_decade;
  return rotation_trace(MapProbe<F>(std::move(f), z0), z0, scales, opt, angle);
}

/// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("regression needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace qcgauge
