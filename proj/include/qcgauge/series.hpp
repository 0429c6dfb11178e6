#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcgauge/exponents.hpp"
#include "qcgauge/geometry.hpp"

namespace qcgauge {

/// f = sum 2^{-n} f_{lambda_n} with f_lambda(z) = (z - lambda)|z - lambda|^{1/K - 1} + lambda
/// on the closed unit disk about lambda and the identity elsewhere.
class SeriesMap {
 public:
  SeriesMap(double K, std::vector<ComplexPoint> lambdas) : K_(K), lambdas_(std::move(lambdas)) {
    if (!(K > 1.0)) throw std::invalid_argument("K must exceed 1");
    if (lambdas_.empty()) throw std::invalid_argument("at least one lambda is required");
    for (auto l : lambdas_)
      if (!is_finite(l) || !(std::abs(l) < 1.0)) throw std::invalid_argument("every lambda must lie in the unit disk");
  }

  double K() const { return K_; }
  const std::vector<ComplexPoint>& lambdas() const { return lambdas_; }
  std::size_t size() const { return lambdas_.size(); }

  ComplexPoint term(std::size_t i, ComplexPoint z) const {
    Complex w = z - lambdas_.at(i);
    double rho = std::abs(w);
    if (rho > 1.0) return z;
    if (rho == 0.0) return lambdas_[i];
    return lambdas_[i] + w * std::pow(rho, 1.0 / K_ - 1.0);
  }

  /// f_{lambda_i}(z0 + delta) - f_{lambda_i}(z0) without cancellation.
  Complex term_increment(std::size_t i, ComplexPoint z0, Complex delta) const {
    Complex w = z0 - lambdas_.at(i);
    double p = 1.0 / K_ - 1.0;
    bool in0 = std::abs(w) <= 1.0;
    bool in1 = std::abs(w + delta) <= 1.0;
    if (!in0 && !in1) return delta;
    if (in0 != in1) return term(i, z0 + delta) - term(i, z0);
    double rho = std::abs(w);
    if (rho == 0.0) return delta * std::pow(std::abs(delta), p);
    Complex z = delta / w;
    return w * std::pow(rho, p) * bracket(z, p);
  }

  /// (1 + z)|1 + z|^p - 1, accurate for small z.
  static Complex bracket(Complex z, double p) {
    double q = 2.0 * z.real() + std::norm(z);
    if (q <= -1.0) return -1.0;  // z = -1
    double L = 0.5 * std::log1p(q);
    return (1.0 + z) * std::expm1(p * L) + z;
  }

 private:
  double K_;
  std::vector<ComplexPoint> lambdas_;
};

/// Terms needed for a tail of at most tol, capped by the list size.
inline int series_truncation(std::size_t size, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  double need = std::ceil(1.0 - std::log2(tol / 2.0));
  return static_cast<int>(std::min<double>(static_cast<double>(size), std::max(1.0, need)));
}

struct SeriesValue {
  ComplexPoint value;
  int terms = 0;
};

inline SeriesValue series_eval(const SeriesMap& m, ComplexPoint z, double tol) {
  int N = series_truncation(m.size(), tol);
  Complex sum = 0.0;
  for (int n = 1; n <= N; ++n) sum += std::ldexp(1.0, -n) * m.term(n - 1, z);
  return {sum, N};
}

/// Sum over every listed term of 2^{-n} times its increment.
inline Complex series_increment(const SeriesMap& m, ComplexPoint z0, Complex delta) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sum += std::ldexp(1.0, -static_cast<int>(i) - 1) * m.term_increment(i, z0, delta);
  return sum;
}

struct ConstantGrid {
  int radial = 960;
  int angles = 64;
  double min_abs = 1e-8;
  double max_abs = 1e4;
};

/// Empirical sup of |(1+z)|1+z|^{1/K-1} - 1| / min(|z|, |z|^{1/K}).
inline double stretching_estimate_constant(double K, const ConstantGrid& grid = {}) {
  if (!(K > 1.0)) throw std::invalid_argument("K must exceed 1");
  double p = 1.0 / K - 1.0;
  double sup = 0.0;
  double l0 = std::log(grid.min_abs), l1 = std::log(grid.max_abs);
  for (int i = 0; i < grid.radial; ++i) {
    double rho = std::exp(l0 + (l1 - l0) * i / (grid.radial - 1));
    double den = std::min(rho, std::pow(rho, 1.0 / K));
    for (int j = 0; j < grid.angles; ++j) {
      Complex z = std::polar(rho, 2.0 * std::numbers::pi * j / grid.angles);
      sup = std::max(sup, std::abs(SeriesMap::bracket(z, p)) / den);
    }
  }
  return sup;
}

/// Smallest a with 2^a > C0.
inline int series_cutoff_offset(double C0) { return std::max(0, static_cast<int>(std::floor(std::log2(C0))) + 1); }

/// Distance factor of the near-field: lambda_m counts as near at scale r
/// when |lambda_m - lambda_n| < r (2^{n+1} C0)^{1/(1 - 1/K)}.
inline double series_near_factor(double K, int n, double C0) {
  return std::pow(std::ldexp(C0, n + 1), 1.0 / (1.0 - 1.0 / K));
}

struct SeriesStretchReport {
  ExponentTrace trace;
  double constant = 0.0;  // c in |f(r) - f(0)| ~ c r^{1/K}
  double slope = 0.0;     // fitted exponent over unflagged scales
  int flagged = 0;
};

/// Largest scale at which no earlier or nearby-indexed lambda is in the near field.
inline double series_safe_scale(const SeriesMap& m, int n, double C0) {
  int a = series_cutoff_offset(C0);
  double factor = series_near_factor(m.K(), n, C0);
  double nearest = 1.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    int idx = static_cast<int>(j) + 1;
    if (idx == n || idx >= n + a + 10) continue;
    nearest = std::min(nearest, std::abs(m.lambdas()[j] - m.lambdas()[n - 1]));
  }
  return nearest / factor;
}

/// 20 dyadic scales starting 2^10 below the safe scale.
inline std::vector<LogScale> series_default_scales(const SeriesMap& m, int n, double C0, int count = 20) {
  double start = std::log(series_safe_scale(m, n, C0)) - 10.0 * std::numbers::ln2;
  std::vector<LogScale> s;
  for (int i = 0; i < count; ++i) s.push_back(LogScale::from_log(start - i * std::numbers::ln2));
  return s;
}

/// Stretch trace at lambda_n (1-based). Scales inside the near field of a
/// low-index lambda are flagged and left out of both fits.
inline SeriesStretchReport stretching_at_lambda(const SeriesMap& m, int n, const std::vector<LogScale>& scales,
                                                double C0, double angle = 0.0) {
  if (n < 1 || n > static_cast<int>(m.size())) throw std::out_of_range("lambda index out of range");
  detail::check_decreasing(scales);
  ComplexPoint z0 = m.lambdas()[n - 1];
  int a = series_cutoff_offset(C0);
  double factor = series_near_factor(m.K(), n, C0);
  SeriesStretchReport rep;
  rep.trace.point = z0;
  std::vector<double> xs, ys;
  for (const auto& s : scales) {
    double r = std::exp(s.log_value());
    Complex inc = series_increment(m, z0, std::polar(r, angle));
    double mag = std::abs(inc);
    if (!(mag > 0.0)) throw std::domain_error("degenerate increment");
    TraceSample t;
    t.scale = s;
    t.log_increment = std::log(mag);
    t.value = t.log_increment / s.log_value();
    for (std::size_t j = 0; j < m.size(); ++j) {
      int idx = static_cast<int>(j) + 1;
      if (idx == n || idx >= n + a + 10) continue;
      if (std::abs(m.lambdas()[j] - z0) < r * factor) t.flagged = true;
    }
    if (t.flagged) {
      ++rep.flagged;
    } else {
      xs.push_back(s.log_value());
      ys.push_back(t.log_increment);
    }
    rep.trace.samples.push_back(t);
  }
  detail::summarize(rep.trace);
  if (xs.size() >= 2) {
    rep.slope = regression_slope(xs, ys);
    rep.trace.fitted_limit = rep.slope;
  }
  // c from the four smallest unflagged scales, least squares through the origin.
  double num = 0.0, den = 0.0;
  int used = 0;
  double ref = xs.empty() ? 0.0 : xs.back();
  for (std::size_t i = xs.size(); i-- > 0 && used < 4; ++used) {
    double w = std::exp((xs[i] - ref) / m.K());
    double q = std::exp(ys[i] - xs[i] / m.K());
    num += q * w * w;
    den += w * w;
  }
  rep.constant = used > 0 ? num / den : 0.0;
  return rep;
}

/// Split of the other terms' increment at lambda_n into the far and near
/// regimes of the cutoff (r / |lambda_m - lambda_n|)^{1 - 1/K} < 1 / (2^{n+1} C0).
struct FarNearSplit {
  double far = 0.0;
  double near = 0.0;
};

inline FarNearSplit series_far_near(const SeriesMap& m, int n, double r, double C0) {
  ComplexPoint z0 = m.lambdas().at(n - 1);
  double bound = 1.0 / std::ldexp(C0, n + 1);
  FarNearSplit out;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (static_cast<int>(j) + 1 == n) continue;
    double dist = std::abs(m.lambdas()[j] - z0);
    double contrib = std::ldexp(std::abs(m.term_increment(j, z0, r)), -static_cast<int>(j) - 1);
    if (std::pow(r / dist, 1.0 - 1.0 / m.K()) < bound)
      out.far += contrib;
    else
      out.near += contrib;
  }
  return out;
}

}  // namespace qcgauge
