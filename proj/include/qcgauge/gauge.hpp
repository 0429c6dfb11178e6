#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcgauge/geometry.hpp"
#include "qcgauge/random.hpp"

namespace qcgauge {

enum class GaugeKind {
  Constant,     // h = 1
  LogPower,     // h = (log 1/r)^{-beta}
  Power,        // h = r^{p}; admissible only for p = 0, kept as a negative control
  ExpLogPower,  // h = exp(-(log 1/r)^{q}), 0 < q < 1
  Custom,
};

inline std::string to_string(GaugeKind kind) {
  switch (kind) {
    case GaugeKind::Constant: return "constant";
    case GaugeKind::LogPower: return "log_power";
    case GaugeKind::Power: return "power";
    case GaugeKind::ExpLogPower: return "exp_log_power";
    case GaugeKind::Custom: return "custom";
  }
  return "unknown";
}

inline GaugeKind gauge_kind_from_string(const std::string& s) {
  if (s == "constant") return GaugeKind::Constant;
  if (s == "log_power") return GaugeKind::LogPower;
  if (s == "power") return GaugeKind::Power;
  if (s == "exp_log_power") return GaugeKind::ExpLogPower;
  throw std::invalid_argument("unknown gauge kind '" + s + "'");
}

struct AdmissibilityEntry {
  double epsilon = 0.0;
  double log_C = 0.0;         // log of the empirical infimum C_eps
  double argmin_log_r = 0.0;  // where the infimum was attained
  double argmin_log_s = 0.0;
  double tail_slope = 0.0;    // trend of per-separation minima at wide separations
  bool pass = true;

  double C() const { return std::exp(log_C); }
};

/// Lambda(r) = r^d h(r). Everything is evaluated from log r so that radii far
/// below double range stay usable. Above r_max, h is held constant.
class Gauge {
 public:
  static constexpr double kLogHundredth = -4.605170185988091;  // log(1/100)

  static Gauge constant(double d) { return Gauge(d, GaugeKind::Constant, 0.0, 0.0); }
  static Gauge log_power(double d, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("log_power gauge needs beta > 0");
    return Gauge(d, GaugeKind::LogPower, beta, kLogHundredth);
  }
  static Gauge power(double d, double p) { return Gauge(d, GaugeKind::Power, p, 0.0); }
  static Gauge exp_log_power(double d, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("exp_log_power needs 0 < q < 1");
    return Gauge(d, GaugeKind::ExpLogPower, q, kLogHundredth);
  }
  /// `log_h` maps log r (<= log_r_max) to log h(r).
  static Gauge custom(double d, std::function<double(double)> log_h, double log_r_max = kLogHundredth) {
    Gauge g(d, GaugeKind::Custom, 0.0, log_r_max);
    g.custom_ = std::move(log_h);
    return g;
  }

  double d() const { return d_; }
  GaugeKind kind() const { return kind_; }
  double parameter() const { return param_; }
  double log_r_max() const { return log_r_max_; }

  Gauge with_dimension(double d) const {
    Gauge g = *this;
    g.d_ = d;
    g.witnesses_.reset();
    return g;
  }

  /// log h(r) with h held constant above r_max.
  double log_h(double log_r) const {
    double x = std::min(log_r, log_r_max_);
    switch (kind_) {
      case GaugeKind::Constant: return 0.0;
      case GaugeKind::LogPower: return -param_ * std::log(-x);
      case GaugeKind::Power: return param_ * x;
      case GaugeKind::ExpLogPower: return -std::pow(-x, param_);
      case GaugeKind::Custom: return custom_(x);
    }
    return 0.0;
  }

  double log_lambda(double log_r) const { return d_ * log_r + log_h(log_r); }

  const std::optional<std::vector<AdmissibilityEntry>>& witnesses() const { return witnesses_; }
  void cache_witnesses(std::vector<AdmissibilityEntry> table) { witnesses_ = std::move(table); }

 private:
  Gauge(double d, GaugeKind kind, double param, double log_r_max)
      : d_(d), kind_(kind), param_(param), log_r_max_(log_r_max) {
    if (!(d > 0.0 && d < 2.0)) throw std::invalid_argument("gauge dimension must lie in (0, 2)");
  }

  double d_;
  GaugeKind kind_;
  double param_;
  double log_r_max_;
  std::function<double(double)> custom_;
  std::optional<std::vector<AdmissibilityEntry>> witnesses_;
};

/// Lambda(r), strict about the domain (0, r_max].
inline LogScale gauge_eval(const Gauge& g, LogScale r) {
  if (r.log_value() > g.log_r_max() + 1e-12) throw std::domain_error("outside gauge domain");
  return LogScale::from_log(g.log_lambda(r.log_value()));
}

struct AdmissibilityOptions {
  double max_log_inverse_r = 1e6;  // sample log(1/r) up to this value
  int bins = 16;
  double slope_tolerance = 0.01;
};

/// Empirical C_eps = inf over 0 < r <= s <= r_max of (h(r)/h(s)) (s/r)^eps.
///
/// Pairs are stratified by the separation D = log(s/r) on a log grid; half
/// of each stratum sits on the edge s = r_max, where the infimum of
/// log-type gauges lives. A FAIL is flagged when the per-stratum minima
/// keep falling across the widest separations.
inline std::vector<AdmissibilityEntry> check_admissibility(const Gauge& g,
                                                           const std::vector<double>& eps_grid,
                                                           int sample_count, std::uint64_t seed,
                                                           const AdmissibilityOptions& opt = {}) {
  if (sample_count < 1000) throw std::invalid_argument("check_admissibility needs >= 1000 samples");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw std::invalid_argument("epsilon must be positive");

  const double L_min = -g.log_r_max();  // log(1/r_max)
  const double L_max = opt.max_log_inverse_r;
  const double logD_lo = std::log(1e-3);
  const double logD_hi = std::log(L_max - L_min);
  const int per_bin = std::max(2, sample_count / opt.bins);

  struct Pair {
    double L_r, L_s;
    int bin;
  };
  std::vector<Pair> pairs;
  Rng rng(seed);
  for (int b = 0; b < opt.bins; ++b) {
    double lo = logD_lo + (logD_hi - logD_lo) * b / opt.bins;
    double hi = logD_lo + (logD_hi - logD_lo) * (b + 1) / opt.bins;
    for (int k = 0; k < per_bin; ++k) {
      double D = std::exp(rng.uniform(lo, hi));
      double L_s = L_min;
      if (k % 2 == 1) {
        double top = std::max(L_min, L_max - D);
        L_s = std::exp(rng.uniform(std::log(L_min), std::log(top)));
      }
      pairs.push_back({L_s + D, L_s, b});
    }
  }
  // r == s gives ratio 1; the infimum can never exceed it.
  pairs.push_back({L_min, L_min, -1});

  for (const auto& p : pairs) {
    if (g.log_h(-p.L_r) > g.log_h(-p.L_s) + 1e-12) throw std::domain_error("h not nondecreasing");
  }

  std::vector<AdmissibilityEntry> table;
  for (double eps : eps_grid) {
    AdmissibilityEntry entry;
    entry.epsilon = eps;
    entry.log_C = std::numeric_limits<double>::infinity();
    std::vector<double> bin_min(opt.bins, std::numeric_limits<double>::infinity());
    for (const auto& p : pairs) {
      double v = g.log_h(-p.L_r) - g.log_h(-p.L_s) + eps * (p.L_r - p.L_s);
      if (v < entry.log_C) {
        entry.log_C = v;
        entry.argmin_log_r = -p.L_r;
        entry.argmin_log_s = -p.L_s;
      }
      if (p.bin >= 0) bin_min[p.bin] = std::min(bin_min[p.bin], v);
    }
    // Least-squares slope of the minima against bin index over the upper half.
    int first = opt.bins / 2;
    int n = opt.bins - first;
    double mx = 0, my = 0;
    for (int b = first; b < opt.bins; ++b) {
      mx += b;
      my += bin_min[b];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int b = first; b < opt.bins; ++b) {
      sxx += (b - mx) * (b - mx);
      sxy += (b - mx) * (bin_min[b] - my);
    }
    entry.tail_slope = sxy / sxx;
    entry.pass = entry.tail_slope >= -opt.slope_tolerance;
    table.push_back(entry);
  }
  return table;
}

struct InverseGaugeResult {
  bool bounded = false;
  double worst_ratio = 0.0;  // sup h(r) / h(r^K)
  double slope = 0.0;        // d log(ratio) / d log log(1/r)
};

/// Empirical check of h(r) <~ h(r^K) over log-uniform r.
inline InverseGaugeResult check_inverse_gauge_condition(const Gauge& g, double K, int samples,
                                                        std::uint64_t seed = 1,
                                                        double max_log_inverse_r = 1e6,
                                                        double slope_tolerance = 0.01) {
  if (!(K > 1.0)) throw std::invalid_argument("K must exceed 1");
  const double L_min = std::max(-g.log_r_max(), 1e-3);
  const double L_hi = max_log_inverse_r / K;
  Rng rng(seed);
  std::vector<double> xs, ys;
  InverseGaugeResult out;
  out.worst_ratio = 0.0;
  double worst_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double x = rng.uniform(std::log(L_min), std::log(L_hi));
    double L = std::exp(x);
    double v = g.log_h(-L) - g.log_h(-K * L);
    worst_log = std::max(worst_log, v);
    xs.push_back(x);
    ys.push_back(v);
  }
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.worst_ratio = std::exp(worst_log);
  out.bounded = std::abs(out.slope) <= slope_tolerance;
  return out;
}

}  // namespace qcgauge
