#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcgauge {

using ComplexPoint = std::complex<double>;

/// Raised when a magnitude leaves the range that can be represented or
/// evaluated at double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

inline bool is_finite(ComplexPoint z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline ComplexPoint checked_point(double re, double im) {
  ComplexPoint z{re, im};
  if (!is_finite(z)) throw std::invalid_argument("non-finite point");
  return z;
}

/// A positive magnitude stored as its natural logarithm.
///
/// Radii of deep generations (products of many factors below one) fall far
/// below the smallest double, so every radius lives in log space and is only
/// converted back through the checked `value()`.
class LogScale {
 public:
  constexpr LogScale() = default;

  static LogScale from_log(double log_value) {
    if (!std::isfinite(log_value)) throw RangeError("scale out of range");
    LogScale s;
    s.log_ = log_value;
    return s;
  }

  static LogScale from_value(double value) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw std::invalid_argument("LogScale requires a finite positive value");
    return from_log(std::log(value));
  }

  static LogScale one() { return LogScale{}; }

  constexpr double log_value() const { return log_; }

  /// Plain value; refuses instead of silently underflowing to zero.
  double value() const {
    if (log_ < kMinLog || log_ > kMaxLog)
      throw RangeError("scale out of double range: log = " + std::to_string(log_));
    return std::exp(log_);
  }

  bool representable() const { return log_ >= kMinLog && log_ <= kMaxLog; }

  LogScale pow(double exponent) const { return from_log(log_ * exponent); }

  friend LogScale operator*(LogScale a, LogScale b) { return from_log(a.log_ + b.log_); }
  friend LogScale operator/(LogScale a, LogScale b) { return from_log(a.log_ - b.log_); }
  friend auto operator<=>(LogScale a, LogScale b) { return a.log_ <=> b.log_; }
  friend bool operator==(LogScale a, LogScale b) { return a.log_ == b.log_; }

  // exp() of anything in this window is a normal double.
  static constexpr double kMinLog = -708.0;
  static constexpr double kMaxLog = 709.0;

 private:
  double log_ = 0.0;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline LogScale log_scale_product(std::span<const LogScale> factors) {
  CompensatedSum acc;
  for (const auto& f : factors) acc.add(f.log_value());
  double total = acc.value();
  if (!std::isfinite(total)) throw RangeError("scale out of range");
  return LogScale::from_log(total);
}

/// log(sum(exp(terms))) without overflow; -inf for an empty input.
inline double log_sum_exp(std::span<const double> terms) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double t : terms) peak = std::max(peak, t);
  if (!std::isfinite(peak)) return peak;
  CompensatedSum acc;
  for (double t : terms) acc.add(std::exp(t - peak));
  return peak + std::log(acc.value());
}

struct Disk {
  ComplexPoint center;
  LogScale radius;
};

/// Strict separation: tangent disks are not disjoint.
inline bool disks_disjoint(const Disk& a, const Disk& b) {
  return std::abs(a.center - b.center) > a.radius.value() + b.radius.value();
}

inline bool disk_contains(const Disk& outer, const Disk& inner) {
  return std::abs(outer.center - inner.center) + inner.radius.value() <= outer.radius.value();
}

struct IndexEntry {
  int generation = 0;
  int family = 0;
  int member = 0;
  friend auto operator<=>(const IndexEntry&, const IndexEntry&) = default;
};

/// Path through the generation tree. Lexicographic order is depth-first
/// order: a prefix sorts before all of its extensions.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<IndexEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].generation != static_cast<int>(i) + 1)
        throw std::invalid_argument("MultiIndex generations must run 1, 2, ... without gaps");
    }
  }

  MultiIndex child(int family, int member) const {
    MultiIndex out = *this;
    out.entries_.push_back({depth() + 1, family, member});
    return out;
  }

  int depth() const { return static_cast<int>(entries_.size()); }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const IndexEntry& operator[](std::size_t i) const { return entries_.at(i); }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<IndexEntry> entries_;
};

}  // namespace qcgauge
