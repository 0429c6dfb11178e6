#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcgauge {

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RootResult {
  double root = 0.0;
  double defect = 0.0;
  int iterations = 0;
};

/// Root of a nondecreasing function. Starts from [start - step, start + step],
/// grows the bracket geometrically until the sign changes, then bisects
/// until |f| <= tolerance or the bracket collapses to adjacent doubles.
template <typename Function>
RootResult solve_increasing(Function f, double start, double step, double tolerance,
                            double max_reach = 1e6) {
  double lo = start - step;
  double hi = start + step;
  double f_lo = f(lo);
  double f_hi = f(hi);
  int iterations = 0;
  while (f_lo > 0.0) {
    step *= 2.0;
    hi = lo;
    f_hi = f_lo;
    lo = start - step;
    if (step > max_reach) throw BracketError("bracket expansion exceeded bound");
    f_lo = f(lo);
    ++iterations;
  }
  while (f_hi < 0.0) {
    step *= 2.0;
    lo = hi;
    f_lo = f_hi;
    hi = start + step;
    if (step > max_reach) throw BracketError("bracket expansion exceeded bound");
    f_hi = f(hi);
    ++iterations;
  }
  if (std::abs(f_lo) <= tolerance) return {lo, f_lo, iterations};
  if (std::abs(f_hi) <= tolerance) return {hi, f_hi, iterations};
  for (;;) {
    double mid = 0.5 * (lo + hi);
    ++iterations;
    if (mid <= lo || mid >= hi) {
      return std::abs(f_lo) < std::abs(f_hi) ? RootResult{lo, f_lo, iterations}
                                            : RootResult{hi, f_hi, iterations};
    }
    double f_mid = f(mid);
    if (std::abs(f_mid) <= tolerance) return {mid, f_mid, iterations};
    if (f_mid < 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
}

}  // namespace qcgauge
