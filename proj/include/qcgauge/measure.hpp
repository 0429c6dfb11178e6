#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcgauge/cantor.hpp"
#include "qcgauge/gauge.hpp"
#include "qcgauge/geometry.hpp"
#include "qcgauge/random.hpp"

namespace qcgauge {

/// Sum of Lambda(s) over the blocks of a generation.
inline double gauged_premeasure(const CantorStructure& st, const Gauge& gauge, int generation) {
  if (generation < 1 || generation > st.depth) throw std::out_of_range("generation outside the structure");
  std::vector<double> terms;
  for (int c : st.classes_at(generation)) {
    const ClassNode& n = st.classes[c];
    terms.push_back(std::log(n.multiplicity) + gauge_eval(gauge, LogScale::from_log(n.log_s)).log_value());
  }
  return std::exp(log_sum_exp(terms));
}

/// Lambda'(r) = r^{d'} h(r)^{d' / (K d)} on (0, 1], h held constant above its own domain.
inline Gauge image_gauge(const Gauge& g, double K, double d_prime) {
  double power = d_prime / (K * g.d());
  Gauge copy = g;
  return Gauge::custom(
      d_prime, [copy, power](double log_r) { return power * copy.log_h(log_r); }, 0.0);
}

inline double image_premeasure_check(const CantorStructure& st, const Gauge& image, int generation) {
  if (generation < 1 || generation > st.depth) throw std::out_of_range("generation outside the structure");
  std::vector<double> terms;
  for (int c : st.classes_at(generation)) {
    const ClassNode& n = st.classes[c];
    terms.push_back(std::log(n.multiplicity) + gauge_eval(image, LogScale::from_log(n.log_t)).log_value());
  }
  return std::exp(log_sum_exp(terms));
}

inline std::vector<double> image_premeasure_sequence(const CantorStructure& st, const Gauge& image) {
  std::vector<double> out;
  for (int k = 1; k <= st.depth; ++k) out.push_back(image_premeasure_check(st, image, k));
  return out;
}

/// Walks the blocks meeting a disk: `visit(level, class, center, log_s)`
/// returns true to descend into a block.
template <typename Visit>
void walk_blocks(const CantorStructure& st, int class_index, ComplexPoint center, Visit&& visit) {
  const ClassNode& parent = st.classes[class_index];
  if (parent.generation >= st.depth) return;
  const Packing& p = st.packing(parent.generation + 1);
  double scale = std::exp(parent.log_s);
  for (const auto& d : p.disks()) {
    int child = parent.children[d.family];
    ComplexPoint c = center + scale * d.center;
    if (visit(child, c)) walk_blocks(st, child, c, visit);
  }
}

struct CarlesonReport {
  int test_disks = 0;
  double worst_ratio = 0.0;
  Disk worst_disk{{}, LogScale::one()};
};

/// Sum of Lambda over the maximal blocks inside B, over Lambda(r(B)).
inline double carleson_ratio(const CantorStructure& st, const Gauge& gauge, const Disk& B) {
  double rB = std::exp(B.radius.log_value());
  CompensatedSum acc;
  walk_blocks(st, 0, ComplexPoint{}, [&](int cls, ComplexPoint c) {
    const ClassNode& n = st.classes[cls];
    double s = std::exp(n.log_s);
    double dist = std::abs(c - B.center);
    if (dist + s <= rB) {
      acc.add(std::exp(gauge.log_lambda(n.log_s)));
      return false;
    }
    return dist < rB + s;
  });
  return acc.value() / std::exp(gauge.log_lambda(B.radius.log_value()));
}

inline CarlesonReport carleson_check(const CantorStructure& st, const Gauge& gauge, int trials,
                                     std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("carleson_check needs at least 100 trials");
  Rng rng = Rng::derived(seed, 0xca51, 0);
  double lo = st.min_log_s();
  CarlesonReport rep;
  for (int i = 0; i < trials; ++i) {
    double log_r = rng.uniform(lo, 0.0);
    ComplexPoint c = std::polar(std::sqrt(rng.uniform()), 2.0 * std::numbers::pi * rng.uniform());
    Disk B{c, LogScale::from_log(log_r)};
    double ratio = carleson_ratio(st, gauge, B);
    if (ratio > rep.worst_ratio || i == 0) {
      rep.worst_ratio = ratio;
      rep.worst_disk = B;
    }
    ++rep.test_disks;
  }
  return rep;
}

/// Integral over [r_lo, r_hi] of (nu(r) / r^d)^q dr / r by the midpoint
/// rule in log r.
inline double wolff_band(const std::function<double(double)>& nu, double d, double q, double log_lo,
                         double log_hi, int samples) {
  if (!(log_hi > log_lo)) return 0.0;
  double h = (log_hi - log_lo) / samples;
  CompensatedSum acc;
  for (int i = 0; i < samples; ++i) {
    double lr = log_lo + (i + 0.5) * h;
    double mass = nu(lr);
    if (mass > 0.0) acc.add(std::exp(q * (std::log(mass) - d * lr)));
  }
  return acc.value() * h;
}

struct WolffOptions {
  int min_samples = 16;
  double samples_per_octave = 4.0;
  double resolution = 1e-3;  // partial blocks below resolution * r count by center
};

struct WolffValue {
  double value = 0.0;
  bool off_support = false;
};

/// Natural measure of B(z, r) resolved down to generation `cut`; children
/// share their parent's mass in proportion to R^2.
inline double natural_measure(const CantorStructure& st, ComplexPoint z, double log_r, int cut,
                              double resolution) {
  double r = std::exp(log_r);
  if (std::abs(z) + 1.0 <= r) return 1.0;
  CompensatedSum acc;
  std::vector<double> share(st.depth + 1, 0.0);
  for (int k = 1; k <= st.depth; ++k) share[k] = 1.0 / st.packing(k).coverage();
  std::function<void(int, ComplexPoint, double)> descend = [&](int cls, ComplexPoint center, double mass) {
    const ClassNode& parent = st.classes[cls];
    int g = parent.generation + 1;
    if (g > cut) return;
    const Packing& p = st.packing(g);
    double scale = std::exp(parent.log_s);
    for (const auto& d : p.disks()) {
      int child = parent.children[d.family];
      const ClassNode& n = st.classes[child];
      ComplexPoint c = center + scale * d.center;
      double s = std::exp(n.log_s);
      double m = mass * std::exp(2.0 * n.log_R) * share[g];
      double dist = std::abs(c - z);
      if (dist + s <= r) {
        acc.add(m);
      } else if (dist < r + s) {
        if (g == cut || s <= resolution * r) {
          if (dist < r) acc.add(m);
        } else {
          descend(child, c, m);
        }
      }
    }
  };
  descend(0, ComplexPoint{}, 1.0);
  return acc.value();
}

/// Partial Wolff potential through `generation_cut`: bands [s_n, s_{n-1}]
/// along the branch of z, with s_0 = 1. Where z has left the support the
/// largest block radius of that generation stands in, and the value is flagged.
inline WolffValue wolff_potential(const CantorStructure& st, double d, double p_conjugate, ComplexPoint z,
                                  int generation_cut, const WolffOptions& opt = {}) {
  if (generation_cut < 1 || generation_cut > st.depth) throw std::out_of_range("generation cut outside the structure");
  if (!(std::abs(z) < 1.0)) throw std::invalid_argument("z must lie in the unit disk");
  double q = p_conjugate - 1.0;
  WolffValue out;
  // Radii s_n of the blocks holding z.
  std::vector<double> log_s(generation_cut + 1, 0.0);
  int cls = 0;
  ComplexPoint center{};
  bool on_support = true;
  for (int k = 1; k <= generation_cut; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (int c : st.classes_at(k)) best = std::max(best, st.classes[c].log_s);
    if (on_support) {
      const ClassNode& parent = st.classes[cls];
      double scale = std::exp(parent.log_s);
      int disk = st.packing(k).locate((z - center) / scale);
      int next = disk < 0 ? -1 : parent.children[st.packing(k).disks()[disk].family];
      if (next >= 0) {
        ComplexPoint c = center + scale * st.packing(k).disks()[disk].center;
        if (std::abs(z - c) < std::exp(st.classes[next].log_s)) {
          log_s[k] = st.classes[next].log_s;
          cls = next;
          center = c;
          continue;
        }
      }
      on_support = false;
    }
    log_s[k] = best;
  }
  out.off_support = !on_support;
  auto nu = [&](double lr) { return natural_measure(st, z, lr, generation_cut, opt.resolution); };
  CompensatedSum total;
  for (int n = 1; n <= generation_cut; ++n) {
    double octaves = (log_s[n - 1] - log_s[n]) / std::numbers::ln2;
    int samples = std::max(opt.min_samples, static_cast<int>(std::ceil(opt.samples_per_octave * octaves)));
    total.add(wolff_band(nu, d, q, log_s[n], log_s[n - 1], samples));
  }
  out.value = total.value();
  return out;
}

inline WolffValue wolff_potential(const CantorStructure& st, const RieszParams& riesz, ComplexPoint z,
                                  int generation_cut, const WolffOptions& opt = {}) {
  return wolff_potential(st, riesz.homogeneity(), riesz.p_conjugate, z, generation_cut, opt);
}

/// Partial comparison series sum_{n=2}^{N} n^{-dK(p'-1) delta}.
inline double wolff_comparison_series(const RieszParams& riesz, double d, double K, int N) {
  double e = d * K * (riesz.p_conjugate - 1.0) * riesz.delta;
  CompensatedSum acc;
  for (int n = 2; n <= N; ++n) acc.add(std::pow(n, -e));
  return acc.value();
}

}  // namespace qcgauge
