#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qcgauge/cantor.hpp"
#include "qcgauge/elementary_maps.hpp"
#include "qcgauge/exponents.hpp"
#include "qcgauge/measure.hpp"

namespace qcgauge {

struct CsvRow {
  int probe_id = 0;
  double scale_log = 0.0;
  double value = 0.0;
  int flag = 0;
};

struct SuiteResult {
  std::string name;
  bool applicable = true;
  bool pass = true;
  std::vector<CsvRow> rows;
  std::string summary;
};

struct VerifyOptions {
  int probes = 50;
  double tolerance = 0.05;
  int beltrami_points = 10000;
  double beltrami_slack = 1e-4;
  int carleson_trials = 1000;
  int wolff_points = 20;
  double wolff_factor = 10.0;
  double premeasure_tolerance = 1e-9;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"beltrami", "stretch",  "rotation",     "premeasure",
                                              "carleson", "wolff",    "admissibility"};
  return names;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline SuiteResult not_applicable(const std::string& name, const std::string& why) {
  SuiteResult r;
  r.name = name;
  r.applicable = false;
  r.summary = "skipped: " + why;
  return r;
}

// Deepest generation whose frames can be evaluated.
inline int evaluable_depth(const CantorStructure& st) {
  for (int k = 1; k <= st.depth; ++k) {
    for (int c : st.classes_at(k)) {
      const ClassNode& n = st.classes[c];
      if (n.log_R + n.log_ratio < LogScale::kMinLog) return k - 1;
    }
  }
  return st.depth;
}

}  // namespace detail

/// Finite-difference |mu| at random annulus points of every generation.
inline SuiteResult suite_beltrami(const CantorStructure& st, const VerifyOptions& opt) {
  SuiteResult r;
  r.name = "beltrami";
  int top = detail::evaluable_depth(st);
  if (top < 1) return detail::not_applicable(r.name, "no evaluable annuli");
  double bound = mu_bound(st.params.K) + opt.beltrami_slack;
  Rng rng = Rng::derived(st.seed, 0xbe17, 0);
  double worst = 0.0;
  int tested = 0;
  for (int attempt = 0; tested < opt.beltrami_points && attempt < 20 * opt.beltrami_points; ++attempt) {
    int g = 1 + static_cast<int>(rng.uniform() * top);
    auto sample = sample_annulus(st, std::min(g, top), rng);
    if (!sample) continue;
    auto f = [&](ComplexPoint u) { return local_eval(st, sample->frame_class, u); };
    double mu = std::abs(finite_difference_beltrami(f, sample->u, 1e-4 * sample->local_radius));
    worst = std::max(worst, mu);
    int bad = mu > bound ? 1 : 0;
    r.rows.push_back({tested, std::log(sample->local_radius), mu, bad});
    if (bad) r.pass = false;
    ++tested;
  }
  if (tested == 0) return detail::not_applicable(r.name, "no annulus with interior");
  r.summary = "points=" + std::to_string(tested) + " max|mu|=" + detail::fmt(worst) +
              " bound=" + detail::fmt(mu_bound(st.params.K));
  return r;
}

inline std::vector<std::vector<int>> probe_paths(const CantorStructure& st, int count, std::uint64_t salt) {
  Rng rng = Rng::derived(st.seed, salt, 0);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < count; ++i) out.push_back(st.random_path(st.depth, rng));
  return out;
}

/// Dimension-zero trees: class tallies against the closed-form schedule.
inline SuiteResult suite_dimension_zero_ratios(const CantorStructure& st, bool rotation) {
  SuiteResult r;
  r.name = rotation ? "rotation" : "stretch";
  DimensionZeroSchedule sched(st.depth);
  double worst = 0.0;
  for (int k = 1; k <= st.depth; ++k) {
    const ClassNode& n = st.classes[st.classes_at(k).front()];
    double recorded = rotation ? n.rotation / n.log_t : n.log_t / n.log_s;
    double expected = rotation ? dimension_zero_rotation_ratio(st.params.alpha, st.params.gamma, sched, k)
                               : dimension_zero_stretch_ratio(st.params.alpha, sched, k);
    double err = std::abs(recorded - expected);
    worst = std::max(worst, err);
    int bad = err > 1e-9 * std::max(1.0, std::abs(expected)) ? 1 : 0;
    if (bad) r.pass = false;
    r.rows.push_back({k, n.log_s, recorded, bad});
  }
  r.summary = "generations=" + std::to_string(st.depth) + " max tally mismatch=" + detail::fmt(worst);
  return r;
}

inline SuiteResult suite_stretch(const CantorStructure& st, const VerifyOptions& opt) {
  if (st.depth < 1) return detail::not_applicable("stretch", "depth 0");
  if (st.variant == Variant::DimensionZero) return suite_dimension_zero_ratios(st, false);
  SuiteResult r;
  r.name = "stretch";
  double alpha = st.params.alpha;
  double worst = 0.0;
  int id = 0;
  for (const auto& path : probe_paths(st, opt.probes, 0x57e7)) {
    BlockProbe probe(st, path);
    auto trace = stretch_trace(probe, st.centers(path).first, probe.branch_scales());
    double dev = std::abs(trace.fitted_limit - alpha);
    worst = std::max(worst, dev);
    int bad = dev > opt.tolerance ? 1 : 0;
    if (bad) r.pass = false;
    r.rows.push_back({id++, trace.samples.back().scale.log_value(), trace.fitted_limit, bad});
  }
  r.summary = "probes=" + std::to_string(opt.probes) + " alpha=" + detail::fmt(alpha) +
              " max deviation=" + detail::fmt(worst);
  return r;
}

inline SuiteResult suite_rotation(const CantorStructure& st, const VerifyOptions& opt) {
  if (st.depth < 1) return detail::not_applicable("rotation", "depth 0");
  if (st.variant == Variant::DimensionZero) return suite_dimension_zero_ratios(st, true);
  SuiteResult r;
  r.name = "rotation";
  double gamma = st.params.gamma;
  double worst = 0.0, worst_gap = 0.0;
  int id = 0;
  for (const auto& path : probe_paths(st, opt.probes, 0x7071)) {
    BlockProbe probe(st, path);
    auto trace = rotation_trace(probe, st.centers(path).first, probe.branch_scales());
    double dev = std::abs(trace.fitted_limit - gamma);
    double gap = std::abs(trace.samples.back().cumulative_arg - probe.level(st.depth).rotation);
    worst = std::max(worst, dev);
    worst_gap = std::max(worst_gap, gap);
    int bad = (dev > opt.tolerance || gap > 10.0 + 2.0 * st.depth) ? 1 : 0;
    if (bad) r.pass = false;
    r.rows.push_back({id++, trace.samples.back().scale.log_value(), trace.fitted_limit, bad});
  }
  r.summary = "probes=" + std::to_string(opt.probes) + " gamma=" + detail::fmt(gamma) +
              " max deviation=" + detail::fmt(worst) + " max |arg - tally|=" + detail::fmt(worst_gap);
  return r;
}

inline SuiteResult suite_premeasure(const CantorStructure& st, const VerifyOptions& opt) {
  if (!st.gauge) return detail::not_applicable("premeasure", "no gauge");
  if (st.variant == Variant::RieszCapacity) return detail::not_applicable("premeasure", "fixed eta");
  SuiteResult r;
  r.name = "premeasure";
  double worst = 0.0;
  for (int k = 1; k <= st.depth; ++k) {
    double value = gauged_premeasure(st, *st.gauge, k);
    double expected = st.coverage_product(k);
    double err = std::abs(value - expected);
    worst = std::max(worst, err);
    int bad = err > opt.premeasure_tolerance ? 1 : 0;
    if (bad) r.pass = false;
    r.rows.push_back({k, st.min_log_s(), value, bad});
  }
  r.summary = "generations=" + std::to_string(st.depth) + " max |premeasure - coverage product|=" + detail::fmt(worst);
  return r;
}

inline SuiteResult suite_carleson(const CantorStructure& st, const VerifyOptions& opt) {
  if (!st.gauge) return detail::not_applicable("carleson", "no gauge");
  if (st.depth < 1) return detail::not_applicable("carleson", "depth 0");
  SuiteResult r;
  r.name = "carleson";
  auto rep = carleson_check(st, *st.gauge, opt.carleson_trials, st.seed);
  r.pass = std::isfinite(rep.worst_ratio);
  r.rows.push_back({0, rep.worst_disk.radius.log_value(), rep.worst_ratio, r.pass ? 0 : 1});
  r.summary = "trials=" + std::to_string(rep.test_disks) + " worst ratio=" + detail::fmt(rep.worst_ratio);
  return r;
}

inline SuiteResult suite_wolff(const CantorStructure& st, const VerifyOptions& opt) {
  if (!st.riesz) return detail::not_applicable("wolff", "not a capacity build");
  SuiteResult r;
  r.name = "wolff";
  double series = wolff_comparison_series(*st.riesz, st.dimension, st.params.K, st.depth);
  double lo = series / opt.wolff_factor, hi = series * opt.wolff_factor;
  double min_v = 1e300, max_v = 0.0;
  int id = 0;
  for (const auto& path : probe_paths(st, opt.wolff_points, 0x3011)) {
    ComplexPoint z = st.centers(path).first;
    double previous = 0.0;
    bool monotone = true;
    double value = 0.0;
    for (int cut = 1; cut <= st.depth; ++cut) {
      value = wolff_potential(st, *st.riesz, z, cut).value;
      if (value < previous) monotone = false;
      previous = value;
    }
    min_v = std::min(min_v, value);
    max_v = std::max(max_v, value);
    int bad = (!monotone || value < lo || value > hi) ? 1 : 0;
    if (bad) r.pass = false;
    r.rows.push_back({id++, st.classes[st.class_of(path)].log_s, value, bad});
  }
  r.summary = "points=" + std::to_string(opt.wolff_points) + " potential in [" + detail::fmt(min_v) + ", " +
              detail::fmt(max_v) + "] series=" + detail::fmt(series);
  return r;
}

inline SuiteResult suite_admissibility(const CantorStructure& st, const VerifyOptions&) {
  if (!st.gauge) return detail::not_applicable("admissibility", "no gauge");
  SuiteResult r;
  r.name = "admissibility";
  auto table = st.gauge->witnesses() ? *st.gauge->witnesses()
                                     : check_admissibility(*st.gauge, admissibility_eps_grid(), 4000, 1);
  int id = 0;
  for (const auto& w : table) {
    if (!w.pass) r.pass = false;
    r.rows.push_back({id++, w.argmin_log_r, w.C(), w.pass ? 0 : 1});
  }
  r.summary = "kind=" + to_string(st.gauge->kind()) + " epsilons=" + std::to_string(table.size());
  return r;
}

inline SuiteResult run_suite(const std::string& name, const CantorStructure& st, const VerifyOptions& opt) {
  if (name == "beltrami") return suite_beltrami(st, opt);
  if (name == "stretch") return suite_stretch(st, opt);
  if (name == "rotation") return suite_rotation(st, opt);
  if (name == "premeasure") return suite_premeasure(st, opt);
  if (name == "carleson") return suite_carleson(st, opt);
  if (name == "wolff") return suite_wolff(st, opt);
  if (name == "admissibility") return suite_admissibility(st, opt);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace qcgauge
