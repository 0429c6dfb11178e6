#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcgauge/elementary_maps.hpp"
#include "qcgauge/gauge.hpp"
#include "qcgauge/geometry.hpp"
#include "qcgauge/packing.hpp"
#include "qcgauge/random.hpp"
#include "qcgauge/root_finding.hpp"
#include "qcgauge/spectrum.hpp"

namespace qcgauge {

enum class Variant { GaugedStretch, GaugedRotation, RieszCapacity, DimensionZero };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::GaugedStretch: return "gauged_stretch";
    case Variant::GaugedRotation: return "gauged_rotation";
    case Variant::RieszCapacity: return "riesz_capacity";
    case Variant::DimensionZero: return "dimension_zero";
  }
  return "unknown";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "gauged_stretch") return Variant::GaugedStretch;
  if (s == "gauged_rotation") return Variant::GaugedRotation;
  if (s == "riesz_capacity") return Variant::RieszCapacity;
  if (s == "dimension_zero") return Variant::DimensionZero;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

class BuildError : public std::runtime_error {
 public:
  BuildError(int generation, const std::string& what)
      : std::runtime_error("generation " + std::to_string(generation) + ": " + what),
        generation_(generation) {}
  int generation() const { return generation_; }

 private:
  int generation_;
};

/// How each generation is packed: explicit families (the last entry repeats
/// for deeper generations) or automatic saturation with dyadic radii.
struct ScheduleSpec {
  std::vector<std::vector<Family>> generations;
  double top_radius = 0.1;
  int levels = 3;
  double attempts = 40.0;

  bool automatic() const { return generations.empty(); }

  static ScheduleSpec single(int count, double radius) {
    ScheduleSpec s;
    s.generations = {{Family::of(count, radius)}};
    return s;
  }
  static ScheduleSpec saturated(double top_radius, int levels, double attempts = 40.0) {
    ScheduleSpec s;
    s.top_radius = top_radius;
    s.levels = levels;
    s.attempts = attempts;
    return s;
  }
};

struct BuildOptions {
  double sigma_cap = 0.01;
  int max_halvings = 40;
  std::size_t max_disks = 250000;
  double eta_tolerance = 1e-12;
  PackingOptions packing;
};

/// Per-generation realized schedule.
struct ScheduleEntry {
  std::vector<Family> families;
  double epsilon = 0.0;     // 1 - sum m R^2
  double delta = 0.0;       // largest radius
  int halvings = 0;
};

/// Everything that depends only on the family path of a block. Blocks with
/// the same family path share these values, so the tree is stored once per
/// path and blocks are addressed through the shared packings.
struct ClassNode {
  int generation = 0;
  int family = -1;
  int parent = -1;
  std::vector<int> children;  // by family of the next generation
  double multiplicity = 1.0;  // number of blocks with this family path
  double log_R = 0.0;
  double log_eta = 0.0;
  double log_sigma = 0.0;
  double log_ratio = 0.0;  // log(inner / outer) of the annulus
  double log_s = 0.0;
  double log_t = 0.0;
  double rotation = 0.0;     // unreduced cumulative phase
  double log_stretch = 0.0;  // cumulative log of the inner similarity factors
  double sum_log_R = 0.0;
  double sum_log_eta = 0.0;
};

struct BuildingBlock {
  MultiIndex index;
  Disk source_disk;
  Disk image_disk;
  LogScale sigma;
  double eta = 1.0;
  double cumulative_rotation = 0.0;
  double cumulative_log_stretch = 0.0;
};

/// Dimension-zero radii: r_0 = 1, r~_k = r_k^{max(k,1)^2}, r_{k+1} = r~_k / 4.
struct DimensionZeroSchedule {
  std::vector<double> log_r;
  std::vector<double> log_rt;

  explicit DimensionZeroSchedule(int n) {
    log_r.assign(n + 1, 0.0);
    log_rt.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      if (k > 0) log_r[k] = log_rt[k - 1] - std::log(4.0);
      double e = std::max(k, 1);
      log_rt[k] = e * e * log_r[k];
      if (!std::isfinite(log_rt[k])) throw RangeError("scale out of range");
    }
  }
  int size() const { return static_cast<int>(log_r.size()) - 1; }
};

inline double dimension_zero_log_beta(double alpha, const DimensionZeroSchedule& s, int n) {
  CompensatedSum acc;
  for (int k = 0; k < n; ++k) acc.add(s.log_rt[k] - s.log_r[k]);
  return (alpha - 1.0) * acc.value();
}

/// Stretch quotient at scale r~_n: alpha + log beta_n / log r~_n - (alpha - 1) log r_n / log r~_n.
inline double dimension_zero_stretch_ratio(double alpha, const DimensionZeroSchedule& s, int n) {
  return alpha + dimension_zero_log_beta(alpha, s, n) / s.log_rt[n] -
         (alpha - 1.0) * s.log_r[n] / s.log_rt[n];
}

/// Total phase through generation n over the log image radius.
inline double dimension_zero_rotation_ratio(double alpha, double gamma, const DimensionZeroSchedule& s,
                                            int n) {
  CompensatedSum phase;
  for (int k = 0; k <= n; ++k) phase.add(s.log_rt[k] - s.log_r[k]);
  double log_image = alpha * s.log_rt[n] + dimension_zero_log_beta(alpha, s, n) -
                     (alpha - 1.0) * s.log_r[n];
  return alpha * gamma * phase.value() / log_image;
}

inline double dimension_zero_error(double alpha, const DimensionZeroSchedule& s, int n) {
  return std::abs(dimension_zero_log_beta(alpha, s, n) / s.log_rt[n]);
}

inline double dimension_zero_error_bound(double alpha, const DimensionZeroSchedule& s, int n) {
  return 2.0 * (1.0 - alpha) * n * (s.log_rt[n - 1] / s.log_rt[n]);
}

/// Below this absolute scale, plain-coordinate evaluation is refused.
inline constexpr double kMinEvaluableLogScale = -27.631021115928547;  // log(1e-12)

class CantorStructure {
 public:
  Variant variant = Variant::GaugedStretch;
  StretchRotationParams params;
  double K_eff = 2.0;  // distortion driving the annuli (K, or K̄ when rotating)
  Complex exponent{0.5, 0.0};
  double dimension = 1.0;
  std::optional<Gauge> gauge;
  std::optional<RieszParams> riesz;
  int depth = 0;
  std::uint64_t seed = 0;
  BuildOptions options;
  std::vector<Packing> packings;  // packings[k - 1] serves generation k
  std::vector<ScheduleEntry> schedule;
  std::vector<ClassNode> classes;  // classes[0] is the unit disk

  const Packing& packing(int generation) const { return packings.at(generation - 1); }
  const ClassNode& node(int c) const { return classes.at(c); }

  double sigma_exponent() const { return (2.0 - dimension) / (K_eff * dimension); }

  std::vector<int> classes_at(int generation) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i].generation == generation) out.push_back(static_cast<int>(i));
    return out;
  }

  double block_count(int generation) const {
    double n = 1.0;
    for (int k = 1; k <= generation; ++k) n *= static_cast<double>(packing(k).disks().size());
    return n;
  }

  /// Product of (1 - epsilon_k) through the generation.
  double coverage_product(int generation) const {
    double p = 1.0;
    for (int k = 1; k <= generation; ++k) p *= packing(k).coverage();
    return p;
  }

  double min_log_s() const {
    double m = 0.0;
    for (const auto& c : classes) m = std::min(m, c.log_s);
    return m;
  }

  /// Class reached by a path of disk indices.
  int class_of(const std::vector<int>& disk_path) const {
    int c = 0;
    for (std::size_t k = 0; k < disk_path.size(); ++k) {
      const Packing& p = packing(static_cast<int>(k) + 1);
      int d = disk_path[k];
      if (d < 0 || d >= static_cast<int>(p.disks().size())) throw std::out_of_range("disk index out of range");
      c = classes[c].children.at(p.disks()[d].family);
    }
    return c;
  }

  std::vector<int> disk_path(const MultiIndex& index) const {
    if (index.depth() > depth) throw std::out_of_range("multi-index deeper than the structure");
    std::vector<int> path;
    for (const auto& e : index.entries()) {
      const Packing& p = packing(e.generation);
      const auto& members = p.members(e.family);
      if (e.member < 0 || e.member >= static_cast<int>(members.size()))
        throw std::out_of_range("member index out of range");
      path.push_back(members[e.member]);
    }
    return path;
  }

  MultiIndex multi_index(const std::vector<int>& disk_path) const {
    std::vector<IndexEntry> entries;
    for (std::size_t k = 0; k < disk_path.size(); ++k) {
      const Packing& p = packing(static_cast<int>(k) + 1);
      int fam = p.disks().at(disk_path[k]).family;
      const auto& members = p.members(fam);
      int member = static_cast<int>(std::find(members.begin(), members.end(), disk_path[k]) - members.begin());
      entries.push_back({static_cast<int>(k) + 1, fam, member});
    }
    return MultiIndex(std::move(entries));
  }

  std::vector<int> random_path(int generation, Rng& rng) const {
    std::vector<int> path;
    for (int k = 1; k <= generation; ++k) {
      auto n = packing(k).disks().size();
      path.push_back(std::min(static_cast<int>(rng.uniform() * n), static_cast<int>(n) - 1));
    }
    return path;
  }

  /// Source and image centers, in plain coordinates.
  std::pair<ComplexPoint, ComplexPoint> centers(const std::vector<int>& disk_path) const {
    ComplexPoint src{}, img{};
    int c = 0;
    for (std::size_t k = 0; k < disk_path.size(); ++k) {
      const Packing& p = packing(static_cast<int>(k) + 1);
      const ClassNode& parent = classes[c];
      ComplexPoint z = p.disks().at(disk_path[k]).center;
      src += std::exp(parent.log_s) * z;
      img += std::polar(std::exp(parent.log_t), parent.rotation) * z;
      c = parent.children.at(p.disks()[disk_path[k]].family);
    }
    return {src, img};
  }

  BuildingBlock block(const MultiIndex& index) const {
    auto path = disk_path(index);
    const ClassNode& n = classes[class_of(path)];
    auto [src, img] = centers(path);
    BuildingBlock b;
    b.index = index;
    b.source_disk = {src, LogScale::from_log(n.log_s)};
    b.image_disk = {img, LogScale::from_log(n.log_t)};
    b.sigma = LogScale::from_log(n.log_sigma);
    b.eta = std::exp(n.log_eta);
    b.cumulative_rotation = n.rotation;
    b.cumulative_log_stretch = n.log_stretch;
    return b;
  }
};

namespace detail {

/// Fills in the derived fields of a child class from its radius and eta.
inline ClassNode derive_child(const CantorStructure& st, const ClassNode& parent, int parent_index,
                              int generation, int family, double log_R, double log_eta,
                              double log_ratio_override = std::nan("")) {
  ClassNode c;
  c.generation = generation;
  c.family = family;
  c.parent = parent_index;
  c.log_R = log_R;
  c.log_eta = log_eta;
  if (std::isnan(log_ratio_override)) {
    c.log_sigma = st.sigma_exponent() * log_R + log_eta;
    c.log_ratio = st.K_eff * c.log_sigma;
  } else {
    c.log_ratio = log_ratio_override;
    c.log_sigma = st.exponent.real() * c.log_ratio;
  }
  c.log_s = parent.log_s + log_R + c.log_ratio;
  c.log_t = parent.log_t + log_R + st.exponent.real() * c.log_ratio;
  c.rotation = parent.rotation + st.exponent.imag() * c.log_ratio;
  c.log_stretch = parent.log_stretch + (st.exponent.real() - 1.0) * c.log_ratio;
  c.sum_log_R = parent.sum_log_R + log_R;
  c.sum_log_eta = parent.sum_log_eta + log_eta;
  return c;
}

inline Packing realize_packing(const ScheduleSpec& spec, int generation, int halvings,
                               std::uint64_t seed, const BuildOptions& opt) {
  std::uint64_t gseed = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(generation));
  if (spec.automatic()) {
    return saturate_unit_disk(std::ldexp(spec.top_radius, -halvings), spec.levels, spec.attempts, gseed,
                              opt.max_disks, opt.packing);
  }
  std::size_t g = std::min<std::size_t>(generation - 1, spec.generations.size() - 1);
  std::vector<Family> fams = spec.generations[g];
  double disks = 0.0;
  for (auto& f : fams) {
    f.count *= 1 << (2 * halvings);
    f.log_radius -= halvings * std::log(2.0);
    disks += f.count;
  }
  if (disks > static_cast<double>(opt.max_disks)) throw PackingError("packing exceeds the disk budget");
  return pack_unit_disk(fams, gseed, opt.packing);
}

}  // namespace detail

/// Governing equation for eta_N given the branch products:
///   K d (B + x) + log h(A + K (B + x)) = 0,  eta_N = e^x,
/// with A the sum of (2/d) log R along the branch (current one included)
/// and B the sum of log eta over the earlier generations.
inline double solve_eta(const Gauge& gauge, double sum_log_R, double sum_log_eta, double K, double d,
                        double tolerance = 1e-12) {
  double A = 2.0 / d * sum_log_R;
  auto defect = [&](double x) {
    double log_s = A + K * (sum_log_eta + x);
    return K * d * (sum_log_eta + x) + gauge.log_h(std::min(log_s, 0.0));
  };
  try {
    auto r = solve_increasing(defect, -sum_log_eta, 0.5, tolerance, 1e4);
    return std::exp(r.root);
  } catch (const BracketError&) {
    throw std::domain_error("governing equation unsolvable");
  }
}

class EtaSolver {
 public:
  EtaSolver(const Gauge& gauge, double K, double d, double tolerance)
      : gauge_(gauge), K_(K), d_(d), tol_(tolerance) {}

  double log_eta(double sum_log_R, double sum_log_eta) {
    auto key = std::make_pair(std::llround(sum_log_R * 1e12), std::llround(sum_log_eta * 1e12));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    double v = std::log(solve_eta(gauge_, sum_log_R, sum_log_eta, K_, d_, tol_));
    memo_.emplace(key, v);
    return v;
  }

 private:
  const Gauge& gauge_;
  double K_, d_, tol_;
  std::map<std::pair<long long, long long>, double> memo_;
};

inline const std::vector<double>& admissibility_eps_grid() {
  static const std::vector<double> grid{0.05, 0.1, 0.5, 1.0};
  return grid;
}

inline Gauge ensure_admissible(Gauge g) {
  if (!g.witnesses()) g.cache_witnesses(check_admissibility(g, admissibility_eps_grid(), 4000, 1));
  for (const auto& w : *g.witnesses())
    if (!w.pass) throw std::invalid_argument("gauge is not admissible (epsilon = " + std::to_string(w.epsilon) + ")");
  return g;
}

namespace detail {

inline void grow_generations(CantorStructure& st, const ScheduleSpec& spec, std::optional<EtaSolver>& solver) {
  st.classes.assign(1, ClassNode{});
  double log_r_max = st.gauge ? st.gauge->log_r_max() : 0.0;
  for (int k = 1; k <= st.depth; ++k) {
    std::vector<int> parents = st.classes_at(k - 1);
    for (int halvings = 0;; ++halvings) {
      if (halvings > st.options.max_halvings)
        throw BuildError(k, "sigma bound unachievable at the requested radii");
      Packing packing;
      try {
        packing = realize_packing(spec, k, halvings, st.seed, st.options);
      } catch (const PackingError& e) {
        throw BuildError(k, std::string("sigma bound unachievable at the requested radii (") + e.what() + ")");
      }
      std::vector<ClassNode> fresh;
      bool ok = true;
      for (int p : parents) {
        const ClassNode& parent = st.classes[p];
        for (std::size_t f = 0; f < packing.families().size() && ok; ++f) {
          double log_R = packing.families()[f].log_radius;
          double log_eta = 0.0;
          if (st.variant == Variant::RieszCapacity) {
            log_eta = st.riesz->delta * std::log((k + 1.0) / k);
          } else if (solver) {
            log_eta = solver->log_eta(parent.sum_log_R + log_R, parent.sum_log_eta);
          }
          ClassNode c = derive_child(st, parent, p, k, static_cast<int>(f), log_R, log_eta);
          c.multiplicity = parent.multiplicity * packing.families()[f].count;
          if (!(c.log_sigma < std::log(st.options.sigma_cap)) || !(c.log_sigma < 0.0)) ok = false;
          if (c.log_s > log_r_max + 1e-12) ok = false;
          fresh.push_back(c);
        }
        if (!ok) break;
      }
      if (!ok) continue;
      int first = static_cast<int>(st.classes.size());
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        st.classes.push_back(fresh[i]);
        st.classes[fresh[i].parent].children.push_back(first + static_cast<int>(i));
      }
      ScheduleEntry entry;
      entry.families = packing.families();
      entry.epsilon = 1.0 - packing.coverage();
      entry.delta = packing.max_radius();
      entry.halvings = halvings;
      st.schedule.push_back(entry);
      st.packings.push_back(std::move(packing));
      break;
    }
  }
}

inline CantorStructure start_structure(Variant v, const StretchRotationParams& params, int depth,
                                       std::uint64_t seed, const BuildOptions& options) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  CantorStructure st;
  st.variant = v;
  st.params = params;
  st.depth = depth;
  st.seed = seed;
  st.options = options;
  return st;
}

}  // namespace detail

inline CantorStructure build_gauged_stretch(const StretchRotationParams& params, const Gauge& gauge,
                                            const ScheduleSpec& schedule, int depth, std::uint64_t seed,
                                            const BuildOptions& options = {}) {
  if (params.gamma != 0.0) throw std::invalid_argument("gauged stretch needs gamma = 0");
  if (!(params.alpha < 1.0)) throw std::invalid_argument("α must be < 1");
  if (!(params.alpha > 1.0 / params.K)) throw std::invalid_argument("α must be > 1/K");
  auto st = detail::start_structure(Variant::GaugedStretch, params, depth, seed, options);
  st.K_eff = params.K;
  st.exponent = Complex(1.0 / params.K, 0.0);
  st.dimension = params.dimension();
  if (!(st.dimension > 0.0)) throw std::invalid_argument("spectrum dimension must be positive");
  if (std::abs(gauge.d() - st.dimension) > 1e-9)
    throw std::invalid_argument("gauge dimension does not match the spectrum dimension");
  st.gauge = ensure_admissible(gauge);
  std::optional<EtaSolver> solver;
  solver.emplace(*st.gauge, st.K_eff, st.dimension, options.eta_tolerance);
  detail::grow_generations(st, schedule, solver);
  return st;
}

inline CantorStructure build_gauged_rotation(const StretchRotationParams& params, const Gauge& gauge,
                                             const ScheduleSpec& schedule, int depth, std::uint64_t seed,
                                             const BuildOptions& options = {}) {
  if (!in_B_K(params.K, params.alpha, params.gamma, true))
    throw std::invalid_argument("alpha(1 + i gamma) must lie in the open disk B_K");
  if (!(params.alpha < 1.0)) throw std::invalid_argument("α must be < 1");
  auto st = detail::start_structure(Variant::GaugedRotation, params, depth, seed, options);
  st.K_eff = rotation_distortion(params.K, params.alpha, params.gamma);
  st.exponent = rotation_exponent(st.K_eff, params.alpha, params.gamma);
  if (!(power_map_mu(st.exponent) < 1.0)) throw std::invalid_argument("parameters outside quasiconformal range");
  st.dimension = params.dimension();
  if (!(st.dimension > 0.0)) throw std::invalid_argument("spectrum dimension must be positive");
  if (std::abs(gauge.d() - st.dimension) > 1e-9)
    throw std::invalid_argument("gauge dimension does not match the spectrum dimension");
  st.gauge = ensure_admissible(gauge);
  std::optional<EtaSolver> solver;
  solver.emplace(*st.gauge, st.K_eff, st.dimension, options.eta_tolerance);
  detail::grow_generations(st, schedule, solver);
  return st;
}

inline CantorStructure build_riesz_capacity(const StretchRotationParams& params, const RieszParams& riesz,
                                            const ScheduleSpec& schedule, int depth, std::uint64_t seed,
                                            const BuildOptions& options = {}) {
  if (!(params.alpha < 1.0)) throw std::invalid_argument("α must be < 1");
  auto st = detail::start_structure(Variant::RieszCapacity, params, depth, seed, options);
  if (params.gamma == 0.0) {
    st.K_eff = params.K;
    st.exponent = Complex(1.0 / params.K, 0.0);
  } else {
    st.K_eff = rotation_distortion(params.K, params.alpha, params.gamma);
    st.exponent = rotation_exponent(st.K_eff, params.alpha, params.gamma);
  }
  st.dimension = params.dimension();
  if (std::abs(riesz.homogeneity() - st.dimension) > 1e-9)
    throw std::invalid_argument("2 - beta p must equal the spectrum dimension");
  st.riesz = riesz;
  std::optional<EtaSolver> none;
  detail::grow_generations(st, schedule, none);
  return st;
}

/// Binary tree of the uncountable dimension-zero set. Radii live in log
/// form only; generation 4 and deeper are symbolic.
inline CantorStructure build_dimension_zero(const StretchRotationParams& params, int depth,
                                            std::uint64_t seed = 0) {
  BuildOptions options;
  options.sigma_cap = 1.0;
  auto st = detail::start_structure(Variant::DimensionZero, params, depth, seed, options);
  st.exponent = Complex(params.alpha, params.alpha * params.gamma);
  st.K_eff = 1.0 / params.alpha;
  st.dimension = 0.0;
  if (!(power_map_mu(st.exponent) <= mu_bound(params.K) + 1e-12))
    throw std::invalid_argument("parameters outside quasiconformal range");
  DimensionZeroSchedule sched(depth);
  Packing pair({Family::of(2, 0.25)}, {{{-0.5, 0.0}, 0}, {{0.5, 0.0}, 0}});
  st.classes.assign(1, ClassNode{});
  int parent = 0;
  for (int k = 1; k <= depth; ++k) {
    ClassNode c = detail::derive_child(st, st.classes[parent], parent, k, 0, std::log(0.25), 0.0,
                                       sched.log_rt[k] - sched.log_r[k]);
    c.multiplicity = st.classes[parent].multiplicity * 2.0;
    st.classes.push_back(c);
    st.classes[parent].children.push_back(static_cast<int>(st.classes.size()) - 1);
    parent = static_cast<int>(st.classes.size()) - 1;
    st.packings.push_back(pair);
    st.schedule.push_back({pair.families(), 1.0 - pair.coverage(), 0.25, 0});
  }
  return st;
}

/// The composed map in the frame of a class at `level`: u is normalized to
/// the class's inner disk, and so is the returned image. Descending below
/// `min_log_scale` (absolute source scale) is refused.
inline ComplexPoint local_eval(const CantorStructure& st, int class_index, ComplexPoint u,
                               double min_log_scale = -std::numeric_limits<double>::infinity()) {
  const ClassNode* cur = &st.classes.at(class_index);
  if (cur->generation == 0 && std::abs(u) >= 1.0) return u;
  ComplexPoint a{};
  Complex b{1.0, 0.0};
  while (cur->generation < st.depth) {
    const Packing& p = st.packing(cur->generation + 1);
    int disk = p.locate(u);
    if (disk < 0) break;
    const ClassNode& child = st.classes[cur->children[p.disks()[disk].family]];
    Complex rel = u - p.disks()[disk].center;
    double rho = std::abs(rel);
    double lr = (rho > 0.0 ? std::log(rho) : -std::numeric_limits<double>::infinity()) - child.log_R;
    if (lr > child.log_ratio) {
      Complex scale = std::exp((st.exponent - 1.0) * lr);
      return a + b * (p.disks()[disk].center + rel * scale);
    }
    double shrink = child.log_R + child.log_ratio;
    if (child.log_s < min_log_scale || shrink < LogScale::kMinLog ||
        child.log_R + st.exponent.real() * child.log_ratio < LogScale::kMinLog)
      throw RangeError("scale below evaluable range; use symbolic exponent queries");
    a += b * p.disks()[disk].center;
    b *= std::exp(child.log_R + st.exponent * child.log_ratio);
    u = rel * std::exp(-shrink);
    cur = &child;
  }
  return a + b * u;
}

/// phi_N in plain coordinates; identity outside the unit disk.
inline ComplexPoint eval_composed(const CantorStructure& st, ComplexPoint z) {
  if (!is_finite(z)) throw std::invalid_argument("non-finite point");
  return local_eval(st, 0, z, kMinEvaluableLogScale);
}

struct Increment {
  double log_abs = 0.0;
  double arg = 0.0;
};

/// Increments f(z0 + r e^{i angle}) - f(z0) about a point of a block,
/// evaluated in the deepest similarity frame that holds both points.
class BlockProbe {
 public:
  BlockProbe(const CantorStructure& st, std::vector<int> disk_path, ComplexPoint offset = {})
      : st_(&st), path_(std::move(disk_path)) {
    if (std::abs(offset) >= 1.0) throw std::invalid_argument("probe offset must lie inside the block");
    int n = static_cast<int>(path_.size());
    classes_.assign(n + 1, 0);
    for (int k = 0; k < n; ++k) {
      const Packing& p = st.packing(k + 1);
      classes_[k + 1] = st.classes[classes_[k]].children.at(p.disks().at(path_[k]).family);
    }
    u0_.assign(n + 1, ComplexPoint{});
    u0_[n] = offset;
    for (int k = n - 1; k >= 0; --k) {
      const ClassNode& c = st.classes[classes_[k + 1]];
      double shrink = c.log_R + c.log_ratio;
      ComplexPoint deeper = shrink < LogScale::kMinLog ? ComplexPoint{} : u0_[k + 1] * std::exp(shrink);
      u0_[k] = st.packing(k + 1).disks()[path_[k]].center + deeper;
    }
    f0_.assign(n + 1, ComplexPoint{});
    for (int k = 0; k <= n; ++k) {
      try {
        f0_[k] = local_eval(st, classes_[k], u0_[k]);
        evaluable_.push_back(true);
      } catch (const RangeError&) {
        evaluable_.push_back(false);
      }
    }
  }

  int depth() const { return static_cast<int>(path_.size()); }
  const ClassNode& level(int k) const { return st_->classes[classes_.at(k)]; }

  /// Source block radii s_1, ..., s_n along the branch.
  std::vector<LogScale> branch_scales() const {
    std::vector<LogScale> out;
    for (int k = 1; k <= depth(); ++k) out.push_back(LogScale::from_log(level(k).log_s));
    return out;
  }

  Increment increment(double log_r, double angle) const {
    for (int k = depth(); k >= 0; --k) {
      double rel = log_r - level(k).log_s;
      if (k > 0 && rel > 1.0) continue;
      ComplexPoint u1 = u0_[k] + std::polar(std::exp(rel), angle);
      if (k > 0 && std::abs(u1) >= 1.0) continue;
      if (!evaluable_[k]) throw RangeError("scale below evaluable range; use symbolic exponent queries");
      Complex diff = local_eval(*st_, classes_[k], u1) - f0_[k];
      double mag = std::abs(diff);
      double log_abs = mag > 0.0 ? level(k).log_t + std::log(mag) : -std::numeric_limits<double>::infinity();
      return {log_abs, level(k).rotation + std::arg(diff)};
    }
    throw std::logic_error("probe increment found no frame");
  }

 private:
  const CantorStructure* st_;
  std::vector<int> path_;
  std::vector<int> classes_;
  std::vector<ComplexPoint> u0_;
  std::vector<ComplexPoint> f0_;
  std::vector<bool> evaluable_;
};

/// Random point on an annulus of a random block path, returned with the
/// frame that owns it: class of the parent and the normalized point there.
struct AnnulusSample {
  int frame_class = 0;
  ComplexPoint u;
  double local_radius = 0.0;  // distance to the annulus center, normalized
};

inline std::optional<AnnulusSample> sample_annulus(const CantorStructure& st, int generation, Rng& rng) {
  auto path = st.random_path(generation, rng);
  std::vector<int> prefix(path.begin(), path.end() - 1);
  int parent = st.class_of(prefix);
  const Packing& p = st.packing(generation);
  int disk = path.back();
  const ClassNode& child = st.classes[st.classes[parent].children[p.disks()[disk].family]];
  if (child.log_ratio > -0.05) return std::nullopt;  // empty or hairline annulus
  double margin = 0.01;
  double hi = child.log_R - margin;
  double lo = std::max(child.log_R + child.log_ratio + margin, hi - 8.0);
  double log_rho = rng.uniform(lo, hi);
  double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  AnnulusSample s;
  s.frame_class = parent;
  s.local_radius = std::exp(log_rho);
  s.u = p.disks()[disk].center + std::polar(s.local_radius, phi);
  return s;
}

}  // namespace qcgauge
