#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcgauge/cantor.hpp"
#include "qcgauge/gauge.hpp"
#include "qcgauge/suites.hpp"

namespace qcgauge {

using json = nlohmann::json;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kConfigVersion = 1;
inline constexpr int kDumpVersion = 1;
inline constexpr const char* kDumpFormat = "qcgauge-structure";

struct GaugeSpec {
  GaugeKind kind = GaugeKind::Constant;
  double parameter = 0.0;

  Gauge make(double d) const {
    switch (kind) {
      case GaugeKind::Constant: return Gauge::constant(d);
      case GaugeKind::LogPower: return Gauge::log_power(d, parameter);
      case GaugeKind::Power: return Gauge::power(d, parameter);
      case GaugeKind::ExpLogPower: return Gauge::exp_log_power(d, parameter);
      case GaugeKind::Custom: break;
    }
    throw InputError("custom gauges cannot be described in a config");
  }
};

struct RunConfig {
  Variant variant = Variant::GaugedStretch;
  double K = 2.0, alpha = 0.75, gamma = 0.0;
  GaugeSpec gauge;
  double riesz_p = 2.0;
  ScheduleSpec schedule;
  int depth = 3;
  std::uint64_t seed = 0;
  BuildOptions options;
  VerifyOptions verify;
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("bad value for '") + key + "'");
  }
}

inline GaugeSpec parse_gauge(const json& j) {
  reject_unknown(j, {"kind", "beta", "p", "q"}, "gauge");
  GaugeSpec g;
  try {
    g.kind = gauge_kind_from_string(get_or<std::string>(j, "kind", "constant"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (g.kind == GaugeKind::LogPower) g.parameter = get_or(j, "beta", 1.0);
  if (g.kind == GaugeKind::Power) g.parameter = get_or(j, "p", 0.5);
  if (g.kind == GaugeKind::ExpLogPower) g.parameter = get_or(j, "q", 0.5);
  return g;
}

inline ScheduleSpec parse_schedule(const json& j) {
  reject_unknown(j, {"mode", "top_radius", "levels", "attempts", "generations"}, "schedule");
  std::string mode = get_or<std::string>(j, "mode", "saturated");
  if (mode == "saturated") {
    return ScheduleSpec::saturated(get_or(j, "top_radius", 0.1), get_or(j, "levels", 3), get_or(j, "attempts", 40.0));
  }
  if (mode != "explicit") throw InputError("schedule mode must be 'saturated' or 'explicit'");
  if (!j.contains("generations") || !j["generations"].is_array() || j["generations"].empty())
    throw InputError("explicit schedule needs a nonempty 'generations' array");
  ScheduleSpec s;
  for (const auto& gen : j["generations"]) {
    if (!gen.is_array() || gen.empty()) throw InputError("each generation must be a nonempty array of families");
    std::vector<Family> fams;
    for (const auto& f : gen) {
      reject_unknown(f, {"count", "radius"}, "family");
      int count = get_or(f, "count", 0);
      double radius = get_or(f, "radius", 0.0);
      if (count < 1 || !(radius > 0.0 && radius < 1.0)) throw InputError("family needs count >= 1 and radius in (0, 1)");
      fams.push_back(Family::of(count, radius));
    }
    s.generations.push_back(fams);
  }
  return s;
}

inline VerifyOptions parse_probes(const json& j) {
  reject_unknown(j, {"count", "tolerance", "beltrami_points", "carleson_trials", "wolff_points"}, "probes");
  VerifyOptions v;
  v.probes = get_or(j, "count", v.probes);
  v.tolerance = get_or(j, "tolerance", v.tolerance);
  v.beltrami_points = get_or(j, "beltrami_points", v.beltrami_points);
  v.carleson_trials = get_or(j, "carleson_trials", v.carleson_trials);
  v.wolff_points = get_or(j, "wolff_points", v.wolff_points);
  if (v.probes < 1 || v.beltrami_points < 1 || v.carleson_trials < 100 || v.wolff_points < 1)
    throw InputError("probe counts out of range");
  return v;
}

}  // namespace detail

/// Checks builder preconditions so that bad input fails before any work.
inline void validate(const RunConfig& c) {
  if (!(c.K > 1.0)) throw InputError("K must exceed 1");
  if (!(c.alpha > 0.0)) throw InputError("alpha must be positive");
  if (c.depth < 0 || c.depth > 64) throw InputError("depth must lie in [0, 64]");
  if (!(c.options.sigma_cap > 0.0 && c.options.sigma_cap <= 1.0)) throw InputError("sigma_cap must lie in (0, 1]");
  if (!in_B_K(c.K, c.alpha, c.gamma, false)) throw InputError("alpha(1 + i gamma) lies outside the closed disk B_K");
  switch (c.variant) {
    case Variant::GaugedStretch:
      if (!(c.alpha < 1.0)) throw InputError("α must be < 1");
      if (!(c.alpha > 1.0 / c.K)) throw InputError("α must be > 1/K");
      if (c.gamma != 0.0) throw InputError("gauged_stretch needs gamma = 0");
      break;
    case Variant::GaugedRotation:
    case Variant::RieszCapacity:
      if (!(c.alpha < 1.0)) throw InputError("α must be < 1");
      if (!in_B_K(c.K, c.alpha, c.gamma, true)) throw InputError("alpha(1 + i gamma) must lie in the open disk B_K");
      if (c.variant == Variant::RieszCapacity && !(c.riesz_p > 1.0)) throw InputError("riesz p must exceed 1");
      break;
    case Variant::DimensionZero:
      break;
  }
}

inline RunConfig parse_config(const json& j) {
  detail::reject_unknown(j, {"version", "variant", "K", "alpha", "gamma", "gauge", "riesz", "schedule", "depth",
                             "seed", "sigma_cap", "probes"},
                         "config");
  if (!j.contains("version")) throw InputError("config needs a 'version' field");
  if (detail::get_or(j, "version", 0) != kConfigVersion)
    throw InputError("unsupported config version " + j["version"].dump());
  RunConfig c;
  try {
    c.variant = variant_from_string(detail::get_or<std::string>(j, "variant", "gauged_stretch"));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  c.K = detail::get_or(j, "K", c.K);
  c.alpha = detail::get_or(j, "alpha", c.alpha);
  c.gamma = detail::get_or(j, "gamma", c.gamma);
  if (j.contains("gauge")) c.gauge = detail::parse_gauge(j["gauge"]);
  if (j.contains("riesz")) {
    detail::reject_unknown(j["riesz"], {"p"}, "riesz");
    c.riesz_p = detail::get_or(j["riesz"], "p", c.riesz_p);
  }
  c.schedule = j.contains("schedule") ? detail::parse_schedule(j["schedule"]) : ScheduleSpec::saturated(0.1, 3);
  c.depth = detail::get_or(j, "depth", c.depth);
  c.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
  c.options.sigma_cap = detail::get_or(j, "sigma_cap", c.options.sigma_cap);
  if (j.contains("probes")) c.verify = detail::parse_probes(j["probes"]);
  validate(c);
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline CantorStructure build_from_config(const RunConfig& c) {
  StretchRotationParams params(c.K, c.alpha, c.gamma);
  double d = params.dimension();
  switch (c.variant) {
    case Variant::GaugedStretch:
      return build_gauged_stretch(params, c.gauge.make(d), c.schedule, c.depth, c.seed, c.options);
    case Variant::GaugedRotation:
      return build_gauged_rotation(params, c.gauge.make(d), c.schedule, c.depth, c.seed, c.options);
    case Variant::RieszCapacity:
      return build_riesz_capacity(params, RieszParams::from_dimension(d, c.K, c.riesz_p), c.schedule, c.depth,
                                  c.seed, c.options);
    case Variant::DimensionZero:
      return build_dimension_zero(params, c.depth, c.seed);
  }
  throw InputError("unknown variant");
}

/// Textual dump: parameters, packings, and per-class eta. Radii, image
/// data and rotations are derived again on load.
inline json dump_structure(const CantorStructure& st, const VerifyOptions& verify = {}) {
  json j;
  j["format"] = kDumpFormat;
  j["version"] = kDumpVersion;
  j["variant"] = to_string(st.variant);
  j["params"] = {{"K", st.params.K}, {"alpha", st.params.alpha}, {"gamma", st.params.gamma}};
  j["depth"] = st.depth;
  j["seed"] = st.seed;
  j["sigma_cap"] = st.options.sigma_cap;
  if (st.gauge) {
    if (st.gauge->kind() == GaugeKind::Custom) throw InputError("custom gauges cannot be serialized");
    json g{{"kind", to_string(st.gauge->kind())}, {"parameter", st.gauge->parameter()}, {"d", st.gauge->d()}};
    if (st.gauge->witnesses()) {
      json w = json::array();
      for (const auto& e : *st.gauge->witnesses())
        w.push_back({{"epsilon", e.epsilon}, {"log_C", e.log_C}, {"argmin_log_r", e.argmin_log_r},
                     {"argmin_log_s", e.argmin_log_s}, {"tail_slope", e.tail_slope}, {"pass", e.pass}});
      g["witnesses"] = w;
    }
    j["gauge"] = g;
  }
  if (st.riesz) j["riesz"] = {{"p", st.riesz->p}};
  j["probes"] = {{"count", verify.probes},
                 {"tolerance", verify.tolerance},
                 {"beltrami_points", verify.beltrami_points},
                 {"carleson_trials", verify.carleson_trials},
                 {"wolff_points", verify.wolff_points}};
  json packs = json::array();
  for (std::size_t k = 0; k < st.packings.size(); ++k) {
    const Packing& p = st.packings[k];
    json fams = json::array();
    for (const auto& f : p.families()) fams.push_back({{"count", f.count}, {"log_radius", f.log_radius}});
    json disks = json::array();
    for (const auto& d : p.disks()) disks.push_back({d.center.real(), d.center.imag(), d.family});
    packs.push_back({{"families", fams}, {"disks", disks}, {"halvings", st.schedule[k].halvings}});
  }
  j["packings"] = packs;
  json classes = json::array();
  for (std::size_t i = 1; i < st.classes.size(); ++i) {
    const ClassNode& c = st.classes[i];
    classes.push_back({c.generation, c.family, c.parent, c.log_eta});
  }
  j["classes"] = classes;
  return j;
}

inline std::string dump_text(const CantorStructure& st, const VerifyOptions& verify = {}) {
  return dump_structure(st, verify).dump(1) + "\n";
}

struct LoadedStructure {
  CantorStructure structure;
  VerifyOptions verify;
};

inline LoadedStructure load_structure(const json& j) {
  try {
    if (j.value("format", "") != kDumpFormat) throw InputError("not a structure dump");
    if (j.value("version", 0) != kDumpVersion) throw InputError("unsupported dump version");
    LoadedStructure out;
    CantorStructure& st = out.structure;
    st.variant = variant_from_string(j.at("variant").get<std::string>());
    const json& p = j.at("params");
    st.params = StretchRotationParams(p.at("K").get<double>(), p.at("alpha").get<double>(), p.at("gamma").get<double>());
    st.depth = j.at("depth").get<int>();
    st.seed = j.at("seed").get<std::uint64_t>();
    st.options.sigma_cap = j.at("sigma_cap").get<double>();
    if (j.contains("probes")) out.verify = detail::parse_probes(j["probes"]);

    const auto& K = st.params.K;
    const auto& alpha = st.params.alpha;
    const auto& gamma = st.params.gamma;
    if (st.variant == Variant::DimensionZero) {
      st = build_dimension_zero(st.params, st.depth, st.seed);
      return out;
    }
    if (st.variant == Variant::GaugedStretch || (st.variant == Variant::RieszCapacity && gamma == 0.0)) {
      st.K_eff = K;
      st.exponent = Complex(1.0 / K, 0.0);
    } else {
      st.K_eff = rotation_distortion(K, alpha, gamma);
      st.exponent = rotation_exponent(st.K_eff, alpha, gamma);
    }
    st.dimension = st.params.dimension();
    if (j.contains("gauge")) {
      const json& g = j["gauge"];
      GaugeSpec spec{gauge_kind_from_string(g.at("kind").get<std::string>()), g.at("parameter").get<double>()};
      Gauge gauge = spec.make(g.at("d").get<double>());
      if (g.contains("witnesses")) {
        std::vector<AdmissibilityEntry> table;
        for (const auto& w : g["witnesses"]) {
          AdmissibilityEntry e;
          e.epsilon = w.at("epsilon").get<double>();
          e.log_C = w.at("log_C").get<double>();
          e.argmin_log_r = w.at("argmin_log_r").get<double>();
          e.argmin_log_s = w.at("argmin_log_s").get<double>();
          e.tail_slope = w.at("tail_slope").get<double>();
          e.pass = w.at("pass").get<bool>();
          table.push_back(e);
        }
        gauge.cache_witnesses(std::move(table));
      }
      st.gauge = gauge;
    }
    if (j.contains("riesz")) st.riesz = RieszParams::from_dimension(st.dimension, K, j["riesz"].at("p").get<double>());

    for (const auto& pk : j.at("packings")) {
      std::vector<Family> fams;
      for (const auto& f : pk.at("families")) fams.push_back({f.at("count").get<int>(), f.at("log_radius").get<double>()});
      std::vector<PlacedDisk> disks;
      for (const auto& d : pk.at("disks"))
        disks.push_back({{d.at(0).get<double>(), d.at(1).get<double>()}, d.at(2).get<int>()});
      Packing packing(fams, std::move(disks));
      ScheduleEntry e{packing.families(), 1.0 - packing.coverage(), packing.max_radius(), pk.at("halvings").get<int>()};
      st.schedule.push_back(e);
      st.packings.push_back(std::move(packing));
    }
    if (static_cast<int>(st.packings.size()) != st.depth) throw InputError("dump packing count does not match depth");

    st.classes.assign(1, ClassNode{});
    for (const auto& c : j.at("classes")) {
      int generation = c.at(0).get<int>();
      int family = c.at(1).get<int>();
      int parent = c.at(2).get<int>();
      double log_eta = c.at(3).get<double>();
      if (parent < 0 || parent >= static_cast<int>(st.classes.size()) || generation < 1 || generation > st.depth ||
          st.classes[parent].generation != generation - 1)
        throw InputError("dump class tree is inconsistent");
      const Packing& pk = st.packing(generation);
      if (family < 0 || family >= static_cast<int>(pk.families().size())) throw InputError("dump class family out of range");
      ClassNode node = detail::derive_child(st, st.classes[parent], parent, generation, family,
                                            pk.families()[family].log_radius, log_eta);
      node.multiplicity = st.classes[parent].multiplicity * pk.families()[family].count;
      st.classes.push_back(node);
      st.classes[parent].children.push_back(static_cast<int>(st.classes.size()) - 1);
    }
    for (const auto& c : st.classes)
      if (c.generation < st.depth &&
          c.children.size() != st.packing(c.generation + 1).families().size())
        throw InputError("dump class tree is incomplete");
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("corrupt dump: ") + e.what());
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("corrupt dump: ") + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline std::string csv_text(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "probe_id,scale_log,value,flag\n";
  for (const auto& r : rows) os << r.probe_id << ',' << r.scale_log << ',' << r.value << ',' << r.flag << '\n';
  return os.str();
}

/// Binary portable pixmap, row-major RGB.
struct Image {
  int width = 0, height = 0;
  std::vector<unsigned char> rgb;

  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 255) {
    if (w < 1 || h < 1) throw InputError("image size must be positive");
  }

  void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }

  std::string ppm() const {
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return out;
  }
};

struct GridSpec {
  int size = 512;
  int lines = 24;
  double extent = 1.25;
  int block_generations = 2;
};

/// Images of a Cartesian grid (gray) and of block boundary circles (red)
/// under phi_N.
inline Image render_structure(const CantorStructure& st, const GridSpec& spec) {
  Image img(spec.size, spec.size);
  auto plot = [&](ComplexPoint w, unsigned char r, unsigned char g, unsigned char b) {
    double x = (w.real() + spec.extent) / (2.0 * spec.extent) * spec.size;
    double y = (spec.extent - w.imag()) / (2.0 * spec.extent) * spec.size;
    if (std::isfinite(x) && std::isfinite(y)) img.set(static_cast<int>(x), static_cast<int>(y), r, g, b);
  };
  int along = spec.size * 8;
  for (int i = 0; i <= spec.lines; ++i) {
    double c = -spec.extent + 2.0 * spec.extent * i / spec.lines;
    for (int k = 0; k <= along; ++k) {
      double t = -spec.extent + 2.0 * spec.extent * k / along;
      plot(eval_composed(st, {c, t}), 150, 150, 150);
      plot(eval_composed(st, {t, c}), 150, 150, 150);
    }
  }
  int gens = std::min(spec.block_generations, st.depth);
  std::function<void(int, ComplexPoint, int)> circles = [&](int cls, ComplexPoint center, int g) {
    if (g > gens) return;
    const ClassNode& parent = st.classes[cls];
    const Packing& p = st.packing(g);
    double scale = std::exp(parent.log_s);
    for (const auto& d : p.disks()) {
      int child = parent.children[d.family];
      ComplexPoint c = center + scale * d.center;
      if (std::exp(st.classes[child].log_t) * spec.size / (2.0 * spec.extent) < 0.05) {
        plot(eval_composed(st, c), 200, 30, 30);
        continue;
      }
      double s = std::exp(st.classes[child].log_s);
      int n = std::clamp(static_cast<int>(s * spec.size * 8), 16, 4096);
      for (int k = 0; k < n; ++k) plot(eval_composed(st, c + std::polar(s, 2.0 * std::numbers::pi * k / n)), 200, 30, 30);
      circles(child, c, g + 1);
    }
  };
  if (gens >= 1) circles(0, {}, 1);
  return img;
}

}  // namespace qcgauge
