#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcgauge/io.hpp"
#include "qcgauge/series.hpp"
#include "qcgauge/spectrum.hpp"

namespace fs = std::filesystem;
using namespace qcgauge;

namespace {

enum Exit { kPass = 0, kFail = 1, kInput = 2, kRange = 3 };

std::vector<std::string> split_suites(const std::string& s) {
  if (s.empty() || s == "all") return suite_names();
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  for (const auto& n : out)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw InputError("unknown suite '" + n + "'");
  return out;
}

void print_summary(const CantorStructure& st) {
  std::printf("variant %s K=%g alpha=%g gamma=%g d=%.6g depth=%d seed=%llu\n", to_string(st.variant).c_str(),
              st.params.K, st.params.alpha, st.params.gamma, st.dimension, st.depth,
              static_cast<unsigned long long>(st.seed));
  for (int k = 1; k <= st.depth; ++k) {
    double lo = 1e300, hi = -1e300;
    for (int c : st.classes_at(k)) {
      lo = std::min(lo, st.classes[c].log_sigma);
      hi = std::max(hi, st.classes[c].log_sigma);
    }
    std::printf("gen %d blocks=%.6g classes=%zu halvings=%d coverage=%.9f", k, st.block_count(k),
                st.classes_at(k).size(), st.schedule[k - 1].halvings, st.packing(k).coverage());
    if (st.variant != Variant::DimensionZero) std::printf(" sigma=[%.6g, %.6g]", std::exp(lo), std::exp(hi));
    if (st.gauge && st.variant != Variant::RieszCapacity)
      std::printf(" premeasure=%.12g product=%.12g", gauged_premeasure(st, *st.gauge, k), st.coverage_product(k));
    std::printf("\n");
  }
}

LoadedStructure load_file(const std::string& path) { return load_structure(read_json_file(path)); }

std::vector<ComplexPoint> read_lambdas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<ComplexPoint> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) throw InputError("line " + std::to_string(n) + ": expected two coordinates");
    out.emplace_back(x, y);
  }
  return out;
}

int selftest() {
  int failures = 0;
  auto check = [&](const char* what, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", what);
    if (!ok) ++failures;
  };
  check("spectrum F_2(0.8, 0.1)", std::abs(spectrum_dimension(2.0, 0.8, 0.1) - 1.1588) < 1e-4);
  check("radial stretch |mu| = 1/3",
        std::abs(std::abs(beltrami(RadialStretch{{}, LogScale::one(), 0.5}, {0.25, 0.0})) - 1.0 / 3.0) < 1e-12);
  check("log gauge inverse constant",
        std::abs(check_inverse_gauge_condition(Gauge::log_power(1.0, 1.0), 2.0, 2000, 1).worst_ratio - 2.0) < 1e-9);
  StretchRotationParams p(2.0, 0.75, 0.0);
  BuildOptions opt;
  opt.sigma_cap = 0.95;
  auto st = build_gauged_stretch(p, Gauge::constant(p.dimension()), ScheduleSpec::saturated(0.1, 3), 2, 7, opt);
  check("premeasure identity", std::abs(gauged_premeasure(st, *st.gauge, 2) - st.coverage_product(2)) < 1e-9);
  auto again = load_structure(dump_structure(st)).structure;
  check("dump round trip", dump_text(again) == dump_text(st));
  SeriesMap m(2.0, {{0.0, 0.0}});
  check("series f(0.01)", std::abs(series_eval(m, {0.01, 0.0}, 1e-8).value.real() - 0.05) < 1e-12);
  return failures == 0 ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiconformal stretching and rotation on gauged Cantor sets"};
  app.require_subcommand(1);
  std::string config, out, suite = "all", dump, lambdas;
  std::optional<std::uint64_t> seed;
  std::optional<int> depth;
  std::optional<double> tolerance;
  int size = 512, lines = 24, block_gens = 2;
  double px = 0.0, py = 0.0, K = 2.0;

  auto* build = app.add_subcommand("build", "build a structure and write its dump");
  build->add_option("--config", config, "config file (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--seed", seed, "override the config seed");
  build->add_option("--depth", depth, "override the config depth");
  build->add_option("--out", out, "dump path")->required();

  auto* verify = app.add_subcommand("verify", "run verification suites on a dump");
  verify->add_option("dump", dump, "structure dump")->required();
  verify->add_option("--suite", suite, "comma-separated suites or 'all'");
  verify->add_option("--tolerance", tolerance, "exponent tolerance");
  verify->add_option("--out", out, "directory for CSV reports");

  auto* render = app.add_subcommand("render", "render grid and block images as a pixmap");
  render->add_option("dump", dump, "structure dump")->required();
  render->add_option("--out", out, "PPM path")->required();
  render->add_option("--size", size, "pixels per side")->check(CLI::Range(16, 8192));
  render->add_option("--lines", lines, "grid lines per axis")->check(CLI::Range(1, 1000));
  render->add_option("--blocks", block_gens, "block generations to outline")->check(CLI::Range(0, 64));

  auto* eval = app.add_subcommand("eval", "evaluate the map at one point");
  eval->add_option("dump", dump, "structure dump");
  eval->add_option("--lambdas", lambdas, "series map: text file of coordinate pairs");
  eval->add_option("--K", K, "series map distortion");
  eval->add_option("--tolerance", tolerance, "series tail tolerance");
  eval->add_option("--x", px, "real part")->required();
  eval->add_option("--y", py, "imaginary part");

  auto* self = app.add_subcommand("selftest", "quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInput;
  }

  try {
    if (*build) {
      RunConfig c = parse_config(read_json_file(config));
      if (seed) c.seed = *seed;
      if (depth) c.depth = *depth;
      validate(c);
      CantorStructure st = build_from_config(c);
      write_text(out, dump_text(st, c.verify));
      print_summary(st);
      return kPass;
    }
    if (*verify) {
      LoadedStructure loaded = load_file(dump);
      if (tolerance) loaded.verify.tolerance = *tolerance;
      if (!out.empty()) fs::create_directories(out);
      bool all = true;
      for (const auto& name : split_suites(suite)) {
        SuiteResult r = run_suite(name, loaded.structure, loaded.verify);
        const char* tag = !r.applicable ? "SKIP" : r.pass ? "PASS" : "FAIL";
        std::printf("%s %s %s\n", tag, r.name.c_str(), r.summary.c_str());
        if (r.applicable && !r.pass) all = false;
        if (!out.empty() && r.applicable) write_text((fs::path(out) / (name + ".csv")).string(), csv_text(r.rows));
      }
      return all ? kPass : kFail;
    }
    if (*render) {
      CantorStructure st = load_file(dump).structure;
      try {
        write_text(out, render_structure(st, {size, lines, 1.25, block_gens}).ppm());
      } catch (const RangeError& e) {
        throw RangeError(std::string(e.what()) + "; rebuild with a lower depth to render");
      }
      return kPass;
    }
    if (*eval) {
      ComplexPoint z{px, py};
      if (!lambdas.empty()) {
        SeriesMap m(K, read_lambdas(lambdas));
        auto v = series_eval(m, z, tolerance.value_or(1e-10));
        std::printf("%.17g %.17g terms=%d\n", v.value.real(), v.value.imag(), v.terms);
        return kPass;
      }
      if (dump.empty()) throw InputError("eval needs a dump or --lambdas");
      ComplexPoint w = eval_composed(load_file(dump).structure, z);
      std::printf("%.17g %.17g\n", w.real(), w.imag());
      return kPass;
    }
    if (*self) return selftest();
  } catch (const RangeError& e) {
    std::fprintf(stderr, "range error: %s\n", e.what());
    return kRange;
  } catch (const BuildError& e) {
    std::fprintf(stderr, "build error: %s\n", e.what());
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  }
  return kInput;
}
