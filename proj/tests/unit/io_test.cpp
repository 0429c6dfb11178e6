#include <gtest/gtest.h>

#include "qcgauge/io.hpp"

using namespace qcgauge;

namespace {

json base_config() {
  return json::parse(R"({
    "version": 1, "variant": "gauged_stretch", "K": 2, "alpha": 0.75, "gamma": 0,
    "gauge": {"kind": "constant"},
    "schedule": {"mode": "saturated", "top_radius": 0.1, "levels": 3},
    "depth": 3, "seed": 7, "sigma_cap": 0.95,
    "probes": {"count": 10, "carleson_trials": 200, "beltrami_points": 500}
  })");
}

std::string message_of(const json& j) {
  try {
    parse_config(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesAndBuilds) {
  RunConfig c = parse_config(base_config());
  EXPECT_EQ(c.variant, Variant::GaugedStretch);
  EXPECT_EQ(c.verify.probes, 10);
  auto st = build_from_config(c);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(gauged_premeasure(st, *st.gauge, k), st.coverage_product(k), 1e-12);
}

TEST(Config, Validation) {
  json j = base_config();
  j["alpha"] = 1.2;
  EXPECT_EQ(message_of(j), "α must be < 1");
  j = base_config();
  j["extra"] = 1;
  EXPECT_NE(message_of(j).find("unknown key 'extra'"), std::string::npos);
  j = base_config();
  j["gauge"]["shape"] = "x";
  EXPECT_NE(message_of(j).find("unknown key 'shape' in gauge"), std::string::npos);
  j = base_config();
  j.erase("version");
  EXPECT_NE(message_of(j).find("version"), std::string::npos);
  j = base_config();
  j["version"] = 9;
  EXPECT_NE(message_of(j).find("unsupported"), std::string::npos);
  j = base_config();
  j["variant"] = "nope";
  EXPECT_FALSE(message_of(j).empty());
  j = base_config();
  j["depth"] = "deep";
  EXPECT_NE(message_of(j).find("depth"), std::string::npos);
}

TEST(Config, ExplicitSchedule) {
  json j = base_config();
  j["schedule"] = json::parse(R"({"mode": "explicit", "generations": [[{"count": 50, "radius": 0.1}]]})");
  RunConfig c = parse_config(j);
  ASSERT_EQ(c.schedule.generations.size(), 1u);
  EXPECT_EQ(c.schedule.generations[0][0].count, 50);
  j["schedule"]["generations"][0][0]["radius"] = 1.5;
  EXPECT_FALSE(message_of(j).empty());
}

TEST(Dump, DeterministicBytes) {
  RunConfig c = parse_config(base_config());
  EXPECT_EQ(dump_text(build_from_config(c)), dump_text(build_from_config(c)));
  c.seed = 8;
  std::string other = dump_text(build_from_config(c));
  c.seed = 7;
  EXPECT_NE(dump_text(build_from_config(c)), other);
}

TEST(Dump, RoundTripPreservesSuites) {
  std::vector<json> configs{base_config(), base_config(), base_config()};
  configs[1]["gauge"] = json::parse(R"({"kind": "log_power", "beta": 1})");
  configs[2]["variant"] = "gauged_rotation";
  configs[2]["alpha"] = 0.8;
  configs[2]["gamma"] = 0.1;
  for (const auto& cj : configs) {
    RunConfig c = parse_config(cj);
    auto st = build_from_config(c);
    auto loaded = load_structure(json::parse(dump_text(st, c.verify)));
    EXPECT_EQ(dump_text(loaded.structure, loaded.verify), dump_text(st, c.verify));
    for (const auto& name : suite_names()) {
      auto a = run_suite(name, st, c.verify);
      auto b = run_suite(name, loaded.structure, loaded.verify);
      EXPECT_EQ(a.pass, b.pass) << name;
      EXPECT_EQ(a.summary, b.summary) << name;
      ASSERT_EQ(a.rows.size(), b.rows.size()) << name;
      for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].value, b.rows[i].value) << name;
    }
  }
}

TEST(Dump, DimensionZeroAndRieszRoundTrip) {
  json dz = json::parse(R"({"version": 1, "variant": "dimension_zero", "K": 2, "alpha": 0.6, "gamma": 0.5, "depth": 6})");
  auto st = build_from_config(parse_config(dz));
  EXPECT_EQ(dump_text(load_structure(dump_structure(st)).structure), dump_text(st));
  json rz = base_config();
  rz.erase("gauge");
  rz["variant"] = "riesz_capacity";
  rz["riesz"] = {{"p", 2}};
  auto r = build_from_config(parse_config(rz));
  EXPECT_EQ(dump_text(load_structure(dump_structure(r)).structure), dump_text(r));
}

TEST(Dump, CorruptedEtaFailsPremeasure) {
  json j = base_config();
  j["gauge"] = json::parse(R"({"kind": "log_power", "beta": 1})");
  RunConfig c = parse_config(j);
  json d = dump_structure(build_from_config(c));
  d["classes"][2][3] = d["classes"][2][3].get<double>() + 0.05;
  auto loaded = load_structure(d);
  EXPECT_FALSE(run_suite("premeasure", loaded.structure, loaded.verify).pass);
}

TEST(Dump, MalformedRejected) {
  EXPECT_THROW(load_structure(json::parse(R"({"format": "other"})")), InputError);
  RunConfig c = parse_config(base_config());
  json d = dump_structure(build_from_config(c));
  d["version"] = 99;
  EXPECT_THROW(load_structure(d), InputError);
  d = dump_structure(build_from_config(c));
  d["classes"].erase(d["classes"].size() - 1);
  EXPECT_THROW(load_structure(d), InputError);
  d = dump_structure(build_from_config(c));
  d["packings"][0].erase("disks");
  EXPECT_THROW(load_structure(d), InputError);
}

TEST(Dump, CustomGaugeNotSerializable) {
  RunConfig c = parse_config(base_config());
  auto st = build_from_config(c);
  st.gauge = Gauge::custom(1.0, [](double) { return 0.0; });
  EXPECT_THROW(dump_structure(st), InputError);
}

TEST(Reports, CsvFormat) {
  std::string text = csv_text({{3, -2.5, 0.75, 0}, {4, -3.0, 0.5, 1}});
  EXPECT_EQ(text, "probe_id,scale_log,value,flag\n3,-2.5,0.75,0\n4,-3,0.5,1\n");
}

TEST(Render, PixmapHeaderAndIdentity) {
  json j = base_config();
  j["depth"] = 0;
  auto st = build_from_config(parse_config(j));
  Image img = render_structure(st, {64, 4, 1.0, 0});
  std::string ppm = img.ppm();
  EXPECT_EQ(ppm.substr(0, 13), "P6\n64 64\n255\n");
  EXPECT_EQ(ppm.size(), 13u + 64 * 64 * 3);
  // identity map: the grid line x = 0 is the middle pixel column
  int gray = 0;
  for (int y = 0; y < 64; ++y) gray += img.rgb[(static_cast<std::size_t>(y) * 64 + 32) * 3] == 150;
  EXPECT_GE(gray, 60);
}

TEST(Render, BlockCirclesStayRound) {
  json j = base_config();
  j["depth"] = 2;
  auto st = build_from_config(parse_config(j));
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    auto b = st.block(st.multi_index(st.random_path(2, rng)));
    double t = b.image_disk.radius.value();
    for (int k = 0; k < 16; ++k) {
      ComplexPoint w = eval_composed(st, b.source_disk.center + std::polar(b.source_disk.radius.value(), 0.4 * k));
      EXPECT_NEAR(std::abs(w - b.image_disk.center) * 512 / 2.5, t * 512 / 2.5, 0.5);
    }
  }
  EXPECT_NO_THROW(render_structure(st, {128, 8, 1.25, 2}));
}

TEST(Render, DeepTreePrunesSubpixelBlocks) {
  json dz = json::parse(R"({"version": 1, "variant": "dimension_zero", "K": 2, "alpha": 0.6, "gamma": 0.5, "depth": 30})");
  auto st = build_from_config(parse_config(dz));
  Image img = render_structure(st, {64, 4, 1.25, 30});
  EXPECT_EQ(img.ppm().size(), 13u + 64 * 64 * 3);
}
