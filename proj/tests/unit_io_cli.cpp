#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "liv/io.hpp"
#include "liv/liouville.hpp"

using namespace liv;
using nlohmann::json;

TEST_CASE("descriptors build systems for every gauge and profile") {
  const json exp_desc = json::parse(R"js({
    "model": "const-rate",
    "model_params": {"r_u": 2.5, "r_s": -2.5},
    "gauge": "exponential",
    "h_u": "const(1)",
    "h_s": {"type": "cos_theta", "amplitude": 0.5},
    "profile": {"kind": "exponential"},
    "window": [-2.5, 2.5],
    "name": "io-exp"
  })js");
  const InterpolationSystem a = system_from_descriptor(exp_desc);
  REQUIRE(a.name == "io-exp");
  REQUIRE(a.model->name() == "const-rate");
  REQUIRE(a.window_lo == -2.5);
  REQUIRE(a.bicontact.h_s.eval(*a.model, {0, 0, 0}).value == 1.5);
  REQUIRE(skeleton_solve(a, {0, 0, 0}) ==
          Catch::Approx(0.5 * std::log(1.5)).margin(1e-10));

  const json sym_desc = json::parse(R"js({
    "model": "cat",
    "gauge": "symmetric",
    "profile": {"kind": "linear"},
    "window": [-0.9, 0.9]
  })js");
  const InterpolationSystem b = system_from_descriptor(sym_desc);
  REQUIRE(b.name == "cat-system");
  const LiouvilleField lb = liouville_field(b, 0.25, {0, 0, 0});
  REQUIRE(lb.provenance == Provenance::closed_form);
  REQUIRE(lb.f == Catch::Approx(1.0 / b.model->expansion_rates({0, 0, 0}).r_u)
                      .epsilon(1e-13));

  const json fib_desc = json::parse(R"js({
    "model": "cat",
    "gauge": "fibration",
    "h_plus": "cos_theta(0.2)",
    "profile": {"kind": "exponential"},
    "window": [-2.5, 2.5]
  })js");
  const InterpolationSystem c = system_from_descriptor(fib_desc);
  REQUIRE(c.bicontact.fibration);
  REQUIRE(c.bicontact.h_u.eval(*c.model, {0, 0, 0}).value == Catch::Approx(0.8));
  REQUIRE_NOTHROW(fibration_min_check(c, {0, 0, 0.3}, 500));

  const json gen_desc = json::parse(R"js({
    "model": "cat",
    "gauge": "exponential",
    "h_u": "const(1)",
    "h_s": "const(1)",
    "profile": {"kind": "general",
                "params": {"shape": "cos", "c0": 0.1, "c1": 1.0,
                           "base": {"type": "cos_theta", "amplitude": 0.5}}},
    "window": [-2, 2]
  })js");
  const InterpolationSystem d = system_from_descriptor(gen_desc);
  REQUIRE(d.profile.base_kind() == ProfileKind::general);
  REQUIRE_FALSE(d.profile.distortion().empty());
  ValidationOptions vo;
  vo.grid_n = 8;
  vo.n_random = 50;
  REQUIRE(validate_system(d, vo).ok);

  const json da_desc = json::parse(R"js({
    "model": "da-chart",
    "model_params": {"nubar": 0.25},
    "gauge": "exponential",
    "h_u": "const(1)",
    "h_s": "const(1)",
    "profile": {"kind": "exponential"},
    "window": [-2.5, 2.5]
  })js");
  const InterpolationSystem e = system_from_descriptor(da_desc);
  REQUIRE(e.model->name() == "da-chart");
  REQUIRE(e.model->expansion_rates({0, 0, 0}).r_s == 0.25);
  REQUIRE(e.model->expansion_rates({0, 0, 0}).r_u == 1.0);
}

TEST_CASE("descriptor validation errors") {
  const auto desc = [](const char* text) { return json::parse(text); };
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "torus", "profile": {"kind": "exponential"},
              "window": [0, 1], "gauge": "symmetric"})js")),
      Catch::Matchers::ContainsSubstring("unknown model"));
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "polar",
              "profile": {"kind": "exponential"}, "window": [0, 1]})js")),
      Catch::Matchers::ContainsSubstring("unknown gauge"));
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "symmetric",
              "profile": {"kind": "cubic"}, "window": [0, 1]})js")),
      Catch::Matchers::ContainsSubstring("unknown profile kind"));
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "symmetric",
              "profile": {"kind": "general", "params": {"shape": "tan"}},
              "window": [0, 1]})js")),
      Catch::Matchers::ContainsSubstring("unknown s-shape"));
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "symmetric",
              "profile": {"kind": "exponential"}, "window": [1, 1]})js")),
      Catch::Matchers::ContainsSubstring("a < b"));
  REQUIRE_THROWS_WITH(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "symmetric",
              "profile": {"kind": "exponential"}, "window": [0, 1, 2]})js")),
      Catch::Matchers::ContainsSubstring("window must be"));
  // Exponential gauge without its coefficient fields.
  REQUIRE_THROWS_AS(
      system_from_descriptor(desc(
          R"js({"model": "cat", "gauge": "exponential",
              "profile": {"kind": "exponential"}, "window": [0, 1]})js")),
      json::out_of_range);
}

TEST_CASE("field specs accept id strings and typed objects") {
  const auto m = cat_suspension();
  REQUIRE(field_from_json(json("cos_theta(0.25)")).eval(*m, {0, 0, 0}).value ==
          1.25);
  REQUIRE(field_from_json(json::parse(R"js({"type": "const", "value": 3.5})js"))
              .eval(*m, {0, 0, 0})
              .value == 3.5);
  const ScalarField ex = field_from_json(
      json::parse(R"js({"type": "expr", "text": "1 + theta*theta"})js"));
  REQUIRE(ex.eval(*m, {0, 0, 0.5}).value == Catch::Approx(1.25));
  REQUIRE_THROWS_WITH(
      field_from_json(json::parse(R"js({"type": "poly"})js")),
      Catch::Matchers::ContainsSubstring("unknown field type"));
  REQUIRE_THROWS_WITH(field_from_json(json(42)),
                      Catch::Matchers::ContainsSubstring("string or object"));
  REQUIRE_THROWS_WITH(field_from_json(json("warp(1.0)")),
                      Catch::Matchers::ContainsSubstring("unknown field id"));
}

TEST_CASE("json files load with clear failure modes") {
  const std::string bad = "/tmp/liv_io_bad.json";
  {
    std::ofstream out(bad);
    out << "{ \"model\": ";
  }
  REQUIRE_THROWS_AS(load_json_file(bad), json::parse_error);
  std::remove(bad.c_str());
  REQUIRE_THROWS_WITH(
      load_json_file("/tmp/liv_io_absent_419.json"),
      Catch::Matchers::ContainsSubstring("cannot open file"));
}

TEST_CASE("config hashes are stable and well-formed") {
  // FNV-1a 64 reference vectors.
  REQUIRE(config_hash_hex("") == "cbf29ce484222325");
  REQUIRE(config_hash_hex("a") == "af63dc4c8601ec8c");
  REQUIRE(config_hash_hex("{\"grid\":64}") == config_hash_hex("{\"grid\":64}"));
  REQUIRE(config_hash_hex("{\"grid\":64}") != config_hash_hex("{\"grid\":65}"));
  REQUIRE(config_hash_hex("x").size() == 16);
}

TEST_CASE("reports serialize deterministically") {
  Report r;
  r.command = "skeleton";
  r.config_hash = config_hash_hex("cfg");
  r.seed = 17;
  r.pass = true;
  r.payload = json{{"max_residual", 0.0}, {"grid", 256}};
  const json j = report_to_json(r);
  REQUIRE(j.at("command") == "skeleton");
  REQUIRE(j.at("seed") == 17);
  REQUIRE(j.at("pass") == true);
  REQUIRE(j.at("payload").at("grid") == 256);
  Report r2 = r;
  REQUIRE(report_to_json(r2).dump() == j.dump());
}

TEST_CASE("csv export sorts rows and uses full precision") {
  const std::string path = "/tmp/liv_io_test.csv";
  REQUIRE(export_csv(path, {"theta", "s"},
                     {{0.5, 2.0}, {0.25, -1.0}, {0.25, -3.0}}));
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  REQUIRE(ss.str() == "theta,s\n0.25,-3\n0.25,-1\n0.5,2\n");
  std::remove(path.c_str());

  const std::string head_only = "/tmp/liv_io_empty.csv";
  REQUIRE(export_csv(head_only, {"a"}, {}));
  std::ifstream in2(head_only);
  std::stringstream ss2;
  ss2 << in2.rdbuf();
  REQUIRE(ss2.str() == "a\n");
  std::remove(head_only.c_str());

  REQUIRE_FALSE(export_csv("/nonexistent-dir-419/x.csv", {"a"}, {{1.0}}));

  const std::string prec = "/tmp/liv_io_prec.csv";
  REQUIRE(export_csv(prec, {"v"}, {{1.0 / 3.0}}));
  std::ifstream in3(prec);
  std::string line;
  std::getline(in3, line);
  std::getline(in3, line);
  REQUIRE(line == "0.333333333333333");
  std::remove(prec.c_str());
}
