#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "slice/errors.hpp"
#include "slice/report.hpp"

using namespace slice;
using namespace slice::report;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
  std::ofstream(path) << text;
  return path;
}

RunConfig golden_cfg(const std::string& key, const std::string& label) {
  RunConfig c;
  c.system = key;
  c.golden = label;
  return c;
}

}  // namespace

TEST_CASE("vectors parse with or without brackets") {
  CHECK(parse_vector("0,0,1").size() == 3);
  CHECK(parse_vector("[1.5, -2e-3]")(1) == doctest::Approx(-2e-3));
  CHECK(parse_vector("").size() == 0);
  CHECK_THROWS_AS(parse_vector("1,x,3"), ConfigError);
}

TEST_CASE("TOML and JSON configs produce the same RunConfig") {
  std::string toml = write_temp("slice_cfg_test.toml",
                                "system = \"so3_r3\"\n"
                                "point = [0.0, 0.0, 1]\n"
                                "covector = [0.0, -1.0, 0.0]\n"
                                "[params]\nwarp = 0.5\n"
                                "[numerics]\nfd_step = 2e-5\nrichardson_levels = 0\n");
  std::string js = write_temp("slice_cfg_test.json",
                              R"({"system": "so3_r3", "point": [0, 0, 1], "covector": [0, -1, 0],
                                  "params": {"warp": 0.5},
                                  "numerics": {"fd_step": 2e-5, "richardson_levels": 0}})");
  RunConfig a = load_config(toml);
  RunConfig b = load_config(js);
  CHECK(a.system == b.system);
  CHECK(*a.x == *b.x);
  CHECK(*a.p == *b.p);
  CHECK(a.params == b.params);
  CHECK(*a.numerics.fd_step == *b.numerics.fd_step);
  CHECK(*a.numerics.richardson_levels == 0);
  std::remove(toml.c_str());
  std::remove(js.c_str());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/slice.toml"), ConfigError);
  std::string bad = write_temp("slice_bad.toml", "system = [\n");
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  std::remove(bad.c_str());
  CHECK_THROWS_AS(config_from_json(json{{"sytem", "so3_r3"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"point", "0,0,1"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"numerics", {{"fd_stp", 1e-5}}}}), ConfigError);
}

TEST_CASE("flag overrides are merged over the file") {
  RunConfig file = golden_cfg("so3_r3", "north_pole_vertical");
  file.params["warp"] = 0.1;
  file.numerics.fd_step = 1e-4;
  RunConfig flags;
  flags.params["warp"] = 0.2;
  flags.numerics.rank_tol = 1e-8;
  RunConfig m = merge(file, flags);
  CHECK(m.system == "so3_r3");
  CHECK(m.params.at("warp") == 0.2);
  CHECK(*m.numerics.fd_step == 1e-4);
  CHECK(*m.numerics.rank_tol == 1e-8);
}

TEST_CASE("resolve validates covector input") {
  RunConfig c;
  c.system = "so3_r3";
  c.x = parse_vector("0,0,1");
  CHECK_THROWS_AS(resolve(c), ConfigError);  // no covector
  c.p = parse_vector("0,-1,0");
  c.eta = parse_vector("1,0,0");
  c.s = parse_vector("0,0,0.2");
  CHECK_THROWS_AS(resolve(c), ConfigError);  // both forms
  c.p.reset();
  ResolvedPoint rp = resolve(c);
  CHECK(rp.p.size() == 3);
  c.s = parse_vector("0,0");
  CHECK_THROWS_AS(resolve(c), DimensionMismatch);
  c.s.reset();
  CHECK_THROWS_AS(resolve(c), ConfigError);  // eta without s
  RunConfig bad = golden_cfg("so3_r3", "nowhere");
  CHECK_THROWS_AS(resolve(bad), ConfigError);
  RunConfig tol = golden_cfg("so3_r3", "north_pole_vertical");
  tol.numerics.rank_tol = 2.0;
  CHECK_THROWS_AS(resolve(tol), ConfigError);
}

TEST_CASE("an explicit golden point is recognised and labelled") {
  RunConfig c;
  c.system = "so3_r3";
  c.x = parse_vector("0,0,1");
  c.p = parse_vector("0,-1,0");
  ResolvedPoint rp = resolve(c);
  REQUIRE(rp.golden);
  CHECK(rp.label == "north_pole_vertical");
  c.p = parse_vector("0,-1,0.5");
  CHECK(resolve(c).label == "custom");
}

TEST_CASE("describe reports are deterministic and carry the golden dims") {
  ResolvedPoint rp = resolve(golden_cfg("so3_two_body", "axis_and_origin_j_nonzero"));
  auto c1 = verify::make_context(rp.system, rp.x, rp.p, rp.label, rp.golden);
  auto c2 = verify::make_context(rp.system, rp.x, rp.p, rp.label, rp.golden);
  json d1 = describe_json(*c1, {});
  json d2 = describe_json(*c2, {});
  CHECK(d1.dump() == d2.dump());
  CHECK(d1["schema"] == "slice-report/1");
  CHECK(d1["dims"]["V"] == 8);
  CHECK(d1["omega"].size() == 8);
  CHECK(d1["bases"]["V"].size() == 8);
  CHECK_NOTHROW(ensure_finite(d1));
  CHECK(describe_text(*c1).find("dims:") != std::string::npos);
}

TEST_CASE("non-finite numbers are a hard failure") {
  json doc = {{"a", {1.0, std::nan("")}}};
  CHECK_THROWS_AS(ensure_finite(doc), NumericalError);
  json inf = {{"b", {{"c", INFINITY}}}};
  CHECK_THROWS_AS(ensure_finite(inf), NumericalError);
}

TEST_CASE("verify suite names at least twelve distinct checks in sorted order") {
  ResolvedPoint rp = resolve(golden_cfg("so3_r3", "north_pole_vertical"));
  verify::SuiteOptions opt;
  opt.threads = 4;
  auto reports = verify::run_point_suite(rp.system, rp.x, rp.p, opt, rp.golden);
  std::set<std::string> names;
  for (const auto& r : reports) names.insert(r.name);
  CHECK(names.size() >= 12);
  CHECK(names.size() == reports.size());
  for (std::size_t i = 1; i < reports.size(); ++i) CHECK(reports[i - 1].name < reports[i].name);
  for (const auto& r : reports) CHECK_MESSAGE(r.pass, r.name << " " << r.residual);
}

TEST_CASE("verify results do not depend on the thread count") {
  ResolvedPoint rp = resolve(golden_cfg("torus2_r4", "circle_isotropy_slice_momentum"));
  verify::SuiteOptions one;
  one.threads = 1;
  verify::SuiteOptions many;
  many.threads = 8;
  auto a = verify::run_point_suite(rp.system, rp.x, rp.p, one, rp.golden);
  auto b = verify::run_point_suite(rp.system, rp.x, rp.p, many, rp.golden);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].residual == b[i].residual);
  }
}

TEST_CASE("a zero check tolerance fails on difference noise") {
  ResolvedPoint rp = resolve(golden_cfg("so3_on_so3", "off_identity"));
  verify::SuiteOptions opt;
  opt.check_tol = 0.0;
  auto reports = verify::run_point_suite(rp.system, rp.x, rp.p, opt, rp.golden);
  bool any_failed = false;
  for (const auto& r : reports) any_failed = any_failed || !r.pass;
  CHECK(any_failed);
}

TEST_CASE("verify and list documents") {
  std::vector<VerifiedPoint> pts;
  for (const auto& rp : all_bundled({})) {
    pts.push_back({rp.system.label(), rp.label, {}, rp.x, rp.p,
                   verify::run_point_suite(rp.system, rp.x, rp.p, {}, rp.golden)});
  }
  CHECK(pts.size() == 11);
  json v = verify_json(pts, {});
  CHECK(v["summary"]["pass"] == true);
  CHECK(v["points"].size() == 11);
  json l = list_json();
  CHECK(l["systems"].size() == 4);
  CHECK(l["systems"][0]["key"] == "so3_r3");
  CHECK(list_text().find("so3_r3") != std::string::npos);
}
