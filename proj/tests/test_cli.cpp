#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "app.hpp"
#include "c3auto/green.hpp"

using namespace c3auto;
using namespace c3auto::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("c3auto_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig small_slice(const std::string& out) {
  RunConfig cfg;
  cfg.out = out;
  cfg.slice.res_u = 17;
  cfg.slice.res_v = 11;
  cfg.slice.half_width_u = 3.0;
  cfg.slice.half_width_v = 3.0;
  return cfg;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.b = {0.25, -1.5};
  cfg.d = {1.0 / 3.0, 0.1};
  cfg.slice.anchor = {{1e-300, 2}, {3, 4}, {-5, 6.5}};
  cfg.seeds = "some \"quoted\" path";
  cfg.standard_segments = false;
  cfg.epsilon = 0.125;
  const RunConfig back = parse_config(cfg.serialize());
  CHECK(back.serialize() == cfg.serialize());
  CHECK(back.d == cfg.d);
  CHECK(back.slice.anchor.x == cfg.slice.anchor.x);
  CHECK(back.seeds == cfg.seeds);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = \"2,zero\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("threads = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_point("1,2;3,4"), ConfigError);
  CHECK_THROWS_AS(parse_field("green"), ConfigError);
  RunConfig cfg;
  cfg.slice.res_u = 1;
  CHECK_THROWS_AS(render_grid(cfg, Field::GreenPlus), ConfigError);
  cfg = RunConfig{};
  cfg.d = 0.0;
  CHECK_THROWS_AS(cfg.params(), InvalidParams);
  cfg.d = 0.5;
  CHECK_THROWS_AS(render_grid(cfg, Field::Phi), std::invalid_argument);
}

TEST_CASE("render through the origin") {
  RunConfig cfg = small_slice(scratch("origin").string());
  const RenderGrid g = render_grid(cfg, Field::GreenPlus);
  REQUIRE(g.width == 17);
  const size_t center = 5 * 17 + 8;
  CHECK(g.status[center] == "ok");
  CHECK(g.value[center] == 0.0);
  for (size_t k = 0; k < g.value.size(); ++k) {
    if (g.status[k] != "ok") continue;
    CHECK(g.value[k] >= 0.0);
  }
  // Pixel values agree with direct evaluation.
  const Params p = cfg.params();
  for (int j : {0, 3, 10})
    for (int i : {0, 7, 16}) {
      const GreenResult r = green_value(p, cfg.slice.pixel(i, j), Direction::Forward);
      const size_t k = static_cast<size_t>(j * 17 + i);
      if (r.resolved) CHECK(g.value[k] == r.value);
    }
}

TEST_CASE("min_green is the minimum of both renders") {
  RunConfig cfg = small_slice(scratch("min").string());
  const RenderGrid gp = render_grid(cfg, Field::GreenPlus);
  const RenderGrid gm = render_grid(cfg, Field::GreenMinus);
  const RenderGrid mn = render_grid(cfg, Field::MinGreen);
  for (size_t k = 0; k < mn.value.size(); ++k) {
    if (mn.status[k] != "ok") continue;
    CHECK(mn.value[k] == std::min(gp.value[k], gm.value[k]));
  }
}

TEST_CASE("render outputs are deterministic and reloadable") {
  const fs::path d1 = scratch("det1"), d4 = scratch("det4");
  RunConfig cfg = small_slice(d1.string());
  cfg.field = "escape_class";
  const RenderOutput a = run_render(cfg, Field::EscapeClass);
  cfg.out = d4.string();
  cfg.threads = 4;
  const RenderOutput b = run_render(cfg, Field::EscapeClass);
  CHECK(slurp(a.csv) == slurp(b.csv));
  CHECK(slurp(a.pgm) == slurp(b.pgm));
  CHECK(slurp(a.json) == slurp(b.json));

  const std::string csv = slurp(a.csv);
  CHECK(csv.find("i,j,value,status\r\n") != std::string::npos);
  const RunConfig back = load_config(a.csv);
  CHECK(back.field == "escape_class");
  RunConfig again = back;
  again.out = scratch("det_reload").string();
  CHECK(slurp(run_render(again, parse_field(again.field)).csv) == csv);

  const std::string pgm = slurp(a.pgm);
  CHECK(pgm.rfind("P5\n", 0) == 0);
  const auto side = nlohmann::json::parse(slurp(a.json));
  CHECK(side["width"] == 17);
  CHECK(side["config"]["field"] == "escape_class");
  const size_t header_end = pgm.find("65535\n") + 6;
  CHECK(pgm.size() - header_end == 2u * 17u * 11u);
}

TEST_CASE("phi render statuses") {
  RunConfig cfg = small_slice(scratch("phi").string());
  const RenderGrid g = render_grid(cfg, Field::Phi);
  const size_t center = 5 * 17 + 8;
  CHECK(g.status[center] == "neg_infinity");
  for (size_t k = 0; k < g.value.size(); ++k) {
    if (g.status[k] == "ok") CHECK(std::isfinite(g.value[k]));
    if (g.status[k] == "undefined") CHECK(std::isnan(g.value[k]));
  }
}

TEST_CASE("reports") {
  const fs::path dir = scratch("reports");
  RunConfig cfg;
  cfg.out = dir.string();
  cfg.n_max = 6;
  cfg.b = 1.0;
  cfg.c = 1.0;
  run_report(cfg, ReportKind::Degrees);
  const auto deg = nlohmann::json::parse(slurp(dir / "degrees.json"));
  CHECK(std::abs(deg["spectral_radius"].get<double>() - (1 + std::sqrt(5.0)) / 2) < 1e-12);
  CHECK(deg["degree_sequence_complete"] == true);
  const std::string csv = slurp(dir / "degrees.csv");
  const size_t row6 = csv.find("\r\n6,");
  REQUIRE(row6 != std::string::npos);
  const std::string line = csv.substr(row6 + 2, csv.find("\r\n", row6 + 2) - row6 - 2);
  CHECK(line.substr(line.rfind(',') + 1) == "21");

  cfg.b = 0.0;
  cfg.c = 0.0;
  cfg.samples = 200;
  run_report(cfg, ReportKind::AtlasVerify);
  const auto atlas = nlohmann::json::parse(slurp(dir / "atlas.json"));
  CHECK(atlas["flow"]["all_pass"] == true);
  CHECK(atlas["commutation"]["p99"].get<double>() < 1e-10);

  run_report(cfg, ReportKind::PhiSweep);
  const std::string sweep = slurp(dir / "phi_sweep.csv");
  CHECK(sweep.find("epsilon,sigma_10") != std::string::npos);
  CHECK(sweep.find("\r\n0.01,") != std::string::npos);
}

TEST_CASE("find-w on one segment") {
  const fs::path dir = scratch("findw");
  RunConfig cfg;
  cfg.out = dir.string();
  cfg.threads = 2;
  cfg.standard_segments = false;
  cfg.segment_a = {1e-60, 0.9 * 0.05 * 0.05, 100.0};
  cfg.segment_b = {1e-60, -0.9 * 0.05 * 0.05, 100.0};
  run_report(cfg, ReportKind::FindW);
  const std::string csv = slurp(dir / "find_w.csv");
  std::istringstream in(csv);
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("#!", 0) == 0 || line.rfind("segment,", 0) == 0) continue;
    ++rows;
    CHECK(line.find(",true\r") != std::string::npos);
  }
  CHECK(rows >= 1);
  CHECK(fs::file_size(dir / "find_w_log.txt") > 0);
}
