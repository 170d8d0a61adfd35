#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "app.hpp"
#include "c3auto/cohomology.hpp"
#include "c3auto/compactification.hpp"
#include "c3auto/infinity_partition.hpp"

using namespace c3auto;
using namespace c3auto::app;

namespace {

std::string error_type(const std::exception& ex) {
  if (dynamic_cast<const ConfigError*>(&ex)) return "config_error";
  if (dynamic_cast<const InvalidParams*>(&ex)) return "invalid_params";
  if (dynamic_cast<const OverflowGuardError*>(&ex)) return "overflow_guard";
  if (dynamic_cast<const TermExplosion*>(&ex)) return "term_explosion";
  if (dynamic_cast<const IndeterminateError*>(&ex)) return "indeterminate";
  if (dynamic_cast<const ChartDomainError*>(&ex)) return "chart_domain";
  if (dynamic_cast<const PremiseError*>(&ex)) return "premise";
  if (dynamic_cast<const std::invalid_argument*>(&ex)) return "invalid_argument";
  return "runtime_error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Dynamics of f(x,y,z) = (y, z, yz + by + cz + dx + e) on C^3"};
  cli.require_subcommand(1);

  // Every flag lands here as a config key; the config file is applied first.
  std::map<std::string, std::string> overrides;
  std::string config_path;
  auto key_opt = [&](CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
                                          help);
  };

  cli.add_option("--config", config_path, "Config file, or any output file with an embedded config");
  key_opt(&cli, "--b", "b", "Coefficient b as re,im");
  key_opt(&cli, "--c", "c", "Coefficient c as re,im");
  key_opt(&cli, "--d", "d", "Coefficient d as re,im (nonzero)");
  key_opt(&cli, "--e", "e", "Coefficient e as re,im");
  key_opt(&cli, "--out", "out", "Output directory");
  key_opt(&cli, "--threads", "threads", "Worker threads");
  key_opt(&cli, "--seed", "seed", "RNG seed");

  auto slice_opts = [&](CLI::App* app) {
    key_opt(app, "--anchor", "slice.anchor", "Slice anchor as re,im;re,im;re,im");
    key_opt(app, "--dir-u", "slice.dir_u", "First slice direction");
    key_opt(app, "--dir-v", "slice.dir_v", "Second slice direction");
    key_opt(app, "--half-width-u", "slice.half_width_u", "Half width along dir-u");
    key_opt(app, "--half-width-v", "slice.half_width_v", "Half width along dir-v");
    key_opt(app, "--res-u", "slice.res_u", "Pixels along dir-u");
    key_opt(app, "--res-v", "slice.res_v", "Pixels along dir-v");
  };
  auto wedge_opts = [&](CLI::App* app) {
    key_opt(app, "--steps", "steps", "Itinerary length in map applications");
    key_opt(app, "--epsilon", "epsilon", "Wedge level");
    key_opt(app, "--norm-floor", "norm_floor", "Wedge norm floor");
    key_opt(app, "--k-budget", "k.budget", "Steps for the bounded-orbit verdict");
    key_opt(app, "--k-radius", "k.radius", "Escape radius for the bounded-orbit verdict (0: 10 R_K)");
  };

  auto* degrees = cli.add_subcommand("degrees", "Pullback spectrum and exact degree growth");
  degrees->fallthrough();
  key_opt(degrees, "--n-max", "n_max", "Largest iterate to expand (<= 12)");

  auto* atlas = cli.add_subcommand("atlas-verify", "Chart commutation and flow at infinity");
  atlas->fallthrough();
  key_opt(atlas, "--samples", "samples", "Random samples");

  auto* green = cli.add_subcommand("green", "Green function tools");
  green->require_subcommand(1);
  auto* render = green->add_subcommand("render", "Rasterize a field on a complex 2-plane slice");
  render->fallthrough();
  green->fallthrough();
  key_opt(render, "--field", "field", "green_plus | green_minus | min_green | phi | escape_class");
  key_opt(render, "--max-iters", "green.max_iters", "Green iteration cap");
  key_opt(render, "--tol", "green.tol", "Green stopping tolerance");
  slice_opts(render);
  wedge_opts(render);

  auto* classify = cli.add_subcommand("classify", "Itinerary classification of seeds");
  classify->fallthrough();
  key_opt(classify, "--seeds", "seeds", "CSV with columns x_re,x_im,y_re,y_im,z_re,z_im");
  slice_opts(classify);
  wedge_opts(classify);

  auto* findw = cli.add_subcommand("find-w", "Search for linear-rate escaping points");
  findw->fallthrough();
  std::string seg_a, seg_b;
  findw->add_option("--a", seg_a, "Segment start as re,im;re,im;re,im");
  findw->add_option("--b-point", seg_b, "Segment end as re,im;re,im;re,im");
  key_opt(findw, "--subdivisions", "subdivisions", "Scan samples along each segment");
  key_opt(findw, "--budget", "budget", "Map applications per probe");
  key_opt(findw, "--rate-tol", "rate_tol", "Relative tolerance on the f^3 rate");
  key_opt(findw, "--persist", "persist", "Consecutive f^3 blocks to verify");
  key_opt(findw, "--epsilon", "epsilon", "Wedge level");

  auto* phi = cli.add_subcommand("phi", "Renormalized potential per seed, or the correction table");
  phi->fallthrough();
  bool sweep = false;
  phi->add_flag("--sweep-eps", sweep, "Emit the c_eps table as CSV");
  key_opt(phi, "--eps-list", "sweep_eps", "Comma separated eps values for --sweep-eps");
  key_opt(phi, "--seeds", "seeds", "CSV with columns x_re,x_im,y_re,y_im,z_re,z_im");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }

  std::string out_for_errors = "out";
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!seg_a.empty() || !seg_b.empty()) {
      if (seg_a.empty() || seg_b.empty()) throw ConfigError("find-w needs both --a and --b-point");
      overrides["segment.a"] = seg_a;
      overrides["segment.b"] = seg_b;
      overrides["standard_segments"] = "false";
    }
    for (const auto& [k, v] : overrides) set_key(cfg, k, v);
    out_for_errors = cfg.out;
    (void)cfg.params();  // validates d != 0 before any output is written

    std::vector<std::filesystem::path> written;
    if (*degrees) written = run_report(cfg, ReportKind::Degrees);
    else if (*atlas) written = run_report(cfg, ReportKind::AtlasVerify);
    else if (*render) {
      const RenderOutput r = run_render(cfg, parse_field(cfg.field));
      written = {r.pgm, r.json, r.csv};
      if (r.unresolved > 0) std::cerr << r.unresolved << " unresolved pixels\n";
    } else if (*classify) written = {run_classify(cfg)};
    else if (*findw) written = run_report(cfg, ReportKind::FindW);
    else if (*phi) written = sweep ? run_report(cfg, ReportKind::PhiSweep) : std::vector{run_phi(cfg)};
    for (const auto& f : written) std::cout << f.string() << "\n";
    return 0;
  } catch (const std::exception& ex) {
    const nlohmann::json rec = {{"error", {{"type", error_type(ex)}, {"message", ex.what()}}}};
    std::cerr << rec.dump() << "\n";
    std::error_code ec;
    std::filesystem::create_directories(out_for_errors, ec);
    std::ofstream(std::filesystem::path(out_for_errors) / "error.json") << rec.dump(2) << "\n";
    return 1;
  }
}
