#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "c3auto/cohomology.hpp"
#include "c3auto/compactification.hpp"
#include "c3auto/green.hpp"
#include "c3auto/infinity_partition.hpp"
#include "c3auto/parallel.hpp"
#include "c3auto/phi_measure.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace c3auto::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

// Fixed key order shared by serialize() and the embedded headers.
using Getter = std::function<std::string(const RunConfig&)>;
const std::vector<std::pair<std::string, Getter>>& keys() {
  static const std::vector<std::pair<std::string, Getter>> k{
      {"b", [](const RunConfig& c) { return format_complex(c.b); }},
      {"c", [](const RunConfig& c) { return format_complex(c.c); }},
      {"d", [](const RunConfig& c) { return format_complex(c.d); }},
      {"e", [](const RunConfig& c) { return format_complex(c.e); }},
      {"threads", [](const RunConfig& c) { return std::to_string(c.threads); }},
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"out", [](const RunConfig& c) { return c.out; }},
      {"slice.anchor", [](const RunConfig& c) { return format_point(c.slice.anchor); }},
      {"slice.dir_u", [](const RunConfig& c) { return format_point(c.slice.dir_u); }},
      {"slice.dir_v", [](const RunConfig& c) { return format_point(c.slice.dir_v); }},
      {"slice.half_width_u", [](const RunConfig& c) { return num(c.slice.half_width_u); }},
      {"slice.half_width_v", [](const RunConfig& c) { return num(c.slice.half_width_v); }},
      {"slice.res_u", [](const RunConfig& c) { return std::to_string(c.slice.res_u); }},
      {"slice.res_v", [](const RunConfig& c) { return std::to_string(c.slice.res_v); }},
      {"field", [](const RunConfig& c) { return c.field; }},
      {"green.max_iters", [](const RunConfig& c) { return std::to_string(c.green_max_iters); }},
      {"green.tol", [](const RunConfig& c) { return num(c.green_tol); }},
      {"steps", [](const RunConfig& c) { return std::to_string(c.steps); }},
      {"epsilon", [](const RunConfig& c) { return num(c.epsilon); }},
      {"norm_floor", [](const RunConfig& c) { return num(c.norm_floor); }},
      {"k.budget", [](const RunConfig& c) { return std::to_string(c.k_budget); }},
      {"k.radius", [](const RunConfig& c) { return num(c.k_radius); }},
      {"seeds", [](const RunConfig& c) { return c.seeds; }},
      {"n_max", [](const RunConfig& c) { return std::to_string(c.n_max); }},
      {"samples", [](const RunConfig& c) { return std::to_string(c.samples); }},
      {"segment.a", [](const RunConfig& c) { return format_point(c.segment_a); }},
      {"segment.b", [](const RunConfig& c) { return format_point(c.segment_b); }},
      {"standard_segments", [](const RunConfig& c) { return std::string(c.standard_segments ? "true" : "false"); }},
      {"subdivisions", [](const RunConfig& c) { return std::to_string(c.subdivisions); }},
      {"budget", [](const RunConfig& c) { return std::to_string(c.budget); }},
      {"rate_tol", [](const RunConfig& c) { return num(c.rate_tol); }},
      {"persist", [](const RunConfig& c) { return std::to_string(c.persist); }},
      {"sweep_eps", [](const RunConfig& c) { return c.sweep_eps; }},
  };
  return k;
}

std::string quote(const std::string& v) {
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string unquote(const std::string& v) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return v;
  std::string out;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) ++i;
    out += v[i];
  }
  return out;
}

// threads and out never change results; leaving them out of outputs keeps
// files byte-identical across thread counts and directories.
bool execution_only(const std::string& key) { return key == "threads" || key == "out"; }

// Every output file starts with the config, each line prefixed by `prefix`.
std::string embedded_header(const RunConfig& cfg, const std::string& prefix) {
  std::string h = prefix + "c3auto_version = " + quote(kVersion) + "\n";
  for (const auto& [k, get] : keys())
    if (!execution_only(k)) h += prefix + k + " = " + quote(get(cfg)) + "\n";
  return h;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, get] : keys())
    if (!execution_only(k)) j[k] = get(cfg);
  return j;
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << data;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

json point_json(const AffinePoint& q) {
  return json::array({json::array({q.x.real(), q.x.imag()}), json::array({q.y.real(), q.y.imag()}),
                      json::array({q.z.real(), q.z.imag()})});
}

// Seeds from cfg.seeds (columns x_re,x_im,y_re,y_im,z_re,z_im) or the slice grid.
std::vector<AffinePoint> load_seeds(const RunConfig& cfg) {
  std::vector<AffinePoint> seeds;
  if (cfg.seeds.empty()) {
    cfg.slice.validate();
    for (int j = 0; j < cfg.slice.res_v; ++j)
      for (int i = 0; i < cfg.slice.res_u; ++i) seeds.push_back(cfg.slice.pixel(i, j));
    return seeds;
  }
  std::ifstream f(cfg.seeds);
  if (!f) throw std::runtime_error("cannot read seeds file " + cfg.seeds);
  for (std::string line; std::getline(f, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line.rfind("x_re", 0) == 0) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) throw ConfigError("seed line needs 6 columns: " + line);
    seeds.push_back({{parse_double(cols[0]), parse_double(cols[1])},
                     {parse_double(cols[2]), parse_double(cols[3])},
                     {parse_double(cols[4]), parse_double(cols[5])}});
  }
  return seeds;
}

LinearEscapeOptions finder_options(const RunConfig& cfg) {
  LinearEscapeOptions o;
  o.subdivisions = cfg.subdivisions;
  o.budget = cfg.budget;
  o.rate_tol = cfg.rate_tol;
  o.persist = cfg.persist;
  o.wedge_epsilon = cfg.epsilon;
  o.threads = cfg.threads;
  return o;
}

std::vector<Segment> finder_segments(const RunConfig& cfg) {
  if (cfg.standard_segments) return standard_wedge_segments(cfg.epsilon);
  return {{cfg.segment_a, cfg.segment_b}};
}

}  // namespace

AffinePoint SliceSpec::pixel(int i, int j) const {
  const double s = -half_width_u + 2.0 * half_width_u * i / (res_u - 1);
  const double t = -half_width_v + 2.0 * half_width_v * j / (res_v - 1);
  return anchor + cplx(s) * dir_u + cplx(t) * dir_v;
}

void SliceSpec::validate() const {
  if (!(dir_u.norm() > 0.0) || !(dir_v.norm() > 0.0))
    throw ConfigError("slice directions must be nonzero");
  if (res_u < 2 || res_v < 2) throw ConfigError("slice resolution must be >= 2 in each axis");
  if (!(half_width_u > 0.0) || !(half_width_v > 0.0))
    throw ConfigError("slice half widths must be positive");
}

const char* field_name(Field f) {
  switch (f) {
    case Field::GreenPlus: return "green_plus";
    case Field::GreenMinus: return "green_minus";
    case Field::MinGreen: return "min_green";
    case Field::Phi: return "phi";
    case Field::EscapeClass: return "escape_class";
  }
  return "?";
}

Field parse_field(const std::string& s) {
  for (Field f : {Field::GreenPlus, Field::GreenMinus, Field::MinGreen, Field::Phi, Field::EscapeClass})
    if (s == field_name(f)) return f;
  throw ConfigError("unknown field '" + s + "'");
}

Params RunConfig::params() const { return make_params(b, c, d, e); }

std::string RunConfig::serialize() const {
  std::string s;
  for (const auto& [k, get] : keys()) s += k + " = " + quote(get(*this)) + "\n";
  return s;
}

std::string format_complex(cplx v) { return num(v.real()) + "," + num(v.imag()); }

cplx parse_complex(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() == 1) return {parse_double(parts[0]), 0.0};
  if (parts.size() != 2) throw ConfigError("complex value must be 're,im': '" + s + "'");
  return {parse_double(parts[0]), parse_double(parts[1])};
}

std::string format_point(const AffinePoint& q) {
  return format_complex(q.x) + ";" + format_complex(q.y) + ";" + format_complex(q.z);
}

AffinePoint parse_point(const std::string& s) {
  const auto parts = split(s, ';');
  if (parts.size() != 3) throw ConfigError("point must be 're,im;re,im;re,im': '" + s + "'");
  return {parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2])};
}

void set_key(RunConfig& c, const std::string& key, const std::string& v) {
  auto as_int = [&](int lo) {
    const long long x = parse_int(v);
    if (x < lo || x > std::numeric_limits<int>::max())
      throw ConfigError(key + " out of range: " + v);
    return static_cast<int>(x);
  };
  if (key == "b") c.b = parse_complex(v);
  else if (key == "c") c.c = parse_complex(v);
  else if (key == "d") c.d = parse_complex(v);
  else if (key == "e") c.e = parse_complex(v);
  else if (key == "threads") c.threads = as_int(1);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(v));
  else if (key == "out") c.out = v;
  else if (key == "slice.anchor") c.slice.anchor = parse_point(v);
  else if (key == "slice.dir_u") c.slice.dir_u = parse_point(v);
  else if (key == "slice.dir_v") c.slice.dir_v = parse_point(v);
  else if (key == "slice.half_width_u") c.slice.half_width_u = parse_double(v);
  else if (key == "slice.half_width_v") c.slice.half_width_v = parse_double(v);
  else if (key == "slice.res_u") c.slice.res_u = as_int(2);
  else if (key == "slice.res_v") c.slice.res_v = as_int(2);
  else if (key == "field") c.field = field_name(parse_field(v));
  else if (key == "green.max_iters") c.green_max_iters = as_int(1);
  else if (key == "green.tol") c.green_tol = parse_double(v);
  else if (key == "steps") c.steps = as_int(6);
  else if (key == "epsilon") c.epsilon = parse_double(v);
  else if (key == "norm_floor") c.norm_floor = parse_double(v);
  else if (key == "k.budget") c.k_budget = as_int(2);
  else if (key == "k.radius") c.k_radius = parse_double(v);
  else if (key == "seeds") c.seeds = v;
  else if (key == "n_max") c.n_max = as_int(1);
  else if (key == "samples") c.samples = as_int(1);
  else if (key == "segment.a") c.segment_a = parse_point(v);
  else if (key == "segment.b") c.segment_b = parse_point(v);
  else if (key == "standard_segments") c.standard_segments = parse_bool(v);
  else if (key == "subdivisions") c.subdivisions = as_int(1);
  else if (key == "budget") c.budget = as_int(1);
  else if (key == "rate_tol") c.rate_tol = parse_double(v);
  else if (key == "persist") c.persist = as_int(1);
  else if (key == "sweep_eps") c.sweep_eps = v;
  else if (key == "c3auto_version") {
  } else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::vector<std::string> lines;
  bool embedded = false;
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("#! ", 0) == 0) embedded = true;
      lines.push_back(line);
    }
  }
  for (std::string line : lines) {
    if (embedded) {
      if (line.rfind("#! ", 0) != 0) continue;
      line = line.substr(3);
    }
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    set_key(base, trim(line.substr(0, eq)), unquote(trim(line.substr(eq + 1))));
  }
  return base;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

RenderGrid render_grid(const RunConfig& cfg, Field field) {
  cfg.slice.validate();
  const Params p = cfg.params();
  if (field == Field::Phi && !(std::abs(p.d()) > 1.0))
    throw std::invalid_argument("the phi field needs |d| > 1");
  GreenOptions gopts;
  gopts.max_iters = cfg.green_max_iters;
  gopts.tol = cfg.green_tol;
  WedgeParams w{cfg.epsilon, cfg.norm_floor};
  const double k_radius = cfg.k_radius > 0.0 ? cfg.k_radius : 10.0 * default_bounded_radius(p);

  RenderGrid g;
  g.width = cfg.slice.res_u;
  g.height = cfg.slice.res_v;
  const size_t n = static_cast<size_t>(g.width) * static_cast<size_t>(g.height);
  g.value.assign(n, kNaN);
  g.status.assign(n, "unresolved");

  auto eval = [&](const AffinePoint& q, double& value, std::string& status) {
    auto green = [&](Direction dir, double& v) {
      const GreenResult r = green_value(p, q, dir, gopts);
      v = r.value;
      return r.resolved;
    };
    switch (field) {
      case Field::GreenPlus:
      case Field::GreenMinus: {
        double v = 0.0;
        if (green(field == Field::GreenPlus ? Direction::Forward : Direction::Backward, v)) {
          value = v;
          status = "ok";
        }
        return;
      }
      case Field::MinGreen: {
        double gp = 0.0, gm = 0.0;
        const bool rp = green(Direction::Forward, gp), rm = green(Direction::Backward, gm);
        if (rp && rm) {
          value = std::min(gp, gm);
          status = "ok";
        }
        return;
      }
      case Field::Phi: {
        const PhiResult r = phi_infinity(p, q);
        value = r.value;
        status = r.kind == PhiValueKind::Finite        ? "ok"
                 : r.regime == PhiRegime::OnK          ? "neg_infinity"
                 : r.regime == PhiRegime::SuperEscape  ? "undefined"
                                                       : "unresolved";
        return;
      }
      case Field::EscapeClass: {
        const KVerdict k = k_membership(p, q, k_radius, cfg.k_budget);
        if (k == KVerdict::InK) {
          value = 0.0;
          status = "ok";
          return;
        }
        if (k == KVerdict::Unresolved) return;
        try {
          const Itinerary it = itinerary(p, q, cfg.steps, w);
          if (it.super_escape) {
            value = 3.0;
            status = "ok";
          } else if (it.period == Period::P3) {
            value = 1.0;
            status = "ok";
          } else if (it.period == Period::P5) {
            value = 2.0;
            status = "ok";
          }
        } catch (const OverflowGuardError&) {
        }
        return;
      }
    }
  };

  parallel_for(g.height, cfg.threads, [&](int j) {
    for (int i = 0; i < g.width; ++i) {
      const size_t idx = static_cast<size_t>(j) * static_cast<size_t>(g.width) + static_cast<size_t>(i);
      eval(cfg.slice.pixel(i, j), g.value[idx], g.status[idx]);
    }
  });
  return g;
}

RenderOutput run_render(const RunConfig& cfg, Field field) {
  const RenderGrid g = render_grid(cfg, field);
  const fs::path dir = out_dir(cfg);
  const std::string stem = field_name(field);
  RenderOutput out{dir / (stem + ".pgm"), dir / (stem + ".json"), dir / (stem + ".csv"), 0};

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (size_t k = 0; k < g.value.size(); ++k) {
    if (g.status[k] == "ok" && std::isfinite(g.value[k])) {
      lo = std::min(lo, g.value[k]);
      hi = std::max(hi, g.value[k]);
    } else if (g.status[k] == "unresolved") {
      ++out.unresolved;
    }
  }
  const bool any = lo <= hi;
  auto level = [&](size_t k) -> unsigned {
    if (g.status[k] != "ok" || !std::isfinite(g.value[k])) return 0;
    if (!(hi > lo)) return 1;
    return 1u + static_cast<unsigned>(std::lround((g.value[k] - lo) / (hi - lo) * 65534.0));
  };

  std::string pgm = "P5\n" + embedded_header(cfg, "# ") + std::to_string(g.width) + " " +
                    std::to_string(g.height) + "\n65535\n";
  for (size_t k = 0; k < g.value.size(); ++k) {
    const unsigned v = level(k);
    pgm += static_cast<char>((v >> 8) & 0xff);
    pgm += static_cast<char>(v & 0xff);
  }
  write_file(out.pgm, pgm);

  std::string csv = embedded_header(cfg, "#! ") + "i,j,value,status\r\n";
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      const size_t k = static_cast<size_t>(j) * static_cast<size_t>(g.width) + static_cast<size_t>(i);
      std::string v;
      if (g.status[k] == "unresolved") v = "-1";
      else if (g.status[k] == "neg_infinity") v = "-inf";
      else if (g.status[k] == "undefined") v = "nan";
      else v = num(g.value[k]);
      csv += std::to_string(i) + "," + std::to_string(j) + "," + v + "," + g.status[k] + "\r\n";
    }
  }
  write_file(out.csv, csv);

  json side = {
      {"c3auto_version", kVersion},
      {"field", stem},
      {"width", g.width},
      {"height", g.height},
      {"value_min", any ? json(lo) : json(nullptr)},
      {"value_max", any ? json(hi) : json(nullptr)},
      {"mapping", "pgm = 1 + round((value - value_min) / (value_max - value_min) * 65534); "
                  "pgm = 1 when value_max == value_min; pgm = 0 for pixels whose status is not ok"},
      {"unresolved_pixels", out.unresolved},
      {"config", config_json(cfg)},
  };
  write_file(out.json, side.dump(2) + "\n");
  return out;
}

std::vector<fs::path> run_report(const RunConfig& cfg, ReportKind kind) {
  const fs::path dir = out_dir(cfg);
  const Params p = cfg.params();
  std::vector<fs::path> files;
  switch (kind) {
    case ReportKind::Degrees: {
      const PullbackSpectrum sp = pullback_spectrum();
      const DynamicalDegrees dd = dynamical_degrees();
      const ClassVolume vol = invariant_class_volume();
      json j = {
          {"c3auto_version", kVersion},
          {"config", config_json(cfg)},
          {"pullback_matrix", {{sp.matrix.m[0][0], sp.matrix.m[0][1]}, {sp.matrix.m[1][0], sp.matrix.m[1][1]}}},
          {"spectral_radius", sp.lambda_plus},
          {"lambda_minus", sp.lambda_minus},
          {"leading_eigenvector", {sp.leading.h, sp.leading.e}},
          {"dynamical_degrees", {dd.lambda1, dd.lambda2, dd.lambda3}},
          {"cohomologically_hyperbolic", !dd.not_cohomologically_hyperbolic},
          {"invariant_class_volume", vol.value},
          {"invariant_class_volume_golden_form", vol.golden_form},
      };
      std::string csv = embedded_header(cfg, "#! ") + "n,deg_x,deg_y,deg_z,max\r\n";
      std::vector<DegreeTriple> seq;
      try {
        seq = degree_sequence(p, cfg.n_max);
        j["degree_sequence_complete"] = true;
      } catch (const TermExplosion& ex) {
        // The closed-form spectrum above does not depend on the expansion.
        seq = ex.completed;
        j["degree_sequence_complete"] = false;
        j["degree_sequence_error"] = ex.what();
      }
      for (size_t i = 0; i < seq.size(); ++i)
        csv += std::to_string(i + 1) + "," + std::to_string(seq[i].x) + "," + std::to_string(seq[i].y) +
               "," + std::to_string(seq[i].z) + "," + std::to_string(seq[i].max()) + "\r\n";
      files.push_back(dir / "degrees.json");
      files.push_back(dir / "degrees.csv");
      write_file(files[0], j.dump(2) + "\n");
      write_file(files[1], csv);
      break;
    }
    case ReportKind::AtlasVerify: {
      const FlowReport fr = verify_infinity_flow(p, cfg.samples, cfg.seed);
      const CommutationReport cr = check_commutation(p, cfg.samples, cfg.seed);
      json j = {
          {"c3auto_version", kVersion},
          {"config", config_json(cfg)},
          {"flow",
           {{"hinf_samples", fr.hinf_samples},
            {"hinf_to_pminus", fr.hinf_to_pminus},
            {"e_samples", fr.e_samples},
            {"e_to_ldoubleprime", fr.e_to_ldoubleprime},
            {"ldoubleprime_to_pminus", fr.ldoubleprime_to_pminus},
            {"max_hinf_distance", fr.max_hinf_distance},
            {"max_ldoubleprime_residual", fr.max_ldoubleprime_residual},
            {"max_second_distance", fr.max_second_distance},
            {"all_pass", fr.all_pass()}}},
          {"commutation",
           {{"samples", cr.samples}, {"skipped", cr.skipped}, {"p50", cr.p50}, {"p99", cr.p99}, {"max", cr.max}}},
          {"intersection_count", intersection_count(p)},
      };
      files.push_back(dir / "atlas.json");
      write_file(files[0], j.dump(2) + "\n");
      break;
    }
    case ReportKind::FindW: {
      const LinearEscapeOptions opts = finder_options(cfg);
      std::string csv = embedded_header(cfg, "#! ") +
                        "segment,x_re,x_im,y_re,y_im,z_re,z_im,rate,verified_blocks,last_verified_norm,"
                        "reverified\r\n";
      std::string log;
      const auto segs = finder_segments(cfg);
      for (size_t s = 0; s < segs.size(); ++s) {
        const LinearEscapeSearch r = find_linear_escape(p, segs[s].a, segs[s].b, opts);
        log += "segment " + std::to_string(s) + " a=" + format_point(segs[s].a) + " b=" + format_point(segs[s].b) + "\n";
        for (const auto& line : r.log) log += "  " + line + "\n";
        for (const auto& c : r.candidates) {
          const RateVerification v = verify_linear_rate(p, c.point, opts);
          const bool ok = v.kind == ProbeClass::Linear &&
                          std::abs(v.rate - std::abs(p.d())) <= opts.rate_tol * std::abs(p.d());
          csv += std::to_string(s) + "," + num(c.point.x.real()) + "," + num(c.point.x.imag()) + "," +
                 num(c.point.y.real()) + "," + num(c.point.y.imag()) + "," + num(c.point.z.real()) + "," +
                 num(c.point.z.imag()) + "," + num(c.rate) + "," + std::to_string(c.verified_blocks) + "," +
                 num(c.last_verified_norm) + "," + (ok ? "true" : "false") + "\r\n";
        }
      }
      files.push_back(dir / "find_w.csv");
      files.push_back(dir / "find_w_log.txt");
      write_file(files[0], csv);
      write_file(files[1], embedded_header(cfg, "#! ") + log);
      break;
    }
    case ReportKind::PhiSweep: {
      const double d_abs = std::abs(p.d());
      std::string csv = embedded_header(cfg, "#! ") +
                        "epsilon,sigma_10,sigma_20,sigma_40,sigma_80,tail_bound_80,c_eps\r\n";
      for (const auto& tok : split(cfg.sweep_eps, ',')) {
        const double eps = parse_double(tok);
        auto guarded = [&](const std::function<double()>& fn) {
          try {
            return num(fn());
          } catch (const std::invalid_argument&) {
            return std::string("nan");
          }
        };
        csv += num(eps);
        for (int n : {10, 20, 40, 80}) csv += "," + guarded([&] { return sigma_n_eps(d_abs, eps, n); });
        csv += "," + guarded([&] { return sigma_tail_bound(d_abs, eps, 80); });
        csv += "," + guarded([&] { return c_eps(d_abs, eps); }) + "\r\n";
      }
      files.push_back(dir / "phi_sweep.csv");
      write_file(files[0], csv);
      break;
    }
  }
  return files;
}

fs::path run_classify(const RunConfig& cfg) {
  const Params p = cfg.params();
  const auto seeds = load_seeds(cfg);
  const WedgeParams w{cfg.epsilon, cfg.norm_floor};
  const double k_radius = cfg.k_radius > 0.0 ? cfg.k_radius : 10.0 * default_bounded_radius(p);
  std::vector<std::string> lines(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), cfg.threads, [&](int i) {
    const AffinePoint& q = seeds[static_cast<size_t>(i)];
    json rec = {{"seed", point_json(q)}};
    const KVerdict k = k_membership(p, q, k_radius, cfg.k_budget);
    if (k != KVerdict::Escapes) {
      rec["status"] = k_verdict_name(k);
      rec["period"] = nullptr;
      rec["rate"] = nullptr;
      rec["itinerary"] = "";
    } else {
      try {
        const Itinerary it = itinerary(p, q, cfg.steps, w);
        std::string syms;
        for (auto s : it.symbols) syms += std::string(syms.empty() ? "" : " ") + symbol_name(s);
        rec["status"] = it.super_escape ? "super_escape" : "escaping";
        rec["period"] = period_name(it.period);
        rec["rate"] = it.rate_estimate;
        rec["itinerary"] = syms;
      } catch (const OverflowGuardError&) {
        rec["status"] = "overflow_guard";
        rec["period"] = nullptr;
        rec["rate"] = nullptr;
        rec["itinerary"] = "";
      }
    }
    lines[static_cast<size_t>(i)] = rec.dump();
  });
  std::string out = json({{"config", config_json(cfg)}, {"c3auto_version", kVersion}}).dump() + "\n";
  for (const auto& l : lines) out += l + "\n";
  const fs::path path = out_dir(cfg) / "classify.ndjson";
  write_file(path, out);
  return path;
}

fs::path run_phi(const RunConfig& cfg) {
  const Params p = cfg.params();
  if (!(std::abs(p.d()) > 1.0)) throw std::invalid_argument("phi needs |d| > 1");
  std::vector<AffinePoint> seeds;
  if (!cfg.seeds.empty()) {
    seeds = load_seeds(cfg);
  } else {
    // Without a seeds file, report on the linear escape candidates.
    const LinearEscapeOptions opts = finder_options(cfg);
    for (const auto& s : finder_segments(cfg))
      for (const auto& c : find_linear_escape(p, s.a, s.b, opts).candidates) seeds.push_back(c.point);
  }
  std::vector<std::string> lines(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), cfg.threads, [&](int i) {
    const AffinePoint& q = seeds[static_cast<size_t>(i)];
    const PhiResult r = phi_infinity(p, q);
    json rec = {{"seed", point_json(q)}, {"regime", phi_regime_name(r.regime)}, {"n_used", r.n_used}};
    json psi = json::array();
    for (double v : r.psi) psi.push_back(v);
    rec["psi"] = psi;
    rec["phi"] = r.kind == PhiValueKind::Finite ? json(r.value)
                 : r.kind == PhiValueKind::NegInfinity ? json("-inf")
                                                       : json(nullptr);
    rec["cocycle_defect"] = nullptr;
    rec["asymptotic_defect"] = nullptr;
    if (r.kind == PhiValueKind::Finite) {
      rec["asymptotic_defect"] = r.value - std::max(0.0, std::log(q.norm()));
      try {
        const AffinePoint f3 = apply(p, apply(p, apply(p, q)));
        const PhiResult r3 = phi_infinity(p, f3);
        if (r3.kind == PhiValueKind::Finite) rec["cocycle_defect"] = r3.value - r.value - p.log_abs_d();
      } catch (const OverflowGuardError&) {
      }
    }
    lines[static_cast<size_t>(i)] = rec.dump();
  });
  std::string out = json({{"config", config_json(cfg)}, {"c3auto_version", kVersion}}).dump() + "\n";
  for (const auto& l : lines) out += l + "\n";
  const fs::path path = out_dir(cfg) / "phi.ndjson";
  write_file(path, out);
  return path;
}

}  // namespace c3auto::app
