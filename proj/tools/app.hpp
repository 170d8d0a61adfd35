#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "c3auto/core_map.hpp"

namespace c3auto::app {

inline constexpr const char* kVersion = "0.1.0";

struct SliceSpec {
  AffinePoint anchor{};
  AffinePoint dir_u{1.0, 0.0, 0.0};
  AffinePoint dir_v{0.0, 1.0, 0.0};
  double half_width_u = 2.0;
  double half_width_v = 2.0;
  int res_u = 64;
  int res_v = 64;

  // Pixel (i, j): anchor + s_i dir_u + t_j dir_v, s and t affine in i and j.
  AffinePoint pixel(int i, int j) const;
  void validate() const;
};

enum class Field { GreenPlus, GreenMinus, MinGreen, Phi, EscapeClass };

const char* field_name(Field f);
Field parse_field(const std::string& s);

enum class ReportKind { Degrees, AtlasVerify, FindW, PhiSweep };

struct RunConfig {
  cplx b{0.0}, c{0.0}, d{2.0}, e{0.0};
  int threads = 1;
  std::uint64_t seed = 1;
  std::string out = "out";

  SliceSpec slice;
  std::string field = "green_plus";
  int green_max_iters = 200;
  double green_tol = 1e-13;

  int steps = 60;  // itinerary length for classify and escape_class
  double epsilon = 0.05;
  double norm_floor = 1e3;
  int k_budget = 600;
  double k_radius = 0.0;  // 0 selects 10 R_K
  std::string seeds;      // CSV of seeds; empty means the slice grid

  int n_max = 10;
  int samples = 1000;

  AffinePoint segment_a{}, segment_b{};
  bool standard_segments = true;
  int subdivisions = 32;
  int budget = 600;
  double rate_tol = 0.01;
  int persist = 8;

  std::string sweep_eps = "0.2,0.1,0.05,0.01";

  Params params() const;
  // key = "value" lines, one key per line, in a fixed order.
  std::string serialize() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads "key = value" lines. If the text holds lines starting with "#! ",
// only those are read, so any output file with an embedded config loads.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
// Applies one key; throws ConfigError on unknown keys or malformed values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

std::string format_complex(cplx v);
cplx parse_complex(const std::string& s);
std::string format_point(const AffinePoint& q);
AffinePoint parse_point(const std::string& s);

struct RenderOutput {
  std::filesystem::path pgm, json, csv;
  int unresolved = 0;
};

RenderOutput run_render(const RunConfig& cfg, Field field);

// Raw per-pixel values, row j outer, i inner. Unresolved pixels hold NaN
// in value and a status string other than "ok".
struct RenderGrid {
  int width = 0, height = 0;
  std::vector<double> value;
  std::vector<std::string> status;
};

RenderGrid render_grid(const RunConfig& cfg, Field field);

std::vector<std::filesystem::path> run_report(const RunConfig& cfg, ReportKind kind);

// NDJSON records per seed.
std::filesystem::path run_classify(const RunConfig& cfg);
std::filesystem::path run_phi(const RunConfig& cfg);

}  // namespace c3auto::app
