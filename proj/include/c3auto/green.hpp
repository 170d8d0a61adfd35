#pragma once

#include <functional>

#include "c3auto/core_map.hpp"

namespace c3auto {

// log|x|, log|y|, log|z| once the orbit has left double range.
struct LogTriple {
  double lx = 0.0, ly = 0.0, lz = 0.0;
  bool phase_lost = true;
};

// Orbit stepper that iterates f (or f^-1) directly while values are
// representable and switches to the log-magnitude recursion
// (lx,ly,lz) <- (ly, lz, ly+lz) once the quadratic term dominates the
// third coordinate by a factor 1e4. The dropped log|1+delta| is tracked as
// an uncertainty on the log coordinates.
class LogOrbit {
 public:
  LogOrbit(const Params& p, const AffinePoint& q, Direction dir = Direction::Forward,
           double switch_norm = 1e100);

  // Throws OverflowGuardError if the orbit outgrows doubles without dominance.
  void step();

  int steps() const { return steps_; }
  bool surrogate() const { return surrogate_; }
  // Dominance that is preserved by all further iterates.
  bool dominant() const;
  double log_norm() const;
  double potential() const;
  LogTriple logs() const;
  // Bound on the error of each stored log coordinate.
  double log_uncertainty() const;
  const AffinePoint& point() const;

 private:
  double dominance_delta_bound() const;
  void enter_surrogate();

  const Params* p_;
  Direction dir_;
  double switch_norm_;
  double dominance_radius_;
  AffinePoint q_;
  LogTriple l_;
  double ux_ = 0.0, uy_ = 0.0, uz_ = 0.0;
  bool surrogate_ = false;
  int steps_ = 0;
};

inline constexpr double kDominanceMargin = 1e-4;

// 10 (1 + |b| + |c| + |d| + |e|).
double default_bounded_radius(const Params& p);

double potential_u(const Params& p, const AffinePoint& q);
double potential_v(const AffinePoint& q);
double potential_total(const Params& p, const AffinePoint& q);

enum class GreenMode { DirectIteration, LogSurrogate, ConvergedZero };

const char* green_mode_name(GreenMode m);

struct GreenOptions {
  int max_iters = 200;
  double tol = 1e-13;
  double bounded_radius = 0.0;  // 0 selects default_bounded_radius
  int min_iters = 0;            // never stop before this many steps
  double positivity_threshold = 1e-8;
};

struct GreenResult {
  double value = 0.0;
  int iterations = 0;
  GreenMode mode = GreenMode::DirectIteration;
  double error_bound = 0.0;
  bool resolved = false;
};

GreenResult green_value(const Params& p, const AffinePoint& q, Direction dir,
                        const GreenOptions& opts = {});

enum class BasinVerdict { InBasin, NotInBasin, Unresolved };

const char* basin_verdict_name(BasinVerdict v);

BasinVerdict basin_membership(const Params& p, const AffinePoint& q, const GreenOptions& opts = {},
                              Direction dir = Direction::Forward);

// [g(h) + g(-h) + g(ih) + g(-ih) - 4 g(0)] / h^2
double complex_line_laplacian(const std::function<double(cplx)>& g, double h);

// max(1e-4, 1e-6 |q|)
double default_fd_step(const AffinePoint& q);

// Laplacian of t -> G+(q + t dir) at t = 0. Every evaluation runs at least
// 60 steps so all five stencil points stop at the same iterate.
double pluriharmonic_defect(const Params& p, const AffinePoint& q, const AffinePoint& dir, double h,
                            GreenOptions opts = {});

}  // namespace c3auto
