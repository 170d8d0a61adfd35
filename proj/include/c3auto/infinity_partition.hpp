#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "c3auto/core_map.hpp"

namespace c3auto {

enum class InfinitySymbol { Aplus, Aminus, Cpoint, Bpair, None };

const char* symbol_name(InfinitySymbol s);
// Exchanges A+ and A- (the effect of tau on the infinity points).
InfinitySymbol mirror(InfinitySymbol s);

struct WedgeParams {
  double epsilon = 0.05;
  double norm_floor = 1e3;
};

class BelowFloor : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PremiseError : public std::runtime_error {
 public:
  explicit PremiseError(const std::string& what) : std::runtime_error(what) {}
};

// Left side over right side of each wedge inequality; a point lies in a
// wedge at level eps when the ratio is < eps.
//   A+ : |yz + by + cz| / |dx|
//   A- : |xy + bx + cy| / |dz|
//   C  : |xz + by + cz| / |dy|
//   B  : |y| / min(|x|,|z|), +inf unless |x|,|z| > floor and |x|/|z| in [1/10, 10]
struct WedgeRatios {
  double a_plus, a_minus, c, b;
};

WedgeRatios wedge_ratios(const Params& p, const AffinePoint& q, double norm_floor);

// Unique symbol at level w.epsilon. Overlaps are resolved by halving eps;
// if the overlap empties, the highest priority (A+ > A- > C) of the last
// overlap wins; an overlap that survives 8 halvings gives None.
InfinitySymbol wedge_membership(const Params& p, const AffinePoint& q, const WedgeParams& w);

enum class Period { P3, P5, Aperiodic, TooShort };

const char* period_name(Period p);

struct Itinerary {
  std::vector<InfinitySymbol> symbols;  // from the first iterate above the floor
  int first_symbol_step = -1;
  Period period = Period::TooShort;
  double rate_estimate = 0.0;  // per f^3
  std::vector<double> block_ratios;
  bool super_escape = false;
  int steps_taken = 0;
};

// Backward itineraries run forward on the conjugate family member of f^-1
// and mirror the symbols.
Itinerary itinerary(const Params& p, const AffinePoint& q, int steps, const WedgeParams& w,
                    Direction dir = Direction::Forward);

Period detect_period(const std::vector<InfinitySymbol>& symbols);

// Envelope factors |d| -+ eps / (|d| - eps)^(i-1).
double envelope_term(double d_abs, double eps, int i);

struct EnvelopeBounds {
  std::vector<double> log_lower;  // index k-1 holds sum_{i<=k} log(|d| - term_i)
  std::vector<double> log_upper;
};

EnvelopeBounds envelope_log_bounds(double d_abs, double eps, int n);

// sigma_{n,eps} = sum log(|d| + term_i) - sum log(|d| - term_i)
double sigma_n_eps(double d_abs, double eps, int n);
// Bound on sigma_{inf,eps} - sigma_{n,eps}.
double sigma_tail_bound(double d_abs, double eps, int n);
// c_eps = lim sigma_{n,eps}
double c_eps(double d_abs, double eps);

struct EnvelopeReport {
  std::vector<double> margins;  // per f^3 step, negative means violated
  int first_violation = -1;     // 1-based step, -1 if none
  bool holds() const { return first_violation < 0; }
};

// Checks ||p||_+ prod(|d| - term_i) <= ||f^{3k}(p)||_+ <= ||p||_+ prod(|d| + term_i)
// for k = 1..n. PremiseError unless every visited point is in the A+/A-/C
// wedges above the norm floor.
EnvelopeReport growth_envelope_check(const Params& p, const AffinePoint& q, const WedgeParams& w,
                                     int n);

struct LinearEscapeOptions {
  int subdivisions = 32;
  int max_bisections = 200;
  int newton_rounds = 80;
  int max_starts = 6;
  int budget = 600;          // map applications per orbit probe
  double rate_tol = 0.01;    // relative to |d|
  int persist = 8;           // consecutive f^3 blocks; phi needs 5 at q and at f^3(q)
  double wedge_epsilon = 0.05;
  double norm_floor = 0.0;   // 0 selects the bounded radius
  int threads = 1;
};

struct LinearEscapeCandidate {
  AffinePoint point;
  double rate = 0.0;
  int verified_blocks = 0;
  double last_verified_norm = 0.0;
};

struct LinearEscapeSearch {
  std::vector<LinearEscapeCandidate> candidates;
  std::vector<std::string> log;
  bool found() const { return !candidates.empty(); }
};

enum class ProbeClass { Bounded, Linear, Super, Unresolved };

const char* probe_class_name(ProbeClass c);

struct RateVerification {
  ProbeClass kind = ProbeClass::Unresolved;
  int verified_blocks = 0;
  double rate = 0.0;
  double last_verified_norm = 0.0;
};

// Longest run of consecutive f^3 ratios within rate_tol of |d| once the
// orbit is above the floor.
RateVerification verify_linear_rate(const Params& p, const AffinePoint& q,
                                    const LinearEscapeOptions& opts);

// Scans the segment, bisects between bounded and escaping samples, and
// runs Newton continuation on the first wedge violation of each promising
// sample. Returned points re-verify their linear rate. An empty list is the
// not-found outcome.
LinearEscapeSearch find_linear_escape(const Params& p, const AffinePoint& a, const AffinePoint& b,
                                      const LinearEscapeOptions& opts = {});

struct Segment {
  AffinePoint a, b;
};

// Segments in y inside {|x| < eps, |y| < eps^2} with |z| large, at several
// scales of x.
std::vector<Segment> standard_wedge_segments(double eps);

}  // namespace c3auto
