#include "c3auto/infinity_partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "c3auto/green.hpp"
#include "c3auto/parallel.hpp"

namespace c3auto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(double num, double den) { return den > 0.0 ? num / den : kInf; }

bool in_wedge(double r, double eps) { return r < eps; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(m), v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(m));
  return 0.5 * (lo + hi);
}

}  // namespace

const char* symbol_name(InfinitySymbol s) {
  switch (s) {
    case InfinitySymbol::Aplus: return "A+";
    case InfinitySymbol::Aminus: return "A-";
    case InfinitySymbol::Cpoint: return "C";
    case InfinitySymbol::Bpair: return "B";
    case InfinitySymbol::None: return "-";
  }
  return "?";
}

InfinitySymbol mirror(InfinitySymbol s) {
  if (s == InfinitySymbol::Aplus) return InfinitySymbol::Aminus;
  if (s == InfinitySymbol::Aminus) return InfinitySymbol::Aplus;
  return s;
}

WedgeRatios wedge_ratios(const Params& p, const AffinePoint& q, double norm_floor) {
  const cplx b = p.b(), c = p.c(), d = p.d();
  const cplx x = q.x, y = q.y, z = q.z;
  WedgeRatios r{};
  r.a_plus = ratio(std::abs(y * z + b * y + c * z), std::abs(d * x));
  r.a_minus = ratio(std::abs(x * y + b * x + c * y), std::abs(d * z));
  // Middle terms as displayed for the C wedge, see the notes in the README.
  r.c = ratio(std::abs(x * z + b * y + c * z), std::abs(d * y));
  const double ax = std::abs(x), az = std::abs(z);
  r.b = kInf;
  if (ax > norm_floor && az > norm_floor && ax <= 10.0 * az && az <= 10.0 * ax)
    r.b = std::abs(y) / std::min(ax, az);
  return r;
}

InfinitySymbol wedge_membership(const Params& p, const AffinePoint& q, const WedgeParams& w) {
  if (!(w.epsilon > 0.0) || !(w.epsilon < std::abs(p.d())))
    throw std::invalid_argument("wedge epsilon must lie in (0, |d|)");
  if (q.norm() < w.norm_floor) throw BelowFloor("point is below the wedge norm floor");
  const WedgeRatios r = wedge_ratios(p, q, w.norm_floor);
  const std::array<std::pair<double, InfinitySymbol>, 3> ranked{{
      {r.a_plus, InfinitySymbol::Aplus},
      {r.a_minus, InfinitySymbol::Aminus},
      {r.c, InfinitySymbol::Cpoint},
  }};
  double eps = w.epsilon;
  InfinitySymbol previous_top = InfinitySymbol::None;
  for (int level = 0; level <= 8; ++level) {
    int hits = 0;
    InfinitySymbol top = InfinitySymbol::None;
    for (const auto& [v, s] : ranked) {
      if (in_wedge(v, eps)) {
        if (hits == 0) top = s;
        ++hits;
      }
    }
    if (hits == 1) return top;
    if (hits == 0) {
      if (level > 0) return previous_top;
      return r.b <= w.epsilon ? InfinitySymbol::Bpair : InfinitySymbol::None;
    }
    previous_top = top;
    eps *= 0.5;
  }
  return InfinitySymbol::None;
}

const char* period_name(Period p) {
  switch (p) {
    case Period::P3: return "P3";
    case Period::P5: return "P5";
    case Period::Aperiodic: return "aperiodic";
    case Period::TooShort: return "too_short";
  }
  return "?";
}

Period detect_period(const std::vector<InfinitySymbol>& symbols) {
  using S = InfinitySymbol;
  static const std::vector<S> cycle3{S::Aplus, S::Aminus, S::Cpoint};
  static const std::vector<S> cycle5{S::Aplus, S::Aminus, S::Cpoint, S::Bpair, S::Cpoint};
  // Length of the longest suffix that follows the cycle from some phase.
  auto suffix_len = [&](const std::vector<S>& cyc) {
    const size_t n = symbols.size(), m = cyc.size();
    size_t best = 0;
    for (size_t phase = 0; phase < m; ++phase) {
      size_t len = 0;
      // symbols[n-1-k] must equal cyc[(phase - k) mod m]
      while (len < n && symbols[n - 1 - len] == cyc[(phase + m * n - len) % m]) ++len;
      best = std::max(best, len);
    }
    return best;
  };
  if (suffix_len(cycle5) >= 10) return Period::P5;
  if (suffix_len(cycle3) >= 6) return Period::P3;
  return symbols.size() < 6 ? Period::TooShort : Period::Aperiodic;
}

Itinerary itinerary(const Params& p, const AffinePoint& q, int steps, const WedgeParams& w,
                    Direction dir) {
  if (steps < 6) throw std::invalid_argument("itinerary needs at least 6 steps");
  if (dir == Direction::Backward) {
    const InverseConjugacy ic = inverse_as_family(p);
    const AffinePoint start = (1.0 / ic.scale) * tau(q);
    WedgeParams wh = w;
    // Wedges of h are tested on scaled points; keep eps admissible for |d_h| = 1/|d|.
    wh.epsilon = std::min(w.epsilon, 0.5 * std::abs(ic.params.d()));
    Itinerary it = itinerary(ic.params, start, steps, wh, Direction::Forward);
    for (auto& s : it.symbols) s = mirror(s);
    return it;
  }
  Itinerary it;
  LogOrbit orb(p, q, Direction::Forward, kInf);
  std::vector<double> norms;
  for (int i = 0;; ++i) {
    const AffinePoint& cur = orb.point();
    const double nrm = cur.norm();
    norms.push_back(nrm);
    if (it.first_symbol_step < 0 && nrm >= w.norm_floor) it.first_symbol_step = i;
    if (it.first_symbol_step >= 0)
      it.symbols.push_back(nrm >= w.norm_floor ? wedge_membership(p, cur, w) : InfinitySymbol::None);
    if (i == steps) break;
    if (orb.dominant()) {
      it.super_escape = true;
      break;
    }
    orb.step();
    it.steps_taken = i + 1;
  }
  for (size_t k = 0; k + 3 < norms.size(); k += 3)
    if (norms[k] > 0.0) it.block_ratios.push_back(norms[k + 3] / norms[k]);
  const size_t n = it.block_ratios.size();
  const size_t tail = std::min(n, std::max<size_t>(5, n / 4));
  it.rate_estimate =
      median(std::vector<double>(it.block_ratios.end() - static_cast<long>(tail), it.block_ratios.end()));
  it.period = it.super_escape ? Period::Aperiodic : detect_period(it.symbols);
  return it;
}

double envelope_term(double d_abs, double eps, int i) {
  return eps / std::pow(d_abs - eps, i - 1);
}

EnvelopeBounds envelope_log_bounds(double d_abs, double eps, int n) {
  if (!(eps > 0.0) || !(eps < d_abs)) throw std::invalid_argument("need 0 < eps < |d|");
  EnvelopeBounds b;
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = envelope_term(d_abs, eps, i);
    if (!(d_abs - t > 0.0)) throw std::invalid_argument("envelope factor |d| - term is not positive");
    lo += std::log(d_abs - t);
    hi += std::log(d_abs + t);
    b.log_lower.push_back(lo);
    b.log_upper.push_back(hi);
  }
  return b;
}

double sigma_n_eps(double d_abs, double eps, int n) {
  if (!(eps > 0.0) || !(eps < d_abs)) throw std::invalid_argument("need 0 < eps < |d|");
  double s = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double u = envelope_term(d_abs, eps, i) / d_abs;
    if (!(u < 1.0)) throw std::invalid_argument("envelope factor |d| - term is not positive");
    s += std::log1p(u) - std::log1p(-u);
  }
  return s;
}

double sigma_tail_bound(double d_abs, double eps, int n) {
  const double q = 1.0 / (d_abs - eps);
  if (!(q < 1.0)) return kInf;
  const double u = envelope_term(d_abs, eps, n + 1) / d_abs;
  if (!(u < 1.0)) return kInf;
  // log((1+u)/(1-u)) <= 2u/(1-u), and the u_i decay geometrically with ratio q.
  return 2.0 * u / (1.0 - u) / (1.0 - q);
}

double c_eps(double d_abs, double eps) {
  if (!(d_abs - eps > 1.0)) throw std::invalid_argument("c_eps needs |d| - eps > 1");
  double s = 0.0;
  for (int i = 1; i <= 100000; ++i) {
    const double u = envelope_term(d_abs, eps, i) / d_abs;
    s += std::log1p(u) - std::log1p(-u);
    if (sigma_tail_bound(d_abs, eps, i) <= 1e-17 * std::max(1.0, s)) break;
  }
  return s;
}

EnvelopeReport growth_envelope_check(const Params& p, const AffinePoint& q, const WedgeParams& w,
                                     int n) {
  if (n < 1) throw std::invalid_argument("envelope check needs n >= 1");
  using S = InfinitySymbol;
  auto next_in_cycle = [](S s) {
    return s == S::Aplus ? S::Aminus : s == S::Aminus ? S::Cpoint : S::Aplus;
  };
  std::vector<double> norms;
  AffinePoint cur = q;
  S prev = S::None;
  for (int i = 0; i <= 3 * n; ++i) {
    if (i > 0) {
      try {
        cur = apply(p, cur);
      } catch (const OverflowGuardError&) {
        throw PremiseError("orbit exceeded the overflow guard at step " + std::to_string(i));
      }
    }
    if (cur.norm() < w.norm_floor)
      throw PremiseError("orbit point " + std::to_string(i) + " is below the norm floor");
    const S s = wedge_membership(p, cur, w);
    if (s != S::Aplus && s != S::Aminus && s != S::Cpoint)
      throw PremiseError("orbit point " + std::to_string(i) + " is outside the A+/A-/C wedges");
    if (i > 0 && s != next_in_cycle(prev))
      throw PremiseError("orbit breaks the A+ -> A- -> C cycle at step " + std::to_string(i));
    prev = s;
    norms.push_back(std::max(1.0, cur.norm()));
  }
  const EnvelopeBounds bounds = envelope_log_bounds(std::abs(p.d()), w.epsilon, n);
  EnvelopeReport rep;
  const double l0 = std::log(norms[0]);
  for (int k = 1; k <= n; ++k) {
    const double lk = std::log(norms[static_cast<size_t>(3 * k)]);
    const double margin = std::min(lk - (l0 + bounds.log_lower[static_cast<size_t>(k - 1)]),
                                   l0 + bounds.log_upper[static_cast<size_t>(k - 1)] - lk);
    rep.margins.push_back(margin);
    if (margin < 0.0 && rep.first_violation < 0) rep.first_violation = k;
  }
  return rep;
}

const char* probe_class_name(ProbeClass c) {
  switch (c) {
    case ProbeClass::Bounded: return "bounded";
    case ProbeClass::Linear: return "linear";
    case ProbeClass::Super: return "super";
    case ProbeClass::Unresolved: return "unresolved";
  }
  return "?";
}

namespace {

double floor_of(const Params& p, const LinearEscapeOptions& o) {
  return o.norm_floor > 0.0 ? o.norm_floor : default_bounded_radius(p);
}

}  // namespace

RateVerification verify_linear_rate(const Params& p, const AffinePoint& q,
                                    const LinearEscapeOptions& opts) {
  const double floor = floor_of(p, opts);
  const double d_abs = std::abs(p.d());
  LogOrbit orb(p, q, Direction::Forward, kInf);
  std::vector<double> norms{q.norm()};
  bool dominated = false, above = q.norm() >= floor;
  for (int i = 1; i <= opts.budget; ++i) {
    if (orb.dominant()) {
      dominated = true;
      break;
    }
    try {
      orb.step();
    } catch (const OverflowGuardError&) {
      break;
    }
    norms.push_back(orb.point().norm());
    above = above || norms.back() >= floor;
  }
  RateVerification v;
  int run = 0, best = 0;
  size_t best_end = 0;
  std::vector<double> ratios;
  for (size_t k = 0; k + 3 < norms.size(); k += 3) {
    const bool ok = norms[k] >= floor &&
                    std::abs(norms[k + 3] / norms[k] - d_abs) <= opts.rate_tol * d_abs;
    ratios.push_back(norms[k] > 0.0 ? norms[k + 3] / norms[k] : kInf);
    run = ok ? run + 1 : 0;
    if (run > best) {
      best = run;
      best_end = k / 3;
    }
  }
  v.verified_blocks = best;
  if (best > 0) {
    const size_t first = best_end + 1 - static_cast<size_t>(best);
    v.rate = median(std::vector<double>(ratios.begin() + static_cast<long>(first),
                                        ratios.begin() + static_cast<long>(best_end + 1)));
    v.last_verified_norm = norms[3 * (best_end + 1)];
  }
  if (best >= opts.persist) v.kind = ProbeClass::Linear;
  else if (dominated) v.kind = ProbeClass::Super;
  else if (!above) v.kind = ProbeClass::Bounded;
  else v.kind = ProbeClass::Unresolved;
  return v;
}

namespace {

// First wedge failure of an orbit together with the derivative of the
// nearest wedge's numerator along a tangent direction.
struct Probe {
  bool bounded = true;     // never above the floor within budget
  int failure = -1;        // step of the first point above the floor outside every wedge
  cplx target{}, dtarget{};
};

Probe probe(const Params& p, const AffinePoint& q, const AffinePoint& dir, double floor, double eps,
            int budget) {
  const cplx b = p.b(), c = p.c(), d = p.d();
  AffinePoint cur = q, dq = dir;
  Probe pr;
  for (int n = 0; n <= budget; ++n) {
    const double nrm = cur.norm();
    if (!cur.finite() || nrm > 1e140) {
      pr.bounded = false;
      return pr;
    }
    if (nrm >= floor) {
      pr.bounded = false;
      const WedgeRatios r = wedge_ratios(p, cur, floor);
      const std::array<double, 4> v{r.a_plus, r.a_minus, r.c, r.b};
      const size_t k = static_cast<size_t>(std::min_element(v.begin(), v.end()) - v.begin());
      if (!(v[k] < eps)) {
        const cplx x = cur.x, y = cur.y, z = cur.z;
        pr.failure = n;
        switch (k) {
          case 0:
            pr.target = y * z + b * y + c * z;
            pr.dtarget = (z + b) * dq.y + (y + c) * dq.z;
            break;
          case 1:
            pr.target = x * y + b * x + c * y;
            pr.dtarget = (y + b) * dq.x + (x + c) * dq.y;
            break;
          case 2:
            pr.target = x * z + b * y + c * z;
            pr.dtarget = z * dq.x + x * dq.z + b * dq.y + c * dq.z;
            break;
          default:
            pr.target = y;
            pr.dtarget = dq.y;
        }
        return pr;
      }
    }
    const AffinePoint ndq{dq.y, dq.z, (cur.z + b) * dq.y + (cur.y + c) * dq.z + d * dq.x};
    cur = apply_unchecked(p, cur);
    dq = ndq;
  }
  return pr;
}

// Orders failures: no failure at all beats any failure index.
int score(const Probe& pr) {
  if (pr.bounded) return -1;
  return pr.failure < 0 ? std::numeric_limits<int>::max() : pr.failure;
}

struct Start {
  AffinePoint point;
  int score;
  std::string origin;
};

}  // namespace

LinearEscapeSearch find_linear_escape(const Params& p, const AffinePoint& a, const AffinePoint& b,
                                      const LinearEscapeOptions& opts) {
  if (!(std::abs(p.d()) > 1.0)) throw std::invalid_argument("linear escape search needs |d| > 1");
  if (opts.subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
  const double floor = floor_of(p, opts);
  const double eps = opts.wedge_epsilon;
  const AffinePoint dir = b - a;
  LinearEscapeSearch out;
  if (!(dir.norm() > 0.0)) return out;
  auto at = [&](double t) { return a + cplx(t) * dir; };

  const int m = opts.subdivisions;
  std::vector<Probe> scan(static_cast<size_t>(m + 1));
  parallel_for(m + 1, opts.threads, [&](int i) {
    scan[static_cast<size_t>(i)] = probe(p, at(static_cast<double>(i) / m), dir, floor, eps, opts.budget);
  });
  std::vector<Start> starts;
  for (int i = 0; i <= m; ++i) {
    const Probe& pr = scan[static_cast<size_t>(i)];
    const double t = static_cast<double>(i) / m;
    out.log.push_back(fmt("scan t=%.6f", t) + " " +
                      (pr.bounded ? std::string("bounded")
                                  : "first_wedge_failure=" + std::to_string(pr.failure)));
    if (!pr.bounded) starts.push_back({at(t), score(pr), fmt("scan t=%.6f", t)});
  }
  // Bisect every bounded/escaping bracket toward the boundary of the bounded set.
  for (int i = 0; i < m; ++i) {
    const bool b0 = scan[static_cast<size_t>(i)].bounded, b1 = scan[static_cast<size_t>(i + 1)].bounded;
    if (b0 == b1) continue;
    double lo = static_cast<double>(b0 ? i : i + 1) / m;
    double hi = static_cast<double>(b0 ? i + 1 : i) / m;
    Probe esc = scan[static_cast<size_t>(b0 ? i + 1 : i)];
    int it = 0;
    for (; it < opts.max_bisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const Probe pr = probe(p, at(mid), dir, floor, eps, opts.budget);
      if (pr.bounded) {
        lo = mid;
      } else {
        hi = mid;
        esc = pr;
      }
    }
    out.log.push_back(fmt("bisection bracket t=%.17g", hi) + " after " + std::to_string(it) +
                      " halvings first_wedge_failure=" + std::to_string(esc.failure));
    starts.push_back({at(hi), score(esc), fmt("bisection t=%.17g", hi)});
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [](const Start& x, const Start& y) { return x.score > y.score; });
  if (starts.size() > static_cast<size_t>(opts.max_starts))
    starts.resize(static_cast<size_t>(opts.max_starts));

  struct Outcome {
    AffinePoint point;
    RateVerification ver;
    std::string line;
  };
  std::vector<Outcome> results(starts.size());
  const double max_step = 0.25;
  parallel_for(static_cast<int>(starts.size()), opts.threads, [&](int si) {
    const Start& st = starts[static_cast<size_t>(si)];
    AffinePoint qc = st.point, best = st.point;
    int best_score = st.score, rounds = 0;
    for (; rounds < opts.newton_rounds; ++rounds) {
      const Probe pr = probe(p, qc, dir, floor, eps, opts.budget);
      const int sc = score(pr);
      if (sc > best_score) {
        best_score = sc;
        best = qc;
      }
      if (pr.bounded || pr.failure < 0 || pr.dtarget == cplx(0.0)) break;
      cplx s = -pr.target / pr.dtarget;
      if (!std::isfinite(std::abs(s))) break;
      if (std::abs(s) > max_step) s *= max_step / std::abs(s);
      const AffinePoint next = qc + s * dir;
      if (next.x == qc.x && next.y == qc.y && next.z == qc.z) break;
      qc = next;
    }
    Outcome& o = results[static_cast<size_t>(si)];
    o.point = best;
    o.ver = verify_linear_rate(p, best, opts);
    o.line = "newton from " + st.origin + ": rounds=" + std::to_string(rounds) +
             " best_failure=" + std::to_string(best_score) + " verdict=" +
             probe_class_name(o.ver.kind) + " verified_blocks=" + std::to_string(o.ver.verified_blocks);
  });
  for (const Outcome& o : results) {
    out.log.push_back(o.line);
    if (o.ver.kind != ProbeClass::Linear) continue;
    bool dup = false;
    for (const auto& c : out.candidates)
      if ((c.point - o.point).norm() <= 1e-12 * std::max(1.0, o.point.norm())) dup = true;
    if (dup) continue;
    out.candidates.push_back({o.point, o.ver.rate, o.ver.verified_blocks, o.ver.last_verified_norm});
  }
  out.log.push_back("candidates=" + std::to_string(out.candidates.size()));
  return out;
}

std::vector<Segment> standard_wedge_segments(double eps) {
  std::vector<Segment> segs;
  const double ys = 0.9 * eps * eps;
  for (double x0 : {eps / 2.0, eps * 1e-3, 1e-10, 1e-60, 1e-150})
    for (double z : {1e2, 1e4, 1e7})
      segs.push_back({AffinePoint{x0, -ys, z}, AffinePoint{x0, ys, z}});
  return segs;
}

}  // namespace c3auto
