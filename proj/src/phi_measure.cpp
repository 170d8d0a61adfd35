#include "c3auto/phi_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "c3auto/green.hpp"
#include "c3auto/infinity_partition.hpp"

namespace c3auto {

namespace {

void require_expanding(const Params& p) {
  if (!(std::abs(p.d()) > 1.0)) throw std::invalid_argument("phi needs |d| > 1");
}

double log_plus(double l) { return std::max(0.0, l); }

}  // namespace

double psi_n(const Params& p, const AffinePoint& q, int n) {
  require_expanding(p);
  if (n < 0) throw std::invalid_argument("psi_n needs n >= 0");
  LogOrbit orb(p, q);
  for (int i = 0; i < 3 * n; ++i) orb.step();
  return log_plus(orb.log_norm()) - n * p.log_abs_d();
}

const char* phi_regime_name(PhiRegime r) {
  switch (r) {
    case PhiRegime::OnWprime: return "on_wprime";
    case PhiRegime::OnK: return "on_k";
    case PhiRegime::SuperEscape: return "super_escape";
    case PhiRegime::Unresolved: return "unresolved";
  }
  return "?";
}

PhiResult phi_infinity(const Params& p, const AffinePoint& q, const PhiOptions& opts) {
  require_expanding(p);
  if (opts.window < 2 || opts.max_blocks < opts.window)
    throw std::invalid_argument("phi window must be >= 2 and fit in max_blocks");
  const double radius = opts.bounded_radius > 0.0 ? opts.bounded_radius : default_bounded_radius(p);
  const double log_radius = std::log(radius);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  PhiResult res;
  LogOrbit orb(p, q);
  bool left_ball = false;
  int above_run = 0;  // consecutive blocks outside the ball
  for (int k = 0; k <= opts.max_blocks; ++k) {
    if (k > 0) {
      try {
        for (int i = 0; i < 3; ++i) orb.step();
      } catch (const OverflowGuardError&) {
        res.value = nan;
        res.n_used = k - 1;
        return res;
      }
    }
    const double ln = orb.log_norm();
    res.psi.push_back(log_plus(ln) - k * p.log_abs_d());
    res.n_used = k;
    if (ln >= log_radius) {
      left_ball = true;
      ++above_run;
    } else {
      above_run = 0;
    }
    if (orb.dominant()) {
      res.regime = PhiRegime::SuperEscape;
      res.kind = PhiValueKind::Undefined;
      res.value = nan;
      return res;
    }
    if (above_run >= opts.window) {
      const auto tail = res.psi.end() - opts.window;
      const auto [lo, hi] = std::minmax_element(tail, res.psi.end());
      if (*hi - *lo <= opts.cauchy_tol) {
        res.regime = PhiRegime::OnWprime;
        res.kind = PhiValueKind::Finite;
        res.value = res.psi.back();
        return res;
      }
    }
  }
  if (!left_ball) {
    res.regime = PhiRegime::OnK;
    res.kind = PhiValueKind::NegInfinity;
    res.value = -std::numeric_limits<double>::infinity();
    return res;
  }
  res.value = nan;
  return res;
}

double default_cutoff(const Params& p) { return std::log(10.0 * default_bounded_radius(p)); }

double correction_sum(double d_abs, double eps, int n) {
  double s = 0.0;
  for (int k = 1; k <= n; ++k) s += std::log(d_abs + envelope_term(d_abs, eps, k));
  return s;
}

double phi_prime_n(const Params& p, const AffinePoint& q, int n, double eps, double cutoff_a) {
  require_expanding(p);
  const double d_abs = std::abs(p.d());
  if (!(eps > 0.0) || !(eps < d_abs - 1.0)) throw std::invalid_argument("phi' needs 0 < eps < |d| - 1");
  if (n < 0) throw std::invalid_argument("phi' needs n >= 0");
  LogOrbit orb(p, q);
  for (int i = 0; i < 3 * n; ++i) orb.step();
  return std::max(cutoff_a, orb.log_norm()) - correction_sum(d_abs, eps, n);
}

const char* k_verdict_name(KVerdict v) {
  switch (v) {
    case KVerdict::InK: return "in_k";
    case KVerdict::Escapes: return "escapes";
    case KVerdict::Unresolved: return "unresolved";
  }
  return "?";
}

KVerdict k_membership(const Params& p, const AffinePoint& q, double radius, int budget) {
  const double rk = default_bounded_radius(p);
  if (!(radius > rk)) throw std::invalid_argument("k_membership radius must exceed R_K");
  if (budget < 2) throw std::invalid_argument("k_membership budget must be >= 2");
  AffinePoint cur = q;
  bool settled = true;
  for (int i = 0; i <= budget; ++i) {
    if (i > 0) cur = apply_unchecked(p, cur);
    const double n = cur.norm();
    if (!(n < radius)) return KVerdict::Escapes;
    if (2 * i >= budget && n >= rk) settled = false;
  }
  return settled ? KVerdict::InK : KVerdict::Unresolved;
}

double birkhoff_log_average(const Params& p, const AffinePoint& q, int n, double cutoff_a) {
  if (n < 1) throw std::invalid_argument("birkhoff average needs n >= 1");
  LogOrbit orb(p, q);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i > 0) orb.step();
    s += std::max(cutoff_a, orb.log_norm());
  }
  return s / n;
}

}  // namespace c3auto
