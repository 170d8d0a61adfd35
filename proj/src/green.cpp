#include "c3auto/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace c3auto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// log sqrt(1 + e^{2l})
double half_log1p_exp2(double l) {
  if (l == kNegInf) return 0.0;
  if (l > 0.0) return l + 0.5 * std::log1p(std::exp(-2.0 * l));
  return 0.5 * std::log1p(std::exp(2.0 * l));
}

}  // namespace

LogOrbit::LogOrbit(const Params& p, const AffinePoint& q, Direction dir, double switch_norm)
    : p_(&p), dir_(dir), switch_norm_(switch_norm),
      dominance_radius_(1e4 * p.coefficient_mass()), q_(q) {
  if (!q.finite()) throw std::invalid_argument("orbit seed must be finite");
}

double LogOrbit::dominance_delta_bound() const {
  const Params& p = *p_;
  const double lx_hi = l_.lx + ux_, ly_lo = l_.ly - uy_, lz_lo = l_.lz - uz_;
  const double lx_lo = l_.lx - ux_, ly_hi = l_.ly + uy_, lz_hi = l_.lz + uz_;
  (void)ly_hi;
  if (dir_ == Direction::Forward) {
    return std::abs(p.b()) * std::exp(-lz_lo) + std::abs(p.c()) * std::exp(-ly_lo) +
           std::abs(p.d()) * std::exp(lx_hi - ly_lo - lz_lo) +
           std::abs(p.e()) * std::exp(-ly_lo - lz_lo);
  }
  return std::exp(lz_hi - lx_lo - ly_lo) + std::abs(p.b()) * std::exp(-ly_lo) +
         std::abs(p.c()) * std::exp(-lx_lo) + std::abs(p.e()) * std::exp(-lx_lo - ly_lo);
}

bool LogOrbit::dominant() const {
  const Params& p = *p_;
  if (!surrogate_) {
    const AffinePoint& q = q_;
    if (dir_ == Direction::Forward) {
      if (std::abs(q.y) < dominance_radius_ || std::abs(q.z) < dominance_radius_) return false;
      const double low = std::abs(p.b() * q.y + p.c() * q.z + p.d() * q.x + p.e());
      return low <= kDominanceMargin * std::abs(q.y) * std::abs(q.z);
    }
    if (std::abs(q.x) < dominance_radius_ || std::abs(q.y) < dominance_radius_) return false;
    const double low = std::abs(q.z - p.b() * q.x - p.c() * q.y - p.e());
    return low <= kDominanceMargin * std::abs(q.x) * std::abs(q.y);
  }
  const double lr = std::log(dominance_radius_);
  const bool big = dir_ == Direction::Forward ? (l_.ly - uy_ >= lr && l_.lz - uz_ >= lr)
                                              : (l_.lx - ux_ >= lr && l_.ly - uy_ >= lr);
  return big && dominance_delta_bound() <= kDominanceMargin;
}

void LogOrbit::enter_surrogate() {
  l_ = {safe_log(std::abs(q_.x)), safe_log(std::abs(q_.y)), safe_log(std::abs(q_.z)), true};
  // Rounding of the last direct iterate.
  ux_ = uy_ = uz_ = 1e-15;
  surrogate_ = true;
}

void LogOrbit::step() {
  if (!surrogate_) {
    const double n = q_.norm();
    // One more direct step can square the norm, so switch early when that would overflow.
    const bool near_guard =
        std::isfinite(switch_norm_) && n * n * p_->coefficient_mass() > kOverflowGuard;
    if ((n > switch_norm_ || near_guard) && dominant()) {
      enter_surrogate();
    } else {
      const AffinePoint r = dir_ == Direction::Forward ? apply_unchecked(*p_, q_)
                                                       : apply_inverse_unchecked(*p_, q_);
      if (!r.finite() || r.norm() > kOverflowGuard)
        throw OverflowGuardError("orbit outgrew doubles before dominance was certified");
      q_ = r;
      ++steps_;
      return;
    }
  }
  const double delta = dominance_delta_bound();
  if (!(delta <= kDominanceMargin))
    throw OverflowGuardError("log surrogate lost dominance");
  const double slack = -std::log1p(-delta);
  if (dir_ == Direction::Forward) {
    const LogTriple n{l_.ly, l_.lz, l_.ly + l_.lz, true};
    const double nuz = uy_ + uz_ + slack;
    ux_ = uy_;
    uy_ = uz_;
    uz_ = nuz;
    l_ = n;
  } else {
    const LogTriple n{l_.lx + l_.ly - p_->log_abs_d(), l_.lx, l_.ly, true};
    const double nux = ux_ + uy_ + slack;
    uz_ = uy_;
    uy_ = ux_;
    ux_ = nux;
    l_ = n;
  }
  ++steps_;
}

double LogOrbit::log_norm() const {
  if (!surrogate_) return safe_log(q_.norm());
  return std::max({l_.lx, l_.ly, l_.lz});
}

double LogOrbit::potential() const {
  if (!surrogate_) return potential_total(*p_, q_);
  const double m = std::max({l_.lx, l_.ly, l_.lz});
  const double v = m + 0.5 * std::log(std::exp(-2.0 * m) + std::exp(2.0 * (l_.lx - m)) +
                                       std::exp(2.0 * (l_.ly - m)) + std::exp(2.0 * (l_.lz - m)));
  return half_log1p_exp2(l_.ly) / p_->sigma() + v;
}

LogTriple LogOrbit::logs() const {
  if (surrogate_) return l_;
  return {safe_log(std::abs(q_.x)), safe_log(std::abs(q_.y)), safe_log(std::abs(q_.z)), false};
}

double LogOrbit::log_uncertainty() const {
  return surrogate_ ? std::max({ux_, uy_, uz_}) : 0.0;
}

const AffinePoint& LogOrbit::point() const {
  if (surrogate_) throw std::logic_error("orbit point is only available before the surrogate");
  return q_;
}

double default_bounded_radius(const Params& p) { return 10.0 * p.coefficient_mass(); }

double potential_u(const Params& p, const AffinePoint& q) {
  return std::log1p(std::norm(q.y)) / (2.0 * p.sigma());
}

double potential_v(const AffinePoint& q) { return 0.5 * std::log1p(q.norm2()); }

double potential_total(const Params& p, const AffinePoint& q) {
  return potential_u(p, q) + potential_v(q);
}

const char* green_mode_name(GreenMode m) {
  switch (m) {
    case GreenMode::DirectIteration: return "direct";
    case GreenMode::LogSurrogate: return "log_surrogate";
    case GreenMode::ConvergedZero: return "converged_zero";
  }
  return "?";
}

GreenResult green_value(const Params& p, const AffinePoint& q, Direction dir,
                        const GreenOptions& opts) {
  if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const double sigma = p.sigma();
  const double log_sigma = std::log(sigma);
  const double radius = opts.bounded_radius > 0.0 ? opts.bounded_radius : default_bounded_radius(p);
  const double log_radius = std::log(radius);

  LogOrbit orb(p, q, dir);
  bool left_ball = false;
  double a_prev = 0.0, a = 0.0, err = std::numeric_limits<double>::infinity();
  auto mode_now = [&]() {
    return orb.surrogate() ? GreenMode::LogSurrogate : GreenMode::DirectIteration;
  };
  for (int n = 0;; ++n) {
    const double scale = std::exp(-n * log_sigma);
    a = orb.potential() * scale;
    if (orb.log_norm() >= log_radius) left_ball = true;
    if (n > 0) {
      // Last term: rounding accumulated over n potential evaluations.
      err = sigma * std::abs(a - a_prev) + 2.0 * scale * orb.log_uncertainty() +
            (n + 4) * 2.3e-16 * std::max(1.0, a);
      if (orb.dominant() && n >= opts.min_iters && err <= opts.tol * std::max(1.0, a))
        return {a, n, mode_now(), err, true};
    }
    if (n == opts.max_iters) break;
    try {
      orb.step();
    } catch (const OverflowGuardError&) {
      return {a, n, mode_now(), std::numeric_limits<double>::infinity(), false};
    }
    a_prev = a;
  }
  if (!left_ball) {
    // Everything stayed in the ball of radius R_K: the tail is bounded by the
    // potential on that ball.
    const double bound =
        (std::log1p(radius * radius) / (2.0 * sigma) + 0.5 * std::log1p(3.0 * radius * radius)) *
        std::exp(-opts.max_iters * log_sigma);
    return {0.0, opts.max_iters, GreenMode::ConvergedZero, bound, true};
  }
  return {a, opts.max_iters, mode_now(), err, err <= opts.tol * std::max(1.0, a)};
}

const char* basin_verdict_name(BasinVerdict v) {
  switch (v) {
    case BasinVerdict::InBasin: return "in_basin";
    case BasinVerdict::NotInBasin: return "not_in_basin";
    case BasinVerdict::Unresolved: return "unresolved";
  }
  return "?";
}

BasinVerdict basin_membership(const Params& p, const AffinePoint& q, const GreenOptions& opts,
                              Direction dir) {
  const GreenResult r = green_value(p, q, dir, opts);
  const double thr = opts.positivity_threshold;
  if (!r.resolved || !(r.error_bound < thr / 2.0) || std::abs(r.value - thr) <= r.error_bound)
    return BasinVerdict::Unresolved;
  return r.value > thr ? BasinVerdict::InBasin : BasinVerdict::NotInBasin;
}

double complex_line_laplacian(const std::function<double(cplx)>& g, double h) {
  const cplx i(0.0, 1.0);
  return (g(h) + g(-h) + g(i * h) + g(-i * h) - 4.0 * g(0.0)) / (h * h);
}

double default_fd_step(const AffinePoint& q) { return std::max(1e-4, 1e-6 * q.norm()); }

double pluriharmonic_defect(const Params& p, const AffinePoint& q, const AffinePoint& dir, double h,
                            GreenOptions opts) {
  opts.min_iters = std::max(opts.min_iters, 60);
  auto g = [&](cplx t) {
    const GreenResult r = green_value(p, q + t * dir, Direction::Forward, opts);
    if (!r.resolved) throw std::runtime_error("green value unresolved at stencil point");
    return r.value;
  };
  return complex_line_laplacian(g, h);
}

}  // namespace c3auto
