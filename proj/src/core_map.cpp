#include "c3auto/core_map.hpp"

#include <algorithm>
#include <cmath>

namespace c3auto {

double AffinePoint::norm() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }

double AffinePoint::norm2() const { return std::norm(x) + std::norm(y) + std::norm(z); }

bool AffinePoint::finite() const {
  auto ok = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  return ok(x) && ok(y) && ok(z);
}

AffinePoint operator+(const AffinePoint& a, const AffinePoint& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

AffinePoint operator-(const AffinePoint& a, const AffinePoint& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

AffinePoint operator*(cplx s, const AffinePoint& a) { return {s * a.x, s * a.y, s * a.z}; }

Params::Params(cplx b, cplx c, cplx d, cplx e)
    : b_(b), c_(c), d_(d), e_(e), sigma_((1.0 + std::sqrt(5.0)) / 2.0),
      log_abs_d_(std::log(std::abs(d))) {}

double Params::coefficient_mass() const {
  return 1.0 + std::abs(b_) + std::abs(c_) + std::abs(d_) + std::abs(e_);
}

Params make_params(cplx b, cplx c, cplx d, cplx e) {
  auto ok = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  if (!ok(b) || !ok(c) || !ok(d) || !ok(e)) throw InvalidParams("coefficients must be finite");
  if (d == cplx(0.0)) throw InvalidParams("d must be nonzero");
  return Params(b, c, d, e);
}

AffinePoint apply_unchecked(const Params& p, const AffinePoint& q) {
  return {q.y, q.z, q.y * q.z + p.b() * q.y + p.c() * q.z + p.d() * q.x + p.e()};
}

AffinePoint apply_inverse_unchecked(const Params& p, const AffinePoint& q) {
  return {(q.z - q.x * q.y - p.b() * q.x - p.c() * q.y - p.e()) / p.d(), q.x, q.y};
}

namespace {

AffinePoint guarded(const AffinePoint& r) {
  if (!r.finite() || r.norm() > kOverflowGuard)
    throw OverflowGuardError("orbit exceeded the overflow guard");
  return r;
}

}  // namespace

AffinePoint apply(const Params& p, const AffinePoint& q) { return guarded(apply_unchecked(p, q)); }

AffinePoint apply_inverse(const Params& p, const AffinePoint& q) {
  return guarded(apply_inverse_unchecked(p, q));
}

AffinePoint apply(const Params& p, const AffinePoint& q, Direction dir) {
  return dir == Direction::Forward ? apply(p, q) : apply_inverse(p, q);
}

cplx jacobian_det(const Params& p) {
  // Df = [[0,1,0],[0,0,1],[d, z+b, y+c]]; expanding along the first column
  // leaves d times the minor [[1,0],[0,1]].
  return p.d();
}

AffinePoint tau(const AffinePoint& q) { return {q.z, q.y, q.x}; }

AffinePoint conjugate_by_tau(const Params& p, const AffinePoint& q) {
  return guarded(tau(apply_unchecked(p, tau(q))));
}

std::vector<FixedPoint> fixed_points(const Params& p) {
  const cplx B = p.b() + p.c() + p.d() - 1.0;
  const cplx C = p.e();
  const cplx disc = B * B - 4.0 * C;
  std::vector<FixedPoint> out;
  auto push = [&](cplx x, int m) { out.push_back({AffinePoint{x, x, x}, m}); };
  if (std::abs(disc) <= 1e-14 * std::max(1.0, std::norm(B))) {
    push(-B / 2.0, 2);
    return out;
  }
  // Stable pair: q = -(B + s sqrt(disc))/2 with s chosen to avoid cancellation.
  cplx s = std::sqrt(disc);
  if (std::real(std::conj(B) * s) < 0.0) s = -s;
  const cplx qq = -(B + s) / 2.0;
  const cplx r1 = qq;
  const cplx r2 = (qq != cplx(0.0)) ? C / qq : cplx(0.0);
  push(r1, 1);
  push(r2, 1);
  return out;
}

ENormalization kill_e(const Params& p) {
  auto roots = fixed_points(p);
  const FixedPoint* best = &roots.front();
  for (const auto& r : roots)
    if (std::abs(r.point.x) < std::abs(best->point.x)) best = &r;
  const cplx k = best->point.x;
  return {k, make_params(p.b() + k, p.c() + k, p.d(), 0.0)};
}

InverseConjugacy inverse_as_family(const Params& p) {
  const cplx d = p.d();
  return {make_params(-p.c() / d, -p.b() / d, 1.0 / d, p.e() / (d * d)), -d};
}

OrbitRecord orbit(const Params& p, const AffinePoint& q, int max_steps, double escape_radius,
                  Direction dir) {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (!(escape_radius > 1.0)) throw std::invalid_argument("escape_radius must exceed 1");
  OrbitRecord rec;
  rec.points.reserve(static_cast<size_t>(max_steps) + 1);
  rec.norms.reserve(static_cast<size_t>(max_steps) + 1);
  rec.points.push_back(q);
  rec.norms.push_back(q.norm());
  if (rec.norms.back() > escape_radius) {
    rec.status = {OrbitStatus::Kind::Escaped, 0};
    return rec;
  }
  AffinePoint cur = q;
  for (int i = 1; i <= max_steps; ++i) {
    try {
      cur = apply(p, cur, dir);
    } catch (const OverflowGuardError&) {
      rec.status = {OrbitStatus::Kind::OverflowGuard, i};
      return rec;
    }
    rec.points.push_back(cur);
    rec.norms.push_back(cur.norm());
    if (rec.norms.back() > escape_radius) {
      rec.status = {OrbitStatus::Kind::Escaped, i};
      return rec;
    }
  }
  rec.status = {OrbitStatus::Kind::Bounded, max_steps};
  return rec;
}

}  // namespace c3auto
