#include "c3auto/compactification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace c3auto {

namespace {

constexpr double kDenominatorFloor = 1e-13;
constexpr double kLocusTol = 1e-12;

// Base point in P^3 plus the fiber direction [xi1:xi2] over it.
struct Lifted {
  HomPoint base;
  cplx xi1, xi2;
};

double fiber_scale(const Lifted& l) { return std::max(std::abs(l.xi1), std::abs(l.xi2)); }

Lifted forward_lift(const Params& p, const ChartPoint& q) {
  const cplx b = p.b(), c = p.c(), d = p.d(), e = p.e();
  const cplx w1 = q.w1, w2 = q.w2, w3 = q.w3;
  switch (q.chart) {
    case ChartId::ZXi1: {
      const cplx A = 1.0 + b * w2 * w3 + c * w3 + d * w1 * w3 + e * w2 * w3 * w3;
      return {{w2 * w3, w3, A, w2 * w3 * w3}, 1.0, w2 * w3};
    }
    case ChartId::ZXi2: {
      const cplx B = w2 + b * w2 * w3 + c + d * w1 + e * w3;
      return {{w2 * w3, 1.0, B, w3}, 1.0, w3};
    }
    case ChartId::XXi2: {
      if (std::max(std::abs(w2), std::abs(w3)) < kDenominatorFloor)
        throw IndeterminateError("point lies on the indeterminacy curve over p+");
      const cplx C = w1 * w2 + b * w1 * w3 + c * w2 + d + e * w3;
      return {{w1 * w3, w2, C, w3}, w2, w3};
    }
    case ChartId::Y: {
      if (std::max(std::abs(w2), std::abs(w3)) < kDenominatorFloor)
        throw IndeterminateError("point lies on L'");
      const cplx Z = w2 + b * w3 + c * w2 * w3 + d * w1 * w3 + e * w3 * w3;
      return {{w3, w2 * w3, Z, w3 * w3}, w2, w3};
    }
  }
  throw ChartDomainError("unknown chart");
}

Lifted inverse_lift(const Params& p, const ChartPoint& q) {
  const cplx b = p.b(), c = p.c(), d = p.d(), e = p.e();
  const cplx w1 = q.w1, w2 = q.w2, w3 = q.w3;
  switch (q.chart) {
    case ChartId::ZXi1: {
      if (std::max(std::abs(w1), std::abs(w2 * w3)) < kDenominatorFloor)
        throw IndeterminateError("point lies on the indeterminacy locus of the inverse");
      const cplx X = w3 - w1 - b * w1 * w3 - c * w2 * w3 - e * w2 * w3 * w3;
      return {{X, d * w1 * w3, d * w2 * w3, d * w2 * w3 * w3}, w1, w2 * w3};
    }
    case ChartId::ZXi2: {
      if (std::max(std::abs(w1), std::abs(w3)) < kDenominatorFloor)
        throw IndeterminateError("point lies on the indeterminacy curve over p-");
      const cplx X = 1.0 - w1 * w2 - b * w1 - c * w2 * w3 - e * w3;
      return {{X, d * w1, d * w2 * w3, d * w3}, w1, w3};
    }
    case ChartId::XXi2: {
      const cplx X = w2 - w1 - b - c * w1 * w3 - e * w3;
      return {{X, d, d * w1 * w3, d * w3}, 1.0, w3};
    }
    case ChartId::Y: {
      if (std::max(std::abs(w1), std::abs(w3)) < kDenominatorFloor)
        throw IndeterminateError("point lies on L''");
      const cplx X = w2 * w3 - w1 - b * w1 * w3 - c * w3 - e * w3 * w3;
      return {{X, d * w1 * w3, d * w3, d * w3 * w3}, w1, w3};
    }
  }
  throw ChartDomainError("unknown chart");
}

ChartPoint to_chart(const Lifted& l, ChartId out, bool denominator_is_z) {
  const HomPoint& h = l.base;
  const double s = h.max_abs();
  const double fs = fiber_scale(l);
  auto need = [&](cplx v, double scale, const char* what) {
    if (std::abs(v) <= kDenominatorFloor * scale) throw ChartDomainError(what);
  };
  auto need_z = [&]() {
    if (std::abs(h.Z) <= kDenominatorFloor * s) {
      if (denominator_is_z) throw IndeterminateError("chart denominator vanishes");
      throw ChartDomainError("image has Z = 0");
    }
  };
  switch (out) {
    case ChartId::ZXi1:
      need_z();
      need(l.xi1, fs, "image has xi1 = 0");
      return {out, h.X / h.Z, h.Y / h.Z, l.xi2 / l.xi1};
    case ChartId::ZXi2:
      need_z();
      need(l.xi2, fs, "image has xi2 = 0");
      return {out, h.X / h.Z, l.xi1 / l.xi2, h.T / h.Z};
    case ChartId::XXi2:
      need(h.X, s, "image has X = 0");
      need(l.xi2, fs, "image has xi2 = 0");
      return {out, l.xi1 / l.xi2, h.Z / h.X, h.T / h.X};
    case ChartId::Y:
      need(h.Y, s, "image has Y = 0");
      return {out, h.X / h.Y, h.Z / h.Y, h.T / h.Y};
  }
  throw ChartDomainError("unknown chart");
}

}  // namespace

double HomPoint::max_abs() const {
  return std::max({std::abs(X), std::abs(Y), std::abs(Z), std::abs(T)});
}

HomPoint HomPoint::normalized() const {
  const auto c = coords();
  size_t k = 0;
  for (size_t i = 1; i < 4; ++i)
    if (std::abs(c[i]) > std::abs(c[k])) k = i;
  if (c[k] == cplx(0.0)) throw std::invalid_argument("zero homogeneous vector");
  const cplx s = c[k];
  HomPoint r{X / s, Y / s, Z / s, T / s};
  switch (k) {
    case 0: r.X = 1.0; break;
    case 1: r.Y = 1.0; break;
    case 2: r.Z = 1.0; break;
    default: r.T = 1.0; break;
  }
  return r;
}

bool HomPoint::at_infinity() const { return std::abs(T) < 1e-14 * max_abs(); }

HomPoint to_hom(const AffinePoint& q) { return {q.x, q.y, q.z, 1.0}; }

double chordal_distance(const HomPoint& a, const HomPoint& b) {
  const auto u = a.coords();
  const auto v = b.coords();
  double nu = 0.0, nv = 0.0, wedge = 0.0;
  for (int i = 0; i < 4; ++i) {
    nu += std::norm(u[i]);
    nv += std::norm(v[i]);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) wedge += std::norm(u[i] * v[j] - u[j] * v[i]);
  return std::sqrt(wedge / (nu * nv));
}

Indeterminacy indeterminacy_status(const Params& /*p*/, const HomPoint& h, Direction dir) {
  const HomPoint n = h.normalized();
  auto small = [](cplx v) { return std::abs(v) < kLocusTol; };
  if (small(n.Y) && small(n.T)) return Indeterminacy::OnL;
  if (dir == Direction::Forward && small(n.Z) && small(n.T)) return Indeterminacy::OnLprime;
  if (dir == Direction::Backward && small(n.X) && small(n.T)) return Indeterminacy::OnLdoubleprime;
  return Indeterminacy::Regular;
}

HomPoint apply_homogeneous(const Params& p, const HomPoint& h) {
  if (indeterminacy_status(p, h, Direction::Forward) != Indeterminacy::Regular)
    throw IndeterminateError("point lies on L or L'");
  const HomPoint n = h.normalized();
  const cplx X = n.X, Y = n.Y, Z = n.Z, T = n.T;
  const HomPoint r{Y * T, Z * T,
                   Y * Z + p.b() * Y * T + p.c() * Z * T + p.d() * X * T + p.e() * T * T, T * T};
  return r.normalized();
}

HomPoint apply_homogeneous_inverse(const Params& p, const HomPoint& h) {
  if (indeterminacy_status(p, h, Direction::Backward) != Indeterminacy::Regular)
    throw IndeterminateError("point lies on L or L''");
  const HomPoint n = h.normalized();
  const cplx X = n.X, Y = n.Y, Z = n.Z, T = n.T;
  const HomPoint r{Z * T - X * Y - p.b() * X * T - p.c() * Y * T - p.e() * T * T,
                   p.d() * X * T, p.d() * Y * T, p.d() * T * T};
  return r.normalized();
}

const char* chart_name(ChartId id) {
  switch (id) {
    case ChartId::ZXi1: return "Z,xi1";
    case ChartId::ZXi2: return "Z,xi2";
    case ChartId::XXi2: return "X,xi2";
    case ChartId::Y: return "Y";
  }
  return "?";
}

HomPoint blowdown(const ChartPoint& q) {
  switch (q.chart) {
    case ChartId::ZXi1: return {q.w1, q.w2, 1.0, q.w2 * q.w3};
    case ChartId::ZXi2: return {q.w1, q.w2 * q.w3, 1.0, q.w3};
    case ChartId::XXi2: return {1.0, q.w1 * q.w3, q.w2, q.w3};
    case ChartId::Y: return {q.w1, 1.0, q.w2, q.w3};
  }
  throw ChartDomainError("unknown chart");
}

cplx exceptional_equation(const ChartPoint& q) {
  switch (q.chart) {
    case ChartId::ZXi1: return q.w2;
    case ChartId::ZXi2:
    case ChartId::XXi2: return q.w3;
    case ChartId::Y: break;
  }
  throw ChartDomainError("E is not visible in the Y chart");
}

cplx hinf_equation(const ChartPoint& q) {
  switch (q.chart) {
    case ChartId::ZXi1: return q.w3;
    case ChartId::Y: return q.w3;
    default: break;
  }
  throw ChartDomainError("the strict transform of H_inf is not visible in this chart");
}

ChartPoint apply_chart(const Params& p, const ChartPoint& q, ChartId out) {
  return to_chart(forward_lift(p, q), out, q.chart != ChartId::Y);
}

ChartPoint apply_chart_inverse(const Params& p, const ChartPoint& q, ChartId out) {
  return to_chart(inverse_lift(p, q), out, false);
}

cplx chart_denominator(const Params& p, const ChartPoint& q) {
  if (q.chart == ChartId::Y) return 1.0;
  return forward_lift(p, q).base.Z;
}

const char* curve_name(CurveId id) {
  switch (id) {
    case CurveId::Cplus: return "C+";
    case CurveId::Cminus: return "C-";
    case CurveId::CprimePlus: return "C'+";
    case CurveId::CprimeMinus: return "C'-";
  }
  return "?";
}

namespace {

struct LocalEquation {
  cplx value;
  std::array<cplx, 3> grad;
};

LocalEquation curve_equation(const Params& p, CurveId curve, const ChartPoint& q) {
  const cplx b = p.b(), c = p.c(), d = p.d();
  const cplx w1 = q.w1, w2 = q.w2, w3 = q.w3;
  switch (curve) {
    case CurveId::Cplus:
      // Points of E sent by f into L'.
      if (q.chart == ChartId::ZXi1) return {1.0 + c * w3 + d * w1 * w3, {d * w3, 0.0, c + d * w1}};
      if (q.chart == ChartId::ZXi2) return {w2 + c + d * w1, {d, 1.0, 0.0}};
      if (q.chart == ChartId::XXi2) return {w1 * w2 + c * w2 + d, {w2, w1 + c, 0.0}};
      break;
    case CurveId::Cminus:
      // Points of E sent by f^-1 into L''.
      if (q.chart == ChartId::ZXi1)
        return {w3 - w1 - b * w1 * w3, {-1.0 - b * w3, 0.0, 1.0 - b * w1}};
      if (q.chart == ChartId::ZXi2) return {1.0 - w1 * w2 - b * w1, {-w2 - b, -w1, 0.0}};
      if (q.chart == ChartId::XXi2)
        return {w2 - w1 - b - c * w1 * w3, {-1.0 - c * w3, 1.0, -c * w1}};
      break;
    case CurveId::CprimePlus:
      // Fiber of E over p+.
      if (q.chart == ChartId::XXi2) return {w2, {0.0, 1.0, 0.0}};
      break;
    case CurveId::CprimeMinus:
      // Fiber of E over p-.
      if (q.chart == ChartId::ZXi1 || q.chart == ChartId::ZXi2) return {w1, {1.0, 0.0, 0.0}};
      break;
  }
  throw ChartDomainError(std::string("curve ") + curve_name(curve) + " is not visible in chart " +
                         chart_name(q.chart));
}

double scaled(const LocalEquation& eq) {
  double g = 0.0;
  for (const auto& v : eq.grad) g += std::norm(v);
  return std::abs(eq.value) / std::max(1.0, std::sqrt(g));
}

}  // namespace

double curve_residual(const Params& p, CurveId curve, const ChartPoint& q) {
  const LocalEquation eq = curve_equation(p, curve, q);
  return std::max(std::abs(exceptional_equation(q)), scaled(eq));
}

SpecialPoints special_points_B(const Params& p) {
  // On E in (Z,xi1): 1 + c w3 + d w1 w3 = 0 and w3 (1 - b w1) = w1, hence
  // d w1^2 + (c - b) w1 + 1 = 0.
  const cplx b = p.b(), c = p.c(), d = p.d();
  const cplx beta = c - b;
  const cplx disc = beta * beta - 4.0 * d;
  SpecialPoints out;
  out.coincident = std::abs(disc) < 1e-12;
  cplx r1, r2;
  if (out.coincident) {
    r1 = r2 = -beta / (2.0 * d);
  } else {
    cplx s = std::sqrt(disc);
    if (std::real(std::conj(beta) * s) < 0.0) s = -s;
    const cplx qq = -(beta + s) / 2.0;
    r1 = qq / d;
    r2 = 1.0 / qq;
  }
  auto make = [&](cplx w1) -> ChartPoint {
    const cplx den = 1.0 - b * w1;
    if (std::abs(den) < 1e-12) return {ChartId::ZXi2, w1, 0.0, 0.0};
    return {ChartId::ZXi1, w1, 0.0, w1 / den};
  };
  out.B = make(r1);
  out.Bprime = make(r2);
  return out;
}

int intersection_count(const Params& p) {
  const cplx beta = p.b() - p.c();
  return std::abs(beta * beta - 4.0 * p.d()) < 1e-12 ? 4 : 5;
}

namespace {

cplx random_cplx(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  const double re = u(rng);
  const double im = u(rng);
  return {re, im};
}

double ldoubleprime_residual(const HomPoint& h) {
  const HomPoint n = h.normalized();
  return std::max(std::abs(n.X), std::abs(n.T));
}

double distance_to_pminus(const ChartPoint& q) {
  return std::max({std::abs(q.w1), std::abs(q.w2), std::abs(q.w3)});
}

}  // namespace

FlowReport verify_infinity_flow(const Params& p, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  FlowReport rep;
  constexpr double kFlowTol = 1e-8;
  constexpr double kLineTol = 1e-10;

  for (int i = 0; i < samples; ++i) {
    // Strict transform of H_inf, alternating between the two charts that see it.
    ChartPoint q;
    if (i % 2 == 0) {
      q = {ChartId::ZXi1, random_cplx(rng, 2.0), random_cplx(rng, 2.0), 0.0};
    } else {
      cplx w2;
      do w2 = random_cplx(rng, 2.0);
      while (std::abs(w2) < 0.1);
      q = {ChartId::Y, random_cplx(rng, 2.0), w2, 0.0};
    }
    ++rep.hinf_samples;
    try {
      const ChartPoint img = apply_chart(p, q, ChartId::ZXi1);
      const double dist = distance_to_pminus(img);
      rep.max_hinf_distance = std::max(rep.max_hinf_distance, dist);
      if (dist < kFlowTol) ++rep.hinf_to_pminus;
    } catch (const std::exception&) {
    }
  }

  for (int i = 0; i < samples; ++i) {
    // E away from C+, alternating between (Z,xi2) and (Z,xi1).
    ChartPoint q;
    for (;;) {
      if (i % 2 == 0)
        q = {ChartId::ZXi2, random_cplx(rng, 2.0), random_cplx(rng, 2.0), 0.0};
      else
        q = {ChartId::ZXi1, random_cplx(rng, 2.0), 0.0, random_cplx(rng, 2.0)};
      if (std::abs(chart_denominator(p, q)) > 0.1) break;
    }
    ++rep.e_samples;
    try {
      const ChartId out = q.chart == ChartId::ZXi2 ? ChartId::Y : ChartId::ZXi1;
      const ChartPoint img = apply_chart(p, q, out);
      const double res = ldoubleprime_residual(blowdown(img));
      rep.max_ldoubleprime_residual = std::max(rep.max_ldoubleprime_residual, res);
      if (res < kLineTol) ++rep.e_to_ldoubleprime;
      const ChartPoint img2 = apply_chart(p, img, ChartId::ZXi1);
      const double dist = distance_to_pminus(img2);
      rep.max_second_distance = std::max(rep.max_second_distance, dist);
      if (dist < kFlowTol) ++rep.ldoubleprime_to_pminus;
    } catch (const std::exception&) {
    }
  }
  return rep;
}

CommutationReport check_commutation(const Params& p, int samples, std::uint64_t seed,
                                    double min_denominator) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  const ChartId charts[4] = {ChartId::ZXi1, ChartId::ZXi2, ChartId::XXi2, ChartId::Y};
  std::vector<double> res;
  CommutationReport rep;
  int attempts = 0;
  while (static_cast<int>(res.size()) < samples && attempts < 100 * samples) {
    ++attempts;
    const ChartId in = charts[attempts % 4];
    const ChartId out = charts[pick(rng)];
    ChartPoint q{in, random_cplx(rng, 2.0), random_cplx(rng, 2.0), random_cplx(rng, 2.0)};
    if (std::abs(chart_denominator(p, q)) <= min_denominator) continue;
    try {
      const HomPoint lhs = blowdown(apply_chart(p, q, out));
      const HomPoint rhs = apply_homogeneous(p, blowdown(q));
      res.push_back(chordal_distance(lhs, rhs));
    } catch (const std::exception&) {
      ++rep.skipped;
    }
  }
  rep.samples = static_cast<int>(res.size());
  if (res.empty()) return rep;
  std::sort(res.begin(), res.end());
  auto pct = [&](double f) {
    const size_t k = std::min(res.size() - 1, static_cast<size_t>(std::ceil(f * res.size())) - 1);
    return res[k];
  };
  rep.p50 = pct(0.5);
  rep.p99 = pct(0.99);
  rep.max = res.back();
  return rep;
}

}  // namespace c3auto
