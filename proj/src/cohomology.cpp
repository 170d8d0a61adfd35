#include "c3auto/cohomology.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace c3auto {

Matrix2i Matrix2i::operator*(const Matrix2i& o) const {
  Matrix2i r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
  return r;
}

Matrix2i identity2i() {
  Matrix2i r;
  r.m = {{{1, 0}, {0, 1}}};
  return r;
}

Matrix2i matrix_power(const Matrix2i& a, int n) {
  if (n < 0) throw std::invalid_argument("negative power");
  Matrix2i r = identity2i(), base = a;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

ClassVector operator*(const Matrix2i& m, const ClassVector& v) {
  return {m.m[0][0] * v.h + m.m[0][1] * v.e, m.m[1][0] * v.h + m.m[1][1] * v.e};
}

PullbackSpectrum pullback_spectrum() {
  // f*{H~inf} = {H~inf} + {E}, f*{E} = {H~inf}.
  PullbackSpectrum s;
  s.matrix.m = {{{1, 1}, {1, 0}}};
  const double tr = 1.0, det = -1.0;
  const double root = std::sqrt(tr * tr - 4.0 * det);
  s.lambda_plus = (tr + root) / 2.0;
  s.lambda_minus = (tr - root) / 2.0;
  // (M - lambda) v = 0 with the second row: h - lambda e = 0.
  s.leading = {s.lambda_plus, 1.0};
  return s;
}

DynamicalDegrees dynamical_degrees() {
  const double sigma = pullback_spectrum().lambda_plus;
  DynamicalDegrees d{sigma, sigma, 1.0, false};
  // Cohomological hyperbolicity needs one degree strictly above all others.
  const double top = std::max({d.lambda1, d.lambda2, d.lambda3});
  int at_top = 0;
  for (double l : {d.lambda1, d.lambda2, d.lambda3})
    if (std::abs(l - top) <= 1e-12 * top) ++at_top;
  d.not_cohomologically_hyperbolic = at_top > 1;
  return d;
}

ClassVolume invariant_class_volume() {
  const double sigma = pullback_spectrum().lambda_plus;
  ClassVolume v;
  v.value = 1.0 + 3.0 / sigma;
  v.golden_form = 3.0 * sigma - 2.0;
  v.big = v.value > 0.0;
  return v;
}

double monte_carlo_volume(int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const double sigma = pullback_spectrum().lambda_plus;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    // Fubini-Study distributed point q = (g1, g2, g3) / g4.
    std::array<std::complex<double>, 4> v;
    for (auto& c : v) {
      const double re = g(rng);
      const double im = g(rng);
      c = {re, im};
    }
    const std::complex<double> x = v[0] / v[3], y = v[1] / v[3], z = v[2] / v[3];
    const double r = std::norm(x) + std::norm(y) + std::norm(z);
    // Hv^-1 = 2(1+r)(I + conj(q) q^T); Hu has the single entry 1/(2 sigma (1+|y|^2)^2).
    const double hv_inv_yy = 2.0 * (1.0 + r) * (1.0 + std::norm(y));
    const double hu_yy = 1.0 / (2.0 * sigma * (1.0 + std::norm(y)) * (1.0 + std::norm(y)));
    acc += 1.0 + hv_inv_yy * hu_yy;
  }
  return acc / samples;
}

namespace {

struct GaussQ {
  mpq_class re, im;
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

GaussQ operator+(const GaussQ& a, const GaussQ& b) { return {a.re + b.re, a.im + b.im}; }
GaussQ operator*(const GaussQ& a, const GaussQ& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussQ exact(cplx v) { return {mpq_class(v.real()), mpq_class(v.imag())}; }

using Key = std::uint64_t;
constexpr int kShift = 20;

Key key(int i, int j, int k) {
  return (static_cast<Key>(i) << (2 * kShift)) | (static_cast<Key>(j) << kShift) |
         static_cast<Key>(k);
}
int deg_of(Key k) {
  const Key mask = (Key{1} << kShift) - 1;
  return static_cast<int>((k >> (2 * kShift)) + ((k >> kShift) & mask) + (k & mask));
}

using Poly = std::map<Key, GaussQ>;

void add_into(Poly& acc, Key k, const GaussQ& c) {
  if (c.is_zero()) return;
  auto it = acc.find(k);
  if (it == acc.end()) {
    acc.emplace(k, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) acc.erase(it);
}

Poly scale(const Poly& a, const GaussQ& s) {
  Poly r;
  if (s.is_zero()) return r;
  for (const auto& [k, c] : a) add_into(r, k, c * s);
  return r;
}

Poly sum(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [k, c] : b) add_into(r, k, c);
  return r;
}

Poly product(const Poly& a, const Poly& b) {
  const double work = static_cast<double>(a.size()) * static_cast<double>(b.size());
  if (work > 1e7) throw TermExplosion("degree oracle: term count exceeds 1e7");
  Poly r;
  // Monomial exponents add as packed integers; each field stays below 2^20.
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) add_into(r, ka + kb, ca * cb);
  return r;
}

int total_degree(const Poly& a) {
  int d = 0;
  for (const auto& kv : a) d = std::max(d, deg_of(kv.first));
  return d;
}

}  // namespace

std::vector<DegreeTriple> degree_sequence(const Params& p, int n_max) {
  if (n_max < 1 || n_max > 12) throw std::invalid_argument("n_max must be in [1, 12]");
  const GaussQ b = exact(p.b()), c = exact(p.c()), d = exact(p.d()), e = exact(p.e());
  const GaussQ one{1, 0};
  Poly P1{{key(1, 0, 0), one}}, P2{{key(0, 1, 0), one}}, P3{{key(0, 0, 1), one}};
  Poly constant_e;
  add_into(constant_e, key(0, 0, 0), e);
  std::vector<DegreeTriple> out;
  for (int n = 1; n <= n_max; ++n) {
    // f^n = f o f^{n-1}: (P2, P3, P2 P3 + b P2 + c P3 + d P1 + e).
    Poly next;
    try {
      next = product(P2, P3);
    } catch (const TermExplosion& ex) {
      throw TermExplosion(ex.what(), out);
    }
    next = sum(next, scale(P2, b));
    next = sum(next, scale(P3, c));
    next = sum(next, scale(P1, d));
    next = sum(next, constant_e);
    P1 = std::move(P2);
    P2 = std::move(P3);
    P3 = std::move(next);
    out.push_back({total_degree(P1), total_degree(P2), total_degree(P3)});
  }
  return out;
}

}  // namespace c3auto
