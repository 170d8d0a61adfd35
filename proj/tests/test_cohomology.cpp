#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "c3auto/cohomology.hpp"

using namespace c3auto;

namespace {

// Degrees of f^n restricted to a random line t -> w + t v, with
// coefficients in F_p. Generic lines see the total degree.
using u64 = std::uint64_t;
constexpr u64 kP = (u64{1} << 61) - 1;

u64 mulm(u64 a, u64 b) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % kP); }
u64 addm(u64 a, u64 b) { return (a + b) % kP; }
u64 modp(long long v) { return v >= 0 ? static_cast<u64>(v) % kP : kP - (static_cast<u64>(-v) % kP); }

using Uni = std::vector<u64>;

Uni mul(const Uni& a, const Uni& b) {
  Uni r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = addm(r[i + j], mulm(a[i], b[j]));
  return r;
}

Uni axpy(Uni acc, u64 s, const Uni& x) {
  if (acc.size() < x.size()) acc.resize(x.size(), 0);
  for (size_t i = 0; i < x.size(); ++i) acc[i] = addm(acc[i], mulm(s, x[i]));
  return acc;
}

int degree(const Uni& a) {
  for (size_t i = a.size(); i-- > 0;)
    if (a[i] != 0) return static_cast<int>(i);
  return -1;
}

std::vector<DegreeTriple> modular_degrees(long long b, long long c, long long d, long long e, int n_max) {
  std::mt19937_64 rng(12345);
  Uni P1{rng() % kP, rng() % kP}, P2{rng() % kP, rng() % kP}, P3{rng() % kP, rng() % kP};
  std::vector<DegreeTriple> out;
  for (int n = 1; n <= n_max; ++n) {
    Uni next = mul(P2, P3);
    next = axpy(next, modp(b), P2);
    next = axpy(next, modp(c), P3);
    next = axpy(next, modp(d), P1);
    next[0] = addm(next[0], modp(e));
    P1 = std::move(P2);
    P2 = std::move(P3);
    P3 = std::move(next);
    out.push_back({degree(P1), degree(P2), degree(P3)});
  }
  return out;
}

}  // namespace

TEST_CASE("pullback matrix and spectrum") {
  const PullbackSpectrum s = pullback_spectrum();
  CHECK(s.matrix.m[0][0] == 1);
  CHECK(s.matrix.m[0][1] == 1);
  CHECK(s.matrix.m[1][0] == 1);
  CHECK(s.matrix.m[1][1] == 0);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(s.lambda_plus - 1.6180339887498949) < 1e-12);
  CHECK(std::abs(s.lambda_minus - (1.0 - std::sqrt(5.0)) / 2.0) < 1e-12);
  const ClassVector v = s.matrix * ClassVector{golden, 1.0};
  CHECK(std::abs(v.h - golden * golden) < 1e-14);
  CHECK(std::abs(v.e - golden) < 1e-14);
  CHECK(std::abs(s.leading.h / s.leading.e - golden) < 1e-14);

  const Matrix2i m2 = s.matrix * s.matrix;
  Matrix2i zero{};
  Matrix2i lhs;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) lhs.m[i][j] = m2.m[i][j] - s.matrix.m[i][j] - identity2i().m[i][j];
  CHECK(lhs == zero);
}

TEST_CASE("matrix powers are Fibonacci numbers") {
  std::vector<std::int64_t> fib{0, 1};
  for (int i = 2; i <= 32; ++i) fib.push_back(fib[static_cast<size_t>(i - 1)] + fib[static_cast<size_t>(i - 2)]);
  const Matrix2i m = pullback_spectrum().matrix;
  for (int n = 1; n <= 30; ++n) {
    const Matrix2i mn = matrix_power(m, n);
    CHECK(mn.m[0][0] == fib[static_cast<size_t>(n + 1)]);
    CHECK(mn.m[0][1] == fib[static_cast<size_t>(n)]);
    CHECK(mn.m[1][0] == fib[static_cast<size_t>(n)]);
    CHECK(mn.m[1][1] == fib[static_cast<size_t>(n - 1)]);
  }
}

TEST_CASE("dynamical degrees and class volume") {
  const DynamicalDegrees dd = dynamical_degrees();
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(dd.lambda1 - golden) < 1e-15);
  CHECK(std::abs(dd.lambda2 - golden) < 1e-15);
  CHECK(dd.lambda3 == 1.0);
  CHECK(dd.not_cohomologically_hyperbolic);

  const ClassVolume v = invariant_class_volume();
  CHECK(std::abs(v.value - 2.854101966249685) < 1e-15);
  CHECK(std::abs(v.value - v.golden_form) < 1e-15);
  CHECK(v.big);
  CHECK(v.value > 0.0);
}

TEST_CASE("Monte Carlo volume agrees within 5 percent") {
  const double mc = monte_carlo_volume(200000, 42);
  CHECK(std::abs(mc / invariant_class_volume().value - 1.0) < 0.05);
}

TEST_CASE("exact degree growth at generic parameters") {
  const Params p = make_params(1, 1, 2, 0);
  const auto seq = degree_sequence(p, 8);
  REQUIRE(seq.size() == 8);
  CHECK(seq[0].x == 1);
  CHECK(seq[0].y == 1);
  CHECK(seq[0].z == 2);
  const int expect[] = {2, 3, 5, 8, 13, 21};
  for (int n = 0; n < 6; ++n) CHECK(seq[static_cast<size_t>(n)].max() == expect[n]);
  for (size_t n = 2; n < seq.size(); ++n) CHECK(seq[n].max() == seq[n - 1].max() + seq[n - 2].max());
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(static_cast<double>(seq[5].max()) / seq[4].max() - golden) < 0.01);

  const auto oracle = modular_degrees(1, 1, 2, 0, 8);
  for (size_t n = 0; n < seq.size(); ++n) {
    CHECK(seq[n].x == oracle[n].x);
    CHECK(seq[n].y == oracle[n].y);
    CHECK(seq[n].z == oracle[n].z);
  }
}

TEST_CASE("degenerate parameters are reported") {
  const auto seq = degree_sequence(make_params(0, 0, 2, 0), 8);
  const auto oracle = modular_degrees(0, 0, 2, 0, 8);
  for (size_t n = 0; n < seq.size(); ++n) {
    CHECK(seq[n].z == oracle[n].z);
    MESSAGE("b=c=e=0, n=" << n + 1 << ": max degree " << seq[n].max());
  }
}

TEST_CASE("complex Gaussian rational parameters") {
  const auto seq = degree_sequence(make_params({0.5, 0.25}, {1, -1}, {2, 1}, {0.125, 0}), 6);
  for (size_t n = 2; n < seq.size(); ++n) CHECK(seq[n].max() == seq[n - 1].max() + seq[n - 2].max());
  CHECK_THROWS_AS(degree_sequence(make_params(1, 1, 2, 0), 13), std::invalid_argument);
  CHECK_THROWS_AS(degree_sequence(make_params(1, 1, 2, 0), 0), std::invalid_argument);
}
