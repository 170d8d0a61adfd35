#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "c3auto/green.hpp"
#include "test_support.hpp"

using namespace c3auto;
using namespace testing_support;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// sigma^-n (log(1+y^2)/(2 sigma) + log(1+|q|^2)/2) for a real orbit of
// f with b = c = e = 0, in 50-digit arithmetic.
double brute_force_green(double x0, double y0, double z0, double d, int n) {
  Big x = x0, y = y0, z = z0;
  for (int i = 0; i < n; ++i) {
    Big nz = y * z + Big(d) * x;
    x = y;
    y = z;
    z = nz;
  }
  const Big sigma = (1 + boost::multiprecision::sqrt(Big(5))) / 2;
  const Big pot = boost::multiprecision::log1p(y * y) / (2 * sigma) +
                  boost::multiprecision::log1p(x * x + y * y + z * z) / 2;
  return static_cast<double>(pot / boost::multiprecision::pow(sigma, n));
}

}  // namespace

TEST_CASE("potential examples") {
  const Params p = make_params(0, 0, 2, 0);
  CHECK(potential_total(p, {0, 0, 0}) == 0.0);
  const double s = p.sigma();
  CHECK(std::abs(potential_total(p, {0, 1, 0}) - (std::log(2.0) / (2 * s) + 0.5 * std::log(2.0))) < 1e-15);
  CHECK(std::abs(potential_total(p, {0, 1, 0}) - 0.5608) < 1e-4);
  CHECK(potential_u(p, {1e8, 0, 0}) == 0.0);
  CHECK(std::abs(potential_v({1e8, 0, 0}) - std::log(1e8)) < 1e-12);
}

TEST_CASE("green value at a fixed point") {
  const Params p = make_params(0, 0, 2, 0);
  const GreenResult r = green_value(p, {0, 0, 0}, Direction::Forward);
  CHECK(r.value == 0.0);
  CHECK(r.mode == GreenMode::ConvergedZero);
  CHECK(r.resolved);
  CHECK(r.error_bound < 1e-13);
  CHECK(green_value(p, {-1, -1, -1}, Direction::Forward).value == 0.0);
}

TEST_CASE("green value against 50 digit partial sums") {
  const Params p = make_params(0, 0, 2, 0);
  const GreenResult r = green_value(p, {10, 10, 10}, Direction::Forward);
  REQUIRE(r.resolved);
  CHECK(r.value > 0.0);
  const double oracle = brute_force_green(10, 10, 10, 2, 40);
  CHECK(std::abs(r.value - oracle) < 1e-6);
}

TEST_CASE("functional equation and nonnegativity") {
  const Params p = make_params(0, 0, 2, 0);
  std::mt19937_64 rng(77);
  const double sigma = p.sigma();
  int checked = 0;
  for (double scale : {0.3, 1.5, 5.0, 50.0, 1e3}) {
    for (int k = 0; k < 40; ++k) {
      const AffinePoint q = random_point(rng, scale);
      const GreenResult g = green_value(p, q, Direction::Forward);
      const GreenResult gf = green_value(p, apply(p, q), Direction::Forward);
      CHECK(g.value >= 0.0);
      if (!g.resolved || !gf.resolved) continue;
      CHECK(std::abs(gf.value - sigma * g.value) <= 1e-6 * (1.0 + g.value));
      ++checked;
    }
  }
  CHECK(checked > 150);
}

TEST_CASE("backward green function through the conjugate family member") {
  std::mt19937_64 rng(5);
  for (const Params& p : {make_params(0, 0, 2, 0), make_params({0.3, 0.1}, {-0.2, 0.4}, {1.5, 0.5}, {0.1, 0})}) {
    const InverseConjugacy ic = inverse_as_family(p);
    for (int k = 0; k < 60; ++k) {
      const AffinePoint q = random_point(rng, 4.0);
      const GreenResult gm = green_value(p, q, Direction::Backward);
      const GreenResult gh = green_value(ic.params, (1.0 / ic.scale) * tau(q), Direction::Forward);
      if (!gm.resolved || !gh.resolved) continue;
      CHECK(std::abs(gm.value - gh.value) <= 1e-6 * (1.0 + gm.value));
    }
  }
}

TEST_CASE("error bound dominates later fluctuation") {
  const Params p = make_params(0, 0, 2, 0);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const AffinePoint q = random_point(rng, 20.0);
    const GreenResult a = green_value(p, q, Direction::Forward);
    GreenOptions late;
    late.min_iters = 150;
    const GreenResult b = green_value(p, q, Direction::Forward, late);
    if (!a.resolved || !b.resolved) continue;
    CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-15);
  }
}

TEST_CASE("basin membership") {
  const Params p = make_params(0, 0, 2, 0);
  CHECK(basin_membership(p, {0, 0, 0}) == BasinVerdict::NotInBasin);
  CHECK(basin_membership(p, {10, 10, 10}) == BasinVerdict::InBasin);
  GreenOptions opts;
  opts.positivity_threshold = green_value(p, {10, 10, 10}, Direction::Forward).value;
  CHECK(basin_membership(p, {10, 10, 10}, opts) == BasinVerdict::Unresolved);
}

TEST_CASE("complex line Laplacian calibration") {
  const double h = 1e-3;
  CHECK(std::abs(complex_line_laplacian([](cplx t) { return std::norm(t); }, h) - 4.0) < 0.04);
  // |a| = 10 keeps the h^2 truncation term of the stencil near 1e-10.
  const cplx a(8.0, -6.0);
  CHECK(std::abs(complex_line_laplacian([&](cplx t) { return std::log(std::abs(t - a)); }, h)) < 1e-8);
}

TEST_CASE("green function is pluriharmonic in the basin") {
  const Params p = make_params(0, 0, 2, 0);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 10; ++k) {
    const AffinePoint q = AffinePoint{10, 10, 10} + random_point(rng, 1.0);
    AffinePoint dir = random_point(rng, 1.0);
    dir = (1.0 / dir.norm()) * dir;
    const double g = green_value(p, q, Direction::Forward).value;
    CHECK(std::abs(pluriharmonic_defect(p, q, dir, 1e-3)) < 1e-4 * std::max(1.0, g));
  }
}
