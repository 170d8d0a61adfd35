#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "c3auto/green.hpp"
#include "c3auto/infinity_partition.hpp"
#include "candidates.hpp"
#include "test_support.hpp"

using namespace c3auto;
using namespace testing_support;
using Big = boost::multiprecision::cpp_bin_float_50;
using S = InfinitySymbol;

TEST_CASE("wedge membership examples") {
  const Params p = make_params(0, 0, 2, 0);
  const WedgeParams w{0.1, 1e3};
  CHECK(wedge_membership(p, {1e6, 1, 1}, w) == S::Aplus);
  CHECK(wedge_membership(p, {1, 1, 1e6}, w) == S::Aminus);
  CHECK(wedge_membership(p, {1, 1e6, 1}, w) == S::Cpoint);
  CHECK(wedge_membership(p, {1e6, 1, 1e6}, w) == S::Bpair);
  CHECK(wedge_membership(p, {1e6, 1e6, 1e6}, w) == S::None);
  CHECK_THROWS_AS(wedge_membership(p, {1, 1, 1}, w), BelowFloor);
  CHECK_THROWS_AS(wedge_membership(p, {1e6, 1, 1}, WedgeParams{2.5, 1e3}), std::invalid_argument);
}

TEST_CASE("overlapping wedges") {
  const Params p = make_params(0, 0, 2, 0);
  const WedgeParams w{0.05, 1e3};
  // A+ ratio 0.0385 and A- ratio 0.0318: both vanish at eps/2, priority decides.
  CHECK(wedge_membership(p, {1e6, 0.07, 1.1e6}, w) == S::Aplus);
  // A+ ratio 0.04 and A- ratio 0.02: A- alone survives at eps/2.
  const double k = std::sqrt(2.0);
  CHECK(wedge_membership(p, {1e6, 0.08 / k, k * 1e6}, w) == S::Aminus);
  // On y = 0 both numerators vanish at every level.
  CHECK(wedge_membership(p, {1e6, 0, 1e6}, w) == S::None);
}

TEST_CASE("wedge image law") {
  std::mt19937_64 rng(2024);
  const double eps = 0.05;
  int samples = 0;
  for (const Params& p : {make_params(0, 0, 2, 0), make_params({0.3, 0.1}, {-0.2, 0.05}, {1.5, 1.0}, 0)}) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const AffinePoint q{std::polar(std::pow(10.0, 3 + 5 * u(rng)), 6.3 * u(rng)), random_cplx(rng, 30.0),
                          random_cplx(rng, 30.0)};
      if (q.norm() < 1e3) continue;
      if (!(std::abs(q.y * q.z + p.b() * q.y + p.c() * q.z) < eps * std::abs(p.d() * q.x))) continue;
      const cplx delta = apply(p, q).z / (p.d() * q.x) - 1.0;
      CHECK(std::abs(delta) < eps);
      ++samples;
    }
  }
  CHECK(samples > 1000);
}

TEST_CASE("period detection") {
  const std::vector<S> p3{S::Aplus, S::Aminus, S::Cpoint, S::Aplus, S::Aminus, S::Cpoint, S::Aplus};
  CHECK(detect_period(p3) == Period::P3);
  std::vector<S> p5;
  for (int r = 0; r < 2; ++r)
    for (S s : {S::Aplus, S::Aminus, S::Cpoint, S::Bpair, S::Cpoint}) p5.push_back(s);
  CHECK(detect_period(p5) == Period::P5);
  // One B cycle is not enough.
  CHECK(detect_period(std::vector<S>(p5.begin() + 3, p5.end())) != Period::P5);
  CHECK(detect_period({S::Aplus, S::Aminus}) == Period::TooShort);
  CHECK(detect_period({S::None, S::None, S::Aplus, S::None, S::Cpoint, S::Cpoint, S::Aplus}) == Period::Aperiodic);
  // A transient before the cycle is allowed.
  std::vector<S> late{S::None, S::Cpoint};
  late.insert(late.end(), p3.begin(), p3.end());
  CHECK(detect_period(late) == Period::P3);
}

TEST_CASE("itineraries") {
  const Params p = make_params(0, 0, 2, 0);
  const Itinerary gen = itinerary(p, {10, 10, 10}, 60, {});
  CHECK(gen.super_escape);
  CHECK(gen.period == Period::Aperiodic);
  CHECK_THROWS_AS(itinerary(p, {10, 10, 10}, 5, {}), std::invalid_argument);

  const auto& cands = standard_candidates();
  REQUIRE(!cands.empty());
  for (const auto& c : cands) {
    const Itinerary it = itinerary(p, c.point, 3 * c.verified_blocks, {0.05, 30.0});
    CHECK(it.period == Period::P3);
    CHECK(std::abs(it.rate_estimate - 2.0) < 0.02);
    CHECK_FALSE(it.super_escape);
  }
}

TEST_CASE("backward itinerary runs on the conjugate family member") {
  const Params p2 = make_params(0, 0, 0.5, 0);
  const InverseConjugacy ic = inverse_as_family(p2);
  CHECK(std::abs(ic.params.d() - 2.0) < 1e-15);
  const WedgeParams w{0.05, 30.0};
  for (const auto& c : standard_candidates()) {
    const AffinePoint q = tau(ic.scale * c.point);
    const int steps = 3 * c.verified_blocks;
    const Itinerary back = itinerary(p2, q, steps, w, Direction::Backward);
    // Direct backward iteration, read in the frame of h.
    std::vector<S> direct;
    AffinePoint r = q, hq = c.point;
    for (int n = 0; n <= steps; ++n) {
      const AffinePoint in_h = (1.0 / ic.scale) * tau(r);
      CHECK(rel_err(in_h, hq) < 1e-9);
      if (in_h.norm() >= w.norm_floor) direct.push_back(mirror(wedge_membership(ic.params, in_h, w)));
      else if (!direct.empty()) direct.push_back(S::None);
      r = apply_inverse(p2, r);
      hq = apply(ic.params, hq);
    }
    CHECK(back.symbols == direct);
    const Itinerary fwd = itinerary(ic.params, c.point, steps, w);
    REQUIRE(fwd.symbols.size() == back.symbols.size());
    for (size_t i = 0; i < fwd.symbols.size(); ++i) CHECK(back.symbols[i] == mirror(fwd.symbols[i]));
  }
}

TEST_CASE("envelope products against 50 digit evaluation") {
  const double d = 2.0, eps = 0.1;
  const EnvelopeBounds b = envelope_log_bounds(d, eps, 3);
  Big lo = 1, hi = 1;
  for (int i = 1; i <= 3; ++i) {
    const Big t = Big(eps) / boost::multiprecision::pow(Big(d) - Big(eps), i - 1);
    lo *= Big(d) - t;
    hi *= Big(d) + t;
  }
  CHECK(std::abs(std::exp(b.log_lower[2]) - static_cast<double>(lo)) < 1e-12);
  CHECK(std::abs(std::exp(b.log_upper[2]) - static_cast<double>(hi)) < 1e-12);

  for (int n : {5, 10, 40}) {
    Big s = 0;
    for (int i = 1; i <= n; ++i) {
      const Big t = Big(eps) / boost::multiprecision::pow(Big(d) - Big(eps), i - 1);
      s += boost::multiprecision::log(Big(d) + t) - boost::multiprecision::log(Big(d) - t);
    }
    CHECK(std::abs(sigma_n_eps(d, eps, n) - static_cast<double>(s)) < 1e-12);
  }
}

TEST_CASE("correction sums converge") {
  const double d = 2.0, eps = 0.1;
  // Differences between partial sums stay below the tail bound.
  for (int n : {10, 20, 40}) {
    const double tail = sigma_tail_bound(d, eps, n);
    CHECK(c_eps(d, eps) - sigma_n_eps(d, eps, n) <= tail);
    CHECK(c_eps(d, eps) - sigma_n_eps(d, eps, n) >= 0.0);
  }
  CHECK(std::abs(sigma_n_eps(d, eps, 40) - sigma_n_eps(d, eps, 80)) < 1e-10);
  CHECK(std::abs(sigma_n_eps(d, eps, 80) - sigma_n_eps(d, eps, 160)) < 1e-10);
  MESSAGE("sigma_10 - sigma_20 at eps 0.1: " << sigma_n_eps(d, eps, 20) - sigma_n_eps(d, eps, 10));
  double prev = 1e9;
  for (double e : {0.2, 0.1, 0.05, 0.01}) {
    const double c = c_eps(d, e);
    CHECK(c < prev);
    CHECK(sigma_n_eps(d, e, 10) <= c);
    prev = c;
  }
  CHECK(c_eps(d, 1e-6) < 1e-5);
  CHECK(sigma_tail_bound(1.05, 0.1, 10) == std::numeric_limits<double>::infinity());
}

TEST_CASE("growth envelope on linear escape candidates") {
  const Params p = make_params(0, 0, 2, 0);
  int checked = 0, premise_failures = 0;
  for (const auto& c : standard_candidates()) {
    for (double floor : {1e3, 30.0}) {
      const int n = std::min(10, c.verified_blocks);
      try {
        const EnvelopeReport r = growth_envelope_check(p, c.point, {0.05, floor}, n);
        CHECK(r.holds());
        CHECK(r.margins.size() == static_cast<size_t>(n));
        ++checked;
      } catch (const PremiseError&) {
        ++premise_failures;
      }
    }
  }
  CHECK(checked > 0);
  MESSAGE("envelope checks: " << checked << " with premise, " << premise_failures << " without");
  CHECK_THROWS_AS(growth_envelope_check(p, {0, 0, 0}, {}, 5), PremiseError);
  CHECK_THROWS_AS(growth_envelope_check(p, {10, 10, 10}, {0.05, 5.0}, 5), PremiseError);
}

TEST_CASE("linear escape search") {
  const Params p = make_params(0, 0, 2, 0);
  LinearEscapeOptions opts;
  const LinearEscapeSearch s = find_linear_escape(p, {0, 0, 0}, {10, 10, 10}, opts);
  for (const auto& c : s.candidates) {
    const RateVerification v = verify_linear_rate(p, c.point, opts);
    CHECK(v.kind == ProbeClass::Linear);
    CHECK(v.rate >= 2.0 * 0.99);
    CHECK(v.rate <= 2.0 * 1.01);
  }
  CHECK_FALSE(s.log.empty());

  // A segment of one bounded point has nothing to find.
  CHECK_FALSE(find_linear_escape(p, {-1, -1, -1}, {-1, -1, -1}, opts).found());
  CHECK_THROWS_AS(find_linear_escape(make_params(0, 0, 0.5, 0), {0, 0, 0}, {1, 1, 1}), std::invalid_argument);

  const auto& cands = standard_candidates();
  MESSAGE("standard wedge segments gave " << cands.size() << " candidates");
  for (const auto& c : cands) {
    const RateVerification v = verify_linear_rate(p, c.point, opts);
    CHECK(v.kind == ProbeClass::Linear);
    CHECK(std::abs(v.rate - 2.0) <= 0.02);
    CHECK(v.verified_blocks >= opts.persist);
  }
}

TEST_CASE("search results do not depend on the thread count") {
  const Params p = make_params(0, 0, 2, 0);
  const auto seg = standard_wedge_segments(0.05)[14];
  LinearEscapeOptions one, many;
  many.threads = 4;
  const auto a = find_linear_escape(p, seg.a, seg.b, one);
  const auto b = find_linear_escape(p, seg.a, seg.b, many);
  CHECK(a.log == b.log);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (size_t i = 0; i < a.candidates.size(); ++i) CHECK(rel_err(a.candidates[i].point, b.candidates[i].point) == 0.0);
}

TEST_CASE("rate verification classes") {
  const Params p = make_params(0, 0, 2, 0);
  LinearEscapeOptions opts;
  CHECK(verify_linear_rate(p, {0, 0, 0}, opts).kind == ProbeClass::Bounded);
  CHECK(verify_linear_rate(p, {10, 10, 10}, opts).kind == ProbeClass::Super);
  // The coordinate axes form an exact cycle (0,0,z) -> (0,z,0) -> (z,0,0) -> (0,0,2z).
  const RateVerification axis = verify_linear_rate(p, {0, 0, 100}, opts);
  CHECK(axis.kind == ProbeClass::Linear);
  CHECK(axis.rate == 2.0);
}
