#pragma once

#include <vector>

#include "c3auto/core_map.hpp"

namespace c3auto {

// log+ ||f^{3n}(q)|| - n log|d|
double psi_n(const Params& p, const AffinePoint& q, int n);

enum class PhiRegime { OnWprime, OnK, SuperEscape, Unresolved };
enum class PhiValueKind { Finite, NegInfinity, Undefined };

const char* phi_regime_name(PhiRegime r);

struct PhiOptions {
  int max_blocks = 200;       // f^3 blocks, i.e. 600 map applications
  int window = 5;             // last `window` psi values must agree
  double cauchy_tol = 1e-6;
  double bounded_radius = 0;  // 0 selects default_bounded_radius
};

struct PhiResult {
  double value = 0.0;  // -inf for NegInfinity, NaN for Undefined
  PhiValueKind kind = PhiValueKind::Undefined;
  int n_used = 0;
  PhiRegime regime = PhiRegime::Unresolved;
  std::vector<double> psi;
};

// Limit of psi_n accepted once the last `window` values sit within
// cauchy_tol of each other with the orbit outside the bounded radius.
PhiResult phi_infinity(const Params& p, const AffinePoint& q, const PhiOptions& opts = {});

// log(10 R_K), the smallest cutoff that keeps K below log^A.
double default_cutoff(const Params& p);

// sum_{k<=n} log(|d| + eps/(|d|-eps)^(k-1))
double correction_sum(double d_abs, double eps, int n);

// max(A, log||f^{3n}(q)||) - correction_sum(|d|, eps, n). Needs 0 < eps < |d| - 1.
double phi_prime_n(const Params& p, const AffinePoint& q, int n, double eps, double cutoff_a);

enum class KVerdict { InK, Escapes, Unresolved };

const char* k_verdict_name(KVerdict v);

// InK when the orbit stays below `radius` for `budget` steps and its second
// half stays inside the bounded radius R_K; Escapes as soon as the norm
// exceeds `radius`. radius must exceed R_K.
KVerdict k_membership(const Params& p, const AffinePoint& q, double radius, int budget);

// (1/n) sum_{i<n} max(A, log||f^i(q)||)
double birkhoff_log_average(const Params& p, const AffinePoint& q, int n, double cutoff_a);

}  // namespace c3auto
