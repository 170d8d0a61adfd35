#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "c3auto/core_map.hpp"

namespace c3auto {

class IndeterminateError : public std::runtime_error {
 public:
  explicit IndeterminateError(const std::string& what) : std::runtime_error(what) {}
};

class ChartDomainError : public std::runtime_error {
 public:
  explicit ChartDomainError(const std::string& what) : std::runtime_error(what) {}
};

struct HomPoint {
  cplx X{}, Y{}, Z{}, T{};

  double max_abs() const;
  // Scales the largest-modulus coordinate to 1.
  HomPoint normalized() const;
  bool at_infinity() const;
  std::array<cplx, 4> coords() const { return {X, Y, Z, T}; }
};

HomPoint to_hom(const AffinePoint& q);

// sin of the angle between representatives; 0 iff projectively equal.
double chordal_distance(const HomPoint& a, const HomPoint& b);

// [YT : ZT : YZ + bYT + cZT + dXT + eT^2 : T^2]
HomPoint apply_homogeneous(const Params& p, const HomPoint& h);
// [ZT - XY - bXT - cYT - eT^2 : dXT : dYT : dT^2]
HomPoint apply_homogeneous_inverse(const Params& p, const HomPoint& h);

enum class Indeterminacy { Regular, OnL, OnLprime, OnLdoubleprime };

// L = (Y=T=0); L' = (Z=T=0) for f; L'' = (X=T=0) for f^-1.
Indeterminacy indeterminacy_status(const Params& p, const HomPoint& h, Direction dir);

// Charts of the blow-up X of P^3 along L. The fiber coordinate [xi1:xi2]
// satisfies xi1*T = xi2*Y.
//   ZXi1: (X/Z, Y/Z, xi2/xi1)   E = {w2=0}, H~inf = {w3=0}
//   ZXi2: (X/Z, xi1/xi2, T/Z)   E = {w3=0}
//   XXi2: (xi1/xi2, Z/X, T/X)   E = {w3=0}
//   Y:    (X/Y, Z/Y, T/Y)       affine chart of P^3 away from L
enum class ChartId { ZXi1, ZXi2, XXi2, Y };

const char* chart_name(ChartId id);

struct ChartPoint {
  ChartId chart = ChartId::ZXi1;
  cplx w1{}, w2{}, w3{};
};

HomPoint blowdown(const ChartPoint& q);

// Chart-local equations; ChartDomainError where the divisor is not visible.
cplx exceptional_equation(const ChartPoint& q);
cplx hinf_equation(const ChartPoint& q);

// Image of q under the lift of f (or f^-1) to X, expressed in `out`.
// IndeterminateError when q lies on the indeterminacy locus or the chart
// denominator (A, B or C) vanishes; ChartDomainError when the image is not
// visible in `out`.
ChartPoint apply_chart(const Params& p, const ChartPoint& q, ChartId out);
ChartPoint apply_chart_inverse(const Params& p, const ChartPoint& q, ChartId out);

// Denominator of the displayed chart formulas (A, B, C); 1 for the Y chart.
cplx chart_denominator(const Params& p, const ChartPoint& q);

enum class CurveId { Cplus, Cminus, CprimePlus, CprimeMinus };

const char* curve_name(CurveId id);

// Gradient-scaled residual of {E = 0, curve = 0} at q.
double curve_residual(const Params& p, CurveId curve, const ChartPoint& q);

struct SpecialPoints {
  ChartPoint B;
  ChartPoint Bprime;
  bool coincident = false;
};

SpecialPoints special_points_B(const Params& p);
int intersection_count(const Params& p);

struct FlowReport {
  int hinf_samples = 0;
  int hinf_to_pminus = 0;
  int e_samples = 0;
  int e_to_ldoubleprime = 0;
  int ldoubleprime_to_pminus = 0;
  double max_hinf_distance = 0.0;
  double max_ldoubleprime_residual = 0.0;
  double max_second_distance = 0.0;

  bool all_pass() const {
    return hinf_to_pminus == hinf_samples && e_to_ldoubleprime == e_samples &&
           ldoubleprime_to_pminus == e_samples;
  }
};

FlowReport verify_infinity_flow(const Params& p, int samples, std::uint64_t seed);

struct CommutationReport {
  int samples = 0;
  int skipped = 0;
  double p50 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

// Samples random chart points with |denominator| > min_denominator and
// compares blowdown(apply_chart(q)) with apply_homogeneous(blowdown(q)).
CommutationReport check_commutation(const Params& p, int samples, std::uint64_t seed,
                                    double min_denominator = 0.1);

}  // namespace c3auto
