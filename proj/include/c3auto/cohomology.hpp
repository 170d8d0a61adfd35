#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "c3auto/core_map.hpp"

namespace c3auto {

// 2x2 integer matrix acting on H^{1,1} in the basis ({H~inf}, {E}).
struct Matrix2i {
  std::array<std::array<std::int64_t, 2>, 2> m{};

  Matrix2i operator*(const Matrix2i& o) const;
  bool operator==(const Matrix2i& o) const = default;
};

Matrix2i identity2i();
Matrix2i matrix_power(const Matrix2i& a, int n);

struct ClassVector {
  double h = 0.0;  // coefficient of {H~inf}
  double e = 0.0;  // coefficient of {E}
};

ClassVector operator*(const Matrix2i& m, const ClassVector& v);

struct PullbackSpectrum {
  Matrix2i matrix;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  ClassVector leading;  // normalized to e = 1
};

PullbackSpectrum pullback_spectrum();

struct DynamicalDegrees {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  bool not_cohomologically_hyperbolic = false;
};

DynamicalDegrees dynamical_degrees();

struct ClassVolume {
  double value = 0.0;        // 1 + 3/sigma
  double golden_form = 0.0;  // 3 sigma - 2
  bool big = false;
};

ClassVolume invariant_class_volume();

// Monte Carlo estimate of the volume as the Fubini-Study expectation of
// 1 + tr(Hv^-1 Hu), where Hv, Hu are the Levi forms of
// v = log(1+|q|^2)/2 and u = log(1+|y|^2)/(2 sigma).
double monte_carlo_volume(int samples, std::uint64_t seed);

struct DegreeTriple {
  int x = 0, y = 0, z = 0;
  int max() const { return std::max({x, y, z}); }
};

class TermExplosion : public std::runtime_error {
 public:
  explicit TermExplosion(const std::string& what, std::vector<DegreeTriple> completed = {})
      : std::runtime_error(what), completed(std::move(completed)) {}
  // Degrees of the iterates finished before the expansion was abandoned.
  std::vector<DegreeTriple> completed;
};

// Total degrees of the components of f^n for n = 1..n_max, by exact
// composition over Gaussian rationals. Parameters are read as exact binary
// fractions.
std::vector<DegreeTriple> degree_sequence(const Params& p, int n_max);

}  // namespace c3auto
