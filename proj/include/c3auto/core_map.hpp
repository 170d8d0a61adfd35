#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace c3auto {

using cplx = std::complex<double>;

// Max-norm threshold past which orbit values are no longer trusted.
inline constexpr double kOverflowGuard = 1e150;

struct AffinePoint {
  cplx x{}, y{}, z{};

  double norm() const;   // max norm
  double norm2() const;  // squared euclidean norm
  bool finite() const;
};

AffinePoint operator+(const AffinePoint& a, const AffinePoint& b);
AffinePoint operator-(const AffinePoint& a, const AffinePoint& b);
AffinePoint operator*(cplx s, const AffinePoint& a);

enum class Direction { Forward, Backward };

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowGuardError : public std::runtime_error {
 public:
  explicit OverflowGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Coefficients of f(x,y,z) = (y, z, yz + by + cz + dx + e).
class Params {
 public:
  cplx b() const { return b_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }
  cplx e() const { return e_; }
  double sigma() const { return sigma_; }
  double log_abs_d() const { return log_abs_d_; }
  // 1 + |b| + |c| + |d| + |e|, the scale used by radius defaults.
  double coefficient_mass() const;

 private:
  Params(cplx b, cplx c, cplx d, cplx e);
  friend Params make_params(cplx b, cplx c, cplx d, cplx e);

  cplx b_, c_, d_, e_;
  double sigma_;
  double log_abs_d_;
};

Params make_params(cplx b, cplx c, cplx d, cplx e);

// Forward map; throws OverflowGuardError when the image exceeds kOverflowGuard.
AffinePoint apply(const Params& p, const AffinePoint& q);
AffinePoint apply_inverse(const Params& p, const AffinePoint& q);
AffinePoint apply(const Params& p, const AffinePoint& q, Direction dir);

// Same formulas without the guard, for callers that manage magnitude themselves.
AffinePoint apply_unchecked(const Params& p, const AffinePoint& q);
AffinePoint apply_inverse_unchecked(const Params& p, const AffinePoint& q);

cplx jacobian_det(const Params& p);

AffinePoint tau(const AffinePoint& q);
// (tau o f o tau)(q) = (xy + by + cx + dz + e, x, y).
AffinePoint conjugate_by_tau(const Params& p, const AffinePoint& q);

struct FixedPoint {
  AffinePoint point;
  int multiplicity = 1;
};

// Solutions (x,x,x) of x^2 + (b+c+d-1)x + e = 0.
std::vector<FixedPoint> fixed_points(const Params& p);

// Translation by (k,k,k) that moves a fixed point to the origin. The
// conjugated map T^-1 f T belongs to the family with e = 0.
struct ENormalization {
  cplx shift;
  Params normalized;
};
ENormalization kill_e(const Params& p);

// f^-1 = tau o S o h o S^-1 o tau with S(q) = scale*q and h in the family.
struct InverseConjugacy {
  Params params;
  cplx scale;
};
InverseConjugacy inverse_as_family(const Params& p);

struct OrbitStatus {
  enum class Kind { Bounded, Escaped, OverflowGuard };
  Kind kind = Kind::Bounded;
  int step = 0;  // number of steps for Bounded, index otherwise
};

struct OrbitRecord {
  std::vector<AffinePoint> points;
  std::vector<double> norms;
  OrbitStatus status;
};

OrbitRecord orbit(const Params& p, const AffinePoint& q, int max_steps, double escape_radius,
                  Direction dir = Direction::Forward);

}  // namespace c3auto
