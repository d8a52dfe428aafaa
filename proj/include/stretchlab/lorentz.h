#pragma once

// Lorentzian linear algebra on R^{2,1} with signature (+,+,-), the
// hyperboloid model of the hyperbolic plane, and the Lie algebra so(2,1).
//
// Conventions:
//   (X, Y) = X^T e Y,          e = diag(1, 1, -1)
//   A^#    = e A^T e           (adjoint with respect to (,))
//   X x Y  = Y X^# - X Y^#     (cross product, lands in so(2,1))
//   (A, B) = Tr(AB)            (Killing form, signature (2,1))
//
// With these conventions a unit speed geodesic t -> e^{tB} X has generator
// B = gamma'(t) x gamma(t) and Killing norm (B, B) = 2.

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace stretchlab {

using MinkVec = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace tol {
inline constexpr double kHyperboloid = 1e-9;
inline constexpr double kGroup = 1e-12;
inline constexpr double kExpSeries = 1e-8;  // |k| below which exp uses Taylor
inline constexpr double kHyperbolic = 1e-10;  // |Tr - 3| threshold
}  // namespace tol

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Element of so(2,1): traceless, A^# = -A.
struct LieAlg {
  Mat3 m = Mat3::Zero();

  LieAlg() = default;
  explicit LieAlg(const Mat3& mat) : m(mat) {}

  static LieAlg zero() { return LieAlg{}; }

  LieAlg& operator+=(const LieAlg& o) { m += o.m; return *this; }
  LieAlg& operator-=(const LieAlg& o) { m -= o.m; return *this; }
  LieAlg& operator*=(double s) { m *= s; return *this; }
  friend LieAlg operator+(LieAlg a, const LieAlg& b) { return a += b; }
  friend LieAlg operator-(LieAlg a, const LieAlg& b) { return a -= b; }
  friend LieAlg operator-(LieAlg a) { a.m = -a.m; return a; }
  friend LieAlg operator*(double s, LieAlg a) { return a *= s; }
  friend LieAlg operator*(LieAlg a, double s) { return a *= s; }

  MinkVec apply(const MinkVec& x) const { return m * x; }
  double norm() const { return m.norm(); }  // Frobenius
};

/// Element of SO+(2,1).
struct GroupElem {
  Mat3 m = Mat3::Identity();

  GroupElem() = default;
  explicit GroupElem(const Mat3& mat) : m(mat) {}

  static GroupElem identity() { return GroupElem{}; }

  GroupElem operator*(const GroupElem& o) const { return GroupElem(m * o.m); }
  GroupElem& operator*=(const GroupElem& o) { m = m * o.m; return *this; }
  MinkVec operator*(const MinkVec& x) const { return m * x; }

  /// g^{-1} = g^# for elements of the group.
  GroupElem inverse() const;
  double trace() const { return m.trace(); }
};

const Mat3& eSharp();

double mink_dot(const MinkVec& x, const MinkVec& y);
double mink_norm_sq(const MinkVec& x);

/// Hyperboloid membership: (X,X) = -1 and z >= 1 (up to tolerance).
bool on_hyperboloid(const MinkVec& x, double tolerance = tol::kHyperboloid);
/// Rescale a future timelike vector onto the upper sheet.
MinkVec normalize_hyperboloid(const MinkVec& x);
double hyperbolic_distance(const MinkVec& x, const MinkVec& y);

LieAlg cross(const MinkVec& x, const MinkVec& y);
MinkVec project_tangent(const MinkVec& x, const MinkVec& v);

double killing(const LieAlg& a, const LieAlg& b);
Mat3 sharp(const Mat3& a);
bool is_lie_algebra(const Mat3& a, double tolerance = 1e-10);
/// Skew part with respect to (,); orthogonal projection onto so(2,1).
LieAlg project_lie(const Mat3& a);
bool is_group_element(const Mat3& g, double tolerance = tol::kGroup);

LieAlg bracket(const LieAlg& a, const LieAlg& b);
LieAlg adjoint(const GroupElem& g, const LieAlg& a);

enum class IsometryType { kHyperbolic, kParabolic, kElliptic, kIdentity };

GroupElem exp_so21(const LieAlg& a);
/// Inverse of exp_so21 for hyperbolic and elliptic elements (rotation angle < pi).
LieAlg log_so21(const GroupElem& g);
IsometryType classify(const GroupElem& g, double tolerance = tol::kHyperbolic);
/// Taylor series of the matrix exponential; test oracle for exp_so21.
Mat3 exp_series(const Mat3& a, int terms = 30);

/// Point on the geodesic through x with unit initial velocity v, at signed
/// arc length t.
MinkVec geodesic(const MinkVec& x, const MinkVec& v, double t);
/// Log map on the hyperboloid: tangent vector at x pointing at y with
/// length d(x, y).
MinkVec log_map(const MinkVec& x, const MinkVec& y);
MinkVec exp_map(const MinkVec& x, const MinkVec& v);

/// Canonical boost taking (0,0,1) to x; its first two columns form an
/// orthonormal frame of T_x H.
GroupElem boost_to(const MinkVec& x);
/// Rotation by angle theta about the apex (0,0,1), counterclockwise in xy.
GroupElem rotation(double theta);

/// Standard elements at the apex X0 = (0,0,1).
MinkVec apex();
LieAlg std_b();       // B:     B23 = B32 = 1
LieAlg std_b_perp();  // B_perp: a13 = a31 = 1
LieAlg std_n_hat();   // n_hat: d12 = -d21 = 1

/// Adapted basis (B, B_perp, n_hat) of so(2,1) at a point of the axis of B.
struct LieFrame {
  LieAlg b;
  LieAlg b_perp;
  LieAlg n_hat;
};

/// Coordinates (b, a, z) of A = b B + a B_perp + z n_hat.
struct FrameCoords {
  double b = 0;
  double a = 0;
  double z = 0;
};

LieFrame frame_at(const LieAlg& axis_generator, const MinkVec& base,
                  double tolerance = 1e-9);
FrameCoords frame_coords(const LieFrame& frame, const LieAlg& a);
LieAlg from_frame_coords(const LieFrame& frame, const FrameCoords& c);

std::string to_string(IsometryType t);

}  // namespace stretchlab
