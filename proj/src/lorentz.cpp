#include "stretchlab/lorentz.h"

#include <cmath>

namespace stretchlab {

namespace {

// sinh(s)/s and (cosh(s)-1)/s^2 as functions of k = s^2, with the elliptic
// continuation for k < 0.
struct ExpCoefficients {
  double c1;
  double c2;
};

ExpCoefficients exp_coefficients(double k) {
  if (std::abs(k) < tol::kExpSeries) {
    return {1.0 + k / 6.0 + k * k / 120.0, 0.5 + k / 24.0 + k * k / 720.0};
  }
  if (k > 0) {
    const double s = std::sqrt(k);
    return {std::sinh(s) / s, (std::cosh(s) - 1.0) / k};
  }
  const double s = std::sqrt(-k);
  return {std::sin(s) / s, (1.0 - std::cos(s)) / (s * s)};
}

}  // namespace

const Mat3& eSharp() {
  static const Mat3 e = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
  return e;
}

GroupElem GroupElem::inverse() const { return GroupElem(sharp(m)); }

double mink_dot(const MinkVec& x, const MinkVec& y) {
  return x(0) * y(0) + x(1) * y(1) - x(2) * y(2);
}

double mink_norm_sq(const MinkVec& x) { return mink_dot(x, x); }

bool on_hyperboloid(const MinkVec& x, double tolerance) {
  return std::abs(mink_norm_sq(x) + 1.0) <= tolerance && x(2) > 0.0;
}

MinkVec normalize_hyperboloid(const MinkVec& x) {
  const double n2 = mink_norm_sq(x);
  if (!(n2 < 0.0) || x(2) <= 0.0) {
    throw GeometryError("normalize_hyperboloid: vector is not future timelike");
  }
  return x / std::sqrt(-n2);
}

double hyperbolic_distance(const MinkVec& x, const MinkVec& y) {
  return std::acosh(std::max(1.0, -mink_dot(x, y)));
}

LieAlg cross(const MinkVec& x, const MinkVec& y) {
  const MinkVec xs = eSharp() * x;
  const MinkVec ys = eSharp() * y;
  return LieAlg(y * xs.transpose() - x * ys.transpose());
}

MinkVec project_tangent(const MinkVec& x, const MinkVec& v) {
  if (!on_hyperboloid(x)) {
    throw GeometryError("project_tangent: base point is not on the hyperboloid");
  }
  return v + mink_dot(v, x) * x;
}

double killing(const LieAlg& a, const LieAlg& b) {
  return (a.m.cwiseProduct(b.m.transpose())).sum();
}

Mat3 sharp(const Mat3& a) { return eSharp() * a.transpose() * eSharp(); }

bool is_lie_algebra(const Mat3& a, double tolerance) {
  const double scale = std::max(1.0, a.norm());
  return std::abs(a.trace()) <= tolerance * scale &&
         (sharp(a) + a).norm() <= tolerance * scale;
}

LieAlg project_lie(const Mat3& a) { return LieAlg(0.5 * (a - sharp(a))); }

bool is_group_element(const Mat3& g, double tolerance) {
  const double scale = std::max(1.0, g.squaredNorm());
  return (g.transpose() * eSharp() * g - eSharp()).norm() <= tolerance * scale &&
         std::abs(g.determinant() - 1.0) <= tolerance * scale && g(2, 2) > 0.0;
}

LieAlg bracket(const LieAlg& a, const LieAlg& b) {
  return LieAlg(a.m * b.m - b.m * a.m);
}

LieAlg adjoint(const GroupElem& g, const LieAlg& a) {
  return LieAlg(g.m * a.m * sharp(g.m));
}

GroupElem exp_so21(const LieAlg& a) {
  // A^3 = k A with k = Tr(A^2)/2 for every A in so(2,1).
  const Mat3 a2 = a.m * a.m;
  const auto [c1, c2] = exp_coefficients(0.5 * a2.trace());
  return GroupElem(Mat3::Identity() + c1 * a.m + c2 * a2);
}

IsometryType classify(const GroupElem& g, double tolerance) {
  const double excess = g.trace() - 3.0;
  if (excess > tolerance) return IsometryType::kHyperbolic;
  if (excess < -tolerance) return IsometryType::kElliptic;
  if ((g.m - Mat3::Identity()).norm() <= tolerance) return IsometryType::kIdentity;
  return IsometryType::kParabolic;
}

LieAlg log_so21(const GroupElem& g) {
  const Mat3 skew = g.m - sharp(g.m);  // g - g^{-1} = 2 (sinh s / s) A
  const double c = 0.5 * (g.trace() - 1.0);  // cosh s, or cos(theta)
  double factor;
  if (std::abs(c - 1.0) < tol::kExpSeries) {
    // s^2 ~ 2 (c - 1); s/sinh s = 1 - s^2/6 + ...
    factor = 1.0 - (c - 1.0) / 3.0;
  } else if (c > 1.0) {
    const double s = std::acosh(c);
    factor = s / std::sinh(s);
  } else {
    if (c <= -1.0 + 1e-12) {
      throw GeometryError("log_so21: rotation by pi has no unique logarithm");
    }
    const double theta = std::acos(c);
    factor = theta / std::sin(theta);
  }
  return project_lie(0.5 * factor * skew);
}

Mat3 exp_series(const Mat3& a, int terms) {
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int n = 1; n < terms; ++n) {
    term = term * a / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

MinkVec geodesic(const MinkVec& x, const MinkVec& v, double t) {
  if (!on_hyperboloid(x)) {
    throw GeometryError("geodesic: base point is not on the hyperboloid");
  }
  if (std::abs(mink_norm_sq(v) - 1.0) > tol::kHyperboloid ||
      std::abs(mink_dot(v, x)) > tol::kHyperboloid) {
    throw GeometryError("geodesic: velocity must be a unit tangent vector");
  }
  // Generator of the translation along the geodesic.
  return exp_so21(t * cross(v, x)) * x;
}

MinkVec log_map(const MinkVec& x, const MinkVec& y) {
  const MinkVec w = y + mink_dot(x, y) * x;  // tangent part of y at x
  const double q = -mink_dot(x, y) - 1.0;    // cosh(d) - 1
  if (q < 1e-12) return w;
  const double d = std::acosh(1.0 + q);
  return (d / std::sqrt(q * (q + 2.0))) * w;
}

MinkVec exp_map(const MinkVec& x, const MinkVec& v) {
  const double n2 = mink_norm_sq(v);
  if (n2 <= 0.0) return x;
  const double n = std::sqrt(n2);
  return std::cosh(n) * x + (std::sinh(n) / n) * v;
}

GroupElem boost_to(const MinkVec& x) {
  const double s = 1.0 / (1.0 + x(2));
  Mat3 g;
  g << 1.0 + x(0) * x(0) * s, x(0) * x(1) * s, x(0),
      x(0) * x(1) * s, 1.0 + x(1) * x(1) * s, x(1),
      x(0), x(1), x(2);
  return GroupElem(g);
}

GroupElem rotation(double theta) {
  return exp_so21(-theta * std_n_hat());
}

MinkVec apex() { return MinkVec(0.0, 0.0, 1.0); }

LieAlg std_b() {
  Mat3 m = Mat3::Zero();
  m(1, 2) = m(2, 1) = 1.0;
  return LieAlg(m);
}

LieAlg std_b_perp() {
  Mat3 m = Mat3::Zero();
  m(0, 2) = m(2, 0) = 1.0;
  return LieAlg(m);
}

LieAlg std_n_hat() {
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1.0;
  m(1, 0) = -1.0;
  return LieAlg(m);
}

LieFrame frame_at(const LieAlg& axis_generator, const MinkVec& base,
                  double tolerance) {
  if (std::abs(killing(axis_generator, axis_generator) - 2.0) > tolerance) {
    throw GeometryError("frame_at: generator must be hyperbolic with (B,B) = 2");
  }
  if (!on_hyperboloid(base)) {
    throw GeometryError("frame_at: base point is not on the hyperboloid");
  }
  const MinkVec v = axis_generator.apply(base);
  if (std::abs(mink_norm_sq(v) - 1.0) > tolerance) {
    throw GeometryError("frame_at: base point does not lie on the axis");
  }
  // Lorentzian cross product of vectors; equivariant under SO+(2,1).
  const MinkVec e = eSharp() * v.cross(base);
  LieFrame f;
  f.b = axis_generator;
  f.b_perp = cross(e, base);
  f.n_hat = bracket(f.b_perp, f.b);
  return f;
}

FrameCoords frame_coords(const LieFrame& frame, const LieAlg& a) {
  return {0.5 * killing(a, frame.b), 0.5 * killing(a, frame.b_perp),
          -0.5 * killing(a, frame.n_hat)};
}

LieAlg from_frame_coords(const LieFrame& frame, const FrameCoords& c) {
  return c.b * frame.b + c.a * frame.b_perp + c.z * frame.n_hat;
}

std::string to_string(IsometryType t) {
  switch (t) {
    case IsometryType::kHyperbolic: return "hyperbolic";
    case IsometryType::kParabolic: return "parabolic";
    case IsometryType::kElliptic: return "elliptic";
    case IsometryType::kIdentity: return "identity";
  }
  return "unknown";
}

}  // namespace stretchlab
