#include "stretchlab/earthquake.h"

#include <cmath>

namespace stretchlab {

namespace {

// The generator modified by a twist along `curve`.
int partner(int curve) {
  switch (curve) {
    case kA1: return kB1;
    case kB1: return kA1;
    case kA2: return kB2;
    case kB2: return kA2;
  }
  throw std::invalid_argument("twist: unsupported curve");
}

}  // namespace

int parse_curve(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    if (gen_name(i) == name) return i;
  }
  throw std::invalid_argument("unsupported twist curve '" + name + "'");
}

SurfaceGroupRep twist(const SurfaceGroupRep& sigma, const TwistSpec& spec) {
  const int other = partner(spec.curve);
  SurfaceGroupRep out = sigma;
  if (spec.t != 0.0) {
    const LieAlg b = axis_generator(sigma[spec.curve]);
    out.gens[other] = sigma[other] * exp_so21(spec.t * b);
  }
  return out;
}

// Ad(sigma(other)) B(curve) in extended precision: sigma(other) can have
// norm ~1e2, so a double Ad loses ~4 digits, which the relator amplifies.
Cocycle earthquake_cocycle(const SurfaceGroupRep& sigma, int curve, double weight) {
  using Mat3L = Eigen::Matrix<long double, 3, 3>;
  const int other = partner(curve);
  Mat3L e = Mat3L::Identity();
  e(2, 2) = -1;
  auto sharp_l = [&](const Mat3L& m) { return Mat3L(e * m.transpose() * e); };
  const Mat3L g = sigma[curve].m.cast<long double>();
  const Mat3L h = sigma[other].m.cast<long double>();
  const long double c = 0.5L * (g.trace() - 1.0L);
  if (!(c > 1.0L)) throw GeometryError("earthquake_cocycle: twist curve is not hyperbolic");
  const Mat3L b = (g - sharp_l(g)) / (2.0L * std::sqrt(c * c - 1.0L));
  const Mat3L ad = h * b * sharp_l(h);
  Cocycle out = Cocycle::zero(sigma);
  out.values[other] = LieAlg(Mat3(weight * (0.5L * (ad - sharp_l(ad))).cast<double>()));
  return out;
}

double length_derivative(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                         const Cocycle& xi) {
  if (!same_rep(sigma, xi.base, 1e-10)) {
    throw std::invalid_argument("length_derivative: cocycle over a different representation");
  }
  double s = 0;
  for (const auto& c : mc.curves) {
    const GroupElem g = evaluate(c.word, sigma);
    s += c.weight * 0.5 * killing(evaluate_cocycle(xi, c.word), axis_generator(g));
  }
  return s;
}

double twist_length_derivative(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                               int curve, double weight, double step) {
  const double lp = length(mc, twist(sigma, {curve, weight * step}));
  const double lm = length(mc, twist(sigma, {curve, -weight * step}));
  return (lp - lm) / (2.0 * step);
}

double rel_err(double lhs, double rhs) {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

DualityReport duality_check(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                            int curve, double weight, double step) {
  DualityReport r;
  r.lhs = twist_length_derivative(sigma, mc, curve, weight, step);
  r.rhs = 0.5 * pair(standard_measure(mc, sigma), earthquake_cocycle(sigma, curve, weight));
  r.rel_err = rel_err(r.lhs, r.rhs);
  return r;
}

WolpertReport wolpert_reciprocity(const SurfaceGroupRep& sigma, int curve1, int curve2,
                                  double step) {
  const WeightedMulticurve m1{{{Word::generator(curve1), 1.0}}};
  const WeightedMulticurve m2{{{Word::generator(curve2), 1.0}}};
  WolpertReport r;
  r.d12 = twist_length_derivative(sigma, m1, curve2, 1.0, step);
  r.d21 = twist_length_derivative(sigma, m2, curve1, 1.0, step);
  r.diff = std::abs(r.d12 - r.d21);
  return r;
}

}  // namespace stretchlab
