#include "stretchlab/cocycle.h"

namespace stretchlab {

Cocycle& Cocycle::operator+=(const Cocycle& o) {
  if (!same_rep(base, o.base)) {
    throw std::invalid_argument("Cocycle: base representations differ");
  }
  for (int i = 0; i < 4; ++i) values[i] += o.values[i];
  return *this;
}

Cocycle& Cocycle::operator*=(double s) {
  for (auto& v : values) v *= s;
  return *this;
}

LieAlg evaluate_cocycle(const Cocycle& alpha, const Word& w) {
  LieAlg acc;
  GroupElem prefix;
  for (const Letter& l : w.letters()) {
    const GroupElem& g = alpha.base[l.gen];
    // alpha(g^-1) = -Ad(g^-1) alpha(g)
    const LieAlg v = l.exp > 0 ? alpha.values[l.gen]
                               : -adjoint(g.inverse(), alpha.values[l.gen]);
    acc += adjoint(prefix, v);
    prefix *= alpha.base.letter(l);
  }
  return acc;
}

Cocycle coboundary(const LieAlg& a0, const SurfaceGroupRep& sigma) {
  Cocycle c = Cocycle::zero(sigma);
  for (int i = 0; i < 4; ++i) c.values[i] = a0 - adjoint(sigma[i], a0);
  return c;
}

Cocycle differentiate_family(const std::function<SurfaceGroupRep(double)>& family,
                             double s0, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("differentiate_family: step <= 0");
  const SurfaceGroupRep base = family(s0);
  const SurfaceGroupRep plus = family(s0 + step);
  const SurfaceGroupRep minus = family(s0 - step);
  base.validate();
  plus.validate();
  minus.validate();
  Cocycle c = Cocycle::zero(base);
  for (int i = 0; i < 4; ++i) {
    const Mat3 d = (plus[i].m - minus[i].m) / (2.0 * step);
    c.values[i] = project_lie(d * base[i].inverse().m);
  }
  return c;
}

namespace {

using Mat3L = Eigen::Matrix<long double, 3, 3>;

Mat3L sharp_l(const Mat3L& m) {
  Mat3L e = Mat3L::Identity();
  e(2, 2) = -1;
  return e * m.transpose() * e;
}

// alpha(w) by the cocycle rule, in extended precision
Mat3L evaluate_l(const Cocycle& alpha, const Word& w) {
  Mat3L acc = Mat3L::Zero(), prefix = Mat3L::Identity();
  for (const Letter& l : w.letters()) {
    const Mat3L g = alpha.base[l.gen].m.cast<long double>();
    const Mat3L a = alpha.values[l.gen].m.cast<long double>();
    const Mat3L v = l.exp > 0 ? a : Mat3L(-sharp_l(g) * a * g);
    acc += prefix * v * sharp_l(prefix);
    prefix = prefix * (l.exp > 0 ? g : sharp_l(g));
  }
  return acc;
}

}  // namespace

// alpha(relator) = 0 iff alpha(head) = alpha(tail^-1) for a split of a
// cyclic rotation of the relator (alpha of a conjugate of the relator is
// Ad of alpha(relator) once the relator holds). The balanced split keeps the
// Ad amplification small.
double relator_tangency(const Cocycle& alpha) {
  const auto [head, tail_inv] = balanced_relator_halves(alpha.base);
  return static_cast<double>((evaluate_l(alpha, head) - evaluate_l(alpha, tail_inv)).norm());
}

}  // namespace stretchlab
