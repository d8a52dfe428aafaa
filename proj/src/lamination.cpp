#include "stretchlab/lamination.h"

#include <cmath>
#include <numbers>
#include <random>

namespace stretchlab {

void WeightedMulticurve::validate(const SurfaceGroupRep& rep) const {
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("multicurve: weights must be positive");
    }
    if (c.word.empty()) throw std::invalid_argument("multicurve: empty word");
    translation_length(evaluate(c.word, rep));  // throws unless hyperbolic
    for (std::size_t j = 0; j < i; ++j) {
      if (freely_conjugate(c.word, curves[j].word) ||
          freely_conjugate(c.word, curves[j].word.inverse())) {
        throw std::invalid_argument("multicurve: curves '" + c.word.str() + "' and '" +
                                    curves[j].word.str() + "' are conjugate");
      }
    }
  }
}

LieValuedMeasure standard_measure(const WeightedMulticurve& mc,
                                  const SurfaceGroupRep& sigma) {
  mc.validate(sigma);
  LieValuedMeasure m;
  m.rep = sigma;
  for (const auto& c : mc.curves) {
    const GroupElem g = evaluate(c.word, sigma);
    m.atoms.push_back({axis_generator(g), c.weight, translation_length(g), c.word});
  }
  return m;
}

double mass(const LieValuedMeasure& m) {
  double s = 0;
  for (const auto& a : m.atoms) s += a.weight * a.length;
  return 2.0 * s;
}

namespace {

// Smooth periodic field of 2x2 matrices with operator norm <= 1:
// R(theta) diag(c1, c2) R(phi) with |c_i| <= 1.
struct TestForm {
  double theta0 = 0, theta1 = 0, phi0 = 0, phi1 = 0;
  double c1 = 1, c1amp = 0, c2 = 0;
  int mode = 1;

  Eigen::Matrix2d at(double t, double period) const {
    const double w = 2.0 * std::numbers::pi * mode * t / period;
    const double th = theta0 + theta1 * std::sin(w);
    const double ph = phi0 + phi1 * std::cos(w);
    Eigen::Matrix2d r1, r2;
    r1 << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    r2 << std::cos(ph), -std::sin(ph), std::sin(ph), std::cos(ph);
    // |c1 (1 - c1amp (1 - cos w)/2)| <= |c1| <= 1
    const double s1 = c1 * (1.0 - c1amp * 0.5 * (1.0 - std::cos(w)));
    return r1 * Eigen::Vector2d(s1, c2).asDiagonal() * r2;
  }
};

double integrate_atom(const MeasureAtom& atom, const TestForm& form, int nodes) {
  const MinkVec x0 = axis_point(atom.b);
  const LieFrame frame = frame_at(atom.b, x0);
  const MinkVec tangent0 = atom.b.apply(x0);
  const MinkVec normal0 = frame.b_perp.apply(x0);  // unit normal at x0
  if (nodes % 2) ++nodes;
  const double h = atom.length / nodes;
  double sum = 0;
  for (int j = 0; j <= nodes; ++j) {
    const double t = j * h;
    const Eigen::Matrix2d m = form.at(t, atom.length);
    // The point e^{tB} x0 and its frame are the translates of x0 and its
    // frame; (Ad(g) X, B) = (X, B) since g fixes B, so the integrand is
    // evaluated at x0 (transporting would cancel terms of size cosh^2 t).
    const MinkVec w = m(0, 0) * tangent0 + m(1, 0) * normal0;
    const double f = killing(cross(w, x0), atom.b);
    const double simpson = (j == 0 || j == nodes) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    sum += simpson * f;
  }
  return sum * h / 3.0;
}

}  // namespace

DualityMass mass_by_duality(const LieValuedMeasure& m, int samples, std::uint64_t seed,
                            int quadrature_nodes) {
  DualityMass out;
  out.samples = samples;
  const TestForm optimal;  // M = diag(1, 0): the generator direction itself
  for (const auto& a : m.atoms) {
    out.optimal += a.weight * integrate_atom(a, optimal, quadrature_nodes);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    double value = 0;
    for (const auto& a : m.atoms) {
      TestForm f;
      f.theta0 = angle(rng);
      f.theta1 = unit(rng);
      f.phi0 = angle(rng);
      f.phi1 = unit(rng);
      f.c1 = unit(rng);
      f.c1amp = frac(rng);
      f.c2 = unit(rng);
      f.mode = 1 + static_cast<int>(frac(rng) * 3.0);
      value += a.weight * integrate_atom(a, f, quadrature_nodes);
    }
    if (s == 0 || value > out.sampled_sup) out.sampled_sup = value;
  }
  return out;
}

double length(const WeightedMulticurve& mc, const SurfaceGroupRep& rep) {
  double s = 0;
  for (const auto& c : mc.curves) s += c.weight * translation_length(evaluate(c.word, rep));
  return s;
}

double pair(const LieValuedMeasure& m, const Cocycle& xi) {
  if (!same_rep(m.rep, xi.base, 1e-10)) {
    throw std::invalid_argument("pair: measure and cocycle live over different representations");
  }
  double s = 0;
  for (const auto& a : m.atoms) s += a.weight * killing(a.b, evaluate_cocycle(xi, a.word));
  return s;
}

double frame_invariance_defect(const LieAlg& a, const LieAlg& b, const MinkVec& x,
                               double t) {
  const LieFrame frame = frame_at(b, x);
  // The displayed Step-1 matrices (entry z cosh t - a sinh t) are
  // e^{tB} A e^{-tB}; t is signed to match them.
  const LieAlg moved = adjoint(exp_so21(t * b), a);
  const LieAlg residual = moved - cross(moved.apply(x), x);
  const FrameCoords c = frame_coords(frame, residual);
  return std::sqrt(2.0) * std::sqrt(c.b * c.b + c.a * c.a + c.z * c.z);
}

}  // namespace stretchlab
