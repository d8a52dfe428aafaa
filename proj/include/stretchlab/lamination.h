#pragma once

// Weighted multicurves as measured laminations and their standard
// Lie-algebra-valued transverse measures dw = sum b_i B_i delta_i.
//
// Simplicity and disjointness of the curves are NOT checked: callers are
// trusted to pass simple, pairwise disjoint closed curves (the handle
// generators, for example).

#include "stretchlab/cocycle.h"

#include <cstdint>
#include <vector>

namespace stretchlab {

struct WeightedCurve {
  Word word;
  double weight = 1.0;
};

struct WeightedMulticurve {
  std::vector<WeightedCurve> curves;

  /// Positive weights, hyperbolic words, pairwise non-conjugate words.
  void validate(const SurfaceGroupRep& rep) const;
};

struct MeasureAtom {
  LieAlg b;          // unit generator of the closed geodesic, (B,B) = 2
  double weight = 0;
  double length = 0;
  Word word;
};

struct LieValuedMeasure {
  std::vector<MeasureAtom> atoms;
  SurfaceGroupRep rep;
};

LieValuedMeasure standard_measure(const WeightedMulticurve& mc,
                                  const SurfaceGroupRep& sigma);

/// Total variation with the sqrt 2 operator-norm convention: 2 sum b_i l_i.
double mass(const LieValuedMeasure& m);

struct DualityMass {
  double optimal = 0;      // value of the optimal admissible test form
  double sampled_sup = 0;  // sup over random admissible test forms
  int samples = 0;
};

/// Lower bound for the mass by testing against admissible forms. A test
/// form is a field of 2x2 matrices M(t) (operator norm <= 1) acting on
/// tangent vectors in the adapted frame along each geodesic; its value on
/// the curve is phi = (M gamma') x gamma. The integral of (phi, B) along the
/// curves is evaluated by composite Simpson quadrature.
DualityMass mass_by_duality(const LieValuedMeasure& m, int samples = 64,
                            std::uint64_t seed = 1, int quadrature_nodes = 64);

/// sum b_i l_rep(gamma_i).
double length(const WeightedMulticurve& mc, const SurfaceGroupRep& rep);

/// sum b_i (B_i, xi(gamma_i)).
double pair(const LieValuedMeasure& m, const Cocycle& xi);

/// Size of the part of A_t = e^{tB} A e^{-tB} not of the form (A_t X) x X at
/// the axis point X, measured in the adapted frame (sqrt 2 times the
/// Euclidean norm of its frame coordinates). For A = bB + aB_perp + z n_hat
/// this is sqrt2 |z cosh t - a sinh t|.
double frame_invariance_defect(const LieAlg& a, const LieAlg& b, const MinkVec& x,
                               double t);

}  // namespace stretchlab
