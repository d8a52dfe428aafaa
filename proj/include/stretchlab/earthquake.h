#pragma once

// Fenchel-Nielsen twists along the handle generators, the closed-form
// infinitesimal earthquake cocycles and length derivatives.
//
// Twist rule (positive t translates along +B of the twist curve):
//   a1: b1 -> b1 e^{t B(a1)}     b1: a1 -> a1 e^{t B(b1)}
//   a2: b2 -> b2 e^{t B(a2)}     b2: a2 -> a2 e^{t B(b2)}
// The exponential commutes with the twist curve, so the relator is
// preserved algebraically.

#include "stretchlab/lamination.h"

namespace stretchlab {

struct TwistSpec {
  int curve = kA1;
  double t = 0;
};

/// "a1" -> kA1, etc. Throws std::invalid_argument for anything else.
int parse_curve(const std::string& name);

SurfaceGroupRep twist(const SurfaceGroupRep& sigma, const TwistSpec& spec);

/// d/dt twist(sigma, curve, weight t) at t = 0, in closed form.
Cocycle earthquake_cocycle(const SurfaceGroupRep& sigma, int curve, double weight = 1.0);

/// sum b_i (1/2) (xi(gamma_i), B_i).
double length_derivative(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                         const Cocycle& xi);

/// Central-difference derivative of length(mc, twist(sigma, curve, weight t)).
double twist_length_derivative(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                               int curve, double weight = 1.0, double step = 1e-4);

/// |lhs - rhs| / max(|lhs|, |rhs|, 1): relative for O(1) values, absolute
/// when both sides vanish.
double rel_err(double lhs, double rhs);

struct DualityReport {
  double lhs = 0;  // finite-difference length derivative
  double rhs = 0;  // 1/2 pairing of the standard measure with the cocycle
  double rel_err = 0;
};

DualityReport duality_check(const SurfaceGroupRep& sigma, const WeightedMulticurve& mc,
                            int curve, double weight = 1.0, double step = 1e-4);

struct WolpertReport {
  double d12 = 0;  // d l_{curve1} / d t_{curve2}
  double d21 = 0;  // d l_{curve2} / d t_{curve1}
  double diff = 0;
};

WolpertReport wolpert_reciprocity(const SurfaceGroupRep& sigma, int curve1, int curve2,
                                  double step = 1e-4);

}  // namespace stretchlab
