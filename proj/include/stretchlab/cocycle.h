#pragma once

// Twisted 1-cocycles alpha: pi_1 -> so(2,1) over Ad o sigma,
//   alpha(g h) = alpha(g) + Ad(sigma(g)) alpha(h).
// Stored by generator values only; words are evaluated lazily.

#include "stretchlab/fuchsian.h"

#include <functional>

namespace stretchlab {

struct Cocycle {
  SurfaceGroupRep base;
  std::array<LieAlg, 4> values;

  static Cocycle zero(const SurfaceGroupRep& rep) { return Cocycle{rep, {}}; }

  Cocycle& operator+=(const Cocycle& o);
  Cocycle& operator*=(double s);
  friend Cocycle operator+(Cocycle a, const Cocycle& b) { return a += b; }
  friend Cocycle operator-(Cocycle a, const Cocycle& b) { return a += (-1.0) * Cocycle(b); }
  friend Cocycle operator*(double s, Cocycle a) { return a *= s; }
};

LieAlg evaluate_cocycle(const Cocycle& alpha, const Word& w);
/// alpha(g) = A0 - Ad(sigma(g)) A0.
Cocycle coboundary(const LieAlg& a0, const SurfaceGroupRep& sigma);
/// alpha(g) = (d/ds sigma_s(g)) sigma(g)^{-1} at s = s0 by central differences.
Cocycle differentiate_family(const std::function<SurfaceGroupRep(double)>& family,
                             double s0 = 0.0, double step = 1e-4);
/// ||alpha(head) - alpha(tail^-1)||_F over balanced_relator_halves; zero
/// iff alpha(relator) = 0.
double relator_tangency(const Cocycle& alpha);

}  // namespace stretchlab
