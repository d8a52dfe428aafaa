"""Best-Lipschitz / earthquake duality experiments on genus-2 surfaces.

Thin layer over the C++ core; structured results are returned as dicts.
"""

import json as _json

from ._core import (  # noqa: F401
    GeometryError,
    Representation,
    SolverError,
    __version__,
    classify,
    enumerate_words,
    evaluate,
    exp_so21,
    hyperbolic_distance,
    killing,
    length,
    log_so21,
    mass,
    octagon,
    octagon_length,
    reduce_word,
    translation_length,
    twist,
)
from . import _core


def k_lower_bound(sigma, rho, max_length=6):
    """max over words of length <= max_length of l_rho(w) / l_sigma(w)."""
    return _json.loads(_core._k_lower_bound(sigma, rho, max_length))


def duality_check(sigma, multicurve, curve, weight=1.0, step=1e-4):
    """Finite-difference length derivative vs 1/2 measure-cocycle pairing."""
    return _json.loads(_core._duality_check(sigma, multicurve, curve, weight, step))


def wolpert(sigma, curve1, curve2, step=1e-4):
    return _json.loads(_core._wolpert(sigma, curve1, curve2, step))


def solve(rho, level=3, schedule=(2, 4, 8, 16, 32, 64), tol=1e-7, max_iter=3000):
    """p-continuation on the octagon mesh; one summary dict per stage."""
    return _json.loads(_core._solve(level, rho, list(schedule), tol, max_iter))


def cylinder(a=2.0, b=3.0, n=48, schedule=(2, 4, 8, 16, 32, 64)):
    return _json.loads(_core._cylinder(a, b, n, list(schedule)))
