"""Brute-force grid oracle for generalized-convexity labels.

Checks every property definition directly on a dense point grid with
closed-form derivative sets, independently of the package's estimators and
predicates.  The corpus ground-truth labels are machine-verified against
this oracle before being hard-coded.

All functions take plain callables and exact gradient-set callables, so the
oracle shares no code path with the library under test.
"""

from __future__ import annotations

import itertools

import numpy as np

TOL = 1e-12


def _pairs(points):
    return itertools.permutations(points, 2)


def pseudoconvex_on_grid(f, grad_sets, points) -> bool:
    """f(y) < f(x) must force g . (y - x) < 0 for every g in the set at x."""
    for x, y in _pairs(points):
        if f(y) < f(x) - TOL:
            d = y - x
            for g in grad_sets(x):
                if float(np.dot(g, d)) >= -TOL:
                    return False
    return True


def pseudoconcave_on_grid(f, grad_sets, points) -> bool:
    neg = lambda p: -f(p)
    neg_sets = lambda p: [-np.asarray(g, dtype=float) for g in grad_sets(p)]
    return pseudoconvex_on_grid(neg, neg_sets, points)


def quasiconvex_on_grid(f, points, lams) -> bool:
    for x, y in _pairs(points):
        top = max(f(x), f(y))
        for lam in lams:
            if f(x + lam * (y - x)) > top + TOL:
                return False
    return True


def quasiconcave_on_grid(f, points, lams) -> bool:
    return quasiconvex_on_grid(lambda p: -f(p), points, lams)


def semistrict_quasiconvex_on_grid(f, points, lams) -> bool:
    for x, y in _pairs(points):
        fx, fy = f(x), f(y)
        if fy < fx - TOL:
            for lam in lams:
                if not (0.0 < lam < 1.0):
                    continue
                if f(x + lam * (y - x)) >= fx - TOL:
                    return False
    return True


def semistrict_quasiconcave_on_grid(f, points, lams) -> bool:
    return semistrict_quasiconvex_on_grid(lambda p: -f(p), points, lams)


def oracle_labels(f, grad_sets, points, lams) -> dict[str, bool]:
    """All nine property labels by direct definition checks."""
    pcvx = pseudoconvex_on_grid(f, grad_sets, points)
    pccv = pseudoconcave_on_grid(f, grad_sets, points)
    qcvx = quasiconvex_on_grid(f, points, lams)
    qccv = quasiconcave_on_grid(f, points, lams)
    sscvx = semistrict_quasiconvex_on_grid(f, points, lams)
    ssccv = semistrict_quasiconcave_on_grid(f, points, lams)
    return {
        "pseudoconvex": pcvx,
        "pseudoconcave": pccv,
        "pseudolinear": pcvx and pccv,
        "quasiconvex": qcvx,
        "quasiconcave": qccv,
        "quasilinear": qcvx and qccv,
        "semistrictly-quasiconvex": sscvx,
        "semistrictly-quasiconcave": ssccv,
        "semistrictly-quasilinear": sscvx and ssccv,
    }
