"""Grid-then-refine maximisation used by every bound evaluator.

Objectives are vectorised callables returning ``-inf`` at infeasible points.
Ties are broken towards the lexicographically smallest parameter vector so the
reported argmax does not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

INVPHI = (math.sqrt(5) - 1) / 2
PARAM_TOL = 1e-10


@dataclass
class SearchResult:
    value: float
    x: tuple
    grid: int
    refine_iters: int


def _better(v, x, best_v, best_x) -> bool:
    if v > best_v:
        return True
    return v == best_v and best_x is not None and tuple(x) < tuple(best_x)


def golden_max(f, lo: float, hi: float, tol: float = PARAM_TOL, max_iter: int = 200):
    """Golden-section search for a maximum of a scalar function on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        it += 1
    x = (a + b) / 2
    return f(x), x, it


def maximize_1d(f_vec, lo: float, hi: float, grid: int = 400, tol: float = PARAM_TOL,
                extra=()) -> SearchResult:
    """Uniform grid on ``[lo, hi]`` (endpoints included), then golden refinement.

    Every strict local maximum of the grid is refined within its neighbouring
    cells; ``extra`` points are evaluated as additional candidates.
    """
    xs = np.linspace(lo, hi, grid)
    if extra:
        xs = np.unique(np.concatenate([xs, np.asarray(extra, dtype=float)]))
    vals = np.asarray(f_vec(xs), dtype=float)
    best_v, best_x, iters = -math.inf, None, 0
    for i in np.flatnonzero(np.isfinite(vals)):
        if _better(vals[i], (xs[i],), best_v, best_x):
            best_v, best_x = float(vals[i]), (float(xs[i]),)
    if best_x is None:
        return SearchResult(-math.inf, (math.nan,), len(xs), 0)

    def scalar(x):
        return float(np.asarray(f_vec(np.array([x])))[0])

    finite = np.where(np.isfinite(vals), vals, -np.inf)
    left = np.concatenate([[-np.inf], finite[:-1]])
    right = np.concatenate([finite[1:], [-np.inf]])
    peaks = np.flatnonzero(np.isfinite(finite) & (finite >= left) & (finite >= right))
    # refine the best few peaks only; the objective is smooth between them
    peaks = peaks[np.argsort(-finite[peaks], kind="stable")][:8]
    for i in peaks:
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, len(xs) - 1)]
        if b - a <= tol:
            continue
        v, x, it = golden_max(scalar, a, b, tol)
        iters += it
        if math.isfinite(v) and _better(v, (x,), best_v, best_x):
            best_v, best_x = v, (x,)
    return SearchResult(best_v, best_x, len(xs), iters)


def refine_nd(f_scalar, starts, bounds, tol: float = PARAM_TOL, max_iter: int = 4000):
    """Nelder-Mead refinement from each start; returns the best (value, x, iters)."""
    best_v, best_x, iters = -math.inf, None, 0
    for x0 in starts:
        v0 = f_scalar(np.asarray(x0))
        if math.isfinite(v0) and _better(v0, tuple(x0), best_v, best_x):
            best_v, best_x = v0, tuple(float(t) for t in x0)

        def neg(x):
            v = f_scalar(x)
            return -v if math.isfinite(v) else math.inf

        res = minimize(neg, np.asarray(x0, dtype=float), method="Nelder-Mead", bounds=bounds,
                       options={"xatol": tol, "fatol": 1e-15, "maxiter": max_iter,
                                "maxfev": 2 * max_iter})
        iters += int(res.nit)
        v = f_scalar(res.x)
        if math.isfinite(v) and _better(v, tuple(res.x), best_v, best_x):
            best_v, best_x = v, tuple(float(t) for t in res.x)
    return best_v, best_x, iters


def top_k(values: np.ndarray, coords: list, k: int):
    """The ``k`` best finite grid cells as coordinate tuples (best first)."""
    flat = values.ravel()
    finite = np.flatnonzero(np.isfinite(flat))
    if finite.size == 0:
        return []
    order = finite[np.argsort(-flat[finite], kind="stable")][:k]
    return [tuple(float(c.ravel()[i]) for c in coords) for i in order]


def grid_argmax(values: np.ndarray, coords: list):
    """Max of a grid with lexicographic tie-break on the coordinates."""
    flat = values.ravel()
    finite = np.isfinite(flat)
    if not finite.any():
        return -math.inf, None
    best = flat[finite].max()
    idx = np.flatnonzero(flat == best)
    cands = sorted(tuple(float(c.ravel()[i]) for c in coords) for i in idx)
    return float(best), cands[0]
