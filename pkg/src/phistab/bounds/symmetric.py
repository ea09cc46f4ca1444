"""Closed-form bounds for symmetric Phi: Gamma-bar, Gamma-hat, the three-way
maximum of the convex-derivative regime, and the FKN-improved Upsilon-bar."""
from __future__ import annotations

import math

import numpy as np

from ..fkn import omega_min
from ..phi import PhiSpec
from ._search import PARAM_TOL, grid_argmax, maximize_1d, refine_nd, top_k
from .results import (ARG_CLIP, FEAS_TOL, BoundResult, RegimeError, SZDistribution, check_unit,
                      phi_masked)

DEN_TOL = 1e-10
PROB_SLACK = 1e-12


def _require_symmetric(spec: PhiSpec, kind: str) -> None:
    if not spec.symmetric:
        raise RegimeError(f"{kind} requires a symmetric Phi (pass a spec with symmetric=True)")


def _regime_note(spec: PhiSpec, wanted: str) -> dict:
    shape = spec.derivative_shape()
    return {"phi": spec.label, "assumed_derivative_shape": wanted, "derivative_shape": shape,
            "regime_ok": shape == wanted}


# ---------------------------------------------------------------- Gamma-bar

def _gamma_bar_parts(a, rho, z1, z2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    d0 = 1 - rho - rho * z1 + rho * z2
    d1 = a + rho * z1
    d2 = 1 - a - rho * z2
    ok = (d0 >= DEN_TOL) & (d1 >= DEN_TOL) & (d2 >= DEN_TOL)
    s0, s1, s2 = (np.where(ok, d, 1.0) for d in (d0, d1, d2))
    num = (1 - a) * a * (1 - rho)
    p = num / (s0 * s1)
    q = num / (s0 * s2)
    gap = z2 - z1
    ok &= gap >= 0.5 - PROB_SLACK
    ok &= gap * s2 >= (1 - rho) * z2 - PROB_SLACK
    ok &= gap * s1 >= -(1 - rho) * z1 - PROB_SLACK
    ok &= (p >= -PROB_SLACK) & (p <= 1 - a + PROB_SLACK)
    ok &= (q >= -PROB_SLACK) & (q <= a + PROB_SLACK)
    return p, q, ok


def _gamma_bar_value(spec, a, rho, z1, z2):
    p, q, ok = _gamma_bar_parts(a, rho, z1, z2)
    f1, ok1 = phi_masked(spec, a + rho * np.asarray(z1, dtype=float))
    f2, ok2 = phi_masked(spec, a + rho * np.asarray(z2, dtype=float))
    ok &= ok1 & ok2
    with np.errstate(invalid="ignore"):
        val = (1 - a - p) * spec(0.0) + p * f1 + q * f2 + (a - q) * spec(1.0)
    return np.where(ok, val, -math.inf)


def gamma_bar_distribution(a, rho, z1, z2) -> SZDistribution:
    p, q, _ = _gamma_bar_parts(a, rho, z1, z2)
    p, q = float(p), float(q)
    return SZDistribution([(-a, -a / rho, 1 - a - p), (-a, z1, p),
                           (1 - a, z2, q), (1 - a, (1 - a) / rho, a - q)])


def _gamma_bar_residual(a, rho, z1, z2) -> float:
    """Largest violation of the feasible-set inequalities and of the induced law."""
    p, q, _ = _gamma_bar_parts(a, rho, z1, z2)
    p, q = float(p), float(q)
    gap = z2 - z1
    res = [max(0.0, 0.5 - gap),
           max(0.0, (1 - rho) * z2 / (1 - a - rho * z2) - gap),
           max(0.0, -(1 - rho) * z1 / (a + rho * z1) - gap),
           max(0.0, -p, p - (1 - a)), max(0.0, -q, q - a)]
    dist = gamma_bar_distribution(a, rho, z1, z2)
    res.append(dist.residual(a, rho, {-a: 1 - a, 1 - a: a}))
    return float(max(res))


def gamma_bar(a: float, rho: float, spec: PhiSpec, grid: int = 400,
              tol: float = PARAM_TOL) -> BoundResult:
    """Bound for symmetric Phi whose derivative is strictly concave on ``(0, 1/2]``.

    At ``a = 1/2`` the search is one-dimensional (``z2 = -z1``,
    ``z1 in [-1/2, -1/4]``); otherwise a 2-D grid over the open box
    ``(-a/rho, (1-a)/rho)^2`` is refined by Nelder-Mead from the best cells.
    Only symmetry is validated; the derivative regime is recorded.
    """
    a = check_unit("a", a, hi_open=False, hi=0.5)
    rho = check_unit("rho", rho)
    _require_symmetric(spec, "gamma_bar")
    diag = _regime_note(spec, "concave")

    if a == 0.5:
        res = maximize_1d(lambda z: _gamma_bar_value(spec, a, rho, z, -z), -0.5, -0.25, grid, tol)
        z1 = res.x[0]
        z2 = -z1
        value, grid_pts, iters = res.value, res.grid, res.refine_iters
        diag["search"] = "1-D over z1 in [-1/2, -1/4] with z2 = -z1"
    else:
        lo, hi = -a / rho + DEN_TOL, (1 - a) / rho - DEN_TOL
        zs = np.linspace(lo, hi, grid)
        Z1, Z2 = np.meshgrid(zs, zs, indexing="ij")
        vals = _gamma_bar_value(spec, a, rho, Z1, Z2)
        value, best = grid_argmax(vals, [Z1, Z2])
        if best is None:
            return BoundResult("gamma_bar", -math.inf, feasible=False, grid=grid,
                               residual=math.inf, diagnostics={**diag, "error": "no feasible grid point"})
        starts = top_k(vals, [Z1, Z2], 5)
        v, x, iters = refine_nd(lambda x: float(_gamma_bar_value(spec, a, rho, x[0], x[1])),
                                starts, [(lo, hi), (lo, hi)], tol)
        if v > value:
            value, best = v, x
        z1, z2 = best
        grid_pts = grid * grid
        diag["search"] = "2-D grid + Nelder-Mead"
    p, q, _ = _gamma_bar_parts(a, rho, z1, z2)
    residual = _gamma_bar_residual(a, rho, z1, z2)
    return BoundResult("gamma_bar", float(value), {"z1": float(z1), "z2": float(z2), "p": float(p),
                       "q": float(q)}, residual <= FEAS_TOL, grid_pts, iters, residual, diag,
                       gamma_bar_distribution(a, rho, z1, z2))


# ---------------------------------------------------------------- Gamma-hat

def _hat_constants(a, rho):
    b = (1 - 2 * a) / rho
    rad = (a + 2 * a * b + b * b) / (1 - a)
    c = 0.5 * (b - math.sqrt(rad)) if rad >= 0 else math.nan
    lo = max(-a / rho, c) if rad >= 0 else math.nan
    hi = -a * (1 + b) / (2 * (1 - a))
    return b, c, lo, hi


def _hat_parts(a, rho, zt):
    b = (1 - 2 * a) / rho
    zt = np.asarray(zt, dtype=float)
    delta = a * (b * b - 4 * b * zt + 2 * b + 4 * zt * zt + 1) + 4 * zt * (b - zt)
    ok = delta >= -PROB_SLACK
    delta = np.maximum(delta, 0.0)
    zhat = 0.5 * (np.sqrt(delta / a) + b + 1)
    den = 2 * (b - 2 * zt)
    ok &= np.abs(den) >= DEN_TOL
    den = np.where(ok, den, 1.0)
    p = (-np.sqrt(a * delta) - (a * (b + 1 - 2 * zt) + 2 * zt)) / den
    ok &= (p >= -PROB_SLACK) & (p <= 1 - a + PROB_SLACK)
    return b, zhat, np.clip(p, 0.0, 1 - a) + 0.0, ok


def _hat_value(spec, a, rho, zt):
    b, zhat, p, ok = _hat_parts(a, rho, zt)
    zt = np.asarray(zt, dtype=float)
    f0, ok0 = phi_masked(spec, a + rho * zt)
    f1, ok1 = phi_masked(spec, a + rho * (b - zt))
    f2, ok2 = phi_masked(spec, a + rho * zhat)
    ok &= ok0 & ok1 & ok2
    with np.errstate(invalid="ignore"):
        val = (1 - a - p) * f0 + p * f1 + a * f2
    return np.where(ok, val, -math.inf)


def gamma_hat(a: float, rho: float, spec: PhiSpec, grid: int = 400,
              tol: float = PARAM_TOL) -> BoundResult:
    """Closed form for symmetric Phi with strictly convex derivative on ``(0, 1/2]``.

    ``a`` may be any value in ``(0, 1)`` so that the mirrored term at
    ``1 - a`` can be evaluated; an empty search interval gives an infeasible
    result with value ``-inf`` and a diagnostic.
    """
    a = check_unit("a", a)
    rho = check_unit("rho", rho)
    _require_symmetric(spec, "gamma_hat")
    diag = _regime_note(spec, "convex")
    b, c, lo, hi = _hat_constants(a, rho)
    diag.update(b=b, c=c, interval=[lo, hi])
    if not (lo <= hi + 1e-12):
        diag["error"] = "empty z_tilde interval"
        return BoundResult("gamma_hat", -math.inf, feasible=False, residual=math.inf, diagnostics=diag)
    hi = max(hi, lo)
    res = maximize_1d(lambda z: _hat_value(spec, a, rho, z), lo, hi, grid, tol)
    if not math.isfinite(res.value):
        diag["error"] = "no feasible z_tilde"
        return BoundResult("gamma_hat", -math.inf, feasible=False, grid=res.grid,
                           residual=math.inf, diagnostics=diag)
    zt = res.x[0]
    _, zhat, p, _ = _hat_parts(a, rho, zt)
    zhat, p = float(zhat), float(p)
    dist = SZDistribution([(-a, zt, 1 - a - p), (-a, b - zt, p), (1 - a, zhat, a)])
    residual = max(dist.residual(a, rho, {-a: 1 - a, 1 - a: a}),
                   max(0.0, lo - zt, zt - hi))
    return BoundResult("gamma_hat", float(res.value),
                       {"z1": zt, "z2": zhat, "p": p, "z_tilde": zt, "z_hat": zhat},
                       residual <= FEAS_TOL, res.grid, res.refine_iters, residual, diag, dist)


def two_point_value(a: float, rho: float, spec: PhiSpec) -> float:
    """``E[Phi(a + rho S)] = (1-a) Phi(a - rho a) + a Phi(a + rho (1-a))``."""
    return (1 - a) * spec(a - rho * a) + a * spec(a + rho * (1 - a))


def lambda_statement2(a: float, rho: float, spec: PhiSpec, grid: int = 400) -> BoundResult:
    """``max{Gamma-hat(a), Gamma-hat(1-a), E[Phi(a + rho S)]}``."""
    a = check_unit("a", a, hi_open=False, hi=0.5)
    rho = check_unit("rho", rho)
    _require_symmetric(spec, "lambda_statement2")
    first = gamma_hat(a, rho, spec, grid)
    second = gamma_hat(1 - a, rho, spec, grid)
    tp = two_point_value(a, rho, spec)
    diag = {**_regime_note(spec, "convex"), "gamma_hat_a": first.value,
            "gamma_hat_1ma": second.value, "two_point": tp}
    empty = [name for name, r in (("a", first), ("1-a", second)) if not r.feasible]
    if empty:
        diag["infeasible_branches"] = empty
    best, branch = first, "gamma_hat(a)"
    if second.value > best.value:
        best, branch = second, "gamma_hat(1-a)"
    if tp > best.value or not math.isfinite(best.value):
        dist = SZDistribution([(-a, -a, 1 - a), (1 - a, 1 - a, a)])
        residual = dist.residual(a, rho, {-a: 1 - a, 1 - a: a})
        diag["branch"] = "two_point"
        return BoundResult("lambda_statement2", float(tp), {"z1": -a, "z2": 1 - a},
                           residual <= FEAS_TOL, 0, 0, residual, diag, dist)
    diag["branch"] = branch
    return BoundResult("lambda_statement2", best.value, dict(best.params), best.feasible,
                       first.grid + second.grid, first.refine_iters + second.refine_iters,
                       best.residual, diag, best.distribution)


# ---------------------------------------------------------------- Upsilon-bar

def _ups_parts(rho, beta, w, z1, z2):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    beta = np.asarray(beta, dtype=float)
    w = np.asarray(w, dtype=float)
    d0 = 1 + rho * z2 - rho * z1 - rho * rho
    d1 = 1 + 2 * rho * z1
    d2 = 1 - 2 * rho * z2
    ok = (d0 >= DEN_TOL) & (d1 >= DEN_TOL) & (d2 >= DEN_TOL) & (z1 <= z2)
    s0, s1, s2 = (np.where(ok, d, 1.0) for d in (d0, d1, d2))
    base = 1 + rho - 4 * rho * rho * w
    p = (1 - rho) * (base + 2 * beta * (1 + 2 * rho * z2 - rho * rho)) / (4 * s1 * s0)
    q = (1 - rho) * (base - 2 * beta * (1 - 2 * rho * z1 - rho * rho)) / (4 * s2 * s0)
    ok &= (p >= -PROB_SLACK) & (p <= 0.25 + beta / 2 + PROB_SLACK)
    ok &= (q >= -PROB_SLACK) & (q <= 0.25 - beta / 2 + PROB_SLACK)
    return p, q, ok


def _ups_value(spec, rho, beta, w, z1, z2):
    p, q, ok = _ups_parts(rho, beta, w, z1, z2)
    f1, ok1 = phi_masked(spec, 0.5 + rho * np.asarray(z1, dtype=float))
    f2, ok2 = phi_masked(spec, 0.5 + rho * np.asarray(z2, dtype=float))
    ok &= ok1 & ok2
    with np.errstate(invalid="ignore"):
        val = (1 - 2 * p - 2 * q) * spec(0.0) + 2 * p * f1 + 2 * q * f2
    return np.where(ok, val, -math.inf)


def _ups_scalar(spec, rho, beta, w, z1, z2) -> float:
    # float-only twin of _ups_value used inside the simplex refinement
    d0 = 1 + rho * z2 - rho * z1 - rho * rho
    d1 = 1 + 2 * rho * z1
    d2 = 1 - 2 * rho * z2
    if d0 < DEN_TOL or d1 < DEN_TOL or d2 < DEN_TOL or z1 > z2:
        return -math.inf
    base = 1 + rho - 4 * rho * rho * w
    p = (1 - rho) * (base + 2 * beta * (1 + 2 * rho * z2 - rho * rho)) / (4 * d1 * d0)
    q = (1 - rho) * (base - 2 * beta * (1 - 2 * rho * z1 - rho * rho)) / (4 * d2 * d0)
    if not (-PROB_SLACK <= p <= 0.25 + beta / 2 + PROB_SLACK
            and -PROB_SLACK <= q <= 0.25 - beta / 2 + PROB_SLACK):
        return -math.inf
    t1, t2 = 0.5 + rho * z1, 0.5 + rho * z2
    if not (-ARG_CLIP <= t1 <= 1 + ARG_CLIP and -ARG_CLIP <= t2 <= 1 + ARG_CLIP):
        return -math.inf
    t1, t2 = min(max(t1, 0.0), 1.0), min(max(t2, 0.0), 1.0)
    return (1 - 2 * p - 2 * q) * spec.scalar(0.0) + 2 * p * spec.scalar(t1) + 2 * q * spec.scalar(t2)


def upsilon_distribution(rho, beta, w, z1, z2) -> SZDistribution:
    """Symmetric law of ``(S, X, Z)`` behind Upsilon-bar (eight atoms)."""
    p, q, _ = _ups_parts(rho, beta, w, z1, z2)
    p, q = float(p), float(q)
    e = 1 / (2 * rho)
    atoms = []
    for sgn in (1, -1):
        atoms += [(-0.5 * sgn, -sgn, -e * sgn, (1 + 2 * beta) / 4 - p),
                  (-0.5 * sgn, -sgn, z1 * sgn, p),
                  (0.5 * sgn, -sgn, e * sgn, (1 - 2 * beta) / 4 - q),
                  (0.5 * sgn, -sgn, z2 * sgn, q)]
    return SZDistribution(atoms)


def _ups_residual(rho, beta, w, z1, z2) -> float:
    dist = upsilon_distribution(rho, beta, w, z1, z2)
    target = {(-0.5, -1.0): (1 + 2 * beta) / 4, (-0.5, 1.0): (1 - 2 * beta) / 4,
              (0.5, -1.0): (1 - 2 * beta) / 4, (0.5, 1.0): (1 + 2 * beta) / 4}
    res = dist.residual(0.5, rho, target, lambda m: (1 - rho) * w + rho * m["ESZ"])
    e = 1 / (2 * rho)
    res = max(res, abs(dist.moments()["EXZ"] - beta), max(0.0, z1 - z2),
              max(0.0, -e - z1), max(0.0, z2 - e), max(0.0, -beta, beta - 0.5))
    return float(res)


def upsilon_bar(rho: float, spec: PhiSpec, omega=None, beta_grid: int = 101, z_grid: int = 201,
                tol: float = PARAM_TOL, starts: int = 6) -> BoundResult:
    """FKN-improved bound at mean 1/2.

    ``omega`` maps ``beta in [0, 1/2]`` to a level-1 weight bound in
    ``[0, 1/4]`` (default: the pointwise minimum of the recursive FKN and
    Khintchine-type bounds). The ``(beta, z1, z2)`` grid is followed by a joint
    Nelder-Mead refinement from the best cells and from the dictator point.
    """
    rho = check_unit("rho", rho)
    _require_symmetric(spec, "upsilon_bar")
    omega = omega_min if omega is None else omega
    diag = _regime_note(spec, "concave")
    e = 1 / (2 * rho)
    betas = np.linspace(0.0, 0.5, beta_grid)
    ws = np.array([float(omega(b)) for b in betas])
    if np.any(ws < 0) or np.any(ws > 0.25 + 1e-15):
        raise ValueError("omega must map [0, 1/2] into [0, 1/4]")
    zs = np.linspace(-e, e, z_grid)
    Z1, Z2 = np.meshgrid(zs, zs, indexing="ij")
    best_v, best_x, cands = -math.inf, None, []
    for b, w in zip(betas, ws):
        vals = _ups_value(spec, rho, b, w, Z1, Z2)
        v, x = grid_argmax(vals, [Z1, Z2])
        if x is not None:
            cands.append((v, (float(b), *x)))
            if v > best_v or (v == best_v and (b, *x) < best_x):
                best_v, best_x = v, (float(b), *x)
    cands.sort(key=lambda c: (-c[0], c[1]))
    seeds = [c[1] for c in cands[:starts]] + [(0.5, -0.5, 0.5)]

    def scalar(x):
        b = min(max(float(x[0]), 0.0), 0.5)
        return _ups_scalar(spec, rho, b, float(omega(b)), float(x[1]), float(x[2]))

    v, x, iters = refine_nd(scalar, seeds, [(0.0, 0.5), (-e, e), (-e, e)], tol)
    if v > best_v or (v == best_v and best_x is not None and tuple(x) < tuple(best_x)):
        best_v, best_x = v, tuple(x)
    if best_x is None:
        return BoundResult("upsilon_bar", -math.inf, feasible=False, residual=math.inf,
                           grid=beta_grid * z_grid ** 2, diagnostics={**diag, "error": "no feasible point"})
    b, z1, z2 = best_x
    w = float(omega(b))
    p, q, _ = _ups_parts(rho, b, w, z1, z2)
    residual = _ups_residual(rho, b, w, z1, z2)
    diag["omega_at_beta"] = w
    return BoundResult("upsilon_bar", float(best_v),
                       {"beta": b, "z1": z1, "z2": z2, "p": float(p), "q": float(q)},
                       residual <= FEAS_TOL, beta_grid * z_grid ** 2, iters, residual, diag,
                       upsilon_distribution(rho, b, w, z1, z2))
