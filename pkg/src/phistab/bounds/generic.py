"""The generic finite program over ``m``-point conditional laws of ``Z`` given ``S``.

Decision variables are ``z[s, i]`` and ``p[s, i]`` for ``s in {-a, 1-a}`` and
``i < m``. Constraints: ``0 <= a + rho z <= 1``, ``sum_i p[s, i] = P_S(s)``,
``E Z = 0`` and ``E Z^2 <= E[S Z]``. Local optima come from SLSQP started at
two deterministic points (``Z = S`` and ``Z = 0``) plus seeded random starts.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import minimize

from ..phi import PhiSpec
from .results import FEAS_TOL, BoundResult, SZDistribution, check_unit

M_RANGE = (3, 6)


class InfeasibleStartsError(RuntimeError):
    """No multistart run ended at a point satisfying the constraints."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _unpack(x, m):
    return x[: 2 * m].reshape(2, m), x[2 * m:].reshape(2, m)


def _distribution(a, z, p) -> SZDistribution:
    s = (-a, 1 - a)
    return SZDistribution([(s[j], float(z[j, i]), float(p[j, i]))
                           for j in range(2) for i in range(z.shape[1])])


def _starts(a, rho, m, count, rng):
    lo, hi = -a / rho, (1 - a) / rho
    ps = np.array([1 - a, a])[:, None] / m * np.ones((2, m))
    zs = np.array([-a, 1 - a])[:, None] * np.ones((2, m))
    out = [np.concatenate([zs.ravel(), ps.ravel()]),
           np.concatenate([np.zeros(2 * m), ps.ravel()])]
    for _ in range(max(count - 2, 0)):
        z = rng.uniform(lo, hi, size=(2, m))
        w = rng.dirichlet(np.ones(m), size=2) * np.array([1 - a, a])[:, None]
        out.append(np.concatenate([z.ravel(), w.ravel()]))
    return out


def lambda_generic(a: float, rho: float, spec: PhiSpec, m: int = 3, multistart: int = 64,
                   seed: int = 0) -> BoundResult:
    """Best local optimum of the ``m``-point program found from ``multistart`` starts.

    Every candidate is re-validated (constraint residual at most ``1e-9``)
    independently of the optimiser before it can be reported. The result is
    deterministic for a given ``seed``.
    """
    a = check_unit("a", a)
    rho = check_unit("rho", rho)
    m = int(m)
    if not M_RANGE[0] <= m <= M_RANGE[1]:
        raise ValueError(f"m={m} outside [{M_RANGE[0]}, {M_RANGE[1]}]")
    if multistart < 1:
        raise ValueError("multistart must be positive")
    rng = np.random.default_rng(seed)
    zlo, zhi = -a / rho, (1 - a) / rho
    ps_target = np.array([1 - a, a])
    svals = np.array([-a, 1 - a])[:, None]

    def objective(x):
        z, p = _unpack(x, m)
        t = np.clip(a + rho * z, 0.0, 1.0)
        return -float(np.sum(p * spec(t)))

    cons = [
        {"type": "eq", "fun": lambda x: _unpack(x, m)[1].sum(axis=1) - ps_target},
        {"type": "eq", "fun": lambda x: np.array([np.sum(np.prod(_unpack(x, m)[::-1], axis=0))])},
        {"type": "ineq", "fun": lambda x: np.array([
            np.sum(_unpack(x, m)[1] * (svals * _unpack(x, m)[0] - _unpack(x, m)[0] ** 2))])},
    ]
    bounds = [(zlo, zhi)] * (2 * m) + [(0.0, 1.0)] * (2 * m)
    best = None
    tried = feasible = 0
    worst_residual = 0.0
    iters = 0
    target = {-a: 1 - a, 1 - a: a}
    for x0 in _starts(a, rho, m, multistart, rng):
        tried += 1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = minimize(objective, x0, method="SLSQP", bounds=bounds, constraints=cons,
                           options={"maxiter": 500, "ftol": 1e-14})
        iters += int(res.nit)
        z, p = _unpack(np.asarray(res.x, dtype=float), m)
        p = np.clip(p, 0.0, None)
        dist = _distribution(a, z, p)
        residual = dist.residual(a, rho, target)
        worst_residual = max(worst_residual, residual if math.isfinite(residual) else math.inf)
        if not residual <= FEAS_TOL:
            continue
        feasible += 1
        value = dist.expectation(spec, a, rho)
        if best is None or value > best[0] + 1e-15:
            best = (value, z.copy(), p.copy(), residual, dist)
    diag = {"phi": spec.label, "m": m, "starts": tried, "feasible_starts": feasible, "seed": seed}
    if best is None:
        diag["worst_residual"] = worst_residual
        raise InfeasibleStartsError(
            f"no feasible local optimum from {tried} starts (a={a}, rho={rho}, m={m})", diag)
    value, z, p, residual, dist = best
    params = {"z": z.tolist(), "p_table": p.tolist()}
    return BoundResult("lambda_generic", value, params, True, tried, iters, residual, diag, dist)
