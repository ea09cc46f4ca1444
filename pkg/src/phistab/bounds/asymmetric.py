"""Bound for Phi with strictly concave (or, after reflection, convex) derivative,
and the auxiliary functions used to certify dictators for ``t**alpha``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..phi import PhiSpec
from ._search import PARAM_TOL, maximize_1d
from .results import FEAS_TOL, BoundResult, SZDistribution, check_unit, phi_masked

DEN_TOL = 1e-10
PROB_SLACK = 1e-12


# ---------------------------------------------------------------- Gamma-tilde

def _tilde_parts(a, rho, z2):
    z2 = np.asarray(z2, dtype=float)
    d1 = 1 - a - rho * z2
    d2 = a + rho * rho * z2 - (a + rho * z2) ** 2
    ok = (d1 >= DEN_TOL) & (d2 >= DEN_TOL)
    s1 = np.where(ok, d1, 1.0)
    s2 = np.where(ok, d2, 1.0)
    z1 = z2 * (rho * (1 - z2) - a) / s1
    p = a * s1 * s1 / s2
    ok &= (p >= -PROB_SLACK) & (p <= 1 - a + PROB_SLACK)
    return z1, np.clip(p, 0.0, 1 - a) + 0.0, ok


def _tilde_value(spec, a, rho, z2):
    z1, p, ok = _tilde_parts(a, rho, z2)
    f1, ok1 = phi_masked(spec, a + rho * z1)
    f2, ok2 = phi_masked(spec, a + rho * np.asarray(z2, dtype=float))
    ok &= ok1 & ok2
    with np.errstate(invalid="ignore"):
        val = (1 - a - p) * spec(0.0) + p * f1 + a * f2
    return np.where(ok, val, -math.inf)


def gamma_tilde(a: float, rho: float, spec: PhiSpec, reflect: bool | None = None,
                grid: int = 400, tol: float = PARAM_TOL) -> BoundResult:
    """Bound for ``Phi`` whose derivative is strictly concave on ``(0, 1)``.

    With a strictly convex derivative the bound is evaluated for
    ``t -> Phi(1 - t)`` at mean ``1 - a`` instead. ``reflect=None`` chooses the
    mode from :meth:`PhiSpec.derivative_shape`. The search runs over the full
    interval ``z2 in [0, 1 - a]`` (a narrower interval is known to suffice).
    """
    a = check_unit("a", a)
    rho = check_unit("rho", rho)
    shape = spec.derivative_shape()
    if reflect is None:
        reflect = shape == "convex"
    work, aw = (spec.reflect(), 1 - a) if reflect else (spec, a)
    diag = {"phi": spec.label, "derivative_shape": shape, "reflected": bool(reflect),
            "working_mean": aw, "regime_ok": work.derivative_shape() == "concave"}
    res = maximize_1d(lambda z: _tilde_value(work, aw, rho, z), 0.0, 1 - aw, grid, tol)
    z2 = res.x[0]
    z1, p, _ = _tilde_parts(aw, rho, z2)
    z1, p = float(z1), float(p)
    dist = SZDistribution([(-aw, -aw / rho, 1 - aw - p), (-aw, z1, p), (1 - aw, z2, aw)])
    residual = max(dist.residual(aw, rho, {-aw: 1 - aw, 1 - aw: aw}), max(0.0, -z2, z2 - (1 - aw)))
    return BoundResult("gamma_tilde", float(res.value), {"z1": z1, "z2": float(z2), "p": p},
                       residual <= FEAS_TOL, res.grid, res.refine_iters, residual, diag, dist)


# ---------------------------------------------------------------- auxiliary functions

@dataclass
class AuxValues:
    T: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray

    def to_dict(self) -> dict:
        return {k: np.asarray(getattr(self, k)).tolist() for k in "TABCDEF"}


def t_domain_lo(rho: float) -> float:
    """Smallest ``p`` with a real ``T(p)``."""
    return (1 - rho) / (2 - 2 * rho + rho * rho)


def _check_p(p, rho):
    p = np.asarray(p, dtype=float)
    lo = t_domain_lo(rho)
    if np.any(p < lo - 1e-12) or np.any(p > 0.5 + 1e-12):
        raise ValueError(f"p outside [{lo!r}, 1/2] where T is real")
    return p


def _T(p, r):
    return np.sqrt(np.maximum(p * (p * (2 - 2 * r + r * r) + r - 1), 0.0))


def _aux(p, r) -> AuxValues:
    T = _T(p, r)
    A = p * ((-1 + 6 * p) * (1 - r) + 2 * p * r * r - 2 * (2 - r) * T)
    B = ((2 - r) * p - T) * 2 * (1 + 2 * p) * T
    C = p * ((1 + 6 * p - 8 * p * p) * (1 - r) - 4 * r * r * p * p + 4 * p * (2 - r) * T)
    with np.errstate(divide="ignore", invalid="ignore"):
        D = (p * r + 1 + T) * 2 * p / ((2 - r) * p - T)
    E = (-16 * (2 * r**4 - 9 * r**3 + 17 * r**2 - 16 * r + 6) * p**3
         - 8 * (r**4 + r**3 - 10 * r**2 + 14 * r - 7) * p**2
         - 8 * (r**3 - r**2 - 2 * r + 2) * p - 2 * (r - 1) ** 2)
    F = (-16 * (2 * r**5 - 11 * r**4 + 27 * r**3 - 36 * r**2 + 26 * r - 8) * p**4
         - 4 * (2 * r**5 + 4 * r**4 - 39 * r**3 + 86 * r**2 - 83 * r + 32) * p**3
         - 4 * (3 * r**4 - 4 * r**3 - 5 * r**2 + 13 * r - 7) * p**2
         - (r - 1) ** 2 * (5 * r + 4) * p - (r - 1) ** 2)
    return AuxValues(T, A, B, C, D, E, F)


def asym_aux(p, rho: float) -> AuxValues:
    """``T, A, ..., F`` at ``p`` (scalar or array) for ``t**alpha`` at mean 1/2.

    ``C`` uses ``(1 + 6p - 8p^2)`` as the coefficient of ``(1 - rho)``, the
    value consistent with the derivative identity and with ``varphi(1, p) = 0``.
    """
    rho = check_unit("rho", rho)
    return _aux(_check_p(p, rho), rho)


def _h(alpha, p, r):
    T = _T(p, r)
    u = ((2 - r) * p - T) / (2 * (1 + 2 * p) * p)
    v = (1 + p * r + T) / (1 + 2 * p)
    return p * u**alpha + 0.5 * v**alpha


def _varphi(alpha, p, r):
    x = _aux(p, r)
    return -x.A * x.D ** (alpha - 1) - x.B / alpha + x.C


def _dh(alpha, p, r):
    T = _T(p, r)
    u = ((2 - r) * p - T) / (2 * (1 + 2 * p) * p)
    return u ** (alpha - 1) * (-alpha * _varphi(alpha, p, r)) / (4 * (1 + 2 * p) ** 2 * p * T)


def asym_h(alpha: float, p, rho: float):
    """``h_alpha(p) = p u^alpha + v^alpha / 2`` with ``u = ((2-rho)p - T)/(2(1+2p)p)``, ``v = (1+p rho+T)/(1+2p)``."""
    rho = check_unit("rho", rho)
    out = _h(float(alpha), _check_p(p, rho), rho)
    return out if np.ndim(out) else float(out)


def asym_varphi(alpha: float, p, rho: float):
    """``-A D^(alpha-1) - B/alpha + C``."""
    rho = check_unit("rho", rho)
    out = _varphi(float(alpha), _check_p(p, rho), rho)
    return out if np.ndim(out) else float(out)


def asym_dh(alpha: float, p, rho: float):
    """Closed-form derivative of ``h_alpha`` in ``p`` (interior of the domain)."""
    rho = check_unit("rho", rho)
    out = _dh(float(alpha), _check_p(p, rho), rho)
    return out if np.ndim(out) else float(out)


@dataclass
class LemmaReport:
    """Outcome of the sampled sign and identity checks."""

    points: int
    checks: dict
    violations: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)
    method: str = ("dense numeric sampling on interior grid points; "
                   "not a symbolic proof")

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"passed": self.passed, "points": self.points, "checks": self.checks,
                "violations": self.violations, "worst": self.worst, "method": self.method}


def lemma_grid_checks(rho_grid, p_grid=200, alpha_grid=(1.2, 1.5, 1.8), tol: float = 1e-9,
                      deriv_rtol: float = 1e-5, fd_step: float = 1e-5) -> LemmaReport:
    """Check on every grid point: ``F <= 0``, ``F^2 >= E^2 T^2``, ``A, B, D >= 0``,
    ``varphi(1, p) = 0`` and the closed-form derivative of ``h_alpha`` against
    central differences.

    ``p_grid`` is either a point count (interior of ``[p_min(rho), 1/2]``) or an
    explicit array. The central-difference step is ``fd_step`` times the
    distance to the lower domain end, where ``T`` has a square-root branch.
    """
    violations = []
    worst = {k: 0.0 for k in ("F", "F2_minus_E2T2", "A", "B", "D", "varphi1", "deriv")}
    counts = dict.fromkeys(worst, 0)
    total = 0
    for rho in rho_grid:
        rho = check_unit("rho", rho)
        lo = t_domain_lo(rho)
        if np.isscalar(p_grid):
            ps = np.linspace(lo, 0.5, int(p_grid) + 2)[1:-1]
        else:
            ps = _check_p(p_grid, rho)
        total += ps.size
        x = _aux(ps, rho)
        scale = 1 + np.abs(x.A) + np.abs(x.B) + np.abs(x.C)
        scalar_checks = {
            "F": x.F,                                     # must be <= tol
            "F2_minus_E2T2": -(x.F**2 - x.E**2 * x.T**2),  # negated: must be <= tol
            "A": -x.A, "B": -x.B, "D": -x.D,
            "varphi1": np.abs(_varphi(1.0, ps, rho)) / scale,
        }
        for name, bad in scalar_checks.items():
            counts[name] += ps.size
            worst[name] = max(worst[name], float(np.max(bad)))
            for i in np.flatnonzero(bad > tol):
                violations.append({"check": name, "rho": rho, "p": float(ps[i]),
                                   "value": float(bad[i])})
        step = fd_step * (ps - lo)
        for alpha in alpha_grid:
            fd = (_h(alpha, ps + step, rho) - _h(alpha, ps - step, rho)) / (2 * step)
            an = _dh(alpha, ps, rho)
            err = np.abs(fd - an) / (1 + np.abs(an))
            counts["deriv"] += ps.size
            worst["deriv"] = max(worst["deriv"], float(err.max()))
            for i in np.flatnonzero(~(err <= deriv_rtol)):
                violations.append({"check": "deriv", "rho": rho, "p": float(ps[i]),
                                   "alpha": float(alpha), "value": float(err[i])})
    return LemmaReport(total, counts, violations, worst)
