"""Scalar threshold equations: the psi root rho* and the theta(alpha) region curve."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

RESIDUAL_TOL = 1e-10
MIN_TOL = 1e-14
RHO_STAR_BRACKET = (0.3, 0.6)
# theta is searched as exp(u); exp(-745) is the smallest positive double
LOG_THETA_FLOOR = -745.0


class BracketError(ValueError):
    """The residual does not change sign (or is not monotone) on the bracket."""


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket: tuple

    def to_dict(self) -> dict:
        return {"root": self.root, "residual": self.residual, "iterations": self.iterations,
                "bracket": list(self.bracket)}


def psi(rho: float) -> float:
    """``(1+rho^2) ln((1+rho)/2) - (1-rho)^2 ln((1-rho)/2)``, with the limit 0 at ``rho = 1``."""
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    if rho == 1.0:
        return 0.0
    return (1 + rho * rho) * math.log1p(rho) - (1 + rho * rho) * math.log(2.0) \
        - (1 - rho) ** 2 * (math.log1p(-rho) - math.log(2.0))


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol >= MIN_TOL:
        raise ValueError(f"tol={tol} below the supported minimum {MIN_TOL}")
    return tol


def _bisect(g, lo: float, hi: float, done, max_iter: int = 400):
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo, 0
    if ghi == 0.0:
        return hi, 0
    if (glo > 0) == (ghi > 0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: g={glo!r}, {ghi!r}")
    it = 0
    mid = 0.5 * (lo + hi)
    while it < max_iter:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        it += 1
        if gm == 0.0 or done(lo, hi, gm) or mid in (lo, hi):
            break
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return mid, it


def rho_star(tol: float = 1e-8) -> RootResult:
    """Root of ``psi`` in ``(0, 1)`` by bisection on ``[0.3, 0.6]``.

    Iterates until the bracket is narrower than ``tol`` *and* the residual is
    below ``1e-10``.
    """
    tol = _check_tol(tol)
    lo, hi = RHO_STAR_BRACKET
    root, it = _bisect(psi, lo, hi, lambda a, b, gm: b - a <= tol and abs(gm) <= RESIDUAL_TOL)
    return RootResult(root, psi(root), it, RHO_STAR_BRACKET)


def theta_residual(theta: float, alpha: float) -> float:
    return theta ** (2 - alpha) + (1 - theta) / alpha - 1


def _theta_peak(alpha: float) -> float:
    # maximiser of the (concave) residual; the nontrivial root lies below it
    return (alpha * (2 - alpha)) ** (1 / (alpha - 1))


def theta(alpha: float, tol: float = 1e-12) -> RootResult:
    """Nontrivial solution ``theta in (0, 1)`` of ``theta^(2-alpha) + (1-theta)/alpha = 1``.

    ``theta = 1`` always solves the equation; the residual is concave in
    ``theta`` with its peak at ``(alpha(2-alpha))^(1/(alpha-1))`` and the
    wanted root lies below that peak. Bisection runs in ``u = ln(theta)`` so
    the tiny roots near ``alpha = 2`` (about ``1e-30`` at ``alpha = 1.99``)
    are resolved. Monotonicity on the bracket is checked on every call.
    """
    alpha = float(alpha)
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} must lie strictly inside (1, 2)")
    tol = _check_tol(tol)

    def g(u):
        return math.exp((2 - alpha) * u) - math.expm1(u) / alpha - 1

    hi = math.log(_theta_peak(alpha))
    lo = LOG_THETA_FLOOR
    probe = np.linspace(lo, hi, 257)
    vals = np.exp((2 - alpha) * probe) - np.expm1(probe) / alpha - 1
    if np.any(np.diff(vals) < -1e-15):
        raise BracketError(f"theta residual not monotone on the bracket for alpha={alpha}")
    if g(lo) >= 0:
        raise BracketError(
            f"theta(alpha={alpha}) is below the smallest positive double; alpha too close to 2"
        )

    def done(a, b, gm):
        return math.exp(b) - math.exp(a) <= tol * max(math.exp(b), 1e-300) and abs(gm) <= RESIDUAL_TOL

    u, it = _bisect(g, lo, hi, done)
    root = math.exp(u)
    return RootResult(root, theta_residual(root, alpha), it, (math.exp(lo), math.exp(hi)))


def region_threshold(alpha: float) -> float:
    """Largest ``rho`` of the dictator-optimality region, ``(1-theta)/(1+theta)``."""
    t = theta(alpha).root
    return (1 - t) / (1 + t)


def region_curve(alpha_lo: float, alpha_hi: float, steps: int, workers: int = 1) -> list:
    """``steps`` uniformly spaced ``(alpha, threshold)`` pairs, endpoints included."""
    if not 1.0 < alpha_lo <= alpha_hi < 2.0:
        raise ValueError(f"alpha range [{alpha_lo}, {alpha_hi}] must lie inside (1, 2)")
    if steps < 1:
        raise ValueError("steps must be positive")
    alphas = np.linspace(alpha_lo, alpha_hi, steps) if steps > 1 else np.array([alpha_lo])
    if workers > 1:
        from joblib import Parallel, delayed

        vals = Parallel(n_jobs=workers, prefer="threads")(
            delayed(region_threshold)(float(a)) for a in alphas)
    else:
        vals = [region_threshold(float(a)) for a in alphas]
    return [(float(a), float(v)) for a, v in zip(alphas, vals)]


def curve_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "rho_threshold"])
    for a, v in rows:
        w.writerow([repr(a), repr(v)])
    return buf.getvalue()
