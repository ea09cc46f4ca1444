"""Convex functionals Phi, Phi-stability, Phi-entropy and Phi-mutual information."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube import BooleanFunction, fwht, ifwht, popcounts

ALPHA_MAX = 16.0
KINDS = ("log", "power")


def ln_alpha(t, alpha: float):
    """Tsallis-style deformed logarithm ``(t**(alpha-1) - 1) / (alpha - 1)``.

    Reduces to the natural log at ``alpha == 1``; ``expm1`` keeps it continuous
    in ``alpha`` near 1.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("ln_alpha requires t > 0")
    lt = np.log(t)
    if alpha == 1:
        out = lt
    else:
        out = np.expm1((alpha - 1.0) * lt) / (alpha - 1.0)
    return out if out.ndim else float(out)


def _xlnx(t: np.ndarray, alpha: float) -> np.ndarray:
    # t * ln_alpha(t) with the 0 * ln_alpha(0) = 0 convention
    safe = np.where(t > 0, t, 1.0)
    lt = np.log(safe)
    if alpha == 1:
        val = safe * lt
    else:
        val = safe * np.expm1((alpha - 1.0) * lt) / (alpha - 1.0)
    return np.where(t > 0, val, 0.0)


def _xlnx_prime(t: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 1:
        return np.log(t) + 1.0
    return (alpha * t ** (alpha - 1.0) - 1.0) / (alpha - 1.0)


@dataclass(frozen=True)
class PhiSpec:
    """A strictly convex ``Phi : [0, 1] -> R``.

    ``kind="log"`` gives ``t ln_alpha(t)`` (plus the mirrored term when
    ``symmetric``); ``kind="power"`` gives ``t**alpha`` (resp.
    ``t**alpha + (1-t)**alpha``). ``reflected`` evaluates ``Phi(1 - t)``.
    """

    alpha: float = 1.0
    symmetric: bool = False
    kind: str = "log"
    reflected: bool = False

    def __post_init__(self):
        alpha = float(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not math.isfinite(alpha) or alpha > ALPHA_MAX:
            raise ValueError(f"alpha={alpha} outside supported range (max {ALPHA_MAX})")
        if self.kind == "log" and alpha < 1:
            raise ValueError(f"alpha={alpha} must be >= 1 for the log family")
        if self.kind == "power" and alpha <= 1:
            raise ValueError(f"alpha={alpha} must be > 1 for the power family")

    @property
    def label(self) -> str:
        name = "sym" if self.symmetric else "asym"
        tag = f"{self.kind}:{name}:alpha={self.alpha!r}"
        return tag + (":reflected" if self.reflected else "")

    def reflect(self) -> "PhiSpec":
        return PhiSpec(self.alpha, self.symmetric, self.kind, not self.reflected)

    def _base(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "log":
            out = _xlnx(t, self.alpha)
            if self.symmetric:
                out = out + _xlnx(1.0 - t, self.alpha)
        else:
            out = t ** self.alpha
            if self.symmetric:
                out = out + (1.0 - t) ** self.alpha
        return out

    def _base_prime(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "log":
            out = _xlnx_prime(t, self.alpha)
            if self.symmetric:
                out = out - _xlnx_prime(1.0 - t, self.alpha)
        else:
            out = self.alpha * t ** (self.alpha - 1.0)
            if self.symmetric:
                out = out - self.alpha * (1.0 - t) ** (self.alpha - 1.0)
        return out

    def scalar(self, t: float) -> float:
        """``Phi(t)`` for a single float without numpy overhead."""
        if self.reflected:
            t = 1.0 - t
        a = self.alpha
        args = (t, 1.0 - t) if self.symmetric else (t,)
        out = 0.0
        for x in args:
            if self.kind == "power":
                out += x ** a
            elif x > 0.0:
                lx = math.log(x)
                out += x * (lx if a == 1 else math.expm1((a - 1.0) * lx) / (a - 1.0))
        return out

    def __call__(self, t):
        """Vectorised ``Phi``; callers guarantee ``t`` in ``[0, 1]``."""
        t = np.asarray(t, dtype=float)
        out = self._base(1.0 - t if self.reflected else t)
        return out if out.ndim else float(out)

    def prime(self, t):
        """``Phi'`` on the open interval ``(0, 1)``."""
        t = np.asarray(t, dtype=float)
        out = -self._base_prime(1.0 - t) if self.reflected else self._base_prime(t)
        return out if out.ndim else float(out)

    def derivative_shape(self) -> str:
        """Shape of ``Phi'`` on ``(0, 1/2]`` (symmetric) or ``(0, 1)``.

        One of ``"concave"``, ``"convex"`` or ``"linear"``; follows from the sign
        of the third derivative of the power/log family.
        """
        a = self.alpha
        if self.symmetric:
            if a == 1 or 1 < a < 2 or a > 3:
                shape = "concave"
            elif 2 < a < 3:
                shape = "convex"
            else:
                shape = "linear"
        else:
            if a < 2:
                shape = "concave"
            elif a > 2:
                shape = "convex"
            else:
                shape = "linear"
        if self.reflected and shape != "linear":
            shape = "convex" if shape == "concave" else "concave"
        return shape


def phi_value(spec: PhiSpec, t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    return spec(t)


def _clip_unit(values: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if values.size and (values.min() < -tol or values.max() > 1 + tol):
        raise ValueError("smoothed values left [0, 1] beyond rounding tolerance")
    return np.clip(values, 0.0, 1.0)


def smoothed_tables(tables: np.ndarray, rho: float) -> np.ndarray:
    """``T_rho f`` for a batch of truth tables of shape ``(N, 2**n)``."""
    tables = np.asarray(tables)
    n = tables.shape[-1].bit_length() - 1
    coeffs = fwht(tables)
    return ifwht(coeffs * rho ** popcounts(n))


def stability_many(tables: np.ndarray, spec: PhiSpec, rho: float) -> np.ndarray:
    """Phi-stability of every row of a truth-table batch."""
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    smooth = _clip_unit(smoothed_tables(tables, rho))
    return np.asarray(spec(smooth)).mean(axis=-1)


def phi_stability(f: BooleanFunction, spec: PhiSpec, rho: float) -> float:
    """``E[Phi(T_rho f(X))]`` for uniform ``X``."""
    return float(stability_many(f.table[None, :], spec, rho)[0])


def dictator_stability(spec: PhiSpec, rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    return 0.5 * spec((1 + rho) / 2) + 0.5 * spec((1 - rho) / 2)


def phi_entropy(values, spec: PhiSpec, probs=None) -> float:
    """``E[Phi(V)] - Phi(E V)`` for a finitely supported ``[0, 1]``-valued ``V``."""
    values = _clip_unit(np.asarray(values, dtype=float), 1e-12)
    if probs is None:
        probs = np.full(values.shape, 1.0 / values.size)
    probs = np.asarray(probs, dtype=float)
    if probs.shape != values.shape or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
        raise ValueError("probs must be a distribution matching values")
    return float(np.dot(probs, spec(values)) - spec(float(np.dot(probs, values))))


def phi_mutual_information(f: BooleanFunction, spec: PhiSpec, rho: float) -> float:
    """``Stab_Phi[f] - Phi(E f)``; nonnegative by Jensen."""
    return phi_stability(f, spec, rho) - spec(f.mean)
