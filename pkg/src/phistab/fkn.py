"""Level-1 Fourier weight bounds of FKN type and their exhaustive small-n values."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube import BooleanFunction, DimensionError, fwht
from .enumerate import MAX_EXHAUSTIVE_DIM, all_tables, check_weight, pack

INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)
WEIGHT_CAP = 0.25
WEIGHT_KINDS = ("chang_combined", "fkn_recursive", "khintchine", "pointwise_min")


def phi_chang(t: float) -> float:
    """Chang-type level-1 weight bound for a function of mean ``t in (0, 1/2]``.

    ``min(2 t^2 ln(1/t), 2 t^2 (1/sqrt(t) - 1))`` for ``t <= 1/4`` and
    ``t / 2`` above.
    """
    t = float(t)
    if not 0.0 < t <= 0.5:
        raise ValueError(f"t={t} outside (0, 1/2]")
    if t <= 0.25:
        return min(2 * t * t * math.log(1 / t), 2 * t * t * (1 / math.sqrt(t) - 1))
    return t / 2


def varphi(t: float) -> float:
    """``phi_chang(min(t, 1-t))`` extended by 0 at the constant functions."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t={t} outside [0, 1]")
    t = min(t, 1.0 - t)
    return 0.0 if t == 0.0 else phi_chang(t)


def omega_fkn(a: float, beta: float) -> float:
    """Recursive FKN bound ``beta^2 + (sqrt(varphi(a) - a^2) + sqrt(varphi(a - beta)))^2``."""
    a, beta = float(a), float(beta)
    if not (0.0 <= beta <= a <= 0.5):
        raise ValueError(f"need 0 <= beta <= a <= 1/2, got a={a}, beta={beta}")
    first = math.sqrt(max(varphi(a) - a * a, 0.0))
    return beta * beta + (first + math.sqrt(varphi(a - beta))) ** 2


def omega_khintchine(beta: float) -> float:
    """Khintchine-type bound at mean 1/2."""
    beta = float(beta)
    if not 0.0 <= beta <= 0.5:
        raise ValueError(f"beta={beta} outside [0, 1/2]")
    c = INV_SQRT_2PI
    return 0.25 * (math.sqrt(4 * (0.5 - c) * beta + c * c) + c) ** 2


def omega_min(beta: float) -> float:
    return min(omega_fkn(0.5, beta), omega_khintchine(beta), WEIGHT_CAP)


@dataclass(frozen=True)
class WeightBoundSpec:
    """A weight bound ``omega(beta)`` at mean 1/2, usable as the bound function of ``upsilon_bar``."""

    kind: str = "pointwise_min"
    cap: float = WEIGHT_CAP

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"kind must be one of {WEIGHT_KINDS}, got {self.kind!r}")

    def __call__(self, beta: float) -> float:
        if self.kind == "chang_combined":
            val = varphi(0.5)
        elif self.kind == "fkn_recursive":
            val = omega_fkn(0.5, beta)
        elif self.kind == "khintchine":
            val = omega_khintchine(beta)
        else:
            val = omega_min(beta)
        return min(val, self.cap)


@dataclass
class WeightResult:
    value: float | None
    witness: BooleanFunction | None
    count: int

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": None if self.witness is None else self.witness.encode(),
                "count": self.count}


def level1_stats(tables: np.ndarray):
    """Exact integer level-1 data: ``(2^n)^2 W_1`` and ``2^n max_i |f_hat({i})|``."""
    n = tables.shape[-1].bit_length() - 1
    # integer butterflies before scaling: multiply back by 2**n
    coeffs = np.rint(fwht(tables.astype(np.int64)) * (1 << n)).astype(np.int64)
    level1 = coeffs[:, [1 << j for j in range(n)]]
    return (level1 ** 2).sum(axis=1), np.abs(level1).max(axis=1)


def _tables_for(n: int, a: float):
    if not 1 <= n <= MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"exhaustive weights support 1 <= n <= {MAX_EXHAUSTIVE_DIM}")
    return all_tables(n, check_weight(n, a))


def _best(tables, w1_int, mask, n):
    scale = float(1 << (2 * n))
    if not mask.any():
        return WeightResult(None, None, 0)
    w = np.where(mask, w1_int, -1)
    best = w.max()
    hits = np.flatnonzero(w == best)
    # least packed code among maximisers is also the least orbit representative
    code = int(pack(tables[hits]).min())
    return WeightResult(float(best) / scale, BooleanFunction.from_int(n, code), int(mask.sum()))


def exhaustive_W(n: int, a: float) -> WeightResult:
    """``max W_1[f]`` over all ``f`` on ``n`` bits with mean ``a``."""
    tables = _tables_for(n, a)
    w1, _ = level1_stats(tables)
    return _best(tables, w1, np.ones(len(tables), dtype=bool), n)


def exhaustive_W_beta(n: int, a: float, beta: float) -> WeightResult:
    """``max W_1[f]`` over mean-``a`` functions whose largest level-1 coefficient is ``beta`` in magnitude.

    ``beta`` must be a multiple of ``2**(1-n)`` for an exact match; other values
    return an empty result.
    """
    tables = _tables_for(n, a)
    w1, bmax = level1_stats(tables)
    target = beta * (1 << n)
    if abs(target - round(target)) > 1e-9:
        return WeightResult(None, None, 0)
    return _best(tables, w1, bmax == int(round(target)), n)


def weight_table(n: int, a: float):
    """``(W_1, beta)`` for every mean-``a`` function, as floats."""
    tables = _tables_for(n, a)
    w1, bmax = level1_stats(tables)
    return tables, w1 / float(1 << (2 * n)), bmax / float(1 << n)
