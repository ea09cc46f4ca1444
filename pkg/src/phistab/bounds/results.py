"""Result records shared by the bound evaluators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..phi import PhiSpec

FEAS_TOL = 1e-9
ARG_CLIP = 1e-12
RECORD_KEYS = ("value", "beta", "z1", "z2", "p", "q", "feasible", "grid", "refine_iters", "residual")


class RegimeError(ValueError):
    """The requested bound does not apply to the given Phi or parameters."""


@dataclass
class SZDistribution:
    """Finite joint law of ``(S, Z)`` (optionally with a third label ``X``).

    ``atoms`` are ``(s, z, prob)`` or ``(s, x, z, prob)`` tuples.
    """

    atoms: list

    def _cols(self):
        arr = np.array(self.atoms, dtype=float)
        if arr.shape[1] == 3:
            s, z, pr = arr.T
            x = None
        else:
            s, x, z, pr = arr.T
        return s, x, z, pr

    def moments(self) -> dict:
        s, x, z, pr = self._cols()
        out = {"EZ": float(pr @ z), "EZ2": float(pr @ z**2), "ESZ": float(pr @ (s * z)),
               "mass": float(pr.sum()), "min_prob": float(pr.min())}
        if x is not None:
            out["EXZ"] = float(pr @ (x * z))
        return out

    def marginal(self) -> dict:
        s, x, _, pr = self._cols()
        keys = s.tolist() if x is None else list(zip(s.tolist(), x.tolist()))
        out: dict = {}
        for k, v in zip(keys, pr):
            out[k] = out.get(k, 0.0) + float(v)
        return out

    def range_violation(self, a: float, rho: float) -> float:
        _, _, z, _ = self._cols()
        t = a + rho * z
        return float(max(0.0, -t.min(), t.max() - 1.0))

    def expectation(self, spec: PhiSpec, a: float, rho: float) -> float:
        _, _, z, pr = self._cols()
        t = np.clip(a + rho * z, 0.0, 1.0)
        return float(pr @ np.asarray(spec(t)))

    def residual(self, a: float, rho: float, target: dict, second_moment_cap=None) -> float:
        """Largest violation of: probability axioms, marginal ``target``, ``E Z = 0``,
        range, and ``E Z^2 <= cap`` (``cap`` defaults to ``E[SZ]``)."""
        m = self.moments()
        marg = self.marginal()
        res = [abs(m["mass"] - 1.0), max(0.0, -m["min_prob"]), abs(m["EZ"]),
               self.range_violation(a, rho)]
        for k, v in target.items():
            res.append(abs(marg.get(k, 0.0) - v))
        cap = m["ESZ"] if second_moment_cap is None else second_moment_cap(m)
        res.append(max(0.0, m["EZ2"] - cap))
        return float(max(res))


@dataclass
class BoundResult:
    """Bound value with its maximiser and diagnostics.

    ``params`` holds whichever of ``beta, z1, z2, z_tilde, z_hat, p, q`` apply.
    """

    kind: str
    value: float
    params: dict = field(default_factory=dict)
    feasible: bool = True
    grid: int = 0
    refine_iters: int = 0
    residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    distribution: SZDistribution | None = None

    def record(self) -> dict:
        """Flat record with the fixed key set used for JSON and CSV output."""
        out = {"value": self.value}
        for key in ("beta", "z1", "z2", "p", "q"):
            out[key] = self.params.get(key)
        out.update(feasible=self.feasible, grid=self.grid, refine_iters=self.refine_iters,
                   residual=self.residual)
        return out

    def to_dict(self) -> dict:
        out = {"kind": self.kind, **self.record()}
        extra = {k: v for k, v in self.params.items() if k not in RECORD_KEYS}
        if extra:
            out["extra_params"] = extra
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


def phi_masked(spec: PhiSpec, t: np.ndarray):
    """Evaluate ``spec`` where ``t`` is in ``[0, 1]`` up to ``ARG_CLIP``; ``-inf`` elsewhere."""
    t = np.asarray(t, dtype=float)
    ok = np.isfinite(t) & (t >= -ARG_CLIP) & (t <= 1 + ARG_CLIP)
    tc = np.clip(np.where(ok, t, 0.5), 0.0, 1.0)
    with np.errstate(all="ignore"):
        vals = np.asarray(spec(tc), dtype=float)
    return np.where(ok, vals, -math.inf), ok


def check_unit(name: str, x: float, lo_open=True, hi_open=True, lo=0.0, hi=1.0) -> float:
    x = float(x)
    bad = (x <= lo if lo_open else x < lo) or (x >= hi if hi_open else x > hi)
    if not math.isfinite(x) or bad:
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise ValueError(f"{name}={x} outside {lb}{lo}, {hi}{rb}")
    return x
