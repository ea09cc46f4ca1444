"""Exhaustive ground truth for maximal Phi-stability at small dimension.

Functions of a fixed mean are grouped into orbits under coordinate
permutations and sign flips (stability is invariant under both), so only one
representative per orbit is evaluated. ``canonicalize=False`` evaluates every
function instead and must give the same answer.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import BoundResult, evaluate
from .cube import BooleanFunction, DimensionError, subcube_indicator
from .enumerate import (MAX_EXHAUSTIVE_DIM, MAX_LONG_RUN_DIM, check_weight, colex_unrank,
                        orbits, unpack)
from .phi import PhiSpec, dictator_stability, phi_stability, stability_many

GAP_TOL = 1e-12
DOMINANCE_TOL = 1e-9
TIE_TOL = 1e-12


@dataclass
class VerificationReport:
    n: int
    rho: float
    phi: str
    mean: float
    enumerated_max: float
    attaining: list
    attaining_canonical: list
    dictator_value: float | None
    gap: float | None
    counts: dict
    check: str = "max_stability"
    passed: bool = True
    bound_kind: str | None = None
    bound_value: float | None = None
    dominance_margin: float | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def reference_value(n: int, a: float, spec: PhiSpec, rho: float):
    """Stability of the natural candidate maximiser at mean ``a``.

    A dictator at ``a = 1/2``; the indicator of a codimension-``j`` subcube at
    ``a = 2**-j`` (its complement at ``1 - 2**-j``). ``None`` for other means.
    """
    if a == 0.5:
        return dictator_stability(spec, rho)
    for j in range(1, n + 1):
        sub = subcube_indicator(n, [(k, 1) for k in range(1, j + 1)])
        if a == 2.0 ** -j:
            return phi_stability(sub, spec, rho)
        if a == 1 - 2.0 ** -j:
            return phi_stability(BooleanFunction(n, 1 - sub.table), spec, rho)
    return None


def _chunks(arr, workers):
    if workers <= 1 or len(arr) < 2 * workers:
        return [arr]
    return np.array_split(arr, workers)


def _evaluate(tables, spec, rho, workers):
    parts = _chunks(tables, workers)
    if len(parts) == 1:
        return stability_many(tables, spec, rho)
    from joblib import Parallel, delayed

    outs = Parallel(n_jobs=workers, prefer="threads")(
        delayed(stability_many)(part, spec, rho) for part in parts)
    return np.concatenate(outs)


def max_stability(n: int, a: float, spec: PhiSpec, rho: float, canonicalize: bool = True,
                  workers: int = 1) -> VerificationReport:
    """Exact ``max Stab_Phi[f]`` over every ``f`` on ``n <= 4`` bits with mean ``a``.

    The attaining set lists every maximiser (orbits expanded), sorted by
    packed code; ``attaining_canonical`` lists the orbit representatives.
    """
    if not 1 <= n <= MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"exhaustive search supports 1 <= n <= {MAX_EXHAUSTIVE_DIM}; "
                             "n = 5 requires max_stability_long")
    k = check_weight(n, a)
    rho = float(rho)
    tables, codes, rep_index, reps = orbits(n, k)
    if canonicalize:
        # the canonical code is the least code of its orbit, so it is in ``codes``
        first = np.searchsorted(codes, reps)
        values = _evaluate(tables[first], spec, rho, workers)[rep_index]
        evaluated = len(reps)
    else:
        values = _evaluate(tables, spec, rho, workers)
        evaluated = len(tables)
    best = float(values.max())
    hit = values >= best - TIE_TOL
    attaining = sorted(int(c) for c in codes[hit])
    canon = sorted({int(reps[i]) for i in rep_index[hit]})
    ref = reference_value(n, a, spec, rho)
    gap = None if ref is None else best - ref
    total = math.comb(1 << n, k)
    counts = {"functions": len(tables), "expected": total, "evaluated": evaluated,
              "skipped": len(tables) - evaluated, "orbits": len(reps)}
    if len(tables) != total:
        raise AssertionError(f"enumeration audit failed: {len(tables)} != C({1 << n}, {k}) = {total}")
    enc = [BooleanFunction.from_int(n, c).encode() for c in attaining]
    enc_canon = [BooleanFunction.from_int(n, c).encode() for c in canon]
    return VerificationReport(n, rho, spec.label, a, best, enc, enc_canon, ref, gap, counts)


def verify_dictator(n: int, spec: PhiSpec, rho_grid, workers: int = 1) -> list:
    """One report per ``rho``: PASS when the balanced maximum equals the dictator value."""
    out = []
    for rho in rho_grid:
        rep = max_stability(n, 0.5, spec, float(rho), workers=workers)
        rep.check = "dictator"
        rep.passed = rep.gap is not None and rep.gap <= GAP_TOL
        out.append(rep)
    return out


def verify_dominance(n: int, a: float, spec: PhiSpec, rho: float, bound,
                     workers: int = 1, **options) -> VerificationReport:
    """Compare the exhaustive maximum against a bound.

    ``bound`` is a :class:`BoundResult` or a kind name passed to
    :func:`phistab.bounds.evaluate`. PASS when ``bound - max >= -1e-9``; the
    attaining set then holds the worst offenders.
    """
    if not isinstance(bound, BoundResult):
        bound = evaluate(bound, a, rho, spec, **options)
    rep = max_stability(n, a, spec, rho, workers=workers)
    rep.check = "dominance"
    rep.bound_kind = bound.kind
    rep.bound_value = bound.value
    rep.dominance_margin = bound.value - rep.enumerated_max
    rep.passed = rep.dominance_margin >= -DOMINANCE_TOL
    return rep


# ---------------------------------------------------------------- gated n = 5 run

def max_stability_long(n: int, a: float, spec: PhiSpec, rho: float, checkpoint: str,
                       allow_long: bool = False, chunk: int = 1 << 20, max_chunks=None,
                       progress=None) -> VerificationReport:
    """Chunked exhaustive search for ``n = 5`` with a resumable JSON checkpoint.

    Functions are visited in colex (increasing packed code) order. The
    checkpoint stores the next rank, the running maximum and its maximisers.
    ``max_chunks`` limits the work done by one call (the run resumes from the
    checkpoint). No orbit reduction is used here.
    """
    if not allow_long:
        raise PermissionError("the n = 5 search takes hours; pass allow_long=True to run it")
    if not 1 <= n <= MAX_LONG_RUN_DIM:
        raise DimensionError(f"long search supports n <= {MAX_LONG_RUN_DIM}")
    k = check_weight(n, a)
    size = 1 << n
    total = math.comb(size, k)
    config = {"n": n, "a": a, "phi": spec.label, "rho": float(rho)}
    state = {"config": config, "next_rank": 0, "best": -math.inf, "attaining": []}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            saved = json.load(fh)
        if saved.get("config") != config:
            raise ValueError(f"checkpoint {checkpoint} belongs to a different run: {saved.get('config')}")
        state = saved
        state["best"] = -math.inf if state["best"] is None else state["best"]
    done = 0
    while state["next_rank"] < total and (max_chunks is None or done < max_chunks):
        start = state["next_rank"]
        stop = min(start + chunk, total)
        codes = colex_unrank(np.arange(start, stop, dtype=np.int64), size, k)
        values = stability_many(unpack(codes, n), spec, rho)
        top = float(values.max())
        if top > state["best"] + TIE_TOL:
            state["best"] = top
            state["attaining"] = []
        if top >= state["best"] - TIE_TOL:
            state["best"] = max(state["best"], top)
            state["attaining"] = sorted(set(state["attaining"]) | {
                int(c) for c in codes[values >= state["best"] - TIE_TOL]})
        state["next_rank"] = stop
        done += 1
        if checkpoint:
            tmp = checkpoint + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(state, fh)
            os.replace(tmp, checkpoint)
        if progress:
            progress(stop, total)
    ref = reference_value(n, a, spec, rho)
    best = state["best"]
    complete = state["next_rank"] >= total
    counts = {"functions": state["next_rank"], "expected": total, "evaluated": state["next_rank"],
              "skipped": 0, "complete": complete}
    enc = [BooleanFunction.from_int(n, c).encode() for c in state["attaining"]]
    rep = VerificationReport(n, float(rho), spec.label, a, best, enc, [], ref,
                             None if ref is None else best - ref, counts)
    rep.passed = complete
    return rep


__all__ = ["VerificationReport", "max_stability", "max_stability_long",
           "reference_value", "verify_dictator", "verify_dominance"]
