"""Enumeration of Boolean functions of fixed weight, and the cube symmetry group.

Tables are handled as ``uint8`` arrays of shape ``(N, 2**n)`` in point-index
order. Packed integer codes use bit ``i`` for point ``i`` (same as
:meth:`BooleanFunction.to_int`).
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .cube import DimensionError

MAX_EXHAUSTIVE_DIM = 4
MAX_LONG_RUN_DIM = 5


def check_weight(n: int, a: float) -> int:
    """Number of ones ``k = a * 2**n``; raises unless it is an integer."""
    size = 1 << n
    k = a * size
    if not 0 <= a <= 1 or abs(k - round(k)) > 1e-9:
        raise ValueError(f"mean a={a} not achievable at n={n} (a*2^n must be an integer)")
    return int(round(k))


def all_tables(n: int, k: int) -> np.ndarray:
    """Every table with exactly ``k`` ones, in increasing packed-code order."""
    size = 1 << n
    combos = np.array(list(itertools.combinations(range(size), k)), dtype=np.int64)
    out = np.zeros((len(combos), size), dtype=np.uint8)
    if k:
        rows = np.repeat(np.arange(len(combos)), k)
        out[rows, combos.ravel()] = 1
    codes = pack(out)
    return out[np.argsort(codes, kind="stable")]


def pack(tables: np.ndarray) -> np.ndarray:
    """Packed integer codes (``int64``, so ``n <= 5``)."""
    size = tables.shape[-1]
    if size > 32:
        raise DimensionError("packed codes support n <= 5")
    weights = np.left_shift(np.int64(1), np.arange(size, dtype=np.int64))
    return tables.astype(np.int64) @ weights


def unpack(codes, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[:, None] >> np.arange(1 << n, dtype=np.int64)) & 1).astype(np.uint8)


@lru_cache(maxsize=None)
def group_permutations(n: int) -> np.ndarray:
    """Point permutations induced by coordinate permutations and sign flips.

    Row ``g`` maps a table ``t`` to ``t[perm[g]]``; there are ``n! 2**n`` rows
    (the identity first).
    """
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n)) & 1
    rows = []
    for perm in itertools.permutations(range(n)):
        for flips in range(1 << n):
            flip = (flips >> np.arange(n)) & 1
            new_bits = bits[:, perm] ^ flip
            rows.append(new_bits @ (1 << np.arange(n)))
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


def canonical_codes(tables: np.ndarray) -> np.ndarray:
    """Smallest packed code over each table's symmetry orbit."""
    n = tables.shape[-1].bit_length() - 1
    perms = group_permutations(n)
    best = None
    for start in range(0, len(perms), 64):
        block = tables[:, perms[start:start + 64]]
        codes = pack(block).min(axis=1)
        best = codes if best is None else np.minimum(best, codes)
    return best


@lru_cache(maxsize=None)
def orbits(n: int, k: int):
    """Orbit decomposition of the weight-``k`` tables at dimension ``n``.

    Returns ``(tables, codes, rep_index, reps)`` where ``rep_index[i]`` is the
    position in ``reps`` of the orbit of function ``i`` and ``reps`` holds the
    canonical codes in increasing order.
    """
    if n > MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"orbit enumeration supports n <= {MAX_EXHAUSTIVE_DIM}")
    tables = all_tables(n, k)
    codes = pack(tables)
    canon = canonical_codes(tables)
    reps, rep_index = np.unique(canon, return_inverse=True)
    for arr in (tables, codes, rep_index, reps):
        arr.setflags(write=False)
    return tables, codes, rep_index, reps


def binomial_table(size: int) -> np.ndarray:
    table = np.zeros((size + 1, size + 1), dtype=np.int64)
    for i in range(size + 1):
        for j in range(i + 1):
            table[i, j] = math.comb(i, j)
    return table


def colex_unrank(ranks: np.ndarray, size: int, k: int) -> np.ndarray:
    """Packed codes of the weight-``k`` subsets of ``range(size)`` at colex ``ranks``.

    Colex order on subsets coincides with increasing packed code.
    """
    ranks = np.asarray(ranks, dtype=np.int64).copy()
    binom = binomial_table(size)
    codes = np.zeros_like(ranks)
    for i in range(k, 0, -1):
        # largest c with C(c, i) <= rank
        col = binom[:, i]
        c = np.searchsorted(col, ranks, side="right") - 1
        codes |= np.left_shift(np.int64(1), c)
        ranks -= col[c]
    return codes
