"""Boolean functions on the discrete cube and their Fourier analysis.

Index convention (shared by every module and file format): the point with
index ``i`` has ``x_j = +1`` iff bit ``j-1`` of ``i`` is set, ``-1`` otherwise.
Fourier coefficients are stored at a subset mask ``m`` with
``S = {j : bit j-1 of m set}``; the empty set lives at mask 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_TRANSFORM_DIM = 20
MAX_DIRECT_DIM = 12


class DimensionError(ValueError):
    """Raised when a dimension is outside the supported range."""


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Popcount of every index in ``range(2**n)``."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        out += (idx >> j) & 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _chi_sign(n: int) -> np.ndarray:
    # chi_S(x) = (-1)^|S| * (-1)^popcount(m & i) under the +1-iff-bit-set convention
    sign = np.where(popcounts(n) % 2 == 0, 1, -1).astype(np.int64)
    sign.setflags(write=False)
    return sign


def _check_dim(n: int, limit: int = MAX_TRANSFORM_DIM) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > limit:
        raise DimensionError(f"dimension n={n} outside supported range [1, {limit}]")


def _butterfly(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterflies along the last axis (in place)."""
    size = a.shape[-1]
    h = 1
    while h < size:
        v = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return a


def fwht(values: np.ndarray) -> np.ndarray:
    """Fourier coefficients of real-valued functions given as value arrays.

    ``values`` has shape ``(..., 2**n)``; the result has the same shape with
    ``out[..., m] = 2**-n * sum_x values[..., x] * chi_S(x)``. Integer input is
    transformed in exact integer arithmetic before the final dyadic scaling.
    """
    values = np.asarray(values)
    size = values.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise DimensionError(f"length {size} is not a power of two")
    _check_dim(n)
    if np.issubdtype(values.dtype, np.integer) or values.dtype == bool:
        work = values.astype(np.int64, copy=True)
    else:
        work = values.astype(np.float64, copy=True)
    _butterfly(work)
    return (work * _chi_sign(n)) / float(size)


def ifwht(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fwht`: ``sum_m coeffs[m] * chi_S(x)`` for every point."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    size = coeffs.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise DimensionError(f"length {size} is not a power of two")
    work = coeffs * _chi_sign(n)
    return _butterfly(work)


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of ``f : {-1,1}^n -> {0,1}``.

    ``table`` holds ``f`` at every point index (see the module docstring for the
    index convention). Instances are immutable.
    """

    n: int
    table: np.ndarray

    def __post_init__(self):
        _check_dim(self.n)
        table = np.asarray(self.table)
        if table.shape != (1 << self.n,):
            raise ValueError(
                f"table length {table.size} does not match 2**n = {1 << self.n}"
            )
        if not np.all((table == 0) | (table == 1)):
            raise ValueError("table entries must be 0 or 1")
        table = table.astype(np.uint8)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_int(cls, n: int, value: int) -> "BooleanFunction":
        _check_dim(n)
        if value < 0 or value >> (1 << n):
            raise ValueError(f"integer {value} does not fit a table of {1 << n} bits")
        size = 1 << n
        raw = np.frombuffer(value.to_bytes(max(1, size // 8), "little"), dtype=np.uint8)
        return cls(n, np.unpackbits(raw, bitorder="little")[:size])

    @classmethod
    def from_callable(cls, n: int, func) -> "BooleanFunction":
        """Build from ``func(x) -> 0/1`` where ``x`` is a tuple of +-1 entries."""
        rows = points(n)
        return cls(n, np.array([int(func(tuple(r))) for r in rows]))

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.table, bitorder="little").tobytes(), "little")

    @property
    def mean(self) -> float:
        return float(self.table.sum()) / (1 << self.n)

    def encode(self) -> str:
        return encode(self)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        return f"BooleanFunction({encode(self)!r})"


@dataclass(frozen=True)
class FourierSpectrum:
    n: int
    coeffs: np.ndarray

    def __getitem__(self, subset) -> float:
        """Coefficient for a subset given as an iterable of 1-based coordinates."""
        mask = 0
        for j in subset:
            mask |= 1 << (j - 1)
        return float(self.coeffs[mask])


@dataclass(frozen=True)
class DegreeWeights:
    w: np.ndarray

    def __getitem__(self, k: int) -> float:
        return float(self.w[k])

    def __len__(self):
        return len(self.w)


def points(n: int) -> np.ndarray:
    """All points of ``{-1,1}^n`` as a ``(2**n, n)`` integer array in index order."""
    idx = np.arange(1 << n)[:, None]
    bits = (idx >> np.arange(n)[None, :]) & 1
    return 2 * bits - 1


def wht(f: BooleanFunction) -> FourierSpectrum:
    coeffs = fwht(f.table)
    coeffs.setflags(write=False)
    return FourierSpectrum(f.n, coeffs)


def inverse(spec: FourierSpectrum) -> BooleanFunction:
    """Reconstruct the truth table; entries are rounded after a 1e-9 sanity check."""
    values = ifwht(spec.coeffs)
    rounded = np.rint(values)
    if np.max(np.abs(values - rounded)) > 1e-9 or not np.all((rounded == 0) | (rounded == 1)):
        raise ValueError("spectrum does not describe a Boolean function")
    return BooleanFunction(spec.n, rounded.astype(np.uint8))


def degree_weights(spec: FourierSpectrum) -> DegreeWeights:
    pc = popcounts(spec.n)
    w = np.bincount(pc, weights=np.asarray(spec.coeffs) ** 2, minlength=spec.n + 1)
    return DegreeWeights(w)


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho={rho} outside [0, 1]")
    return rho


def noise_all(f: BooleanFunction, rho: float) -> np.ndarray:
    """``T_rho f`` at every point via the Fourier diagonalisation."""
    rho = _check_rho(rho)
    coeffs = fwht(f.table)
    return ifwht(coeffs * rho ** popcounts(f.n))


def noise_operator_fourier(f: BooleanFunction, rho: float, x: int) -> float:
    rho = _check_rho(rho)
    if not 0 <= x < (1 << f.n):
        raise IndexError(f"point index {x} out of range")
    coeffs = fwht(f.table)
    m = np.arange(1 << f.n)
    chi = _chi_sign(f.n) * np.where(popcounts(f.n)[m & x] % 2 == 0, 1, -1)
    return float(np.sum(coeffs * rho ** popcounts(f.n) * chi))


def noise_operator_direct(f: BooleanFunction, rho: float, x: int) -> float:
    """``E[f(Y) | X = x]`` by summing over all ``y``; cost ``2**n`` per point."""
    rho = _check_rho(rho)
    if f.n > MAX_DIRECT_DIM:
        raise DimensionError(
            f"dimension n={f.n} too large for direct summation (max {MAX_DIRECT_DIM})"
        )
    if not 0 <= x < (1 << f.n):
        raise IndexError(f"point index {x} out of range")
    dist = popcounts(f.n)[np.arange(1 << f.n) ^ x]
    keep, flip = (1 + rho) / 2, (1 - rho) / 2
    weights = keep ** (f.n - dist) * flip ** dist
    return float(np.dot(weights, f.table))


def dictator(n: int, k: int, sign: int = 1) -> BooleanFunction:
    """``1{x_k = sign}``."""
    _check_dim(n)
    if not 1 <= k <= n:
        raise ValueError(f"coordinate k={k} out of range [1, {n}]")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    bit = (np.arange(1 << n) >> (k - 1)) & 1
    return BooleanFunction(n, bit if sign == 1 else 1 - bit)


def subcube_indicator(n: int, fixed) -> BooleanFunction:
    """Indicator of the subcube ``{x : x_k = s for (k, s) in fixed}``."""
    _check_dim(n)
    fixed = list(fixed)
    coords = [k for k, _ in fixed]
    if len(set(coords)) != len(coords):
        raise ValueError(f"duplicate coordinate in {fixed}")
    table = np.ones(1 << n, dtype=np.uint8)
    for k, s in fixed:
        if not 1 <= k <= n:
            raise ValueError(f"coordinate k={k} out of range [1, {n}]")
        if s not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        bit = (np.arange(1 << n) >> (k - 1)) & 1
        table &= (bit if s == 1 else 1 - bit).astype(np.uint8)
    return BooleanFunction(n, table)


_ENCODING = re.compile(r"n:(?P<n>[^;]*);table:(?P<hex>.*)")


class EncodingError(ValueError):
    """Malformed ``n:<dim>;table:<hex>`` string; ``position`` marks the defect."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at character {position})")
        self.position = position


def encode(f: BooleanFunction) -> str:
    """``n:<dim>;table:<hex>`` where bit ``i`` of the hex integer is ``f`` at point ``i``."""
    width = max(1, (1 << f.n) // 4)
    return f"n:{f.n};table:{f.to_int():0{width}x}"


def decode(text: str) -> BooleanFunction:
    text = text.strip()
    if not text.startswith("n:"):
        raise EncodingError("expected prefix 'n:'", 0)
    m = _ENCODING.fullmatch(text)
    if m is None:
        pos = text.find(";")
        raise EncodingError("expected ';table:' after the dimension", pos if pos >= 0 else len(text))
    try:
        n = int(m.group("n"))
    except ValueError:
        raise EncodingError(f"dimension {m.group('n')!r} is not an integer", m.start("n")) from None
    if not 1 <= n <= MAX_TRANSFORM_DIM:
        raise EncodingError(f"dimension n={n} outside [1, {MAX_TRANSFORM_DIM}]", m.start("n"))
    digits = m.group("hex")
    for off, ch in enumerate(digits):
        if ch not in "0123456789abcdefABCDEF":
            raise EncodingError(f"invalid hex digit {ch!r}", m.start("hex") + off)
    if not digits:
        raise EncodingError("empty table", m.start("hex"))
    value = int(digits, 16)
    if value >> (1 << n):
        raise EncodingError(f"table has bits beyond 2**n = {1 << n}", m.start("hex"))
    return BooleanFunction.from_int(n, value)
