"""Seeded hash families over the Mersenne field GF(2^61 - 1).

Every hash here has two evaluation routes: ``h(x)`` works on Python ints and
is the reference, ``h.map(xs)`` works on numpy arrays and is what the batch
paths use. They agree bit for bit.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

MERSENNE_61 = (1 << 61) - 1
# bits needed to store one field element
FIELD_BITS = 61

_P = np.uint64(MERSENNE_61)
_MASK30 = np.uint64((1 << 30) - 1)
_MASK31 = np.uint64((1 << 31) - 1)


def make_rng(seed) -> np.random.Generator:
    """Generator for an int seed or a tuple of ints (a derived scope)."""
    if isinstance(seed, tuple):
        seed = list(seed)
    return np.random.default_rng(seed)


def derive(seed, *path) -> tuple:
    """Seed for a named sub-scope of ``seed``; scopes nest by concatenation."""
    base = seed if isinstance(seed, tuple) else (int(seed),)
    return base + tuple(int(p) for p in path)


def _reduce(s: np.ndarray) -> np.ndarray:
    s = (s & _P) + (s >> np.uint64(61))
    s = (s & _P) + (s >> np.uint64(61))
    return np.where(s >= _P, s - _P, s)


def mulmod(a, x) -> np.ndarray:
    """(a * x) mod 2^61-1 for uint64 operands already reduced below p.

    Splits both operands at bit 31 so every partial product fits in 64 bits;
    2^62 = 2 and 2^61 = 1 modulo p.
    """
    a = np.asarray(a, dtype=np.uint64)
    x = np.asarray(x, dtype=np.uint64)
    a_hi, a_lo = a >> np.uint64(31), a & _MASK31
    if x.size and int(x.max()) <= int(_MASK31):
        # keys below 2^31: the x_hi partial products vanish
        mid = a_hi * x
        mid = (mid >> np.uint64(30)) + ((mid & _MASK30) << np.uint64(31))
        return _reduce(mid + _reduce(a_lo * x))
    x_hi, x_lo = x >> np.uint64(31), x & _MASK31
    hi = (a_hi * x_hi) << np.uint64(1)
    mid = a_hi * x_lo + a_lo * x_hi
    mid = (mid >> np.uint64(30)) + ((mid & _MASK30) << np.uint64(31))
    lo = _reduce(a_lo * x_lo)
    return _reduce(_reduce(hi + mid) + lo)


def _as_field_array(xs) -> np.ndarray:
    arr = np.asarray(xs)
    if arr.dtype.kind not in "ui":
        raise TypeError(f"hash keys must be integers, got dtype {arr.dtype}")
    if arr.size and (arr.min() < 0 or int(arr.max()) >= MERSENNE_61):
        raise ValueError("hash keys must lie in [0, 2^61 - 1)")
    return arr.astype(np.uint64)


class PairwiseHash:
    """Affine map x -> ((a*x + b) mod p) mod range, drawn from ``seed``.

    ``a`` is uniform on [1, p) and ``b`` on [0, p), so for distinct keys the
    pair of field values is uniform over distinct pairs.
    """

    __slots__ = ("seed", "range", "a", "b")

    def __init__(self, seed, range: int):
        if range < 1:
            raise ValueError(f"range must be >= 1, got {range}")
        rng = make_rng(seed)
        self.seed = seed
        self.range = int(range)
        self.a = int(rng.integers(1, MERSENNE_61))
        self.b = int(rng.integers(0, MERSENNE_61))

    def field(self, x: int) -> int:
        return (self.a * x + self.b) % MERSENNE_61

    def __call__(self, x: int) -> int:
        return ((self.a * x + self.b) % MERSENNE_61) % self.range

    def map(self, xs) -> np.ndarray:
        arr = _as_field_array(xs)
        v = mulmod(np.uint64(self.a), arr) + np.uint64(self.b)
        v = np.where(v >= _P, v - _P, v)
        return (v % np.uint64(self.range)).astype(np.int64)

    def __eq__(self, other):
        return (
            isinstance(other, PairwiseHash)
            and (self.a, self.b, self.range) == (other.a, other.b, other.range)
        )

    def __hash__(self):
        return hash((self.a, self.b, self.range))

    def __repr__(self):
        return f"PairwiseHash(seed={self.seed!r}, range={self.range})"


class SignHash:
    """Pairwise-independent +-1 signs: the low bit of a range-2 affine hash."""

    __slots__ = ("_h",)

    def __init__(self, seed):
        self._h = PairwiseHash(seed, 2)

    @property
    def seed(self):
        return self._h.seed

    def __call__(self, x: int) -> int:
        return 1 - 2 * self._h(x)

    def map(self, xs) -> np.ndarray:
        return 1 - 2 * self._h.map(xs)

    def __eq__(self, other):
        return isinstance(other, SignHash) and self._h == other._h

    def __hash__(self):
        return hash(self._h)


class PolyHash:
    """k-wise independent hash: a random degree k-1 polynomial mod p."""

    def __init__(self, seed, range: int, k: int = 4):
        if range < 1 or k < 1:
            raise ValueError("range and k must be >= 1")
        rng = make_rng(seed)
        self.seed = seed
        self.range = int(range)
        self.coeffs: Sequence[int] = [int(c) for c in rng.integers(0, MERSENNE_61, size=k)]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in self.coeffs:
            acc = (acc * x + c) % MERSENNE_61
        return acc % self.range

    def map(self, xs) -> np.ndarray:
        arr = _as_field_array(xs)
        acc = np.zeros(arr.shape, dtype=np.uint64)
        for c in self.coeffs:
            acc = mulmod(acc, arr) + np.uint64(c)
            acc = np.where(acc >= _P, acc - _P, acc)
        return (acc % np.uint64(self.range)).astype(np.int64)


def hash_new(seed, range: int) -> PairwiseHash:
    return PairwiseHash(seed, range)


def hash_eval(h: PairwiseHash, x: int) -> int:
    return h(x)
