"""Stream model, exact frequency oracle, ground-truth heavy-hitter sets and
synthetic workloads shared by every sketch."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

MAX_ITEM = 2**32 - 1


def as_fraction(x) -> Fraction:
    """Exact rational for a parameter; floats are read as their decimal repr,
    so 0.1 means 1/10 rather than the nearest binary double."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class Stream:
    """An insertion-only stream of item ids in [1, n]."""

    items: np.ndarray
    n: int

    def __post_init__(self):
        items = np.asarray(self.items)
        if items.ndim != 1:
            raise ValueError("stream items must be one-dimensional")
        if items.size and items.dtype.kind not in "ui":
            raise ValueError(f"item ids must be integers, got dtype {items.dtype}")
        if not 1 <= self.n <= MAX_ITEM:
            raise ValueError(f"universe size must be in [1, 2^32-1], got {self.n}")
        if items.size and (int(items.min()) < 1 or int(items.max()) > self.n):
            raise ValueError(f"item ids must lie in [1, {self.n}]")
        items = items.astype(np.uint32)
        items.setflags(write=False)
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, items: Iterable[int], n: int) -> "Stream":
        return cls(np.fromiter(items, dtype=np.int64), n)

    @property
    def m(self) -> int:
        return int(self.items.size)

    def __len__(self):
        return self.m

    def __iter__(self):
        return (int(x) for x in self.items)

    def __eq__(self, other):
        return (
            isinstance(other, Stream)
            and self.n == other.n
            and np.array_equal(self.items, other.items)
        )

    __hash__ = None


@dataclass(frozen=True)
class FrequencyProfile:
    counts: Mapping[int, int]
    m: int
    f2: int

    def __getitem__(self, item: int) -> int:
        return self.counts.get(item, 0)

    def items_array(self) -> tuple[np.ndarray, np.ndarray]:
        ids = np.fromiter(self.counts.keys(), dtype=np.int64, count=len(self.counts))
        freqs = np.fromiter(self.counts.values(), dtype=np.int64, count=len(self.counts))
        return ids, freqs


@dataclass(frozen=True)
class HHParams:
    epsilon: float
    phi: float

    def __post_init__(self):
        if not 0 < self.epsilon < self.phi < 1:
            raise ValueError(
                f"need 0 < epsilon < phi < 1, got epsilon={self.epsilon}, phi={self.phi}"
            )


@dataclass
class HHReport:
    """Reported heavy hitters with their estimated frequencies."""

    entries: dict[int, float] = field(default_factory=dict)

    @property
    def items(self) -> set[int]:
        return set(self.entries)

    def __contains__(self, item):
        return item in self.entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries.items())


def exact_profile(stream: Stream) -> FrequencyProfile:
    ids, freqs = np.unique(stream.items, return_counts=True)
    counts = dict(zip(ids.tolist(), freqs.tolist()))
    return FrequencyProfile(counts, stream.m, sum(f * f for f in counts.values()))


def truth_l1(profile: FrequencyProfile, params: HHParams) -> tuple[set[int], set[int]]:
    """(must, forbidden): items with f >= phi*m, and items with f <= (phi-eps)*m.

    Items never seen are forbidden too but are not enumerated.
    """
    if profile.m == 0:
        return set(), set()
    phi, eps = as_fraction(params.phi), as_fraction(params.epsilon)
    m = profile.m
    must = {i for i, f in profile.counts.items() if f >= phi * m}
    forbidden = {i for i, f in profile.counts.items() if f <= (phi - eps) * m}
    return must, forbidden


def truth_l2(profile: FrequencyProfile, params: HHParams) -> tuple[set[int], set[int]]:
    """(must, forbidden) for the squared-frequency thresholds against F2."""
    if profile.f2 == 0:
        return set(), set()
    phi, eps = as_fraction(params.phi), as_fraction(params.epsilon)
    f2 = profile.f2
    must = {i for i, f in profile.counts.items() if f * f >= phi * f2}
    forbidden = {i for i, f in profile.counts.items() if f * f <= (phi - eps) * f2}
    return must, forbidden


def zipf_weights(n: int, s: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=np.float64) ** (-s)
    return w / w.sum()


def gen_zipf(n: int, m: int, s: float, seed) -> Stream:
    """m i.i.d. draws with Pr[i] proportional to i^-s."""
    if n < 1 or m < 0 or s <= 0:
        raise ValueError(f"need n >= 1, m >= 0, s > 0; got n={n}, m={m}, s={s}")
    cdf = np.cumsum(np.arange(1, n + 1, dtype=np.float64) ** (-s))
    cdf /= cdf[-1]
    u = np.random.default_rng(seed).random(m)
    idx = np.searchsorted(cdf, u, side="right")
    return Stream(np.minimum(idx, n - 1) + 1, n)


def gen_spike(
    n: int, m: int, star: int, f_star: int, order: str = "interleaved", seed=0
) -> Stream:
    """One planted item occurring ``f_star`` times plus m - f_star distinct
    singletons drawn from the rest of the universe."""
    if not 1 <= star <= n:
        raise ValueError(f"star must lie in [1, {n}]")
    if not 0 <= f_star <= m:
        raise ValueError("need 0 <= f_star <= m")
    if m - f_star > n - 1:
        raise ValueError(f"cannot place {m - f_star} distinct singletons in a universe of {n - 1}")
    if order not in ("interleaved", "star_last"):
        raise ValueError(f"unknown order {order!r}")
    rng = np.random.default_rng(seed)
    others = rng.choice(n - 1, size=m - f_star, replace=False) + 1
    others[others >= star] += 1
    items = np.concatenate([others, np.full(f_star, star)])
    if order == "interleaved":
        rng.shuffle(items)
    return Stream(items, n)


def gen_planted(n: int, noise: int, planted: Mapping[int, int], seed=0) -> Stream:
    """Distinct singletons plus several planted items, shuffled together."""
    if noise > n - len(planted):
        raise ValueError("not enough free ids for the singletons")
    rng = np.random.default_rng(seed)
    taken = np.array(sorted(planted), dtype=np.int64)
    pool = np.setdiff1d(np.arange(1, n + 1), taken)
    others = rng.choice(pool, size=noise, replace=False)
    heavy = np.concatenate([np.full(f, i) for i, f in planted.items()]) if planted else []
    items = np.concatenate([others, np.asarray(heavy, dtype=np.int64)])
    rng.shuffle(items)
    return Stream(items, n)

