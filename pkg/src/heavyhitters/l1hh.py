"""Sampled, hashed-universe l1 heavy hitters.

The stream is thinned to about r = C_s / eps^2 updates by a pairwise
independent test on the stream position, item ids are hashed into a universe
of size C_u / eps^4, and a Misra-Gries table of accuracy eps/2 runs on the
hashed ids of the sampled updates. Only the top ceil(2/phi) table entries keep
their real item id.
"""
from __future__ import annotations

import math

import numpy as np

from .core import HHReport
from .hashing import FIELD_BITS, MERSENNE_61, PairwiseHash, derive
from .mg import MisraGries

SAMPLE_CONSTANT = 400
# Large enough that the r sampled updates hash without collision w.p. >= 99%:
# r^2 / (2 U) <= 1/100 with r = 400/eps^2 gives U >= 8e6 / eps^4.
UNIVERSE_CONSTANT = 8_000_000


class SampledL1:
    def __init__(
        self,
        epsilon: float,
        phi: float,
        m_declared: int,
        seed=0,
        c_s: float = SAMPLE_CONSTANT,
        c_u: float = UNIVERSE_CONSTANT,
    ):
        if not 0 < epsilon < phi < 1:
            raise ValueError(f"need 0 < epsilon < phi < 1, got {epsilon}, {phi}")
        if m_declared < 1:
            raise ValueError("m_declared must be >= 1")
        self.epsilon = epsilon
        self.phi = phi
        self.m_declared = int(m_declared)
        self.seed = seed
        self.c_s, self.c_u = c_s, c_u
        self.r = math.ceil(c_s / epsilon**2)
        self.universe = min(math.ceil(c_u / epsilon**4), MERSENNE_61)
        self.top_capacity = math.ceil(2 / phi)
        self.sampler = PairwiseHash(derive(seed, 0), self.m_declared)
        self.id_hash = PairwiseHash(derive(seed, 1), self.universe)
        self.inner = MisraGries(epsilon / 2)
        # hashed id -> real id
        self.top: dict[int, int] = {}
        self.position = 0
        self.sampled_count = 0

    @property
    def sample_all(self) -> bool:
        return self.r >= self.m_declared

    def is_sampled(self, position: int) -> bool:
        return self.sample_all or self.sampler(position) < self.r

    def sample_mask(self, positions) -> np.ndarray:
        positions = np.asarray(positions)
        if self.sample_all:
            return np.ones(positions.shape, dtype=bool)
        return self.sampler.map(positions) < self.r

    def update(self, item: int) -> None:
        self.position += 1
        if self.is_sampled(self.position):
            self._sampled_update(item, self.id_hash(item))

    def consume(self, items) -> None:
        """Batch form of ``update``: same final state, sampling and id hashing
        done with numpy."""
        items = np.asarray(items)
        positions = np.arange(self.position + 1, self.position + 1 + items.size, dtype=np.int64)
        self.position += int(items.size)
        picked = items[self.sample_mask(positions)]
        hashed = self.id_hash.map(picked)
        for item, h in zip(picked.tolist(), hashed.tolist()):
            self._sampled_update(item, h)

    def _sampled_update(self, item: int, h: int) -> None:
        self.sampled_count += 1
        inner = self.inner
        before = inner.decrements
        inner.update(h)
        top = self.top
        if inner.decrements != before:
            # a decrement keeps the relative order; only zeros leave
            for key in [k for k in top if k not in inner.table]:
                del top[key]
            return
        top[h] = item
        if len(top) > self.top_capacity:
            table = inner.table
            worst = min(top, key=lambda k: (table[k], -top[k]))
            del top[worst]

    def ranked_top(self) -> list[tuple[int, int, int]]:
        """(real id, hashed id, inner count), largest count first, ties by id."""
        table = self.inner.table
        rows = [(item, h, table[h]) for h, item in self.top.items()]
        return sorted(rows, key=lambda r: (-r[2], r[0]))

    def sampled_frequencies(self) -> dict[int, int]:
        return {item: self.inner.table[h] for h, item in self.top.items()}

    def report(self, phi: float | None = None) -> HHReport:
        phi = self.phi if phi is None else phi
        if self.sampled_count == 0:
            return HHReport()
        s = self.sampled_count
        cut = (phi - self.epsilon / 2) * s
        scale = self.m_declared / s
        return HHReport(
            {item: c * scale for item, _, c in self.ranked_top() if c >= cut}
        )

    def space_bits(self, n: int) -> int:
        return l1_space_bits(self.epsilon, self.phi, n, c_s=self.c_s, c_u=self.c_u)


def _clog2(x: int) -> int:
    return max(1, math.ceil(math.log2(x)))


def l1_space_bits(
    epsilon: float,
    phi: float,
    n: int,
    c_s: float = SAMPLE_CONSTANT,
    c_u: float = UNIVERSE_CONSTANT,
) -> int:
    """Bits held by a SampledL1 with these parameters.

    Pure arithmetic, so it accepts epsilon >= phi (a setting the sketch itself
    refuses) for scaling sweeps that touch that boundary.
    """
    if not (0 < epsilon < 1 and 0 < phi < 1):
        raise ValueError("epsilon and phi must lie in (0, 1)")
    r = math.ceil(c_s / epsilon**2)
    universe = min(math.ceil(c_u / epsilon**4), MERSENNE_61)
    # ids are stored as id - 1, so ceil(log2 n) bits suffice
    ids = math.ceil(2 / phi) * _clog2(n)
    table = MisraGries(epsilon / 2).capacity * (_clog2(universe) + _clog2(r))
    seeds = 2 * 2 * FIELD_BITS
    return ids + table + seeds
