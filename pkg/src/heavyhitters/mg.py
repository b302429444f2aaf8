"""Misra-Gries frequent-items summary."""
from __future__ import annotations

import math
import warnings

from .core import HHReport, as_fraction


def mg_capacity(epsilon) -> int:
    eps = as_fraction(epsilon)
    return math.floor(1 / eps) + 1


class MisraGries:
    """Deterministic counter table with global-decrement eviction.

    Holds at most ``floor(1/epsilon) + 1`` (item, count) pairs. After
    ``processed`` updates every item satisfies
    ``f_i >= estimate(i) >= f_i - epsilon * processed``.
    """

    def __init__(self, epsilon):
        if not 0 < epsilon <= 1:
            raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
        self.epsilon = epsilon
        self.capacity = mg_capacity(epsilon)
        self.table: dict[int, int] = {}
        self.processed = 0
        self.decrements = 0

    def update(self, item: int) -> None:
        self.processed += 1
        table = self.table
        if item in table:
            table[item] += 1
        elif len(table) < self.capacity:
            table[item] = 1
        else:
            # the incoming item is not inserted on this branch
            self.decrements += 1
            for key in list(table):
                c = table[key] - 1
                if c:
                    table[key] = c
                else:
                    del table[key]

    def consume(self, items) -> None:
        for item in items:
            self.update(int(item))

    def estimate(self, item: int) -> int:
        return self.table.get(item, 0)

    def report(self, phi) -> HHReport:
        """Entries whose count exceeds (phi - epsilon) * processed.

        The comparison is strict: the undercount is always below
        epsilon * processed, so every item with f >= phi*m still clears it,
        while an item sitting exactly on (phi - epsilon)*m does not.
        """
        if phi < 2 * self.epsilon:
            warnings.warn(
                f"phi={phi} < 2*epsilon={2 * self.epsilon}: report may include light items",
                stacklevel=2,
            )
        cut = (as_fraction(phi) - as_fraction(self.epsilon)) * self.processed
        return HHReport({v: float(c) for v, c in self.table.items() if c > cut})

    def space_bits(self, n: int, m: int | None = None) -> int:
        """Table of capacity pairs, each an id and a count."""
        m = self.processed if m is None else m
        return self.capacity * (bits_for(n) + bits_for(m))

    def __len__(self):
        return len(self.table)


def bits_for(x: int) -> int:
    """Bits to write any integer in [0, x]."""
    return max(1, math.ceil(math.log2(x + 1)))
