"""CountSketch: R rows of B random-sign buckets, median point queries."""
from __future__ import annotations

import math

import numpy as np

from .core import HHReport
from .hashing import FIELD_BITS, PairwiseHash, SignHash, derive
from .mg import bits_for


def default_rows(n: int) -> int:
    return math.ceil(math.log2(n)) + 1 if n > 1 else 1


class CountSketch:
    """Linear sketch supporting insertions and deletions.

    ``rows=0`` picks ceil(log2 n) + 1 rows (needs ``n``). A bounded set of
    candidate items with the largest current estimates is kept alongside the
    counters so that reporting never scans the universe.
    """

    def __init__(self, buckets: int, rows: int = 0, seed=0, n: int | None = None,
                 unit_signs: bool = False, track_candidates: bool = True):
        if buckets < 1:
            raise ValueError("buckets must be >= 1")
        if rows == 0:
            if n is None:
                raise ValueError("rows=0 (auto) needs the universe size n")
            rows = default_rows(n)
        if rows < 1:
            raise ValueError("rows must be >= 1")
        self.buckets = int(buckets)
        self.rows = int(rows)
        self.seed = seed
        self.unit_signs = unit_signs
        self.track_candidates = track_candidates
        self.counters = np.zeros((self.rows, self.buckets), dtype=np.int64)
        self.row_hash = [PairwiseHash(derive(seed, r, 0), self.buckets) for r in range(self.rows)]
        self.row_sign = [SignHash(derive(seed, r, 1)) for r in range(self.rows)]
        self.candidate_capacity = 4 * self.buckets
        self.candidates: set[int] = set()
        self.updates_seen = 0

    # -- hashing ------------------------------------------------------------

    def _cells(self, item: int):
        for r in range(self.rows):
            s = 1 if self.unit_signs else self.row_sign[r](item)
            yield r, self.row_hash[r](item), s

    def locate(self, items) -> tuple[np.ndarray, np.ndarray]:
        """Bucket indices and signs, each of shape (rows, len(items))."""
        items = np.asarray(items)
        cols = np.stack([h.map(items) for h in self.row_hash]) if items.size else \
            np.zeros((self.rows, 0), dtype=np.int64)
        if self.unit_signs:
            signs = np.ones_like(cols)
        else:
            signs = np.stack([s.map(items) for s in self.row_sign]) if items.size else cols.copy()
        return cols, signs

    # -- updates ------------------------------------------------------------

    def update(self, item: int, delta: int = 1) -> None:
        for r, col, s in self._cells(item):
            self.counters[r, col] += delta * s
        self.updates_seen += 1
        if delta > 0 and self.track_candidates:
            self.candidates.add(item)
            if len(self.candidates) > 2 * self.candidate_capacity:
                self._prune()

    def update_many(self, items, delta: int = 1) -> None:
        """Apply ``delta`` for every item in order; counters end up exactly
        as after the same sequence of ``update`` calls."""
        items = np.asarray(items)
        if items.size == 0:
            return
        ids, freq = np.unique(items, return_counts=True)
        cols, signs = self.locate(ids)
        weights = signs * (freq * delta)
        for r in range(self.rows):
            np.add.at(self.counters[r], cols[r], weights[r])
        self.updates_seen += int(items.size)
        if delta > 0 and self.track_candidates:
            self.candidates.update(ids.tolist())
            if len(self.candidates) > 2 * self.candidate_capacity:
                self._prune()

    def _prune(self) -> None:
        ids = np.fromiter(self.candidates, dtype=np.int64, count=len(self.candidates))
        est = self.estimate_many(ids)
        keep = np.lexsort((ids, -np.abs(est)))[: self.candidate_capacity]
        self.candidates = set(ids[keep].tolist())

    # -- queries ------------------------------------------------------------

    def row_estimates(self, item: int) -> list[int]:
        return [s * int(self.counters[r, col]) for r, col, s in self._cells(item)]

    def estimate(self, item: int) -> float:
        """Median over rows of sign * counter; the lower median for even R."""
        ests = sorted(self.row_estimates(item))
        return float(ests[(len(ests) - 1) // 2])

    def estimate_many(self, items) -> np.ndarray:
        items = np.asarray(items)
        cols, signs = self.locate(items)
        per_row = signs * self.counters[np.arange(self.rows)[:, None], cols]
        per_row.sort(axis=0)
        return per_row[(self.rows - 1) // 2].astype(np.float64)

    def l2_report(self, phi: float, f2_hat: float, epsilon: float = 0.0) -> HHReport:
        """Candidates whose squared estimate reaches (phi - epsilon/2) * f2_hat."""
        if f2_hat <= 0 or not self.candidates:
            return HHReport()
        ids = np.array(sorted(self.candidates), dtype=np.int64)
        est = self.estimate_many(ids)
        keep = est * est >= (phi - epsilon / 2) * f2_hat
        return HHReport(dict(zip(ids[keep].tolist(), est[keep].tolist())))

    # -- algebra ------------------------------------------------------------

    def same_functions(self, other: "CountSketch") -> bool:
        return (
            self.rows == other.rows
            and self.buckets == other.buckets
            and self.unit_signs == other.unit_signs
            and self.row_hash == other.row_hash
            and self.row_sign == other.row_sign
        )

    def merge(self, other: "CountSketch") -> "CountSketch":
        """Counter-wise sum; both sketches must share hash and sign functions."""
        if not self.same_functions(other):
            raise ValueError("cannot merge sketches built from different seeds or shapes")
        out = CountSketch(self.buckets, self.rows, self.seed, unit_signs=self.unit_signs,
                          track_candidates=self.track_candidates)
        out.counters = self.counters + other.counters
        out.updates_seen = self.updates_seen + other.updates_seen
        out.candidates = self.candidates | other.candidates
        if len(out.candidates) > 2 * out.candidate_capacity:
            out._prune()
        return out

    def is_zero(self) -> bool:
        return not self.counters.any()

    def space_bits(self, m: int, n: int) -> int:
        return cs_space_bits(n, m, self.buckets, self.rows)

    def actual_space_bits(self, m: int) -> int:
        return self.rows * (self.buckets * (bits_for(m) + 1) + 4 * FIELD_BITS)


def cs_space_bits(n: int, m: int | None = None, buckets: int = 256, rows: int = 0) -> int:
    """Signed counters of ceil(log2 m)+1 bits, plus one hash and one sign
    function per row, each two words of ceil(log2 n) bits."""
    rows = rows or default_rows(n)
    m = n if m is None else m
    return rows * (buckets * (bits_for(m) + 1) + 4 * bits_for(n))
