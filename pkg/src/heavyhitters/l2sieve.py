"""l2 heavy hitter via amplified random-sign counters and sequential bit learning.

Three pieces work together:

* ``Amplifier``: J pairs of counters. Pair j splits the universe in two with
  a pairwise independent hash and sums random signs on each side. Once the
  heavy item dominates, it sits on the larger side of nearly every pair, while
  a light item agrees with the larger side in only about half of them.
* bit-learning rounds: items on the larger side of at least a theta fraction
  of pairs feed a fresh two-counter split each round. When one counter clears
  the threshold, the round records which side won; that is one hash bit of the
  heavy item's id. Counters reset and a new split is drawn.
* the report scans the ids seen so far, keeps those that pass the membership
  test now, and returns the unique one whose hash bits agree with at least 2/3
  of the last rho fraction of learned bits.

Randomness is drawn from stored seeds. The per-round seeds are kept for the
report and appear in the space accounting as the derandomization gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import HHReport, as_fraction
from .countsketch import CountSketch
from .hashing import MERSENNE_61, PairwiseHash, PolyHash, SignHash, derive
from .mg import bits_for

# seed scopes
_SPLIT, _SIGN, _ROUND_HASH, _ROUND_SIGN, _SIDE, _TRACKER = 1, 2, 3, 4, 5, 6
_GROUP, _GROUP_SIEVE, _COMPANION = 7, 8, 9

MIN_ROUNDS = 8
MATCH_FRACTION = Fraction(2, 3)


def amplifier_pairs(n: int, c_j: float = 8) -> int:
    if n < 2:
        raise ValueError("universe size must be >= 2")
    return max(1, math.ceil(c_j * math.log2(math.log2(n))))


# ---------------------------------------------------------------------------
# F2 tracking


class F2Tracker:
    """Running second moment, exactly or by an AMS median-of-means sketch.

    Sketch mode keeps ``groups x width`` counters of 4-wise independent
    signs; the estimate is the median over groups of the mean squared counter
    in the group. The signs for all counters come from the bits of a few
    degree-3 polynomial hashes, 48 bits per hash.
    """

    BITS_PER_HASH = 48

    def __init__(self, mode: str = "exact", seed=0, groups: int = 6, width: int = 16):
        if mode not in ("exact", "sketch"):
            raise ValueError(f"unknown F2 tracker mode {mode!r}")
        self.mode = mode
        self._cache: dict[int, np.ndarray] = {}
        self.groups = groups
        self.width = width
        self.reset()
        if mode == "sketch":
            k = groups * width
            nh = -(-k // self.BITS_PER_HASH)
            self._hashes = [PolyHash(derive(seed, h), MERSENNE_61, k=4) for h in range(nh)]

    def reset(self) -> None:
        self.counts: dict[int, int] = {}
        self.f2 = 0
        self.counters = np.zeros(self.groups * self.width, dtype=np.int64)

    def _signs(self, items: np.ndarray) -> np.ndarray:
        """(groups*width, len(items)) matrix of +-1."""
        k = self.groups * self.width
        rows = []
        shifts = np.arange(self.BITS_PER_HASH, dtype=np.int64)
        for h in self._hashes:
            v = h.map(items)
            rows.append((v[None, :] >> shifts[:, None]) & 1)
        bits = np.concatenate(rows)[:k]
        return 1 - 2 * bits

    def _signs_scalar(self, item: int) -> np.ndarray:
        cached = self._cache.get(item)
        if cached is None:
            shifts = np.arange(self.BITS_PER_HASH, dtype=np.int64)
            bits = np.concatenate([(np.int64(h(item)) >> shifts) & 1 for h in self._hashes])
            cached = 1 - 2 * bits[: self.groups * self.width]
            if len(self._cache) < 4096:
                self._cache[item] = cached
        return cached

    def update(self, item: int, delta: int = 1) -> None:
        if self.mode == "exact":
            f = self.counts.get(item, 0)
            self.f2 += (f + delta) ** 2 - f * f
            self.counts[item] = f + delta
        else:
            self.counters += self._signs_scalar(item) * delta

    def update_many(self, items) -> None:
        items = np.asarray(items)
        if items.size == 0:
            return
        ids, freq = np.unique(items, return_counts=True)
        if self.mode == "exact":
            counts = self.counts
            for i, c in zip(ids.tolist(), freq.tolist()):
                f = counts.get(i, 0)
                self.f2 += 2 * f * c + c * c
                counts[i] = f + c
        else:
            self.counters += self._signs(ids) @ freq.astype(np.int64)

    def estimate(self) -> float:
        if self.mode == "exact":
            return float(self.f2)
        sq = self.counters.astype(np.float64) ** 2
        means = np.sort(sq.reshape(self.groups, self.width).mean(axis=1))
        mid = self.groups // 2
        if self.groups % 2:
            return float(means[mid])
        return float((means[mid - 1] + means[mid]) / 2)

    def space_bits(self, m: int) -> int:
        if self.mode == "exact":
            raise ValueError("exact mode is an oracle; its space is not accounted")
        return self.groups * self.width * (bits_for(m) + 1)


# ---------------------------------------------------------------------------
# amplifier


class Amplifier:
    """J counter pairs with per-pair split hash and sign function."""

    def __init__(self, pairs: int, seed=0):
        self.pairs = pairs
        self.split = [PairwiseHash(derive(seed, _SPLIT, j), 2) for j in range(pairs)]
        self.signs = [SignHash(derive(seed, _SIGN, j)) for j in range(pairs)]
        self.counters = np.zeros((pairs, 2), dtype=np.int64)

    def routes(self, item: int) -> list[int]:
        return [h(item) for h in self.split]

    def update(self, item: int) -> None:
        for j in range(self.pairs):
            self.counters[j, self.split[j](item)] += self.signs[j](item)

    def larger(self) -> np.ndarray:
        """Index (0 or 1) of the larger-magnitude counter per pair; ties -> 0."""
        c = np.abs(self.counters)
        return (c[:, 0] < c[:, 1]).astype(np.int64)

    def agreement(self, item: int) -> int:
        big = self.larger()
        return sum(1 for j, k in enumerate(self.routes(item)) if k == big[j])

    def agreement_many(self, items) -> np.ndarray:
        items = np.asarray(items)
        big = self.larger()
        routes = np.stack([h.map(items) for h in self.split])
        return (routes == big[:, None]).sum(axis=0)

    def route_matrix(self, items) -> tuple[np.ndarray, np.ndarray]:
        """(routes, signs), each (J, len(items)), computed on distinct ids."""
        ids, inv = np.unique(np.asarray(items), return_inverse=True)
        routes = np.stack([h.map(ids) for h in self.split])[:, inv]
        signs = np.stack([s.map(ids) for s in self.signs])[:, inv]
        return routes, signs

    def run(self, items) -> tuple[np.ndarray, np.ndarray]:
        """Feed ``items``; return the routes and the counter trajectories.

        The trajectory has shape (J, 2, len(items)): counter values right
        after each update.
        """
        routes, signs = self.route_matrix(items)
        inc = np.zeros((self.pairs, 2, routes.shape[1]), dtype=np.int64)
        inc[:, 0] = np.where(routes == 0, signs, 0)
        inc[:, 1] = np.where(routes == 1, signs, 0)
        traj = np.cumsum(inc, axis=2) + self.counters[:, :, None]
        if traj.shape[2]:
            self.counters = traj[:, :, -1].copy()
        return routes, traj


# ---------------------------------------------------------------------------
# rounds


@dataclass
class BitRound:
    index: int
    round_hash: PairwiseHash
    round_sign: SignHash
    start_f2: float
    counters: list = field(default_factory=lambda: [0, 0])
    resolved_bit: int | None = None  # 1 or 2

    @classmethod
    def open(cls, seed, index: int, start_f2: float) -> "BitRound":
        return cls(
            index,
            PairwiseHash(derive(seed, _ROUND_HASH, index), 2),
            SignHash(derive(seed, _ROUND_SIGN, index)),
            start_f2,
        )

    def bit_of(self, item: int) -> int:
        return self.round_hash(item) + 1

    def bits_of(self, items) -> np.ndarray:
        return self.round_hash.map(items) + 1


@dataclass
class SieveConfig:
    C: float = 4.0
    c_j: float = 8.0
    theta: float = 0.9
    rho: float = 0.5
    f2_mode: str = "exact"


class L2Sieve:
    """Single-heavy-hitter l2 finder (one isolated bucket of the universe).

    Per update: the F2 tracker sees the item; every amplifier pair adds the
    item's sign to the counter on its side; if the item is on the larger side
    of at least theta*J pairs it goes into the current round's counter pair,
    and into that side's round F2 tracker. The round closes once

        max(|c_1|, |c_2|) > 2 C sqrt(min(F2_side1, F2_side2) + 1)

    where F2_side is the second moment of what entered that side this round.
    The winning side is the learned bit.
    """

    def __init__(self, n: int, seed=0, config: SieveConfig | None = None, **overrides):
        cfg = config or SieveConfig()
        if overrides:
            cfg = SieveConfig(**{**cfg.__dict__, **overrides})
        self.n = n
        self.seed = seed
        self.config = cfg
        self.pairs = amplifier_pairs(n, cfg.c_j)
        self.required = math.ceil(as_fraction(cfg.theta) * self.pairs)
        self.amplifier = Amplifier(self.pairs, seed)
        self.f2_tracker = F2Tracker(cfg.f2_mode, derive(seed, _TRACKER))
        self.side_trackers = [
            F2Tracker(cfg.f2_mode, derive(seed, _SIDE, k)) for k in (0, 1)
        ]
        self.rounds: list[BitRound] = []
        self.current = BitRound.open(seed, 0, 0.0)
        self.seen: set[int] = set()
        self.processed = 0
        self.participated = 0

    # -- streaming ----------------------------------------------------------

    def update(self, item: int) -> None:
        self.processed += 1
        self.seen.add(item)
        self.f2_tracker.update(item)
        self.amplifier.update(item)
        if self.amplifier.agreement(item) >= self.required:
            self._round_step(item, lambda: self.f2_tracker.estimate())

    def consume(self, items) -> None:
        """Batch form of ``update`` with an identical final state."""
        items = np.asarray(items)
        if items.size == 0:
            return
        routes, traj = self.amplifier.run(items)
        self.seen.update(np.unique(items).tolist())
        big = (np.abs(traj[:, 0]) < np.abs(traj[:, 1])).astype(np.int64)
        agree = (routes == big).sum(axis=0)
        hits = np.flatnonzero(agree >= self.required)
        fed = 0

        def tracker_at(t):
            nonlocal fed
            self.f2_tracker.update_many(items[fed : t + 1])
            fed = t + 1
            return self.f2_tracker.estimate()

        for t in hits.tolist():
            self._round_step(int(items[t]), lambda t=t: tracker_at(t))
        self.f2_tracker.update_many(items[fed:])
        self.processed += int(items.size)

    def threshold(self) -> float:
        v = min(tr.estimate() for tr in self.side_trackers)
        return 2 * self.config.C * math.sqrt(max(v, 0.0) + 1)

    def _round_step(self, item: int, f2_now) -> None:
        self.participated += 1
        rnd = self.current
        side = rnd.round_hash(item)
        rnd.counters[side] += rnd.round_sign(item)
        self.side_trackers[side].update(item)
        c1, c2 = abs(rnd.counters[0]), abs(rnd.counters[1])
        if max(c1, c2) > self.threshold():
            rnd.resolved_bit = 1 if c1 >= c2 else 2
            self.rounds.append(rnd)
            for tr in self.side_trackers:
                tr.reset()
            self.current = BitRound.open(self.seed, len(self.rounds), f2_now())

    # -- queries ------------------------------------------------------------

    def members(self, items) -> np.ndarray:
        """Boolean mask: which of ``items`` pass the membership test now."""
        items = np.asarray(items)
        if items.size == 0:
            return np.zeros(0, dtype=bool)
        return self.amplifier.agreement_many(items) >= self.required

    def suffix(self) -> list[BitRound]:
        k = math.ceil(self.config.rho * len(self.rounds))
        return self.rounds[len(self.rounds) - k :] if k else []

    def match_fractions(self, items) -> np.ndarray:
        items = np.asarray(items)
        rounds = self.suffix()
        if not rounds or items.size == 0:
            return np.zeros(items.shape, dtype=np.float64)
        hits = sum((r.bits_of(items) == r.resolved_bit).astype(np.int64) for r in rounds)
        return hits / len(rounds)

    def candidates(self) -> list[tuple[int, float]]:
        """Seen ids passing membership with their suffix match fraction."""
        ids = np.array(sorted(self.seen), dtype=np.int64)
        ids = ids[self.members(ids)]
        return list(zip(ids.tolist(), self.match_fractions(ids).tolist()))

    def report(self) -> int | None:
        if len(self.rounds) < MIN_ROUNDS:
            return None
        k = len(self.suffix())
        need = math.ceil(MATCH_FRACTION * k)
        winners = [i for i, frac in self.candidates() if round(frac * k) >= need]
        return winners[0] if len(winners) == 1 else None

    # -- accounting ---------------------------------------------------------

    def space_bits(self, m: int | None = None) -> dict:
        m = self.processed if m is None else m
        return sieve_space_bits(self.n, max(m, 1), len(self.rounds), self.config.c_j)


def sieve_space_bits(n: int, m: int | None = None, rounds: int = 0, c_j: float = 8) -> dict:
    """Idealized and actual bit counts.

    A word is ceil(log2 n) bits, enough for a hash function over a field of
    size about n. Each counter pair costs two signed counters plus a split
    hash and a sign function (two words each). Idealized: J amplifier pairs
    and one active round. Actual adds the stored seeds (two functions, four
    words) of every completed round. F2 trackers are not counted.
    """
    m = n if m is None else m
    pairs = amplifier_pairs(n, c_j)
    word = bits_for(n)
    pair_bits = 2 * (bits_for(m) + 1) + 4 * word
    ideal = (pairs + 1) * pair_bits
    seed_bits = 4 * word
    actual = ideal + rounds * seed_bits
    return {
        "idealized": ideal,
        "actual": actual,
        "derandomization_gap": actual - ideal,
        "seed_bits_per_round": seed_bits,
    }


# ---------------------------------------------------------------------------
# isolation wrapper


class IsolatedSieve:
    """General l2 heavy hitters: hash the universe into ceil(4/phi^2) groups,
    run one ``L2Sieve`` per group, estimate each group's candidate with a
    companion CountSketch and keep those with est^2 >= (phi - eps) * F2."""

    def __init__(self, n: int, phi: float, epsilon: float, seed=0,
                 config: SieveConfig | None = None, buckets: int | None = None):
        if not 0 < epsilon < phi < 1:
            raise ValueError(f"need 0 < epsilon < phi < 1, got {epsilon}, {phi}")
        self.n = n
        self.phi = phi
        self.epsilon = epsilon
        self.seed = seed
        self.config = config or SieveConfig()
        self.groups = math.ceil(4 / phi**2)
        self.group_hash = PairwiseHash(derive(seed, _GROUP), self.groups)
        self.sieves = [
            L2Sieve(n, derive(seed, _GROUP_SIEVE, g), self.config) for g in range(self.groups)
        ]
        self.companion = CountSketch(buckets or math.ceil(4 / epsilon**2), 0,
                                     derive(seed, _COMPANION), n=n, track_candidates=False)
        self.f2_tracker = F2Tracker(self.config.f2_mode, derive(seed, _TRACKER))

    def update(self, item: int) -> None:
        self.sieves[self.group_hash(item)].update(item)
        self.companion.update(item)
        self.f2_tracker.update(item)

    def consume(self, items) -> None:
        items = np.asarray(items)
        if items.size == 0:
            return
        groups = self.group_hash.map(items)
        order = np.argsort(groups, kind="stable")
        bounds = np.searchsorted(groups[order], np.arange(self.groups + 1))
        for g in range(self.groups):
            part = items[order[bounds[g] : bounds[g + 1]]]
            if part.size:
                self.sieves[g].consume(part)
        self.companion.update_many(items)
        self.f2_tracker.update_many(items)

    def group_reports(self) -> list[int | None]:
        return [s.report() for s in self.sieves]

    def report(self) -> HHReport:
        f2_hat = self.f2_tracker.estimate()
        ids = [i for i in self.group_reports() if i is not None]
        if not ids or f2_hat <= 0:
            return HHReport()
        est = self.companion.estimate_many(np.array(ids, dtype=np.int64))
        cut = (self.phi - self.epsilon) * f2_hat
        return HHReport({i: float(e) for i, e in zip(ids, est.tolist()) if e * e >= cut})

    def space_bits(self, m: int) -> dict:
        per = [s.space_bits(m) for s in self.sieves]
        ideal = sum(p["idealized"] for p in per)
        actual = sum(p["actual"] for p in per)
        cs = self.companion.space_bits(m, self.n)
        return {"idealized": ideal + cs, "actual": actual + cs,
                "derandomization_gap": actual - ideal}
