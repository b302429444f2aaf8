import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heavyhitters import HHParams, MisraGries, Stream, exact_profile, truth_l1


@pytest.mark.parametrize("eps,cap", [(0.5, 3), (0.01, 101), (1 / 3, 4), (1, 2), (0.3, 4)])
def test_capacity(eps, cap):
    mg = MisraGries(eps)
    assert mg.capacity == cap
    assert mg.processed == 0 and len(mg) == 0


def test_rejects_bad_epsilon():
    for eps in (0, -0.1, 1.5):
        with pytest.raises(ValueError):
            MisraGries(eps)


def test_hand_simulation_capacity_three():
    a, b, c = 1, 2, 3
    mg = MisraGries(0.5)
    mg.consume([a, a, b, c, a])
    assert mg.table == {a: 3, b: 1, c: 1}


def test_hand_simulation_decrement_branch():
    a, b, c = 1, 2, 3
    mg = MisraGries(1)
    mg.consume([a, b])
    assert mg.table == {a: 1, b: 1}
    mg.update(c)
    assert mg.table == {}
    assert mg.processed == 3


def test_repeated_item():
    mg = MisraGries(0.1)
    mg.consume([4] * 250)
    assert mg.table == {4: 250}
    assert mg.estimate(4) == 250


def test_absent_item_is_light():
    mg = MisraGries(0.2)
    items = [1, 2, 3, 4, 5, 6, 7, 1, 1, 8, 9]
    mg.consume(items)
    counts = exact_profile(Stream.of(items, 9)).counts
    for i in range(1, 10):
        if mg.estimate(i) == 0:
            assert counts.get(i, 0) <= 0.2 * mg.processed


def test_guarantee_oracle_sweep():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        n = int(rng.integers(1, 51))
        m = int(rng.integers(0, 501))
        eps = (0.5, 0.2, 0.1)[trial % 3]
        items = rng.integers(1, n + 1, size=m)
        mg = MisraGries(eps)
        mg.consume(items.tolist())
        counts = exact_profile(Stream(items, n)).counts
        e = Fraction(str(eps))
        for i in range(1, n + 1):
            f = counts.get(i, 0)
            assert f >= mg.estimate(i) >= f - e * m


@given(st.lists(st.integers(1, 12), max_size=300), st.sampled_from([0.5, 0.25, 0.1]))
def test_space_and_undercount_at_every_prefix(items, eps):
    mg = MisraGries(eps)
    seen = {}
    for x in items:
        mg.update(x)
        seen[x] = seen.get(x, 0) + 1
        assert len(mg.table) <= mg.capacity
        assert all(c >= 1 for c in mg.table.values())
        assert sum(mg.table.values()) <= mg.processed
        for i, f in seen.items():
            assert mg.estimate(i) <= f
            assert f - mg.estimate(i) <= eps * mg.processed


def test_determinism():
    rng = np.random.default_rng(5)
    items = rng.integers(1, 40, size=400).tolist()
    a, b = MisraGries(0.1), MisraGries(0.1)
    a.consume(items)
    b.consume(items)
    assert a.table == b.table and list(a.table) == list(b.table)


def test_report_empty():
    assert len(MisraGries(0.1).report(0.5)) == 0


def test_report_hand_computed():
    a, b = 1, 2
    mg = MisraGries(0.1)
    mg.consume([a] * 60 + [b] * 40)
    rep = mg.report(0.5)
    assert a in rep and b not in rep
    assert rep.entries[a] == 60


def test_report_guarantee_sweep():
    rng = np.random.default_rng(7)
    for trial in range(300):
        n = int(rng.integers(1, 30))
        m = int(rng.integers(1, 400))
        eps = (0.05, 0.1, 0.2)[trial % 3]
        phi = 2 * eps + (0.0, 0.05, 0.2)[trial % 3 - 1]
        # skewed draws so the must set is often non-empty
        items = np.minimum(rng.geometric(0.3, size=m), n)
        mg = MisraGries(eps)
        mg.consume(items.tolist())
        must, forbidden = truth_l1(exact_profile(Stream(items, n)), HHParams(eps, phi))
        rep = mg.report(phi)
        assert must <= rep.items
        assert not rep.items & forbidden


def test_report_warns_below_two_epsilon():
    mg = MisraGries(0.2)
    mg.consume([1, 1, 2])
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        mg.report(0.3)
    assert w and "phi" in str(w[0].message)
