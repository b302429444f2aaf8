import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavyhitters import (
    HHParams,
    Stream,
    exact_profile,
    gen_spike,
    gen_zipf,
    truth_l1,
    truth_l2,
)
from heavyhitters.core import as_fraction, gen_planted
from heavyhitters.stream_io import (
    StreamFormatError,
    read_binary,
    read_stream,
    read_text,
    write_binary,
    write_stream,
    write_text,
)


def tally_loop(items):
    counts = {}
    for x in items:
        counts[int(x)] = counts.get(int(x), 0) + 1
    return counts


def brute_force_sets(counts, n, total, phi, eps):
    """Scan every id in [1, n] with integer cross-multiplication."""
    p, q = Fraction(str(phi)).as_integer_ratio()
    e, r = Fraction(str(eps)).as_integer_ratio()
    must, forbidden = set(), set()
    for i in range(1, n + 1):
        f = counts.get(i, 0)
        if f == 0:
            continue
        if f * q >= p * total:
            must.add(i)
        # f <= (p/q - e/r) * total  <=>  f*q*r <= (p*r - e*q) * total
        if f * q * r <= (p * r - e * q) * total:
            forbidden.add(i)
    return must, forbidden


# -- stream -----------------------------------------------------------------

def test_stream_validation():
    with pytest.raises(ValueError):
        Stream.of([0, 1], 5)
    with pytest.raises(ValueError):
        Stream.of([6], 5)
    with pytest.raises(ValueError):
        Stream.of([1], 0)
    s = Stream.of([1, 2, 2], 2)
    assert s.m == len(s) == 3
    assert list(s) == [1, 2, 2]


# -- exact_profile ----------------------------------------------------------

def test_profile_empty():
    p = exact_profile(Stream.of([], 10))
    assert (dict(p.counts), p.m, p.f2) == ({}, 0, 0)


def test_profile_single_item():
    p = exact_profile(Stream.of([7, 7, 7], 10))
    assert dict(p.counts) == {7: 3} and p.m == 3 and p.f2 == 9


def test_profile_matches_tally_on_zipf():
    s = gen_zipf(1000, 100_000, 1.1, seed=1)
    p = exact_profile(s)
    counts = tally_loop(s.items.tolist())
    assert dict(p.counts) == counts
    assert p.m == sum(counts.values()) == 100_000
    assert p.f2 == sum(f * f for f in counts.values())


@given(st.lists(st.integers(1, 30), max_size=200), st.randoms())
def test_profile_order_invariant(items, rnd):
    shuffled = items[:]
    rnd.shuffle(shuffled)
    assert exact_profile(Stream.of(items, 30)) == exact_profile(Stream.of(shuffled, 30))


@given(st.lists(st.integers(1, 30), max_size=200))
def test_profile_invariants(items):
    p = exact_profile(Stream.of(items, 30))
    assert sum(p.counts.values()) == p.m
    assert p.f2 == sum(f * f for f in p.counts.values())
    assert all(f > 0 for f in p.counts.values())


# -- truth sets ---------------------------------------------------------------

def _profile(counts):
    items = [i for i, f in counts.items() for _ in range(f)]
    return exact_profile(Stream.of(items, max(counts)))


def test_truth_l1_direct_threshold():
    must, forbidden = truth_l1(_profile({1: 60, 2: 30, 3: 10}), HHParams(0.2, 0.5))
    assert must == {1} and forbidden == {2, 3}


def test_truth_l1_uniform():
    must, forbidden = truth_l1(_profile({i: 10 for i in range(1, 11)}), HHParams(0.1, 0.5))
    assert must == set() and forbidden == set(range(1, 11))


def test_truth_l1_empty():
    assert truth_l1(exact_profile(Stream.of([], 5)), HHParams(0.1, 0.5)) == (set(), set())


def test_truth_l1_matches_brute_force_on_zipf():
    s = gen_zipf(200, 20_000, 1.5, seed=3)
    counts = tally_loop(s.items.tolist())
    for eps, phi in [(0.05, 0.1), (0.02, 0.3), (0.1, 0.2)]:
        got = truth_l1(exact_profile(s), HHParams(eps, phi))
        assert got == brute_force_sets(counts, 200, s.m, phi, eps)


def test_truth_l2_spike():
    n = 10**4
    s = gen_spike(n, n - 1 + 100, star=5, f_star=100, seed=0)
    p = exact_profile(s)
    assert p.f2 == 100**2 + (n - 1)
    must, forbidden = truth_l2(p, HHParams(0.1, 0.25))
    assert must == {5}
    assert forbidden == set(p.counts) - {5}


def test_truth_l2_single_item():
    must, _ = truth_l2(exact_profile(Stream.of([4] * 9, 5)), HHParams(0.1, 0.9))
    assert must == {4}


def test_truth_l2_matches_brute_force_on_random():
    rng = np.random.default_rng(9)
    items = rng.integers(1, 51, size=3000) ** 2 % 50 + 1
    s = Stream(items, 50)
    counts = tally_loop(items.tolist())
    f2 = sum(f * f for f in counts.values())
    sq = {i: f * f for i, f in counts.items()}
    # squared frequencies against F2 are the same scan as l1 with m -> F2
    for eps, phi in [(0.01, 0.05), (0.05, 0.2)]:
        assert truth_l2(exact_profile(s), HHParams(eps, phi)) == brute_force_sets(sq, 50, f2, phi, eps)


@given(st.lists(st.integers(1, 20), min_size=1, max_size=100),
       st.sampled_from([(0.05, 0.1), (0.1, 0.3), (0.2, 0.5)]))
def test_truth_sets_disjoint(items, params):
    p = exact_profile(Stream.of(items, 20))
    for truth in (truth_l1, truth_l2):
        must, forbidden = truth(p, HHParams(*params))
        assert not must & forbidden


def test_params_and_fraction_reading():
    with pytest.raises(ValueError):
        HHParams(0.5, 0.5)
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction(3) == 3


# -- generators ---------------------------------------------------------------

def test_zipf_one_item_universe():
    assert gen_zipf(1, 5, 2.0, seed=0).items.tolist() == [1] * 5


def test_zipf_deterministic():
    a = gen_zipf(10**4, 10**6, 1.1, seed=7)
    b = gen_zipf(10**4, 10**6, 1.1, seed=7)
    assert a == b
    assert a.items.tobytes() == b.items.tobytes()
    assert gen_zipf(10**4, 1000, 1.1, seed=8) != gen_zipf(10**4, 1000, 1.1, seed=7)


@pytest.mark.parametrize("s", [0.8, 1.1, 1.5])
def test_zipf_rank_frequency_slope(s):
    stream = gen_zipf(10**4, 10**6, s, seed=7)
    freqs = np.sort(np.array(list(exact_profile(stream).counts.values())))[::-1][:100]
    ranks = np.arange(1, 101)
    slope = np.polyfit(np.log(ranks), np.log(freqs), 1)[0]
    assert abs(slope + s) <= 0.1


def test_zipf_rejects_bad_params():
    with pytest.raises(ValueError):
        gen_zipf(0, 5, 1.0, 0)
    with pytest.raises(ValueError):
        gen_zipf(5, 5, 0.0, 0)


def test_spike_small_is_permutation():
    s = gen_spike(4, 4, star=2, f_star=1, seed=3)
    assert sorted(s.items.tolist()) == [1, 2, 3, 4]


def test_spike_counts_over_random_parameters():
    rng = np.random.default_rng(0)
    for k in range(20):
        n = int(rng.integers(2, 2000))
        star = int(rng.integers(1, n + 1))
        others = int(rng.integers(0, n))
        f_star = int(rng.integers(0, 500))
        s = gen_spike(n, others + f_star, star, f_star, order=("interleaved", "star_last")[k % 2], seed=k)
        counts = exact_profile(s).counts
        assert counts.get(star, 0) == f_star
        assert all(f == 1 for i, f in counts.items() if i != star)
        assert len(counts) - (f_star > 0) == others


def test_spike_star_last_ordering():
    s = gen_spike(100, 60, star=9, f_star=10, order="star_last", seed=1)
    assert s.items[-10:].tolist() == [9] * 10
    assert 9 not in s.items[:-10]


def test_spike_sqrt_n_log_n_regime():
    n = 10**4
    f_star = math.isqrt(n) * math.ceil(math.log2(n))
    s = gen_spike(n, f_star + n - 1, star=1, f_star=f_star, seed=0)
    assert exact_profile(s).counts[1] >= math.sqrt(n) * math.log2(n)


def test_spike_infeasible():
    with pytest.raises(ValueError):
        gen_spike(10, 20, star=1, f_star=5)
    with pytest.raises(ValueError):
        gen_spike(10, 5, star=1, f_star=6)


def test_planted():
    s = gen_planted(1000, 300, {3: 50, 8: 20}, seed=2)
    c = exact_profile(s).counts
    assert c[3] == 50 and c[8] == 20 and s.m == 370


def test_generators_reproducible():
    assert gen_spike(500, 300, 4, 50, seed=11) == gen_spike(500, 300, 4, 50, seed=11)
    assert gen_planted(500, 100, {1: 5}, seed=2) == gen_planted(500, 100, {1: 5}, seed=2)


# -- stream files -------------------------------------------------------------

@settings(max_examples=25)
@given(st.lists(st.integers(1, 2**32 - 1), max_size=100))
def test_binary_round_trip(tmp_path_factory, items):
    path = tmp_path_factory.mktemp("bin") / "s.bin"
    s = Stream.of(items, 2**32 - 1)
    write_binary(s, path)
    assert read_binary(path) == s
    assert read_stream(path) == s


def test_binary_layout(tmp_path):
    path = tmp_path / "s.bin"
    write_binary(Stream.of([1, 258], 300), path)
    raw = path.read_bytes()
    assert raw[:4] == b"HHS1"
    assert raw[4:8] == (300).to_bytes(4, "little")
    assert raw[8:16] == (2).to_bytes(8, "little")
    assert raw[16:] == (1).to_bytes(4, "little") + (258).to_bytes(4, "little")


def test_text_round_trip(tmp_path):
    path = tmp_path / "s.txt"
    s = gen_zipf(50, 500, 1.2, seed=1)
    write_text(s, path)
    assert path.read_text().endswith("\n")
    assert read_text(path, n=50) == s
    write_stream(s, tmp_path / "t.txt")
    assert read_stream(tmp_path / "t.txt", n=50) == s


def test_bad_files(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"HHS1" + (5).to_bytes(4, "little") + (3).to_bytes(8, "little") + b"\0" * 4)
    with pytest.raises(StreamFormatError):
        read_binary(bad)
    txt = tmp_path / "bad.txt"
    txt.write_text("1\nx\n")
    with pytest.raises(StreamFormatError):
        read_text(txt)
    zero = tmp_path / "zero.txt"
    zero.write_text("0\n")
    with pytest.raises(ValueError):
        read_text(zero, n=5)
