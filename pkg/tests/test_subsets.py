import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distinct_angles.configurations import regular_ngon, spiral_config
from distinct_angles.errors import InvalidInput, WitnessDiscrepancyTooLarge
from distinct_angles.geometry import RationalPoint2, RealPoint2, context
from distinct_angles.subsets import (IndexTriplePair, closed_form_threshold, difference_buckets,
                                     find_equivalent_triples, repeated_angle_witness,
                                     rgen_threshold, search_distinct_angle_subset)

from oracles import has_equivalent_triples

R = RationalPoint2


# --- equivalent triples -------------------------------------------------------

def test_find_equivalent_examples():
    assert find_equivalent_triples({1, 2, 3, 4, 5}, 5) == IndexTriplePair((2, 3, 4), (1, 2, 3), 1)
    assert find_equivalent_triples({1, 2, 4}, 8) is None
    assert find_equivalent_triples({1, 2, 3}, 3) is None


def test_find_equivalent_picks_smallest_difference_then_smallest_pairs():
    # difference 2 has pairs (3,1),(5,3),(7,5),(9,7); difference 1 has none with 3 pairs
    q = {1, 3, 5, 7, 9}
    assert find_equivalent_triples(q, 9) == IndexTriplePair((3, 5, 7), (1, 3, 5), 2)
    assert difference_buckets(q)[2] == [(3, 1), (5, 3), (7, 5), (9, 7)]


def test_find_equivalent_input_errors():
    with pytest.raises(InvalidInput):
        find_equivalent_triples({0, 1, 2}, 5)
    with pytest.raises(InvalidInput):
        find_equivalent_triples({1, 2, 9}, 5)
    with pytest.raises(InvalidInput):
        find_equivalent_triples({1, 2}, 5)


def test_index_triple_pair_invariants():
    with pytest.raises(InvalidInput):
        IndexTriplePair((1, 2, 3), (1, 2, 3), 0)
    with pytest.raises(InvalidInput):
        IndexTriplePair((2, 3, 5), (1, 2, 3), 1)
    with pytest.raises(InvalidInput):
        IndexTriplePair((3, 2, 4), (2, 1, 3), 1)


@given(st.integers(3, 40).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n), min_size=3, max_size=n))))
@settings(max_examples=300)
def test_find_equivalent_sound_and_matches_oracle(case):
    n, q = case
    pair = find_equivalent_triples(q, n)
    if pair is None:
        assert not has_equivalent_triples(q)
        assert math.comb(len(q), 2) < 2 * n - 1
    else:
        assert set(pair.s) <= q and set(pair.t) <= q
        assert pair.s != pair.t


def test_dense_sets_always_have_pairs_small_n():
    for n in range(3, 11):
        for m in range(3, n + 1):
            if math.comb(m, 2) < 2 * n - 1:
                continue
            for q in combinations(range(1, n + 1), m):
                assert find_equivalent_triples(q, n) is not None


# --- threshold ------------------------------------------------------------------

def test_rgen_threshold_examples():
    assert rgen_threshold(5) == 5
    assert rgen_threshold(1) == 2
    assert rgen_threshold(100) == 21 == closed_form_threshold(100)
    assert [rgen_threshold(n) for n in (16, 25, 36, 49)] == [9, 11, 13, 15]
    with pytest.raises(InvalidInput):
        rgen_threshold(0)


def test_rgen_threshold_is_minimal():
    for n in range(1, 3000):
        m = rgen_threshold(n)
        assert math.comb(m, 2) >= 2 * n - 1
        assert m == 2 or math.comb(m - 1, 2) < 2 * n - 1


def test_closed_form_threshold():
    for n in (1, 2, 5, 16, 17, 100, 12345):
        assert closed_form_threshold(n) == math.ceil(2 * math.sqrt(n) + 0.5)
    # 2 sqrt(n) + 1/2 is never an integer, so the inequality is strict in practice
    for n in range(1, 2000):
        assert (2 * closed_form_threshold(n) - 1) ** 2 > 16 * n


def test_rgen_threshold_below_closed_form_to_one_million():
    for n in range(1, 10**6 + 1):
        assert rgen_threshold(n) <= closed_form_threshold(n)


# --- witnesses ----------------------------------------------------------------------

def test_witness_on_consecutive_indices():
    w = repeated_angle_witness(spiral_config(5, "0.1"), range(1, 6))
    assert w.pair == IndexTriplePair((2, 3, 4), (1, 2, 3), 1)
    assert w.discrepancy < 1e-9
    assert all(d < 1e-30 for d in w.vertex_discrepancies)
    d = w.to_dict()
    assert d["s"] == [2, 3, 4] and d["t"] == [1, 2, 3] and d["shift"] == 1


def test_witness_absent_for_sidon_set():
    assert repeated_angle_witness(spiral_config(11, "0.1"), {1, 2, 5, 11}) is None


SPIRAL_30 = spiral_config(30, "1/30")


@given(st.sets(st.integers(1, 30), min_size=12, max_size=30))
@settings(max_examples=60, deadline=None)
def test_witness_all_vertices_agree(q):
    # C(12, 2) = 66 >= 2 * 30 - 1, so a witness must exist
    w = repeated_angle_witness(SPIRAL_30, q)
    assert w is not None
    assert max(w.vertex_discrepancies) < 1e-30


def test_witness_discrepancy_guard():
    with pytest.raises(WitnessDiscrepancyTooLarge):
        repeated_angle_witness(spiral_config(5, "0.1"), range(1, 6), tolerance=1e-60)


# --- subset search --------------------------------------------------------------------

def test_search_three_distinct_angles():
    res = search_distinct_angle_subset([R(0, 0), R(3, 0), R(0, 1)], "exhaustive")
    assert res.subset == (0, 1, 2)
    assert res.certificate.max_multiplicity == 1


def test_search_equilateral():
    c = context(128)
    tri = [RealPoint2(1, 0), RealPoint2(-c.mpf(1) / 2, c.sqrt(3) / 2),
           RealPoint2(-c.mpf(1) / 2, -c.sqrt(3) / 2)]
    for strategy in ("greedy", "exhaustive"):
        assert len(search_distinct_angle_subset(tri, strategy).subset) == 2


def test_search_spiral12_exhaustive_below_threshold():
    cfg = spiral_config(12, "0.1")
    res = search_distinct_angle_subset(cfg.points, "exhaustive")
    assert res.complete
    assert len(res.subset) == 6
    assert len(res.subset) < rgen_threshold(12) == 8
    assert res.certificate.max_multiplicity == 1
    greedy = search_distinct_angle_subset(cfg.points, "greedy")
    assert len(greedy.subset) <= len(res.subset)


def brute_max_distinct(points):
    from distinct_angles.census import census_bruteforce
    for size in range(len(points), 2, -1):
        for sub in combinations(range(len(points)), size):
            if census_bruteforce([points[i] for i in sub]).max_multiplicity == 1:
                return sub
    return tuple(range(min(2, len(points))))


@pytest.mark.parametrize("n", [5, 6, 7])
def test_exhaustive_matches_brute_force_on_ngons(n):
    pts = regular_ngon(n)
    assert search_distinct_angle_subset(pts, "exhaustive").subset == brute_max_distinct(pts)


def test_exhaustive_matches_brute_force_on_spiral():
    pts = spiral_config(9, "0.1").points
    assert search_distinct_angle_subset(pts, "exhaustive").subset == brute_max_distinct(pts)


def test_search_budget_and_limits():
    pts = spiral_config(12, "0.1").points
    res = search_distinct_angle_subset(pts, "exhaustive", budget=20)
    assert not res.complete
    assert res.certificate is None or res.certificate.max_multiplicity == 1
    with pytest.raises(InvalidInput):
        search_distinct_angle_subset(spiral_config(16, "0.1").points, "exhaustive")
    with pytest.raises(InvalidInput):
        search_distinct_angle_subset(pts, "annealing")
