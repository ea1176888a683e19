import math
from fractions import Fraction

import numpy as np
import pytest

from radowalk import graph as gr


BIN = gr.BinaryRado()


def _rand_oracle(seed=7, p=0.5):
    return gr.RandomGraph(p, seed)


# ---------------------------------------------------------------- adjacency


def test_binary_adjacency_examples():
    # 0 is connected to all odd numbers
    assert BIN.adjacent(0, 5)
    assert all(BIN.adjacent(0, j) for j in range(1, 50, 2))
    assert not any(BIN.adjacent(0, j) for j in range(2, 50, 2))
    # 1 is connected to numbers that are 2 or 3 mod 4 (and to 0)
    assert BIN.adjacent(1, 6)
    assert BIN.adjacent(1, 0)
    assert all(BIN.adjacent(1, j) == (j % 4 in (2, 3)) for j in range(2, 64))


def test_irreflexive():
    assert not BIN.adjacent(7, 7)
    assert not _rand_oracle().adjacent(7, 7)


def test_symmetry_random_pairs():
    R = _rand_oracle()
    rng = np.random.default_rng(0)
    for _ in range(10**4):
        i, j = map(int, rng.integers(0, 10**6, 2))
        if i == j:
            continue
        assert BIN.adjacent(i, j) == BIN.adjacent(j, i)
        assert R.adjacent(i, j) == R.adjacent(j, i)


def test_random_oracle_determinism():
    a = gr.RandomGraph(0.5, 123)
    b = gr.RandomGraph(0.5, 123)
    c = gr.RandomGraph(0.5, 124)
    rng = np.random.default_rng(1)
    pairs = rng.integers(0, 10**9, (10**4, 2))
    answers_a = [a.adjacent(int(i), int(j)) for i, j in pairs]
    answers_b = [b.adjacent(int(i), int(j)) for i, j in pairs]
    assert answers_a == answers_b
    answers_c = [c.adjacent(int(i), int(j)) for i, j in pairs]
    assert answers_a != answers_c


def test_random_oracle_edge_frequency():
    R = _rand_oracle(seed=42, p=0.3)
    hits = sum(R.adjacent(i, j) for i in range(200) for j in range(i + 1, 200))
    n = 200 * 199 // 2
    assert abs(hits / n - 0.3) < 0.02


def test_random_oracle_bigint_vertices():
    R = _rand_oracle()
    x = 2**200 + 17
    assert R.adjacent(x, 5) == R.adjacent(5, x)


# ---------------------------------------------------------------- neighbors


def test_neighbors_binary_examples():
    assert BIN.neighbors_up_to(0, 10) == [1, 3, 5, 7, 9]
    assert BIN.neighbors_up_to(12, 12) == [2, 3]
    # 12 = 1100b: below-neighbors are bit positions 2, 3


def test_neighbors_binary_matches_bruteforce():
    for x in [0, 1, 5, 12, 17, 64, 100]:
        got = BIN.neighbors_up_to(x, 300)
        want = [j for j in range(301) if BIN.adjacent(x, j)]
        assert got == want, x


def test_neighbors_random_replay():
    R = _rand_oracle(seed=5)
    first = R.neighbors_up_to(5, 100)
    second = R.neighbors_up_to(5, 100)
    assert first == second
    want = [j for j in range(101) if R.adjacent(5, j)]
    assert first == want


# ------------------------------------------------------------------- parent


def test_binary_parent_lowest_set_bit():
    assert BIN.parent(12) == 2
    assert BIN.parent(1) == 0
    for x in range(1, 10**5):
        p = BIN.parent(x)
        assert p == (x & -x).bit_length() - 1
        assert p < x


def test_random_parent_is_min_neighbor():
    R = _rand_oracle(seed=11)
    for x in range(1, 60):
        p = R.parent(x)
        assert R.adjacent(x, p)
        assert all(not R.adjacent(x, y) for y in range(p))


def test_random_parent_scan_cap():
    R = gr.RandomGraph(0.5, 3)
    with pytest.raises(gr.ScanCapExceeded):
        R.parent(10, scan_cap=0)


# ----------------------------------------------------------------- children


def test_children_binary_examples():
    assert BIN.children_up_to(1, 15) == [2, 6, 10, 14]
    assert BIN.children_up_to(0, 8) == [1, 3, 5, 7]
    assert BIN.children_up_to(3, 7) == []


def test_children_random_matches_parent():
    R = _rand_oracle(seed=9)
    kids = R.children_up_to(2, 64)
    for z in kids:
        assert R.parent(z) == 2


# ---------------------------------------------------------- common neighbor


def test_common_neighbor():
    assert gr.common_neighbor(BIN, 0, 1)["direct"] is True
    assert gr.common_neighbor(BIN, 2, 4)["witness"] == 20
    assert gr.common_neighbor(BIN, 3, 5)["witness"] == 40
    sym = gr.common_neighbor(BIN, 2**30, 2**31)
    assert sym["witness"] is None and sym["witness_bits"] == [2**30, 2**31]


def test_common_neighbor_witness_replay():
    rng = np.random.default_rng(3)
    for _ in range(50):
        i, j = map(int, rng.integers(0, 500, 2))
        if i == j or BIN.adjacent(i, j):
            continue
        k = gr.common_neighbor(BIN, i, j)["witness"]
        assert BIN.adjacent(i, k) and BIN.adjacent(j, k)


# ------------------------------------------------------------------ event B


def test_event_b_binary_always_holds():
    assert gr.check_event_B(BIN, 2000) == {
        "holds": True,
        "witnesses": [],
        "n_max": 2000,
    }


def test_event_b_random_frequency_matches_formula():
    res = gr.estimate_prob_B(Fraction(1, 2), 10**4, 64, seed=2024)
    assert res["within_3se"]
    # the two independent formulas agree tightly
    assert abs(res["formula_series"] - res["formula_value"]) < 1e-10
    assert abs(res["formula_value"] - 0.2887880951) < 1e-9
    assert res["formula_value"] >= 0.25  # the 1/4 floor at p = 1/2


def test_event_b_high_p_mostly_holds():
    holds = 0
    for seed in range(200):
        if gr.check_event_B(gr.RandomGraph(0.9, seed), 64)["holds"]:
            holds += 1
    assert holds > 150  # P(B) -> 1 as p -> 1


def test_prob_b_positive_below_critical():
    res = gr.estimate_prob_B(0.38, 10**3, 32, seed=1)
    assert res["formula_value"] > 0
    # the closed-form floor is vacuous in this range
    assert res["khw_floor"] <= 0


# --------------------------------------------------------------------- tree


def test_verify_tree_binary():
    res = gr.verify_tree(BIN, 10**4)
    assert res["ok"] and res["acyclic"]
    assert res["connected_to_root"] == 10**4
    assert res["unresolved"] == 0


def test_verify_tree_trivial():
    assert gr.verify_tree(BIN, 1)["ok"]


def test_verify_tree_random_seeds():
    for seed in range(20):
        res = gr.verify_tree(gr.RandomGraph(0.5, seed), 10**3)
        assert res["acyclic"], seed


# ---------------------------------------------------------------- growth


def test_parent_growth_binary_no_violations():
    res = gr.parent_growth_scan(BIN, 10**4)
    assert res["violations"] == []
    assert res["C_empirical"] == 2.0


def test_parent_growth_random_short_list():
    res = gr.parent_growth_scan(gr.RandomGraph(0.5, 31337), 10**4)
    # violations concentrate at small x; the tail sum of (1+x)^-2 makes
    # long lists vanishingly unlikely
    assert len(res["violations"]) < 20
    assert all(v["x"] < 1000 for v in res["violations"])
    assert res["C_empirical"] >= 2.0


def test_parent_growth_empty_scan():
    assert gr.parent_growth_scan(BIN, 0)["violations"] == []


# ------------------------------------------------------------- lower bound


def test_lowerbound_sequence_from_one():
    ok = 0
    for seed in range(30):
        R = gr.RandomGraph(0.5, seed)
        res = gr.find_lowerbound_sequence(R, 1, depth=1)
        if res["failed_at"] is None:
            (x0, x1) = res["sequence"]
            assert 8 <= x1 <= 15
            assert R.adjacent(x1, 1)
            ok += 1
    assert ok >= 20  # each seed succeeds with probability ~90%


def test_lowerbound_sequence_strictly_increasing():
    R = gr.RandomGraph(0.5, 4)
    res = gr.find_lowerbound_sequence(R, 1, depth=2, scan_budget=500_000)
    seq = res["sequence"]
    assert all(a < b for a, b in zip(seq, seq[1:]))
