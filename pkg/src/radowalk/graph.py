"""Lazy adjacency oracles for the binary Rado graph and seeded G(inf, p).

Neither oracle materializes the graph.  The binary model answers from bit
patterns (i ~ j iff the bit of max(i, j) at position min(i, j) is one); the
random model answers from a keyed hash of (seed, unordered pair), so the
realized infinite graph is consistent across queries and replayable from
the seed.  On top of the oracles sit the parent map p(x) = min N(x), its
spanning tree, and the structural scans used by the mixing experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from . import accel
from .numerics import partition_numbers

#: Candidates scanned before the random-model parent lookup gives up.
#: P(no neighbor among 4096 candidates) <= (1-p)^4096; a silent wrong
#: answer is never acceptable, so past the cap we raise instead.
PARENT_SCAN_CAP = 4096


class ScanCapExceeded(RuntimeError):
    pass


class BinaryRado:
    """Rado's binary model on vertex set N."""

    model = "binary"

    def describe(self) -> dict:
        return {"model": "binary"}

    @staticmethod
    def adjacent(i: int, j: int) -> bool:
        if i == j:
            return False
        lo, hi = (i, j) if i < j else (j, i)
        return (hi >> lo) & 1 == 1

    @staticmethod
    def parent(x: int) -> int:
        """Index of the lowest set bit; always < x."""
        if x < 1:
            raise ValueError("parent is defined for x >= 1")
        return (x & -x).bit_length() - 1

    @staticmethod
    def neighbors_up_to(x: int, cap: int) -> List[int]:
        """All neighbors of x that are <= cap, ascending.

        Below x these are the set-bit positions of x; above x they are the
        blocks {a*2^(x+1) + 2^x + b : 0 <= b < 2^x}, generated directly so
        non-candidates are never scanned.
        """
        below = [b for b in range(x.bit_length()) if (x >> b) & 1 and b <= cap]
        above: List[int] = []
        if x <= cap.bit_length():  # otherwise 2^x > cap and nothing fits
            base = 1 << x
            step = base << 1
            start = base
            while start <= cap:
                above.extend(range(start, min(start + base - 1, cap) + 1))
                start += step
        return below + [j for j in above if j != x]

    @staticmethod
    def children_up_to(x: int, cap: int) -> List[int]:
        """Tree children of x: the odd multiples of 2^x, up to cap."""
        out = []
        y = 1
        while y * (1 << x) <= cap:
            out.append(y * (1 << x))
            y += 2
        return out


class RandomGraph:
    """Seeded G(inf, p): edge iff keyed 53-bit hash of the pair falls
    below floor(p * 2^53)."""

    model = "random"

    def __init__(self, p: Union[float, Fraction], seed: int):
        if not (0 < p < 1):
            raise ValueError("edge probability must lie in (0, 1)")
        self.p = p
        self.seed = int(seed)
        self._thr = accel.threshold53(p)

    def describe(self) -> dict:
        return {"model": "random", "p": float(self.p), "seed": self.seed}

    def adjacent(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return accel.pair_hash53(self.seed, i, j) < self._thr

    def parent(self, x: int, scan_cap: int = PARENT_SCAN_CAP) -> int:
        """Least neighbor of x, scanning upward from 0."""
        if x < 1:
            raise ValueError("parent is defined for x >= 1")
        y = 0
        scanned = 0
        while scanned < scan_cap:
            if y != x and self.adjacent(x, y):
                return y
            y += 1
            scanned += 1
        raise ScanCapExceeded(
            f"no neighbor of {x} among the first {scan_cap} candidates"
        )

    def neighbors_up_to(self, x: int, cap: int) -> List[int]:
        # the batch path orders folded values, so only use it when folding
        # is the identity on both endpoints
        if cap <= 1 << 16 and 0 <= x < 1 << 63:
            cand = np.arange(cap + 1, dtype=np.uint64)
            h = accel.pair_hash53_batch_numpy(
                accel.fold64(self.seed), cand, np.uint64(x)
            )
            hit = np.nonzero(h < np.uint64(self._thr))[0]
            return [int(v) for v in hit if int(v) != x]
        return [y for y in range(cap + 1) if y != x and self.adjacent(x, y)]

    def children_up_to(self, x: int, cap: int) -> List[int]:
        """Vertices in [1, cap] whose parent is x."""
        out = []
        for z in range(1, cap + 1):
            if z == x:
                continue
            try:
                if self.parent(z) == x:
                    out.append(z)
            except ScanCapExceeded:
                continue
        return out


GraphOracle = Union[BinaryRado, RandomGraph]


def make_oracle(model: str, p=None, seed=None) -> GraphOracle:
    if model == "binary":
        return BinaryRado()
    if model == "random":
        if p is None or seed is None:
            raise ValueError("random model needs p and seed")
        return RandomGraph(p, seed)
    raise ValueError(f"unknown model {model!r}")


#: Materializing 2**i as a common-neighbor witness is refused past this
#: many bits; the witness is then reported by its set-bit positions.
_WITNESS_BIT_GUARD = 1 << 22


def common_neighbor(G: BinaryRado, i: int, j: int) -> dict:
    """A vertex adjacent to both i and j, witnessing diameter two.

    Returns {"direct": True} when i ~ j already; otherwise the witness
    2^i + 2^j, kept symbolic (bit positions only) for huge endpoints.
    """
    if not isinstance(G, BinaryRado):
        raise ValueError("common-neighbor witnesses are a binary-model rule")
    if i == j:
        raise ValueError("endpoints must differ")
    direct = G.adjacent(i, j)
    if max(i, j) > _WITNESS_BIT_GUARD:
        return {"direct": direct, "witness": None, "witness_bits": sorted((i, j))}
    k = (1 << i) + (1 << j)
    assert G.adjacent(i, k) and G.adjacent(j, k)
    return {"direct": direct, "witness": k}


def min_neighbor_below(G: GraphOracle, x: int) -> Optional[int]:
    """Least y < x adjacent to x, or None."""
    if isinstance(G, BinaryRado):
        return G.parent(x)  # lowest set bit, always < x
    for y in range(x):
        if G.adjacent(x, y):
            return y
    return None


def check_event_B(G: GraphOracle, n_max: int) -> dict:
    """Scan x in [1, n_max] for parent-decreasing failures p(x) >= x.

    Exact on the prefix; the binary model holds vacuously (lowest set bit
    of x is below x).
    """
    if n_max > 10**6:
        raise ValueError("n_max capped at 10^6")
    witnesses = [
        x for x in range(1, n_max + 1) if min_neighbor_below(G, x) is None
    ]
    return {"holds": not witnesses, "witnesses": witnesses, "n_max": n_max}


def prob_B_product(p, x_max: int):
    """Prefix probability prod_{x<=x_max} (1 - (1-p)^x), exact for
    rational p."""
    p = Fraction(p) if not isinstance(p, float) else p
    q = 1 - p
    total = Fraction(1) if isinstance(p, Fraction) else 1.0
    qx = q
    for _ in range(x_max):
        total *= 1 - qx
        qx *= q
    return total


def prob_B_series(p, n_terms: Optional[int] = None) -> dict:
    """P_p(B) from the partition series (sum p(n) (1-p)^n)^(-1).

    The tail is controlled with p(n) <= e^(pi sqrt(2n/3)), which is
    eventually dominated by (1-p)^(-n/2); n_terms is chosen so the bound
    applies and the remainder is negligible.
    """
    q = 1.0 - float(p)
    if n_terms is None:
        # beyond n0 the term is at most q^(n/2)
        n0 = (2 * math.pi * math.sqrt(2.0 / 3.0) / math.log(1.0 / q)) ** 2
        n_terms = min(10_000, max(400, int(n0) + 100))
    parts = partition_numbers(n_terms)
    exact = isinstance(p, (Fraction, int))
    if exact:
        qf = 1 - Fraction(p)
        s = Fraction(0)
        qn = Fraction(1)
        for n in range(n_terms + 1):
            s += parts[n] * qn
            qn *= qf
        value = 1 / s
    else:
        s = 0.0
        for n in range(n_terms + 1):
            s += parts[n] * q**n
        value = 1.0 / s
    tail = (q ** (0.5 * (n_terms + 1))) / max(1e-300, 1.0 - math.sqrt(q))
    return {"value": value, "series_sum": s, "tail_bound": tail, "terms": n_terms}


def estimate_prob_B(
    p, samples: int, n_max: int, seed: int, full_product_terms: int = 300
) -> dict:
    """Monte Carlo estimate of the prefix event against the two formulas.

    Returns the empirical frequency with its standard error, the exact
    prefix product it estimates, the partition-series and infinite-product
    values of the full event, the truncation gap between prefix and full
    event, and the closed-form floor 1 - min(2 - 3p + p^2, 1).
    """
    if samples < 10**3:
        raise ValueError("at least 10^3 samples required")
    thr = accel.threshold53(p)
    hits = accel.mc_event_b(seed, samples, n_max, thr)
    freq = float(np.asarray(hits).mean())
    se = math.sqrt(max(freq * (1.0 - freq), 1e-12) / samples)

    prefix = prob_B_product(p, n_max)
    series = prob_B_series(p)
    full_prod = prob_B_product(p, full_product_terms)
    q = 1.0 - float(p)
    # remaining factors of the infinite product lie in [1 - q^(X+1)/(1-q), 1]
    prod_slack = q ** (full_product_terms + 1) / (1.0 - q)
    trunc_gap = float(prefix) - float(full_prod)
    pf = float(p)
    khw_floor = 1.0 - min(2.0 - 3.0 * pf + pf * pf, 1.0)
    return {
        "estimate": freq,
        "std_error": se,
        "formula_prefix": float(prefix),
        "formula_value": float(full_prod),
        "formula_series": float(series["value"]),
        "series_tail_bound": series["tail_bound"],
        "product_tail_slack": prod_slack,
        "truncation_bound": trunc_gap + prod_slack,
        "khw_floor": khw_floor,
        "within_3se": abs(freq - float(prefix)) <= 3.0 * se,
        "samples": samples,
        "n_max": n_max,
        "seed": seed,
    }


@dataclass
class ParentTree:
    """Cached parent map over a finite prefix of the vertex set.

    Construction is single-owner; after build() the maps are frozen and
    safe for concurrent reads.
    """

    oracle: GraphOracle
    n_max: int
    parent: Dict[int, int] = field(default_factory=dict)
    unresolved: List[int] = field(default_factory=list)

    def build(self) -> "ParentTree":
        for x in range(1, self.n_max + 1):
            try:
                self.parent[x] = self.oracle.parent(x)
            except ScanCapExceeded:
                self.unresolved.append(x)
        return self

    def edges(self) -> Iterable[tuple]:
        return ((x, p) for x, p in self.parent.items())


def verify_tree(G: GraphOracle, n_max: int) -> dict:
    """Check that the parent edges on [1, n_max] are acyclic and that
    every vertex whose parent chain stays in the prefix reaches 0.

    Vertices whose parent leaves the prefix are reported as unresolved,
    not failures.  Any cycle is an implementation bug: the parent graph
    is a tree unconditionally.
    """
    if n_max > 10**6:
        raise ValueError("n_max capped at 10^6")
    tree = ParentTree(G, n_max).build()
    # acyclicity via union-find on the distinct undirected edges inside the
    # prefix; a mutual-parent pair (p(x) = y, p(y) = x) is one edge, not a
    # cycle
    edges = {tuple(sorted((x, p))) for x, p in tree.parent.items() if p <= n_max}
    uf = list(range(n_max + 1))

    def find(a):
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    acyclic = True
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            acyclic = False
            break
        uf[ra] = rb

    connected = unresolved = detached = 0
    for x in range(1, n_max + 1):
        v = x
        seen = set()
        while True:
            if v == 0:
                connected += 1
                break
            if v in seen:
                # parent pointers oscillate on a mutual pair: this chain
                # never reaches 0 inside the prefix
                detached += 1
                break
            seen.add(v)
            p = tree.parent.get(v)
            if p is None or p > n_max:
                unresolved += 1
                break
            v = p
    return {
        "ok": acyclic,
        "acyclic": acyclic,
        "connected_to_root": connected,
        "detached": detached,
        "unresolved": unresolved + len(tree.unresolved),
        "n_max": n_max,
    }


def parent_growth_scan(G: GraphOracle, n_max: int) -> dict:
    """Vertices x <= n_max with p(x) > 2 log2(1+x), and the empirical
    growth constant max(2, p(x)/log2(1+x) over violations)."""
    if n_max > 10**6:
        raise ValueError("n_max capped at 10^6")
    violations = []
    c_emp = 2.0
    for x in range(1, n_max + 1):
        px = G.parent(x)
        bound = 2.0 * math.log2(1.0 + x)
        if px > bound:
            ratio = px / math.log2(1.0 + x)
            violations.append({"x": x, "parent": px, "ratio": ratio})
            c_emp = max(c_emp, ratio)
    return {"violations": violations, "C_empirical": c_emp, "n_max": n_max}


def find_lowerbound_sequence(
    G: RandomGraph, x0: int, depth: int, scan_budget: int = 2_000_000
) -> dict:
    """Greedy construction of x0 < x1 < ... where each next element lies in
    [2^(3x), 2^(3x+1) - 1], is adjacent to x, and is adjacent to nothing
    else below 2x.  Returns the smallest valid candidate at each step; on
    an exhausted interval or budget, reports the failing step.
    """
    seq = [x0]
    queries = 0
    for i in range(depth):
        x = seq[-1]
        lo = 1 << (3 * x)
        hi = (1 << (3 * x + 1)) - 1
        found = None
        y = lo
        while y <= hi:
            queries += 1
            if queries > scan_budget:
                return {
                    "sequence": seq,
                    "failed_at": i,
                    "reason": "scan budget exhausted",
                    "queries": queries,
                }
            if G.adjacent(y, x):
                clean = True
                for z in range(2 * x):
                    if z != x and G.adjacent(y, z):
                        clean = False
                        break
                    queries += 1
                if clean:
                    found = y
                    break
            y += 1
        if found is None:
            return {
                "sequence": seq,
                "failed_at": i,
                "reason": "interval exhausted",
                "queries": queries,
            }
        # replay the defining adjacencies before accepting
        assert G.adjacent(found, x)
        assert all(
            not G.adjacent(found, z) for z in range(2 * x) if z != x
        )
        seq.append(found)
    return {"sequence": seq, "failed_at": None, "queries": queries}
