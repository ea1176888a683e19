"""Vertex weights Q, neighborhood masses Q(N(x)), and the walk's measures.

The canonical geometric family is Q(x) = delta^x; the introduction's
2^-(x+1) normalization is the same family at delta = 1/2 up to a constant
that cancels in every kernel entry and stationary probability, so it is
offered only as a display scaling.  For the binary model the neighborhood
mass splits into a dyadic below-x part (the set bits of x) and the block
series S(x) = u/((1-delta)(1+u)) with u = delta^(2^x) over the neighbors
above x.  S(x) shrinks doubly exponentially but materializing it exactly
requires integers of about 2^x bits, so it is kept structural: exact when
affordable, otherwise bracketed by always-representable rational bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .graph import BinaryRado, GraphOracle
from .numerics import (
    MAX_EXACT_EXPONENT,
    ErrorBoundedReal,
    UnmaterializableError,
    block_series,
    guarded_power,
    zeta_partial,
)

#: Exponent used for the always-representable upper bound on S(x): the
#: true exponent 2^x is clamped here, which only loosens the bound.
REDUCED_TAIL_EXPONENT = 4096


@dataclass(frozen=True)
class GeometricWeights:
    """Q(x) = delta^x.  A Fraction delta makes every weight exact."""

    delta: Union[Fraction, float]

    def __post_init__(self):
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie in (0, 1)")

    @property
    def exact(self) -> bool:
        return isinstance(self.delta, Fraction)

    def q(self, x: int):
        if self.exact:
            return guarded_power(self.delta, x)
        return float(self.delta) ** x

    def q_float(self, x: int) -> float:
        d = float(self.delta)
        v = d**x
        return v

    def log2_q(self, x: int) -> float:
        return x * math.log2(float(self.delta))

    def tail(self, cap: int):
        """Sum of Q over (cap, infinity)."""
        if self.exact:
            return guarded_power(self.delta, cap + 1) / (1 - self.delta)
        d = float(self.delta)
        return d ** (cap + 1) / (1.0 - d)

    def total(self):
        """Sum of Q over all of N."""
        if self.exact:
            return 1 / (1 - self.delta)
        return 1.0 / (1.0 - float(self.delta))

    def describe(self) -> dict:
        return {"kind": "geometric", "delta": float(self.delta)}


@dataclass(frozen=True)
class PolynomialWeights:
    """Q(x) = 1/(zeta(l) (x+1)^l) for l > 1; error-bounded, never exact.

    Licensed for the tree-Hardy experiments only: the full walk-gap
    statements need exponential tails.
    """

    l: float

    def __post_init__(self):
        if not self.l > 1:
            raise ValueError("polynomial exponent must exceed 1")

    exact = False

    def q(self, x: int) -> ErrorBoundedReal:
        z, zerr = zeta_partial(self.l)
        return ErrorBoundedReal(1.0, 0.0) / (
            ErrorBoundedReal(z, zerr) * ErrorBoundedReal(float(x + 1) ** self.l)
        )

    def describe(self) -> dict:
        return {"kind": "polynomial", "l": self.l}


WeightFamily = Union[GeometricWeights, PolynomialWeights]


def make_weights(kind: str, delta=None, l=None, exact: bool = True) -> WeightFamily:
    if kind == "geometric":
        d = Fraction(delta)
        return GeometricWeights(d if exact else float(d))
    if kind == "polynomial":
        return PolynomialWeights(float(l))
    raise ValueError(f"unknown weight family {kind!r}")


@dataclass(frozen=True)
class NeighborhoodMass:
    """Q(N(x)) for the binary model, split as dyadic-below + block series.

    ``below`` is the exact sum of Q over the set bits of x.  The above-x
    part is S(x) = u/((1-delta)(1+u)) with u = delta^(2^x), recorded by its
    exponent only.  exact() materializes it when 2^x is inside the guard;
    bounds() always returns rational brackets.
    """

    x: int
    delta: Fraction
    below: Fraction

    @property
    def s_exponent(self) -> int:
        return 1 << self.x if self.x < 64 else MAX_EXACT_EXPONENT + 1

    def s_exact(self) -> Fraction:
        return block_series(self.delta, self.x)

    def exact(self) -> Fraction:
        return self.below + self.s_exact()

    def s_upper(self) -> Fraction:
        """Rational upper bound on S(x) that always materializes: the
        exponent 2^x is clamped to REDUCED_TAIL_EXPONENT, which only
        enlarges the bound."""
        e = min(self.s_exponent, REDUCED_TAIL_EXPONENT)
        return guarded_power(self.delta, e) / (1 - self.delta)

    def bounds(self) -> Tuple[Fraction, Fraction]:
        if self.s_exponent <= MAX_EXACT_EXPONENT:
            v = self.exact()
            return v, v
        return self.below, self.below + self.s_upper()

    def float_value(self) -> float:
        d = float(self.delta)
        if self.x < 64:
            try:
                u = d ** (1 << self.x)
            except OverflowError:
                u = 0.0
        else:
            u = 0.0
        s = u / ((1.0 - d) * (1.0 + u))
        return float(self.below) + s


@dataclass(frozen=True)
class TruncatedMass:
    """Window sum of Q over observed neighbors plus the analytic bound on
    whatever mass the truncation may have missed."""

    window: Union[Fraction, float]
    tail_bound: Union[Fraction, float]
    cap: int

    def bounds(self):
        return self.window, self.window + self.tail_bound

    def float_value(self) -> float:
        return float(self.window) + 0.5 * float(self.tail_bound)

    def as_error_bounded(self) -> ErrorBoundedReal:
        half = 0.5 * float(self.tail_bound)
        return ErrorBoundedReal(float(self.window) + half, half)


def q_neighborhood(
    G: GraphOracle,
    W: WeightFamily,
    x: int,
    mode: str = "closed-form",
    cap: Optional[int] = None,
):
    """Q(N(x)), the total weight of x's neighborhood.

    closed-form needs the binary model with geometric weights and returns a
    NeighborhoodMass; truncated sums the neighbors up to cap and attaches
    the tail bound sum_{j > cap} Q(j), returning a TruncatedMass.
    """
    if mode == "closed-form":
        if not isinstance(G, BinaryRado) or not isinstance(W, GeometricWeights):
            raise ValueError(
                "closed-form neighborhood mass needs binary model with "
                "geometric weights"
            )
        delta = Fraction(W.delta)
        below = sum(
            (delta**b for b in range(x.bit_length()) if (x >> b) & 1),
            Fraction(0),
        )
        return NeighborhoodMass(x=x, delta=delta, below=below)
    if mode == "truncated":
        if cap is None:
            raise ValueError("truncated mode needs a cap")
        if isinstance(W, GeometricWeights):
            window = sum(W.q(j) for j in G.neighbors_up_to(x, cap))
            return TruncatedMass(window=window, tail_bound=W.tail(cap), cap=cap)
        ebr = sum(
            (W.q(j) for j in G.neighbors_up_to(x, cap)),
            ErrorBoundedReal(0.0),
        )
        # polynomial tail: integral bound of sum_{j>cap} (j+1)^-l / zeta(l)
        z, _ = zeta_partial(W.l)
        tail = (cap + 1) ** (1.0 - W.l) / ((W.l - 1.0) * z)
        return TruncatedMass(
            window=ebr.value, tail_bound=tail + ebr.error, cap=cap
        )
    raise ValueError(f"unknown mode {mode!r}")


def mu_vertex(G: GraphOracle, W: WeightFamily, x: int):
    """mu(x) = Q(x) Q(p(x)), the vertex measure of the parent tree."""
    if x < 1:
        raise ValueError("mu is defined on positive vertices")
    p = G.parent(x)
    qx, qp = W.q(x), W.q(p)
    return qx * qp


def nu_edge(G: GraphOracle, W: WeightFamily, x: int):
    """nu({x, p(x)}) = Q(x) Q(p(x)); definitionally equal to mu_vertex but
    named as the edge measure it is."""
    return mu_vertex(G, W, x)


@dataclass
class StationaryResult:
    """Unnormalized weights w(i) = Q(i) Q(N(i)) as intervals, with bounds
    on the normalizer Z.

    The Z tail uses Q(N(i)) <= total Q mass, crude but rigorous; at
    geometric decay it is tight enough from cap 64 up.  Probabilities are
    reported as [w_lo/Z_hi, w_hi/Z_lo]."""

    cap: int
    weights: Dict[int, Tuple]
    z_lower: object
    z_upper: object
    z_tail: object

    def pi_interval(self, i: int) -> Tuple:
        lo, hi = self.weights[i]
        return lo / self.z_upper, hi / self.z_lower

    def pi_mid(self, i: int) -> float:
        lo, hi = self.pi_interval(i)
        return 0.5 * (float(lo) + float(hi))


def stationary(G: GraphOracle, W: GeometricWeights, cap: int) -> StationaryResult:
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if not isinstance(W, GeometricWeights):
        raise ValueError("stationary weights need the geometric family")
    weights: Dict[int, Tuple] = {}
    exact = W.exact and isinstance(G, BinaryRado)
    for i in range(cap + 1):
        qi = W.q(i) if exact else W.q_float(i)
        if isinstance(G, BinaryRado):
            m = q_neighborhood(G, W, i, "closed-form")
            if exact:
                m_lo, m_hi = m.bounds()
            else:
                m_lo = m_hi = m.float_value()
        else:
            m = q_neighborhood(G, W, i, "truncated", cap=max(2 * cap, 4096))
            m_lo, m_hi = m.bounds()
        weights[i] = (qi * m_lo, qi * m_hi)
    z_lo = sum(w[0] for w in weights.values())
    z_hi = sum(w[1] for w in weights.values())
    z_tail = W.tail(cap) * W.total()
    return StationaryResult(
        cap=cap,
        weights=weights,
        z_lower=z_lo,
        z_upper=z_hi + z_tail,
        z_tail=z_tail,
    )


def check_neighborhood_sandwich(G: BinaryRado, W: GeometricWeights, x: int) -> dict:
    """Exact check of Q(p(x)) <= Q(N(x)) <= Q(p(x)) / (1 - delta).

    The lower side is immediate from the dyadic part.  The upper side is
    decided against the clamped rational bound on S(x) first and only
    falls back to exact materialization in the (never yet seen) ambiguous
    case.  At delta = 1/2 the upper constant is the factor-2 sandwich.
    """
    delta = Fraction(W.delta)
    m = q_neighborhood(G, W, x, "closed-form")
    qp = delta ** G.parent(x)
    lower_ok = qp <= m.below
    margin = qp / (1 - delta) - m.below
    if margin < 0:
        upper_ok = False
    elif m.s_upper() <= margin:
        upper_ok = True
    else:
        upper_ok = m.s_exact() <= margin  # may raise past the guard
    return {"x": x, "lower_ok": lower_ok, "upper_ok": upper_ok}
