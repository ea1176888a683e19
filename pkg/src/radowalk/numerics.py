"""Exact and error-bounded scalar arithmetic for the ball-walk computations.

Exact rationals are plain ``fractions.Fraction``; this module adds what
Fraction does not cover: iterated-logarithm counts with their two stopping
conventions, the fixed points of ``log_a``, tower values, partition numbers,
the closed form of the block series over binary neighbor patterns, and a
materialization guard for powers whose exponents are themselves enormous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

Rational = Union[int, Fraction]

#: Largest exponent E for which a value delta**E may be materialized as an
#: exact rational.  2**22 bits is ~0.5 MB per integer; beyond that a single
#: value stops being a workable object.
MAX_EXACT_EXPONENT = 1 << 22

#: e**(1/e), the base below which log_a acquires fixed points.
E_TO_INV_E = math.exp(1.0 / math.e)

TOWER_LIMIT = 4


class UnmaterializableError(ValueError):
    """A requested exact value would need an astronomically large integer."""


def guarded_power(delta: Fraction, exponent: int) -> Fraction:
    """delta**exponent as an exact Fraction, refusing hopeless exponents."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    if exponent > MAX_EXACT_EXPONENT:
        raise UnmaterializableError(
            f"delta**{exponent} exceeds the {MAX_EXACT_EXPONENT}-bit "
            "materialization guard"
        )
    return Fraction(delta) ** exponent


@dataclass(frozen=True)
class TowerValue:
    """Iterated exponential 2^(height), materialized only for height <= 4."""

    height: int
    value: int


def tower(k: int) -> TowerValue:
    """2^(k) with 2^(0)=1 and 2^(k)=2**2^(k-1); refuses k >= 5.

    2^(5) already has 65536 binary digits in its exponent, so no
    distribution over such states is representable.
    """
    if k < 0:
        raise ValueError("tower height must be nonnegative")
    if k > TOWER_LIMIT:
        raise UnmaterializableError(
            f"tower of height {k} is unmaterializable (limit {TOWER_LIMIT})"
        )
    v = 1
    for _ in range(k):
        v = 2 ** v
    return TowerValue(k, v)


def _log2_big(x: int) -> float:
    # math.log2 overflows to inf for ints above ~2**1023; use the top 53 bits.
    bl = x.bit_length()
    if bl <= 900:
        return math.log2(x)
    top = x >> (bl - 53)
    return (bl - 53) + math.log2(top)


def _log_base(x, log2_base: float) -> float:
    if isinstance(x, int) and x > 0:
        return _log2_big(x) / log2_base
    return math.log2(x) / log2_base


def fixed_points(a: float) -> Tuple[float, float]:
    """The two fixed points 0 < y_a <= x_a of log_a, for 1 < a <= e**(1/e).

    Found by bisection on the two monotone branches of log_a(x) - x, split
    at x = e where (log x)/x peaks.  Both roots satisfy
    |log_a r - r| <= 1e-12.  At a = e**(1/e) the roots collide at e.
    """
    if not (1.0 < a <= E_TO_INV_E + 1e-15):
        raise ValueError(f"base {a} outside (1, e^(1/e)]")
    log2_a = math.log2(a)

    def g(x: float) -> float:
        return math.log2(x) / log2_a - x

    def bisect(lo: float, hi: float) -> float:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if g(lo) * g(mid) <= 0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    e = math.e
    if g(e) <= 0.0:
        # a is (numerically) at the critical base: double root at e.
        return e, e
    y = bisect(1.0 + 1e-15, e)
    hi = e
    while g(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("upper fixed point did not bracket")
    x = bisect(e, hi)
    return y, x


def log_star(
    x,
    base: float = 2.0,
    convention: str = "at-most-one",
    fp_tol: float = 1e-9,
) -> int:
    """Number of times log_base must be applied to x to cross the threshold.

    For base > e**(1/e) the threshold is the chosen convention: result <= 1
    ("at-most-one", the convention used by all mixing-time statements here)
    or result <= 0 ("nonpositive").  For base <= e**(1/e) the orbit instead
    converges to the larger fixed point x_a; since x_a attracts from above,
    a finite count needs a tolerance, and we count applications until the
    result is <= x_a + fp_tol.  log_star(0) is 0 by convention.

    Accepts arbitrarily large integers (the first application is computed
    from the bit length).
    """
    if convention not in ("at-most-one", "nonpositive"):
        raise ValueError(f"unknown convention {convention!r}")
    if not (base > 1.0) or math.isnan(base):
        raise ValueError("base must be a real number > 1")
    if isinstance(x, float) and math.isnan(x):
        raise ValueError("x must not be NaN")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 0

    if base > E_TO_INV_E:
        threshold = 1.0 if convention == "at-most-one" else 0.0
    else:
        threshold = fixed_points(base)[1] + fp_tol

    log2_base = math.log2(base)
    count = 0
    v = x
    while v > threshold:
        v = _log_base(v, log2_base)
        count += 1
        if count > 100_000:
            raise ArithmeticError("log_star failed to terminate")
    return count


def partition_numbers(n_max: int) -> list:
    """p(0..n_max), the integer partition counts, by Euler's pentagonal
    recurrence.  Exact arbitrary-precision integers; n_max capped at 10^4."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > 10_000:
        raise ValueError("n_max capped at 10^4")
    p = [0] * (n_max + 1)
    p[0] = 1
    for n in range(1, n_max + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 == 1 else -1
            total += sign * p[n - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def block_series(delta: Fraction, i: int) -> Fraction:
    """Sum of delta**j over all j whose i-th binary digit is a one.

    Those j form the blocks {a*2^(i+1) + 2^i + b : a >= 0, 0 <= b < 2^i},
    which collapse to the closed form u/((1-delta)(1+u)) with u = delta**(2^i).
    """
    delta = Fraction(delta)
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    u = guarded_power(delta, 1 << i)
    return u / ((1 - delta) * (1 + u))


def geometric_block_sum(i: int) -> Fraction:
    """Sum of 2^-(j+1) over all j whose i-th binary digit is a one.

    With the normalized geometric weights this is exactly 1/(2^(2^i) + 1).
    Materialization is refused once 2^i crosses the exponent guard.
    """
    if i < 0:
        raise ValueError("bit index must be nonnegative")
    if (1 << i) > MAX_EXACT_EXPONENT:
        raise UnmaterializableError(
            f"block sum for bit {i} needs a 2^{i}-bit denominator"
        )
    return Fraction(1, (1 << (1 << i)) + 1)


def zeta_partial(l: float, terms: int = 100_000) -> Tuple[float, float]:
    """(value, absolute error bound) for the Riemann zeta at real l > 1,
    from a partial sum plus the integral tail bracket."""
    if l <= 1.0:
        raise ValueError("zeta tail bound needs l > 1")
    partial = 0.0
    for k in range(terms, 0, -1):  # small terms first
        partial += k ** (-l)
    tail_lo = (terms + 1) ** (1.0 - l) / (l - 1.0)
    tail_hi = terms ** (1.0 - l) / (l - 1.0)
    value = partial + 0.5 * (tail_lo + tail_hi)
    err = 0.5 * (tail_hi - tail_lo) + 1e-14 * value
    return value, err


@dataclass(frozen=True)
class ErrorBoundedReal:
    """A double plus an absolute error radius, propagated conservatively."""

    value: float
    error: float = 0.0

    def __post_init__(self):
        if self.error < 0 or math.isnan(self.error):
            raise ValueError("error radius must be nonnegative")

    @staticmethod
    def wrap(x) -> "ErrorBoundedReal":
        if isinstance(x, ErrorBoundedReal):
            return x
        if isinstance(x, Fraction):
            f = float(x)
            return ErrorBoundedReal(f, abs(f) * 1e-16)
        return ErrorBoundedReal(float(x), 0.0)

    def __add__(self, other):
        o = ErrorBoundedReal.wrap(other)
        return ErrorBoundedReal(self.value + o.value, self.error + o.error)

    __radd__ = __add__

    def __sub__(self, other):
        o = ErrorBoundedReal.wrap(other)
        return ErrorBoundedReal(self.value - o.value, self.error + o.error)

    def __mul__(self, other):
        o = ErrorBoundedReal.wrap(other)
        err = (
            abs(self.value) * o.error
            + abs(o.value) * self.error
            + self.error * o.error
        )
        return ErrorBoundedReal(self.value * o.value, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ErrorBoundedReal.wrap(other)
        if abs(o.value) <= o.error:
            raise ZeroDivisionError("divisor interval contains zero")
        lo = abs(o.value) - o.error
        err = (self.error + abs(self.value / o.value) * o.error) / lo
        return ErrorBoundedReal(self.value / o.value, err)

    @property
    def lo(self) -> float:
        return self.value - self.error

    @property
    def hi(self) -> float:
        return self.value + self.error


def fraction_str(x) -> str:
    """Serialize rationals as "num/den" so JSON never corrupts them."""
    if isinstance(x, Fraction) or isinstance(x, int):
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}"
    return repr(x)
