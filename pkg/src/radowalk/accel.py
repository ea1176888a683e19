"""Hot numeric kernels with numba JIT and pure-numpy fallbacks.

Three kernels dominate the runtime of the experiment suite: the keyed edge
hash behind the seeded G(inf, p) oracle, the Monte Carlo scan for the
parent-decreasing event over many seeds, and the drift-expectation sweep.
Each ships in two variants; set RADOWALK_NO_NUMBA=1 to force the numpy
path.  Both variants stay importable so benchmarks/bench_accel.py can time
them side by side, and they are bit-for-bit interchangeable: every hash is
an integer comparison against a precomputed 53-bit threshold.
"""

from __future__ import annotations

import math
import os

import numpy as np

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_SALT_A = 0xD1B54A32D192ED03
_SALT_B = 0x8CB92BA72F3D8DD7

USE_NUMBA = os.environ.get("RADOWALK_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

_U = np.uint64


def _mix64_int(z: int) -> int:
    """splitmix64 finalizer on Python ints (masked to 64 bits)."""
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def fold64(v: int) -> int:
    """XOR-fold an arbitrary-precision natural into 64 bits."""
    v = int(v)
    while v > _M64:
        v = (v & _M64) ^ (v >> 64)
    return v


def pair_hash53(seed: int, i, j) -> int:
    """Keyed 53-bit hash of the unordered pair {i, j}.

    Top half of a 128-bit mix chain; vertices of any size are folded first,
    so the infinite graph stays consistent under repeated queries.
    """
    a, b = (i, j) if i < j else (j, i)
    h = _mix64_int(fold64(seed) + _GAMMA)
    h = _mix64_int(h ^ ((fold64(a) + _SALT_A) & _M64))
    h = _mix64_int(h ^ ((fold64(b) + _SALT_B) & _M64))
    return h >> 11


def threshold53(p: float) -> int:
    """Edge rule: an edge is present iff pair_hash53 < threshold53(p)."""
    from fractions import Fraction

    t = int(Fraction(p) * (1 << 53))
    return max(0, min(t, 1 << 53))


# ---------------------------------------------------------------------------
# numpy variants
# ---------------------------------------------------------------------------


def _mix64_np(z):
    z = np.asarray(z, dtype=np.uint64).copy()
    with np.errstate(over="ignore"):  # wrapping is the point
        z ^= z >> _U(30)
        z *= _U(0xBF58476D1CE4E5B9)
        z ^= z >> _U(27)
        z *= _U(0x94D049BB133111EB)
        return z ^ (z >> _U(31))


def pair_hash53_batch_numpy(seed, ii, jj):
    """Vectorized pair_hash53 for arrays of 64-bit-range vertices."""
    ii = np.asarray(ii, dtype=np.uint64)
    jj = np.asarray(jj, dtype=np.uint64)
    a = np.minimum(ii, jj)
    b = np.maximum(ii, jj)
    seed = np.asarray(seed, dtype=np.uint64)
    h = _mix64_np(seed + _U(_GAMMA))
    h = _mix64_np(h ^ (a + _U(_SALT_A)))
    h = _mix64_np(h ^ (b + _U(_SALT_B)))
    return h >> _U(11)


def mc_event_b_numpy(seed0: int, n_seeds: int, n_max: int, thr53: int):
    """For each seed, does every x in [1, n_max] have a neighbor below it?

    Chunked over seeds; per seed, the (y, x) pairs with y < x <= n_max are
    hashed in one shot and reduced per x.
    """
    if n_max < 1:
        return np.ones(n_seeds, dtype=np.bool_)
    seed0 = fold64(seed0)
    ys = np.concatenate([np.arange(x) for x in range(1, n_max + 1)])
    xs = np.concatenate(
        [np.full(x, x, dtype=np.int64) for x in range(1, n_max + 1)]
    )
    offsets = np.concatenate(([0], np.cumsum(np.arange(1, n_max + 1))))[:-1]
    out = np.zeros(n_seeds, dtype=np.bool_)
    chunk = max(1, (1 << 22) // max(len(ys), 1))
    thr = _U(min(thr53, (1 << 53)))
    for lo in range(0, n_seeds, chunk):
        hi = min(lo + chunk, n_seeds)
        seeds = np.arange(seed0 + lo, seed0 + hi, dtype=np.uint64)[:, None]
        h = pair_hash53_batch_numpy(seeds, ys[None, :], xs[None, :])
        edge = h < thr
        has_below = np.add.reduceat(edge, offsets, axis=1) > 0
        out[lo:hi] = has_below.all(axis=1)
    return out


def drift_terms_numpy(j_max: int, z_exp, q_log2):
    """Per-vertex sums over set bits: mass sum(q(b)) and numerator
    sum(q(b) * e^Z(b)) for every j in [0, j_max].

    z_exp[b] = exp(log_star(b)) and q_log2 is the log2 of the weight base,
    so q(b) = 2**(q_log2 * b).
    """
    js = np.arange(j_max + 1, dtype=np.int64)
    mass = np.zeros(j_max + 1)
    num = np.zeros(j_max + 1)
    for b in range(int(j_max).bit_length()):
        sel = ((js >> b) & 1).astype(bool)
        qb = 2.0 ** (q_log2 * b)
        mass[sel] += qb
        num[sel] += qb * z_exp[b]
    return mass, num


# ---------------------------------------------------------------------------
# numba variants
# ---------------------------------------------------------------------------

if USE_NUMBA:

    @njit(inline="always")
    def _mix64_nb(z):
        z = z ^ (z >> _U(30))
        z = z * _U(0xBF58476D1CE4E5B9)
        z = z ^ (z >> _U(27))
        z = z * _U(0x94D049BB133111EB)
        return z ^ (z >> _U(31))

    @njit(inline="always")
    def _pair_hash53_nb(seed, a, b):
        h = _mix64_nb(seed + _U(_GAMMA))
        h = _mix64_nb(h ^ (a + _U(_SALT_A)))
        h = _mix64_nb(h ^ (b + _U(_SALT_B)))
        return h >> _U(11)

    @njit
    def _mc_event_b_nb(seed0, n_seeds, n_max, thr53):
        out = np.zeros(n_seeds, dtype=np.bool_)
        for s in range(n_seeds):
            seed = seed0 + _U(s)
            ok = True
            for x in range(1, n_max + 1):
                found = False
                for y in range(x):
                    if _pair_hash53_nb(seed, _U(y), _U(x)) < thr53:
                        found = True
                        break
                if not found:
                    ok = False
                    break
            out[s] = ok
        return out

    def mc_event_b_numba(seed0, n_seeds, n_max, thr53):
        return _mc_event_b_nb(
            _U(fold64(seed0)),
            np.int64(n_seeds),
            np.int64(n_max),
            _U(min(thr53, 1 << 53)),
        )

    @njit
    def _drift_terms_nb(j_max, z_exp, q_log2):
        mass = np.zeros(j_max + 1)
        num = np.zeros(j_max + 1)
        for j in range(j_max + 1):
            v = j
            b = 0
            while v:
                if v & 1:
                    qb = 2.0 ** (q_log2 * b)
                    mass[j] += qb
                    num[j] += qb * z_exp[b]
                v >>= 1
                b += 1
        return mass, num

    def drift_terms_numba(j_max, z_exp, q_log2):
        return _drift_terms_nb(np.int64(j_max), np.asarray(z_exp), q_log2)

    mc_event_b = mc_event_b_numba
    drift_terms = drift_terms_numba
else:  # pragma: no cover - exercised via RADOWALK_NO_NUMBA test env
    mc_event_b = mc_event_b_numpy
    drift_terms = drift_terms_numpy


def log_star_table(n: int, base: float = 2.0) -> np.ndarray:
    """log_star (at-most-one convention) for every integer in [0, n]."""
    out = np.zeros(n + 1, dtype=np.int64)
    log2_base = math.log2(base)
    for x in range(2, n + 1):
        v = math.log2(x) / log2_base
        c = 1
        while v > 1.0:
            v = math.log2(v) / log2_base
            c += 1
        out[x] = c
    return out
