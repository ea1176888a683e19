import math
from fractions import Fraction

import pytest

from radowalk import measure as ms
from radowalk.graph import BinaryRado, RandomGraph

BIN = BinaryRado()
HALF = ms.GeometricWeights(Fraction(1, 2))


# ------------------------------------------------------------------ weights


def test_geometric_q_examples():
    assert HALF.q(3) == Fraction(1, 8)
    assert HALF.q(0) == Fraction(1)


def test_polynomial_q_zeta_two():
    W = ms.PolynomialWeights(2.0)
    v = W.q(0)
    assert abs(v.value - 6.0 / math.pi**2) <= v.error + 1e-12


def test_make_weights_parsing():
    W = ms.make_weights("geometric", delta="7/10")
    assert W.delta == Fraction(7, 10) and W.exact
    Wf = ms.make_weights("geometric", delta="7/10", exact=False)
    assert isinstance(Wf.delta, float)


# ------------------------------------------------------- neighborhood mass


def test_closed_form_odd_series():
    # neighbors of 0 are the odd numbers; with Q = delta^j the mass is
    # delta/(1 - delta^2), which is 2/3 at delta = 1/2
    m = ms.q_neighborhood(BIN, HALF, 0, "closed-form")
    assert m.exact() == Fraction(2, 3)
    # in the 2^-(j+1) display normalization this is the expected 1/3
    assert m.exact() / 2 == Fraction(1, 3)


def test_closed_form_matches_truncation():
    for x in range(0, 101):
        closed = ms.q_neighborhood(BIN, HALF, x, "closed-form")
        trunc = ms.q_neighborhood(BIN, HALF, x, "truncated", cap=400)
        lo, hi = trunc.bounds()
        if closed.s_exponent <= ms.MAX_EXACT_EXPONENT:
            v = closed.exact()
        else:
            v = closed.below
        assert lo <= v <= hi, x


def test_closed_form_requires_binary_geometric():
    with pytest.raises(ValueError):
        ms.q_neighborhood(RandomGraph(0.5, 1), HALF, 3, "closed-form")
    with pytest.raises(ValueError):
        ms.q_neighborhood(BIN, ms.PolynomialWeights(2.0), 3, "closed-form")


def test_truncated_random_model():
    R = RandomGraph(0.5, 9)
    t = ms.q_neighborhood(R, HALF, 5, "truncated", cap=200)
    lo, hi = t.bounds()
    assert 0 < lo < hi < 2
    assert hi - lo == HALF.tail(200)


def test_neighborhood_float_close_to_exact():
    for x in [0, 1, 2, 7, 12]:
        m = ms.q_neighborhood(BIN, HALF, x, "closed-form")
        assert m.float_value() == pytest.approx(float(m.exact()), rel=1e-12)


# ------------------------------------------------------------- mu, nu


def test_mu_vertex_examples():
    # p(12) = 2, so mu(12) = (1/2)^12 (1/2)^2 = 2^-14
    assert ms.mu_vertex(BIN, HALF, 12) == Fraction(1, 2**14)
    assert ms.mu_vertex(BIN, HALF, 1) == HALF.q(1) * HALF.q(0)
    for x in range(1, 200):
        assert ms.mu_vertex(BIN, HALF, x) <= HALF.q(x)


def test_nu_equals_mu():
    for x in (1, 5, 12, 64):
        assert ms.nu_edge(BIN, HALF, x) == ms.mu_vertex(BIN, HALF, x)


# ---------------------------------------------------------------- sandwich


def test_sandwich_factor_two_exact():
    for x in range(1, 2**12 + 1):
        r = ms.check_neighborhood_sandwich(BIN, HALF, x)
        assert r["lower_ok"] and r["upper_ok"], x


@pytest.mark.parametrize("delta", ["3/10", "1/2", "7/10", "9/10"])
def test_sandwich_general_delta(delta):
    W = ms.GeometricWeights(Fraction(delta))
    for x in range(1, 2**10 + 1):
        r = ms.check_neighborhood_sandwich(BIN, W, x)
        assert r["lower_ok"] and r["upper_ok"], (delta, x)


# -------------------------------------------------------------- stationary


def test_stationary_z_bounds_tight():
    st = ms.stationary(BIN, HALF, 64)
    width = st.z_upper - st.z_lower
    assert width <= HALF.tail(64) * HALF.total() + Fraction(1, 2**1000)
    # probability intervals bracket a distribution
    lo_sum = sum(st.pi_interval(i)[0] for i in st.weights)
    hi_sum = sum(st.pi_interval(i)[1] for i in st.weights)
    assert lo_sum <= 1 <= hi_sum + st.z_tail / st.z_lower


def test_stationary_nested_intervals():
    widths = []
    for cap in (16, 32, 64):
        st = ms.stationary(BIN, HALF, cap)
        lo, hi = st.pi_interval(3)
        widths.append(hi - lo)
    assert widths[0] >= widths[1] >= widths[2]


def test_stationary_random_model():
    R = RandomGraph(0.5, 5)
    st = ms.stationary(R, ms.GeometricWeights(0.5), 32)
    lo, hi = st.pi_interval(0)
    assert 0 <= lo <= hi <= 1


def test_stationary_rejects_bad_cap():
    with pytest.raises(ValueError):
        ms.stationary(BIN, HALF, 0)
