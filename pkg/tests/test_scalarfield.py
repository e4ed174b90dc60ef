import math
from fractions import Fraction as F

import gmpy2
import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from qlattice.scalarfield import (NumericMode, Param, Q, QField, is_pole, qpoch, qpoch_inf,
                                  qpoch_multi, qpoch_ratio)


def poch_oracle(a, q, k):
    """Plain Fraction transcription of the definition, None for a pole."""
    a, q = F(a), F(q)
    out = F(1)
    if k >= 0:
        for j in range(k):
            out *= 1 - a * q ** j
        return out
    for j in range(1, -k + 1):
        d = 1 - a / q ** j
        if d == 0:
            return None
        out /= d
    return out


def inf_oracle(a, q, dps=60):
    with mpmath.workdps(dps):
        return mpmath.qp(mpmath.mpf(a.numerator) / a.denominator,
                         mpmath.mpf(q.numerator) / q.denominator)


def close(x, ref, tol):
    """``|x - ref| <= tol`` evaluated at 60 digits."""
    with mpmath.workdps(60):
        return abs(mpmath.mpf(str(x)) - ref) <= mpmath.mpf(tol)


# -- examples --------------------------------------------------------------------


@pytest.mark.parametrize("a,q,k,want", [
    (F(3, 10), F(1, 2), 0, F(1)),
    (F(3, 10), F(1, 2), 1, F(7, 10)),
    (F(1, 4), F(1, 2), -1, F(2)),
])
def test_qpoch_examples(a, q, k, want):
    assert qpoch(a, q, k) == want


def test_qpoch_pole_example():
    assert is_pole(qpoch(F(1, 2), F(1, 2), -1))


def test_qpoch_exact_zero_example():
    v = qpoch(F(4), F(1, 2), 3)
    assert not is_pole(v) and v == 0


def test_qpoch_inf_trivial():
    assert qpoch_inf(0, F(1, 3), 1e-30) == 1
    assert qpoch_inf(1, F(1, 3), 1e-30) == 0


def test_qpoch_inf_against_mpmath():
    got = qpoch_inf(F(1, 2), F(1, 2), 1e-25)
    ref = inf_oracle(F(1, 2), F(1, 2))
    assert close(got, ref, "1e-25")
    assert str(got).startswith("0.2887880950866024")


def test_qpoch_multi_examples():
    assert qpoch_multi([], F(1, 2), 3) == 1
    assert qpoch_multi([F(3, 10), F(1, 5)], F(1, 2), 1) == F(14, 25)
    assert is_pole(qpoch_multi([F(1, 4), F(1, 2)], F(1, 2), -1))


def test_qpoch_ratio_examples():
    a = F(2, 7)
    for k in (-3, 0, 4):
        assert qpoch_ratio([a], [a], F(1, 3), k) == 1
    assert qpoch_ratio([Param(1, -3)], [], F(1, 2), 5) == 0
    got = qpoch_ratio([F(1, 2)], [F(1, 4)], F(1, 2), math.inf, tail_tol=1e-25)
    ref = inf_oracle(F(1, 2), F(1, 2)) / inf_oracle(F(1, 4), F(1, 2))
    assert close(got, ref, "2e-25")


def test_qpoch_ratio_cancels_zero_against_pole():
    # (q^{-2})_3 vanishes and 1/(q^{-2})_3 poles; the ratio with itself is 1
    # and a ratio of two vanishing products keeps only the surviving factors.
    q = F(1, 3)
    assert qpoch_ratio([Param(1, -2)], [Param(1, -2)], q, 3) == 1
    got = qpoch_ratio([Param(1, -2), F(1, 5)], [Param(1, -2)], q, 3)
    assert got == poch_oracle(F(1, 5), q, 3)


def test_param_reduces_to_value():
    q = F(2, 5)
    f = QField(NumericMode.rational(), q)
    x = Param(F(3, 7), 2) * Q / Param(F(1, 2), -1)
    with f:
        assert f.value(x) == gmpy2.mpq(6, 7) * gmpy2.mpq(2, 5) ** 4


# -- properties ------------------------------------------------------------------

small = st.fractions(min_value=F(-3), max_value=F(3), max_denominator=40)
bases = st.sampled_from([F(1, 2), F(1, 3), F(2, 7), F(3, 8), F(2, 5)])


@settings(max_examples=300, deadline=None)
@given(a=small, q=bases, k=st.integers(-6, 6))
def test_matches_oracle(a, q, k):
    got = qpoch(a, q, k)
    want = poch_oracle(a, q, k)
    if want is None:
        assert is_pole(got)
    else:
        assert got == want


@settings(max_examples=300, deadline=None)
@given(a=small, q=bases, k=st.integers(-6, 6))
def test_recurrence(a, q, k):
    lhs, rhs = qpoch(a, q, k + 1), qpoch(a, q, k)
    if is_pole(lhs) or is_pole(rhs):
        return
    assert lhs == rhs * (1 - a * q ** k)


@settings(max_examples=300, deadline=None)
@given(a=small, q=bases, k=st.integers(-5, 5), m=st.integers(-5, 5))
def test_splitting(a, q, k, m):
    whole, left, right = qpoch(a, q, k + m), qpoch(a, q, k), qpoch(a * q ** k, q, m)
    if any(is_pole(v) for v in (whole, left, right)):
        return
    assert whole == left * right


@pytest.mark.parametrize("k", range(-3, 4))
def test_infinite_split(k):
    a, q, tol = F(3, 11), F(2, 5), 1e-30
    mode = NumericMode.bigfloat(50)
    with mode.context():
        whole = qpoch_inf(a, q, tol, mode)
        part = qpoch(a, q, k, mode) * qpoch_inf(a * q ** k, q, tol, mode)
        assert abs(whole - part) <= 2 * tol


@pytest.mark.parametrize("a,q,k", [(F(3, 7), F(1, 3), 5), (F(-2, 3), F(2, 5), -4),
                                   (F(5, 4), F(1, 2), 3)])
def test_modes_agree(a, q, k):
    exact = qpoch(a, q, k)
    mode = NumericMode.bigfloat(60)
    with mode.context():
        approx = qpoch(a, q, k, mode)
        assert abs(approx - mode.convert(exact)) <= gmpy2.mpfr("1e-55") * max(1, abs(exact))


def test_rational_mode_rejects_infinite_products():
    with pytest.raises(TypeError):
        qpoch_inf(F(1, 2), F(1, 2), 1e-20, NumericMode.rational())
