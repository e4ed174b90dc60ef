from fractions import Fraction as F

import gmpy2
import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlattice.identities import ParamSet, build
from qlattice.latticesum import (CONVERGED, DIVERGENT, INCONCLUSIVE, Bilateral, Box,
                                 ConvergencePolicy, FunctionSummand, MultiIndex, Simplex,
                                 Window, detect_natural_truncation, shell_points, sum_bilateral,
                                 sum_finite)
from qlattice.scalarfield import POLE, NumericMode


def test_multiindex_derived():
    k = MultiIndex((2, -1, 3))
    assert k.abs == 4 and k.e2 == 2 * -1 + 2 * 3 + -1 * 3 and k.r == 3
    with pytest.raises(ValueError):
        MultiIndex(())


def test_supports_enumerate_their_sets():
    pts = {tuple(p) for p in Simplex(3).points(2)}
    assert pts == {(i, j) for i in range(4) for j in range(4) if i + j <= 3}
    assert len(Box((1, 2)).points()) == 6
    assert len(Window(2).points(3)) == 125


def test_policy_invariant():
    with pytest.raises(ValueError):
        ConvergencePolicy(min_shells=5, max_shell=3)


def test_delta_on_simplex():
    s = FunctionSummand(lambda k: 1 if k == (0, 0) else 0, 2)
    out = sum_finite(s, Simplex(3))
    assert out.value == 1 and out.status == CONVERGED


def test_constant_on_box():
    assert sum_finite(FunctionSummand(lambda k: 1, 2), Box((1, 2))).value == 6


def test_pole_inside_finite_support():
    s = FunctionSummand(lambda k: POLE if k[0] == 1 else 1, 1)
    out = sum_finite(s, Box((3,)))
    assert out.status == INCONCLUSIVE and out.pole_hit.entries == (1,)


def test_jackson_n1_against_hand_expansion():
    q, a, b, c, d = F(1, 2), F(1, 3), F(1, 5), F(1, 7), F(1, 11)
    p = ParamSet(q=q, r=1, a=a, b=b, c=c, d=d, M=1)
    built = build("jackson_8phi7", p, NumericMode.rational())
    out = sum_finite(built.summand, built.support)
    e = a * a * q * q / (b * c * d)
    t1 = ((1 - a * q * q) / (1 - a) * (1 - a) * (1 - b) * (1 - c) * (1 - d) * (1 - e)
          * (1 - 1 / q) / ((1 - q) * (1 - a * q / b) * (1 - a * q / c) * (1 - a * q / d)
                           * (1 - b * c * d / (a * q)) * (1 - a * q * q)) * q)
    rhs = ((1 - a * q) * (1 - a * q / (b * c)) * (1 - a * q / (b * d)) * (1 - a * q / (c * d))
           / ((1 - a * q / b) * (1 - a * q / c) * (1 - a * q / d) * (1 - a * q / (b * c * d))))
    assert out.value == 1 + t1 == rhs
    assert built.rhs == rhs


def test_geometric_series():
    z = F(1, 3)
    s = FunctionSummand(lambda k: z ** k[0] if k[0] >= 0 else 0, 1, NumericMode.bigfloat(40))
    out = sum_bilateral(s, ConvergencePolicy(shell_tol=1e-20))
    assert out.status == CONVERGED
    assert abs(out.value - gmpy2.mpfr(1.5)) < 1e-19


def test_diagonal_growth_is_divergent():
    s = FunctionSummand(lambda k: F(2) ** (k[0] * k[1]) if k[0] == k[1] else 0, 2)
    out = sum_bilateral(s)
    assert out.status == DIVERGENT
    assert out.shells_used <= 20


def test_max_shell_exhaustion_is_inconclusive():
    s = FunctionSummand(lambda k: F(9, 10) ** abs(k[0]), 1, NumericMode.bigfloat(30))
    out = sum_bilateral(s, ConvergencePolicy(max_shell=5))
    assert out.status == INCONCLUSIVE


def _bailey_reference(q, a, b, c, d, e):
    with mpmath.workdps(60):
        Q, A, B, C, D, E = (mpmath.mpf(x.numerator) / x.denominator for x in (q, a, b, c, d, e))
        qp = lambda x: mpmath.qp(x, Q)  # noqa: E731
        num = (qp(Q) * qp(A * Q) * qp(Q / A) * qp(A * Q / (B * C)) * qp(A * Q / (B * D))
               * qp(A * Q / (B * E)) * qp(A * Q / (C * D)) * qp(A * Q / (C * E))
               * qp(A * Q / (D * E)))
        den = (qp(A * Q / B) * qp(A * Q / C) * qp(A * Q / D) * qp(A * Q / E) * qp(Q / B)
               * qp(Q / C) * qp(Q / D) * qp(Q / E) * qp(A * A * Q / (B * C * D * E)))
        return num / den


@pytest.mark.parametrize("a,b,c,d,e", [
    # q/a = q^{-1} here, so the product side vanishes exactly
    (F(1, 4), F(3, 5), F(3, 5), F(3, 5), F(3, 5)),
    (F(1, 5), F(3, 5), F(2, 3), F(4, 7), F(5, 8)),
])
def test_bailey_6psi6_against_mpmath_products(a, b, c, d, e):
    q = F(1, 2)
    p = ParamSet(q=q, r=1, a=a, b=b, c=c, d=d, e=e)
    built = build("bailey_6psi6", p, NumericMode.bigfloat(50), tail_tol=1e-30)
    with built.field:
        out = sum_bilateral(built.summand, ConvergencePolicy(shell_tol=1e-25))
    assert out.status == CONVERGED
    ref = _bailey_reference(q, a, b, c, d, e)
    with mpmath.workdps(60):
        assert abs(mpmath.mpf(str(out.value)) - ref) <= mpmath.mpf("1e-22") * max(abs(ref), 1)


def test_natural_truncation_examples():
    jp = ParamSet(q=F(1, 3), r=1, a=F(2, 5), b=F(3, 7), c=F(4, 9), d=F(5, 11), M=3)
    built = build("jackson_8phi7", jp, NumericMode.rational())
    with built.field:
        assert detect_natural_truncation(built.summand) == Simplex(3)
    bp = ParamSet(q=F(1, 2), r=1, a=F(1, 4), b=F(3, 5), c=F(3, 5), d=F(3, 5), e=F(3, 5))
    built = build("bailey_6psi6", bp, NumericMode.bigfloat(30))
    with built.field:
        assert detect_natural_truncation(built.summand) is None


def test_compact_support_bilateral_matches_finite():
    s = FunctionSummand(lambda k: F(k[0] + 2 * k[1] + 1) if 0 <= k[0] <= 2 and 0 <= k[1] <= 1
                        else 0, 2)
    support = detect_natural_truncation(s)
    assert support is not None
    assert sum_finite(s, support).value == sum_bilateral(s).value == sum(
        F(i + 2 * j + 1) for i in range(3) for j in range(2))


@settings(max_examples=30, deadline=None)
@given(r=st.integers(1, 3), N=st.integers(0, 4), seed=st.integers(0, 10 ** 6))
def test_shell_partition(r, N, seed):
    rng = np.random.default_rng(seed)
    table = {}

    def f(k):
        if k not in table:
            table[k] = F(int(rng.integers(-9, 10)), int(rng.integers(1, 9)))
        return table[k]

    s = FunctionSummand(f, r)
    window = sum_finite(s, Window(N)).value
    shells = sum(sum_finite(s, Box(tuple(p), tuple(p))).value
                 for j in range(N + 1) for p in shell_points(r, j))
    assert window == shells


@settings(max_examples=20, deadline=None)
@given(r=st.integers(1, 3), M=st.integers(0, 4), seed=st.integers(0, 10 ** 6))
def test_finite_sum_is_order_independent(r, M, seed):
    rng = np.random.default_rng(seed)
    pts = [tuple(p) for p in Simplex(M).points(r)]
    vals = {p: F(int(rng.integers(-50, 50)), int(rng.integers(1, 30))) for p in pts}
    out = sum_finite(FunctionSummand(lambda k: vals[k], r), Simplex(M))
    shuffled = list(vals.values())
    rng.shuffle(shuffled)
    assert out.value == sum(shuffled, F(0))


def test_shrinking_tolerance_never_flips_to_divergent():
    s = FunctionSummand(lambda k: F(2, 3) ** abs(k[0]) * F(1, 2) ** abs(k[1]), 2,
                        NumericMode.bigfloat(40))
    verdicts = [sum_bilateral(s, ConvergencePolicy(shell_tol=t)).status
                for t in (1e-6, 1e-10, 1e-14, 1e-20)]
    assert DIVERGENT not in verdicts
    assert verdicts[0] == CONVERGED


def test_bilateral_support_marker():
    assert Bilateral() == Bilateral()
