import itertools
from fractions import Fraction as F

import mpmath
import pytest

from qlattice import harness as H
from qlattice.identities import ParamSet, build, verify
from qlattice.latticesum import CONVERGED, DIVERGENT, ConvergencePolicy
from qlattice.qseries1d import (BALANCED, BILATERAL, VERY_WELL_POISED, WELL_POISED,
                                SeriesSpec, classify, eval_phi, eval_psi, specialize_transform,
                                transform_rhs, verify_8psi8_transform)
from qlattice.scalarfield import NumericMode, Param, Q


def mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def qp(x, q):
    return mpmath.qp(x, q)


def jackson_spec(q, a, b, c, d, n):
    e = a * a * q ** (1 + n) / (b * c * d)
    return SeriesSpec([a, b, c, d, e, Param(1, -n)],
                      [a * q / b, a * q / c, a * q / d, b * c * d / (a * q ** n), a * q ** (1 + n)],
                      q, q, special=a)


def jackson_rhs(q, a, b, c, d, n):
    """Closed form as a Fraction, written out factor by factor."""
    def poch(x, k):
        out = F(1)
        for j in range(k):
            out *= 1 - x * q ** j
        return out
    return (poch(a * q, n) * poch(a * q / (b * c), n) * poch(a * q / (b * d), n)
            * poch(a * q / (c * d), n)) / (poch(a * q / b, n) * poch(a * q / c, n)
                                            * poch(a * q / d, n) * poch(a * q / (b * c * d), n))


def test_series_spec_shape_is_checked():
    with pytest.raises(ValueError):
        SeriesSpec([F(1, 2), F(1, 3)], [], F(1, 2), F(1, 3))
    with pytest.raises(ValueError):
        SeriesSpec([F(1, 2)], [], F(1, 2), F(1, 3), kind=BILATERAL)


def test_upper_parameter_one_leaves_only_the_constant_term():
    spec = SeriesSpec([1, F(2, 3)], [F(1, 5)], F(1, 2), F(1, 3))
    assert eval_phi(spec).value == 1


def test_q_binomial_theorem():
    # a = q^2 makes (a)_k and 1/(q)_k cancel at k < 0, so those terms must be masked
    a, q, z = F(1, 4), F(1, 2), F(1, 3)
    out = eval_phi(SeriesSpec([a], [], q, z), ConvergencePolicy(shell_tol=1e-40, max_shell=120),
                   NumericMode.bigfloat(50))
    assert out.status == CONVERGED
    with mpmath.workdps(50):
        ref = qp(mp(a) * mp(z), mp(q)) / qp(mp(z), mp(q))
        assert abs(mpmath.mpf(str(out.value)) - ref) < mpmath.mpf("1e-38")


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_jackson_terminating_exact(n):
    q, a, b, c, d = F(1, 3), F(2, 5), F(3, 7), F(5, 11), F(4, 9)
    out = eval_phi(jackson_spec(q, a, b, c, d, n))
    assert out.exact
    assert out.value == jackson_rhs(q, a, b, c, d, n)


def test_bailey_6psi6_series():
    q, a, b, c, d, e = F(1, 2), F(1, 5), F(3, 5), F(2, 3), F(4, 7), F(5, 8)
    spec = SeriesSpec([b, c, d, e], [a * q / b, a * q / c, a * q / d, a * q / e], q,
                      a * a * q / (b * c * d * e), kind=BILATERAL, special=a)
    out = eval_psi(spec, ConvergencePolicy(shell_tol=1e-30), NumericMode.bigfloat(50))
    assert out.status == CONVERGED
    with mpmath.workdps(50):
        Q, A, B, C, D, E = map(mp, (q, a, b, c, d, e))
        num = (qp(Q, Q) * qp(A * Q, Q) * qp(Q / A, Q) * qp(A * Q / (B * C), Q)
               * qp(A * Q / (B * D), Q) * qp(A * Q / (B * E), Q) * qp(A * Q / (C * D), Q)
               * qp(A * Q / (C * E), Q) * qp(A * Q / (D * E), Q))
        den = (qp(A * Q / B, Q) * qp(A * Q / C, Q) * qp(A * Q / D, Q) * qp(A * Q / E, Q)
               * qp(Q / B, Q) * qp(Q / C, Q) * qp(Q / D, Q) * qp(Q / E, Q)
               * qp(A * A * Q / (B * C * D * E), Q))
        assert abs(mpmath.mpf(str(out.value)) - num / den) < mpmath.mpf("1e-25") * abs(num / den)


def test_ramanujan_1psi1():
    q, a, b, z = F(1, 2), F(3, 4), F(1, 5), F(1, 2)
    spec = SeriesSpec([a], [b], q, z, kind=BILATERAL)
    out = eval_psi(spec, ConvergencePolicy(shell_tol=1e-30, max_shell=150),
                   NumericMode.bigfloat(50))
    assert out.status == CONVERGED
    with mpmath.workdps(50):
        Q, A, B, Z = map(mp, (q, a, b, z))
        ref = (qp(Q, Q) * qp(B / A, Q) * qp(A * Z, Q) * qp(Q / (A * Z), Q)
               / (qp(B, Q) * qp(Q / A, Q) * qp(Z, Q) * qp(B / (A * Z), Q)))
        assert abs(mpmath.mpf(str(out.value)) - ref) < mpmath.mpf("1e-25") * abs(ref)


def test_growing_terms_are_divergent():
    spec = SeriesSpec([F(3, 4)], [F(1, 5)], F(1, 2), F(3), kind=BILATERAL)
    assert eval_psi(spec, mode=NumericMode.bigfloat(30)).status == DIVERGENT


def test_phi_equals_zero_extended_psi():
    q, a, b, c, d = F(1, 3), F(2, 5), F(3, 7), F(5, 11), F(4, 9)
    spec = jackson_spec(q, a, b, c, d, 2)
    ext = SeriesSpec(spec.upper, spec.lower + (Q,), q, spec.z, kind=BILATERAL,
                     special=spec.special)
    assert eval_phi(spec).value == eval_psi(ext).value


def test_classify_examples():
    q, a, b, c, d = F(1, 3), F(2, 5), F(3, 7), F(5, 11), F(4, 9)
    assert classify(jackson_spec(q, a, b, c, d, 2)) == {BALANCED, WELL_POISED, VERY_WELL_POISED}
    e = F(5, 8)
    six = SeriesSpec([b, c, d, e], [a * q / b, a * q / c, a * q / d, a * q / e], q,
                     a * a * q / (b * c * d * e), kind=BILATERAL, special=a)
    assert classify(six) == {WELL_POISED, VERY_WELL_POISED}
    assert classify(SeriesSpec([F(1, 3), F(2, 7)], [F(3, 5)], q, F(1, 2))) == frozenset()


def test_classify_is_permutation_invariant():
    q, a, b, c, d = F(1, 3), F(2, 5), F(3, 7), F(5, 11), F(4, 9)
    spec = jackson_spec(q, a, b, c, d, 2)
    want = classify(spec)
    for up in itertools.islice(itertools.permutations(spec.upper), 0, 720, 37):
        for low in itertools.islice(itertools.permutations(spec.lower), 0, 120, 23):
            s = SeriesSpec(up, low, q, spec.z, special=spec.special)
            assert classify(s) == want


def test_vwp_factor_seen_in_term_ratio():
    # without `special` the square-root pair must be listed by hand
    q, a = F(1, 4), F(4, 9)
    b, c, d, e = F(3, 7), F(5, 11), F(2, 9), F(5, 8)
    upper = [b, c, d, e]
    lower = [a * q / b, a * q / c, a * q / d, a * q / e]
    z = a * a * q / (b * c * d * e)
    with_special = SeriesSpec(upper, lower, q, z, kind=BILATERAL, special=a)
    plain = SeriesSpec(upper, lower, q, z, kind=BILATERAL)
    from qlattice.qseries1d import series_plan
    from qlattice.scalarfield import QField
    f = QField(NumericMode.rational(), q)
    sp, pp = series_plan(with_special, f), series_plan(plain, f)
    with f:
        for k in range(-3, 4):
            assert sp((k,)) / pp((k,)) == (1 - a * q ** (2 * k)) / (1 - a)


@pytest.mark.parametrize("seed", range(3))
def test_transform_passes_on_samples(seed):
    p = H.sample_params("mjackson_8psi8_transform", 1, seed)
    rec = verify_8psi8_transform(p)
    assert rec.status == "Pass", rec.note
    assert rec.residual <= 1e-15


def test_specialisation_kills_first_prefactor_and_matches_entry_3():
    base = H.sample_params("schlosser_8psi8", 1, 3)
    sp = specialize_transform(base, base.k, base.M)
    value, detail = transform_rhs(sp, mode=NumericMode.bigfloat(50))
    assert detail["prefactor_orders"][0] > 0 and detail["series"][0] is None
    ref = build("schlosser_8psi8", base, NumericMode.bigfloat(50), check=False).rhs
    assert abs(value - ref) <= 1e-15 * max(abs(ref), 1)


def test_g_equal_aq_over_f_reduces_to_bailey():
    q, a, b, c, d, e, f = F(1, 2), F(1, 3), F(3, 5), F(2, 3), F(4, 7), F(5, 8), F(3, 4)
    p = ParamSet(q=q, r=1, a=a, b=b, c=c, d=d, e=e, f=f, g=Param(a / f, 1))
    rec = verify_8psi8_transform(p)
    assert rec.status == "Pass"
    six = verify("bailey_6psi6", ParamSet(q=q, r=1, a=a, b=b, c=c, d=d, e=e))
    assert six.status == "Pass"
    assert abs(rec.lhs.value - six.rhs) <= 1e-15 * abs(six.rhs)
    assert abs(rec.rhs - six.rhs) <= 1e-15 * abs(six.rhs)


def test_transform_rejects_modulus_violation():
    p = ParamSet(q=F(1, 2), r=1, a=F(9, 10), b=F(1, 5), c=F(1, 5), d=F(1, 5), e=F(1, 5),
                 f=F(1, 5), g=F(1, 5))
    rec = verify_8psi8_transform(p)
    assert rec.status == "Inconclusive" and "modulus" in rec.note
