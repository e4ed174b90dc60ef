"""One-dimensional basic hypergeometric series: evaluation and classification.

A :class:`SeriesSpec` describes an ``s phi s-1`` (unilateral) or ``s psi s``
(bilateral) series by its parameter lists.  Parameters are exact rationals
or :class:`~qlattice.scalarfield.Param` monomials ``c q^e``, so a value such
as ``q^{-3}`` is recognised as an exact terminating parameter.

Very-well-poised series carry the pair ``q sqrt(a), -q sqrt(a)`` over
``sqrt(a), -sqrt(a)``.  Rather than requiring ``sqrt(a)`` to be rational,
a spec may name the special parameter ``a`` in ``special``; the pair is
then left out of the lists and the summand is multiplied by
``(1 - a q^{2k}) / (1 - a)``, which is what the pair contributes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpfr

from .latticesum import (CONVERGED, INCONCLUSIVE, ConvergencePolicy, SumOutcome, Summand,
                         detect_natural_truncation, sum_bilateral, sum_finite)
from .scalarfield import NumericMode, Param, Q, QField
from .terms import TermBuilder, variables

__all__ = ["SeriesSpec", "UNILATERAL", "BILATERAL", "BALANCED", "WELL_POISED",
           "VERY_WELL_POISED", "eval_phi", "eval_psi", "classify", "series_plan",
           "verify_8psi8_transform", "transform_rhs", "specialize_transform"]

UNILATERAL = "Unilateral"
BILATERAL = "Bilateral"
BALANCED = "Balanced"
WELL_POISED = "WellPoised"
VERY_WELL_POISED = "VeryWellPoised"


def _p(x) -> Param:
    if isinstance(x, Param):
        return x
    return Param(Fraction(x))


@dataclass(frozen=True)
class SeriesSpec:
    """Parameter lists of one series.

    For ``Unilateral`` the implicit ``(q)_k`` is not listed, so
    ``len(lower) == len(upper) - 1``; for ``Bilateral`` the lists have equal
    length.  Both counts exclude the hidden square-root pair implied by
    ``special``.
    """

    upper: tuple
    lower: tuple
    q: Fraction
    z: object
    kind: str = UNILATERAL
    special: object = None

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(_p(x) for x in self.upper))
        object.__setattr__(self, "lower", tuple(_p(x) for x in self.lower))
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "z", _p(self.z))
        if self.special is not None:
            object.__setattr__(self, "special", _p(self.special))
        if self.kind not in (UNILATERAL, BILATERAL):
            raise ValueError(f"kind must be {UNILATERAL!r} or {BILATERAL!r}")
        want = len(self.upper) - (1 if self.kind == UNILATERAL else 0)
        if len(self.lower) != want:
            raise ValueError(f"{self.kind} series with {len(self.upper)} upper parameters "
                             f"needs {want} lower ones, got {len(self.lower)}")

    @property
    def terminating_hint(self) -> bool:
        """True when some upper parameter is ``q^{-n}`` with ``n >= 0``."""
        field = QField(NumericMode.rational(), self.q)
        return any(_neg_q_power(field, x) for x in self.upper)


def _neg_q_power(field, x) -> bool:
    xn = field.normalize(x)
    return xn.coef == 1 and xn.qexp <= 0


def _default_mode(spec: SeriesSpec) -> NumericMode:
    return NumericMode.rational() if spec.terminating_hint else NumericMode.bigfloat()


def series_plan(spec: SeriesSpec, field: QField):
    """Summand plan of ``spec`` over one integer slot."""
    with field:
        tb = TermBuilder(field, 1)
        k = variables(0, 1)[0]
        if spec.special is not None:
            tb.vwp(spec.special, k)
        tb.pochs(spec.upper, k)
        if spec.kind == UNILATERAL:
            tb.poch(Q, k, -1)
        tb.pochs(spec.lower, k, -1)
        tb.power(spec.z, k)
        return tb.build()


class _HalfLine(Summand):
    """Summand forced to zero at negative indices.

    ``1/(q)_k`` alone is not enough: an upper parameter ``q^m`` with
    ``m >= 1`` puts a pole at the same ``k < 0`` and the two cancel.
    """

    def evaluate(self, points):
        pts = np.asarray(points, dtype=np.int64).reshape(-1, 1)
        units, orders = self.plan.evaluate(pts)
        for i in np.flatnonzero(pts[:, 0] < 0):
            units[i], orders[i] = self.field.one, 1
        return units, orders

    def __call__(self, k):
        if k[0] < 0:
            return 0
        return self.plan(k)


def _evaluate(spec, policy, mode, probe_radius):
    mode = mode or _default_mode(spec)
    field = QField(mode, spec.q)
    plan = series_plan(spec, field)
    summand = _HalfLine(plan) if spec.kind == UNILATERAL else Summand(plan)
    with field:
        support = detect_natural_truncation(summand, probe_radius)
        if support is not None:
            out = sum_finite(summand, support)
            out.note = f"natural truncation to {support}"
            return out
        if mode.exact:
            raise TypeError("a non-terminating series needs BigFloat mode")
        return sum_bilateral(summand, policy or ConvergencePolicy())


def eval_phi(spec: SeriesSpec, policy: ConvergencePolicy | None = None,
             mode: NumericMode | None = None, probe_radius: int = 8) -> SumOutcome:
    """Sum a unilateral series.

    The bilateral engine is reused with the terms at ``k < 0`` set to zero;
    terminating specs are summed exactly.
    """
    if spec.kind != UNILATERAL:
        raise ValueError("eval_phi needs a unilateral spec")
    return _evaluate(spec, policy, mode, probe_radius)


def eval_psi(spec: SeriesSpec, policy: ConvergencePolicy | None = None,
             mode: NumericMode | None = None, probe_radius: int = 8) -> SumOutcome:
    """Sum a bilateral series (natural truncation is tried first)."""
    if spec.kind != BILATERAL:
        raise ValueError("eval_psi needs a bilateral spec")
    return _evaluate(spec, policy, mode, probe_radius)


# -- classification ---------------------------------------------------------------


def _value(x: Param, q: Fraction):
    return Fraction(x.coef) * q ** x.qexp


def _paired(up, lo, target, tol):
    """Whether ``lo`` is a rearrangement of ``target / u`` over ``u`` in ``up``."""
    if len(up) != len(lo):
        return False
    free = list(lo)
    for u in up:
        for j, b in enumerate(free):
            if _close(u * b, target, tol):
                del free[j]
                break
        else:
            return False
    return True


def _has_root_pair(up, square, tol):
    return any(_close(u * u, square, tol) and any(_close(v, -u, tol) for v in up)
               for u in up if u != 0)


def _close(u, v, tol):
    if tol is None:
        return u == v
    return abs(float(u) - float(v)) <= tol * max(1.0, abs(float(u)), abs(float(v)))


def classify(spec: SeriesSpec, mode: NumericMode | None = None) -> frozenset:
    """Structural labels of ``spec``.

    Balanced requires both the product condition and argument ``q``.
    Checks are exact for rational parameters; in BigFloat mode they use a
    relative tolerance of 1e-30.
    """
    mode = mode or NumericMode.rational()
    tol = None if mode.exact else 1e-30
    q = spec.q
    up = [_value(x, q) for x in spec.upper]
    lo = [_value(x, q) for x in spec.lower]
    if spec.special is not None:
        a = _value(spec.special, q)
        # the hidden pair gives -q^2 a upstairs and -a downstairs
        up_prod, lo_prod = -q * q * a, -a
    else:
        up_prod = lo_prod = Fraction(1)
    for v in up:
        up_prod *= v
    for v in lo:
        lo_prod *= v
    labels = set()
    zq = _close(_value(spec.z, q), q, tol)
    shift = q if spec.kind == UNILATERAL else q * q
    if zq and _close(lo_prod, up_prod * shift, tol):
        labels.add(BALANCED)
    if spec.special is not None:
        a = _value(spec.special, q)
        rest = list(up)
        if spec.kind == UNILATERAL:
            hit = [i for i, u in enumerate(rest) if _close(u, a, tol)]
            if not hit:
                return frozenset(labels)
            del rest[hit[0]]
        if _paired(rest, lo, a * q, tol):
            labels.update((WELL_POISED, VERY_WELL_POISED))
        return frozenset(labels)
    if spec.kind == UNILATERAL:
        # the numerator parameter paired with the implicit (q;q)_k plays a_0
        for i, a0 in enumerate(up):
            rest = up[:i] + up[i + 1:]
            if _paired(rest, lo, a0 * q, tol):
                labels.add(WELL_POISED)
                if _has_root_pair(rest, q * q * a0, tol):
                    labels.add(VERY_WELL_POISED)
                    break
    elif up:
        for b in lo:
            target = up[0] * b
            if _paired(up, lo, target, tol):
                labels.add(WELL_POISED)
                if _has_root_pair(up, q * target, tol):
                    labels.add(VERY_WELL_POISED)
                    break
    return frozenset(labels)


# -- the 8psi8 transformation ----------------------------------------------------


def _transform_parts(p, field, policy):
    """LHS outcome, the two prefactors (unit, order) and the two series outcomes."""
    from .identities import builders as B
    with field:
        tb = TermBuilder(field, 1)
        B.mjackson_lhs(tb, p)
        lhs_plan = tb.build()
        pre = []
        for num, den in B.transform_prefactors(p):
            pb = TermBuilder(field, 0).inf(num, den)
            plan = pb.build()
            pre.append((plan.unit, plan.order))
        series = []
        for A, uppers, lowers, z in B.transform_series(p):
            sb = TermBuilder(field, 1)
            B.vwp_8phi7(sb, A, uppers, lowers, z)
            series.append(_HalfLine(sb.build()))
    return lhs_plan, pre, series


def _sum(summand, field, policy):
    with field:
        support = detect_natural_truncation(summand, 8)
        if support is not None:
            out = sum_finite(summand, support)
            out.note = f"natural truncation to {support}"
            return out
        return sum_bilateral(summand, policy)


def transform_rhs(p, policy: ConvergencePolicy | None = None, mode: NumericMode | None = None,
                  tail_tol=1e-60):
    """Right-hand side of the 8psi8 transformation with its pieces.

    Returns ``(value, detail)``.  A prefactor that vanishes exactly drops
    its series without evaluating it; ``detail`` records the prefactor
    orders and each series outcome.
    """
    mode = mode or NumericMode.bigfloat()
    policy = policy or ConvergencePolicy(shell_tol=1e-20)
    field = QField(mode, p.q, tail_tol=None if mode.exact else mpfr(tail_tol))
    _, pre, series = _transform_parts(p, field, policy)
    total = field.zero
    detail = {"prefactor_orders": [o for _, o in pre], "series": []}
    with field:
        for (u, o), s in zip(pre, series):
            if o > 0:
                detail["series"].append(None)
                continue
            if o < 0:
                detail["series"].append("pole")
                return None, detail
            out = _sum(s, field, policy)
            detail["series"].append(out)
            if out.status != CONVERGED:
                return None, detail
            total = total + u * out.value
    return total, detail


def specialize_transform(p, k: int, M: int):
    """The substitution that turns the transformation into the balanced 8psi8.

    ``d -> d q^k``, ``e -> a q^{-k}/c``, ``f -> a q^{1+M}/b`` and
    ``g -> a q^{-M}/d`` (original ``d``).  The first prefactor then
    contains ``(aq/bf)_inf = (q^{-M})_inf`` and vanishes exactly.
    """
    a, b, c, d = (_p(x) for x in (p.a, p.b, p.c, p.d))
    return p.with_(d=d * Q ** k, e=a * Q ** -k / c, f=a * Q ** (1 + M) / b,
                   g=a * Q ** -M / d)


def verify_8psi8_transform(params, policy: ConvergencePolicy | None = None,
                           mode: NumericMode | None = None, tol=1e-15):
    """Compare the 8psi8 with the two-term 8phi7 expression."""
    from .identities.registry import VerificationRecord, decide, get
    t0 = time.perf_counter()
    spec = get("mjackson_8psi8_transform")
    mode = mode or NumericMode.bigfloat()
    policy = policy or ConvergencePolicy(shell_tol=tol / 10)

    def record(lhs, rhs, res, status, note=""):
        return VerificationRecord(spec.id, 1, None, params.as_dict(), params.digest(), lhs,
                                  rhs, res, status, time.perf_counter() - t0, note)

    from .identities.registry import ConstraintError
    try:
        spec.check(params)
    except ConstraintError as exc:
        return record(None, None, None, INCONCLUSIVE, f"constraint violated: {exc}")
    field = QField(mode, params.q, tail_tol=mpfr(tol / 100))
    lhs_plan, _, _ = _transform_parts(params, field, policy)
    lhs = _sum(Summand(lhs_plan), field, policy)
    rhs, detail = transform_rhs(params, policy, mode, tail_tol=tol / 100)
    if rhs is None:
        return record(lhs, None, None, INCONCLUSIVE, f"right-hand side not evaluated: {detail}")
    with field:
        status, res = decide(lhs, rhs, tol, mode.exact)
    note = lhs.note
    if any(o > 0 for o in detail["prefactor_orders"]):
        note = (note + "; " if note else "") + "a prefactor vanishes exactly"
    return record(lhs, rhs, res, status, note)
