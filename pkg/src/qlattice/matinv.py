"""Multilateral matrix inverses and the inverse relations built on them.

Four pairs ``(F, G)`` of Z^r-indexed matrices are encoded here:

* ``bmi``   one-dimensional inverse attached to Bailey's 6psi6 (r = 1 only);
* ``armi``  the first A_r inverse;
* ``arvmi`` the second A_r inverse;
* ``crmi``  the C_r/D_r inverse, stated as a left inverse only;
* ``crmi_printed``  the same pair without the ``i<j`` factor in ``f``.

Entries are assembled with :class:`~qlattice.terms.TermBuilder`, so a whole
orthogonality summand ``f_{nk} g_{kl}`` is a single product plan over the
slots ``(n, k, l)``.  Vanishing factors and poles then cancel inside one
term instead of meeting as ``0 * inf`` between two evaluations.
"""
from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable

import gmpy2

from .identities.structure import P, ParamSet, add_ar, add_pair_vwp, prod
from .latticesum import (CONVERGED, DIVERGENT, INCONCLUSIVE, ConvergencePolicy,
                         Summand, detect_natural_truncation, sum_bilateral, sum_finite)
from .scalarfield import NumericMode, Param, Q, QField, is_pole, to_mpq
from .terms import TermBuilder, binom2, total, variables

__all__ = ["InversePair", "PAIRS", "pair_ids", "get_pair", "f_entry", "g_entry",
           "check_orthogonality", "OrthogonalityReport", "CellResult",
           "ProofSequences", "PROOF_SEQUENCES", "apply_inverse_relation",
           "RelationReport", "milne_lemma_check", "LEFT", "RIGHT"]

LEFT = "Left"
RIGHT = "Right"
TWO_SIDED = "TwoSided"
LEFT_ONLY = "LeftOnly"


def _vecs(p: ParamSet):
    xs = [P(x) for x in p.xs] if p.xs else [Param(1)] * p.r
    return xs, [P(c) for c in p.cs]


def _diff_cx(tb, cs, xs, n):
    """``prod_{i<j} (c_i q^{n_i}/x_i - c_j q^{n_j}/x_j) / (c_i/x_i - c_j/x_j)``."""
    r = len(xs)
    for i in range(r):
        for j in range(i + 1, r):
            tb.diff(cs[i] / xs[i], n[i], cs[j] / xs[j], n[j])


def _inf_cx(tb, cs, xs):
    """``prod_{ij} (q c_j x_i/x_j, q x_i/c_i x_j)_inf / (q c_j x_i/c_i x_j, q x_i/x_j)_inf``."""
    r = len(xs)
    for i in range(r):
        for j in range(r):
            tb.inf([Q * cs[j] * xs[i] / xs[j], Q * xs[i] / (cs[i] * xs[j])],
                   [Q * cs[j] * xs[i] / (cs[i] * xs[j]), Q * xs[i] / xs[j]])


# -- bmi -----------------------------------------------------------------------


def _bmi_f(tb, p, n, k):
    a, b, c = P(p.a), P(p.b), P(p.c)
    n, k = n[0], k[0]
    tb.inf([a * Q / b, b * Q / a, a * Q / c, c * Q / a, b * Q, Q / b, c * Q, Q / c],
           [Q, Q, a * Q, Q / a, a * Q / (b * c), b * c * Q / a, c * Q / b, b * Q / c])
    tb.vwp(b * c / a, n)
    tb.ratio([b], [c * Q], n + k).ratio([a / c], [a * Q / b], k - n)


def _bmi_g(tb, p, k, l):
    a, b, c = P(p.a), P(p.b), P(p.c)
    k, l = k[0], l[0]
    tb.vwp(a, k)
    tb.ratio([c], [b * Q], k + l).ratio([a / b], [a * Q / c], k - l)
    tb.qpow(k - l)


# -- armi ----------------------------------------------------------------------


def _armi_f(tb, p, n, k):
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r, C = p.r, prod(cs)
    N, K = total(n), total(k)
    tb.inf([b * Q, Q / b], [b * Q / C, C * Q / b])
    _inf_cx(tb, cs, xs)
    for c, x in zip(cs, xs):
        tb.inf([a * x * Q / b, b * Q / (a * x), a * x * Q / c, c * Q / (a * x)],
               [a * x * Q / (b * c), b * c * Q / (a * x), a * x * Q, Q / (a * x)])
    _diff_cx(tb, cs, xs, n)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.factor(b * c / (a * x), n[i] + N).factor(b * c / (a * x), 0, -1)
    tb.poch(b, N + K)
    for i in range(r):
        for j in range(r):
            tb.poch(Q * cs[j] * xs[i] / xs[j], n[j] + k[i], -1)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(a * x / c, K - n[i]).poch(a * x * Q / b, k[i] - N, -1)


def _armi_g(tb, p, k, l):
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r = p.r
    K, L = total(k), total(l)
    add_ar(tb, xs, k)
    for i, x in enumerate(xs):
        tb.factor(a * x, k[i] + K).factor(a * x, 0, -1)
    tb.poch(b * Q, K + L, -1)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], k[i] + l[j])
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(a * x / b, k[i] - L).poch(a * x * Q / c, K - l[i], -1)
    tb.qpow(K - r * L)


# -- arvmi ---------------------------------------------------------------------


def _arvmi_f(tb, p, n, k):
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r, C = p.r, prod(cs)
    N, K = total(n), total(k)
    tb.inf([a * Q / C, C * Q / a], [a * Q, Q / a])
    _inf_cx(tb, cs, xs)
    for c, x in zip(cs, xs):
        tb.inf([a * x * Q / b, b * Q / (a * x), b * c * Q / (C * x), C * x * Q / (b * c)],
               [a * x * Q / (b * c), b * c * Q / (a * x), C * x * Q / b, b * Q / (C * x)])
    _diff_cx(tb, cs, xs, n)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.factor(b * c / (a * x), n[i] + N).factor(b * c / (a * x), 0, -1)
    tb.poch(a / C, K - N)
    for i in range(r):
        for j in range(r):
            tb.poch(Q * cs[j] * xs[i] / xs[j], n[j] + k[i], -1)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(b * c / (C * x), n[i] + K).poch(a * x * Q / b, k[i] - N, -1)


def _arvmi_g(tb, p, k, l):
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r, C = p.r, prod(cs)
    K, L = total(k), total(l)
    tb.vwp(a, K)
    add_ar(tb, xs, k)
    for i, x in enumerate(xs):
        tb.factor(b / (C * x), K - k[i]).factor(b / (C * x), 0, -1)
    tb.poch(a * Q / C, K - L, -1)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], k[i] + l[j])
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(a * x / b, k[i] - L).poch(b * c * Q / (C * x), K + l[i], -1)
    tb.qpow(K - r * L)


# -- crmi ----------------------------------------------------------------------


def _crmi_f(tb, p, n, k, pair_factor=True):
    """``f_{nk}`` of the C_r/D_r inverse.

    ``pair_factor`` adds ``prod_{i<j} (1 - c_i c_j q^{n_i+n_j}/a x_i x_j) /
    (1 - c_i c_j/a x_i x_j)``; without it left orthogonality fails for r >= 2
    (the diagonal sums are off by exactly this factor).
    """
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r = p.r
    N = total(n)
    for c, x in zip(cs, xs):
        tb.inf([a * x * Q / b, b * Q / (a * x), b * x * Q, Q / (b * x)],
               [a * x * Q / (b * c), b * c * Q / (a * x), b * x * Q / c, c * Q / (b * x)])
    _inf_cx(tb, cs, xs)
    for i in range(r):
        for j in range(r):
            tb.inf([a * xs[i] * xs[j] * Q / cs[i], cs[j] * Q / (a * xs[i] * xs[j])])
    for i in range(r):
        for j in range(i, r):
            tb.inf([], [a * xs[i] * xs[j] * Q, Q / (a * xs[i] * xs[j])])
            if j > i:
                tb.inf([], [a * xs[i] * xs[j] * Q / (cs[i] * cs[j]),
                            cs[i] * cs[j] * Q / (a * xs[i] * xs[j])])
    _diff_cx(tb, cs, xs, n)
    if pair_factor:
        for i in range(r):
            for j in range(i + 1, r):
                y = cs[i] * cs[j] / (a * xs[i] * xs[j])
                tb.factor(y, n[i] + n[j]).factor(y, 0, -1)
    for i in range(r):
        for j in range(r):
            tb.poch(a * xs[i] * xs[j] / cs[j], k[i] - n[j])
            tb.poch(Q * cs[j] * xs[i] / xs[j], k[i] + n[j], -1)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.factor(b * c / (a * x), n[i] + N).factor(b * c / (a * x), 0, -1)
        tb.factor(b * x / c, N - n[i]).factor(b * x / c, 0, -1)
        tb.poch(b * x, k[i] + N).poch(a * x * Q / b, k[i] - N, -1)


def _crmi_g(tb, p, k, l):
    a, b = P(p.a), P(p.b)
    xs, cs = _vecs(p)
    r = p.r
    K, L = total(k), total(l)
    add_ar(tb, xs, k)
    add_pair_vwp(tb, a, xs, k, True)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], k[i] + l[j])
            tb.poch(a * xs[i] * xs[j] * Q / cs[j], k[i] - l[j], -1)
    for i, x in enumerate(xs):
        tb.poch(a * x / b, k[i] - L).poch(b * x * Q, k[i] + L, -1)
    tb.qpow(K + (1 - 2 * r) * L)


# -- pair registry ---------------------------------------------------------------


@dataclass(frozen=True)
class InversePair:
    id: str
    anchor: str
    f: Callable
    g: Callable
    relation: str
    one_dim: bool = False

    def check(self, p: ParamSet):
        if self.one_dim and p.r != 1:
            raise ValueError(f"{self.id} is defined for r = 1 only")
        need = ("a", "b", "c") if self.one_dim else ("a", "b")
        for s in need:
            if getattr(p, s) is None:
                raise ValueError(f"{self.id} needs parameter {s}")
        if not self.one_dim and len(p.cs) != p.r:
            raise ValueError(f"{self.id} needs r = {p.r} values c_i")


PAIRS = {
    "bmi": InversePair("bmi", "one-dimensional bilateral matrix inverse", _bmi_f, _bmi_g,
                       TWO_SIDED, one_dim=True),
    "armi": InversePair("armi", "A_r multilateral matrix inverse", _armi_f, _armi_g, TWO_SIDED),
    "arvmi": InversePair("arvmi", "second A_r multilateral matrix inverse", _arvmi_f, _arvmi_g,
                         TWO_SIDED),
    "crmi": InversePair("crmi", "C_r/D_r multilateral matrix inverse (left inverse only)",
                        _crmi_f, _crmi_g, LEFT_ONLY),
    "crmi_printed": InversePair("crmi_printed",
                                "C_r/D_r inverse with f lacking the i<j pair factor",
                                functools.partial(_crmi_f, pair_factor=False), _crmi_g,
                                LEFT_ONLY),
}


def pair_ids() -> list[str]:
    return list(PAIRS)


def get_pair(pair) -> InversePair:
    if isinstance(pair, InversePair):
        return pair
    try:
        return PAIRS[pair]
    except KeyError:
        raise KeyError(f"unknown pair {pair!r}; known: {', '.join(PAIRS)}") from None


def _field(p: ParamSet, mode, tail_tol):
    mode = mode or NumericMode.bigfloat()
    tail = None if mode.exact else gmpy2.mpfr(tail_tol)
    return QField(mode, p.q, tail_tol=tail)


def _entry(builder, p, i1, i2, mode, tail_tol):
    r = p.r
    field = _field(p, mode, tail_tol)
    with field:
        tb = TermBuilder(field, 2 * r)
        builder(tb, p, variables(0, r), variables(r, r))
        plan = tb.build()
        return plan(tuple(i1) + tuple(i2))


def f_entry(pair, params: ParamSet, n, k, mode=None, tail_tol=1e-40):
    """``f_{nk}`` of the given pair (number, exact zero, or pole)."""
    pr = get_pair(pair)
    pr.check(params)
    return _entry(pr.f, params, n, k, mode, tail_tol)


def g_entry(pair, params: ParamSet, k, l, mode=None, tail_tol=1e-40):
    """``g_{kl}`` of the given pair."""
    pr = get_pair(pair)
    pr.check(params)
    return _entry(pr.g, params, k, l, mode, tail_tol)


# -- windowed sums --------------------------------------------------------------


class _Slice(Summand):
    """Summand over the middle slot block with the outer blocks pinned."""

    def __init__(self, plan, before, after, r):
        super().__init__(plan, r)
        self.before = tuple(before)
        self.after = tuple(after)

    def evaluate(self, points):
        import numpy as np
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.r)
        m = len(pts)
        cols = []
        if self.before:
            cols.append(np.tile(np.array(self.before, dtype=np.int64), (m, 1)))
        cols.append(pts)
        if self.after:
            cols.append(np.tile(np.array(self.after, dtype=np.int64), (m, 1)))
        return self.plan.evaluate(np.hstack(cols))

    def __call__(self, k):
        return self.plan(self.before + tuple(k) + self.after)


def _inner_sum(summand, policy, probe_radius=6):
    support = detect_natural_truncation(summand, probe_radius)
    if support is not None:
        return sum_finite(summand, support)
    return sum_bilateral(summand, policy)


@dataclass
class CellResult:
    index: tuple
    value: object
    expected: object
    residual: object
    status: str
    shells: int = 0

    def to_json(self):
        return {"index": [list(i) for i in self.index], "value": _num(self.value),
                "expected": _num(self.expected), "residual": _num(self.residual),
                "status": self.status, "shells": self.shells}


def _num(v):
    if v is None:
        return None
    if is_pole(v):
        return "pole"
    if isinstance(v, type(gmpy2.mpfr(0))):
        return float(v)
    return str(v)


def _window(r, radius):
    return [tuple(p) for p in itertools.product(range(-radius, radius + 1), repeat=r)]


def _judge(out, expected, tol):
    if out.status == DIVERGENT:
        return None, DIVERGENT
    if out.status != CONVERGED or is_pole(expected):
        return None, INCONCLUSIVE
    res = abs(out.value - expected) / max(abs(expected), 1)
    return res, ("Pass" if res <= tol else "Fail")


@dataclass
class OrthogonalityReport:
    pair: str
    side: str
    r: int
    radius: int
    params: dict
    cells: list = dc_field(default_factory=list)
    max_residual: object = None
    wall: float = 0.0

    @property
    def residuals(self) -> dict:
        """``{(n, l): residual}`` over the window."""
        return {c.index: c.residual for c in self.cells}

    @property
    def statuses(self) -> dict:
        return {c.index: c.status for c in self.cells}

    @property
    def complete(self) -> bool:
        return all(c.residual is not None for c in self.cells)

    def passed(self, tol) -> bool:
        return self.complete and self.max_residual is not None and self.max_residual <= tol

    def to_json(self):
        return {"pair": self.pair, "side": self.side, "r": self.r, "radius": self.radius,
                "params": self.params, "max_residual": _num(self.max_residual),
                "cells": [c.to_json() for c in self.cells], "wall_seconds": round(self.wall, 4)}


def _max_res(cells):
    vals = [c.residual for c in cells if c.residual is not None]
    return max(vals) if vals else None


def check_orthogonality(pair, params: ParamSet, side: str = LEFT, window: int = 1,
                        policy: ConvergencePolicy | None = None, tol=1e-12,
                        mode: NumericMode | None = None) -> OrthogonalityReport:
    """Sum ``f_{nk} g_{kl}`` (left) or ``g_{nk} f_{kl}`` (right) over k in Z^r.

    Every ``(n, l)`` with max-norm at most ``window`` is a cell; its
    residual is ``|sum - delta_{nl}|``.
    """
    pr = get_pair(pair)
    pr.check(params)
    side = side.capitalize()
    if side not in (LEFT, RIGHT):
        raise ValueError("side must be Left or Right")
    policy = policy or ConvergencePolicy(shell_tol=tol / 10)
    r = params.r
    t0 = time.perf_counter()
    field = _field(params, mode, tol / 1e6)
    first, second = (pr.f, pr.g) if side == LEFT else (pr.g, pr.f)
    cells = []
    with field:
        tb = TermBuilder(field, 3 * r)
        n, k, l = variables(0, r), variables(r, r), variables(2 * r, r)
        first(tb, params, n, k)
        second(tb, params, k, l)
        plan = tb.build()
        pts = _window(r, window)
        for nn in pts:
            for ll in pts:
                out = _inner_sum(_Slice(plan, nn, ll, r), policy)
                expected = field.one if nn == ll else field.zero
                res, status = _judge(out, expected, tol)
                cells.append(CellResult((nn, ll), out.value, expected, res, status,
                                        out.shells_used))
    return OrthogonalityReport(pr.id, side, r, window, params.as_dict(), cells,
                               _max_res(cells), time.perf_counter() - t0)


# -- inverse relations -----------------------------------------------------------


def _sign_pow(tb, L, r):
    if r % 2 == 0:
        tb.sign(L)


def _a88s_a(tb, p, l):
    """``a_l`` of the rotinv proof through the first A_r inverse."""
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M, C = p.r, p.M, prod(cs)
    Ls = total(l)
    tb.ratio([b * Q / d, b * Q / C], [b * Q, b * Q / (C * d)], M)
    for c, x in zip(cs, xs):
        tb.ratio([a * x * Q, a * x * Q / (c * d)], [a * x * Q / d, a * x * Q / c], M)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], l[j])
    tb.ratio([b * Q ** (1 + M) / d], [b * Q ** (1 + M), b * Q / d], Ls)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.ratio([c * Q ** -M / (a * x), c * d / (a * x)], [c * d * Q ** -M / (a * x)], l[i])
        tb.poch(b * Q / (a * x), Ls, -1)
    _sign_pow(tb, Ls, r)
    tb.power(a, Ls * (1 - r)).power(b, Ls * r)
    tb.qpow(binom2(Ls).scale(r))
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.qpow(-binom2(l[i]))
        tb.power(c, -l[i]).power(x, l[i] - Ls)


def _a88s_b(tb, p, k):
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M, C = p.r, p.M, prod(cs)
    K = total(k)
    tb.ratio([d, Q ** -M], [C * d * Q ** -M / b], K)
    for i, x in enumerate(xs):
        tb.ratio([a * b * x * Q ** (1 + M) / (C * d)], [a * x * Q / d, a * x * Q ** (1 + M)], k[i])
        tb.poch(a * x, K)
    for i in range(r):
        for j in range(r):
            tb.poch(Q * xs[i] / xs[j], k[i], -1)


def _av88s_a(tb, p, k):
    """``a_k`` of the invrel proof through the second A_r inverse."""
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M, C = p.r, p.M, prod(cs)
    K = total(k)
    tb.ratio([b * Q / d, b * Q / (a * d)], [b * C * Q / (a * d), b * Q / (C * d)], M)
    for c, x in zip(cs, xs):
        tb.ratio([b * c * Q / (a * x), b * Q / (C * x)], [b * c * Q / (C * x), b * Q / (a * x)], M)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], k[i])
    add_ar(tb, xs, k)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(b * Q ** (1 + M) / (C * x), K - k[i]).poch(a * x * Q ** -M / b, k[i])
        tb.poch(b / (C * x), K - k[i], -1).poch(b * c * Q ** (1 + M) / (C * x), K, -1)
    tb.vwp(a, K)
    tb.ratio([a * d / b, b * Q ** (1 + M) / d], [a * d * Q ** -M / b, b * Q / d], K)
    tb.poch(a * Q / C, K, -1)
    tb.qpow(K)


def _av88s_b(tb, p, l):
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M, C = p.r, p.M, prod(cs)
    Ls = total(l)
    _diff_cx(tb, cs, xs, l)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.factor(b * c / (a * x), l[i] + Ls).factor(b * c / (a * x), 0, -1)
    for i in range(r):
        for j in range(r):
            tb.poch(Q * cs[i] * xs[j] / (cs[j] * xs[i]), l[i], -1)
    tb.ratio([Q ** -M], [b * C * Q / (a * d), C * d * Q ** -M / b], Ls)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(b * c / (a * x), Ls)
        tb.ratio([c * d / (C * x), b * b * c * Q ** (1 + M) / (a * C * d * x)],
                 [b * c * Q ** (1 + M) / (a * x)], l[i])
        tb.power(x, Ls)
    _sign_pow(tb, Ls, r)
    tb.power(a, Ls * (r - 1)).power(b, Ls * -r).power(C, Ls)
    tb.qpow(binom2(Ls).scale(1 - r) + Ls)


def _c88s_a(tb, p, k):
    """``a_k`` of the invrel proof through the C_r/D_r inverse."""
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M = p.r, p.M
    K = total(k)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.ratio([b * c * Q / (a * x), b * x * Q / c, b * Q / (a * d * x), b * x * Q / d],
                 [b * x * Q / (c * d), b * c * Q / (a * d * x), b * x * Q, b * Q / (a * x)], M)
        tb.ratio([a * d * x / b, b * x * Q ** (1 + M) / d, a * x * Q ** -M / b],
                 [a * d * x * Q ** -M / b, b * x * Q ** (1 + M), b * x * Q / d], k[i])
    tb.qpow(K)
    add_ar(tb, xs, k)
    add_pair_vwp(tb, a, xs, k, True)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], k[i])
            tb.poch(a * xs[i] * xs[j] * Q / cs[j], k[i], -1)


def _c88s_b(tb, p, l):
    a, b, d = P(p.a), P(p.b), P(p.d)
    xs, cs = _vecs(p)
    r, M = p.r, p.M
    Ls = total(l)
    _diff_cx(tb, cs, xs, l)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.factor(b * c / (a * x), l[i] + Ls).factor(b * c / (a * x), 0, -1)
    for i in range(r):
        for j in range(r):
            tb.poch(Q * cs[i] * xs[j] / (cs[j] * xs[i]), l[i], -1)
    for i in range(r):
        for j in range(i + 1, r):
            tb.poch(cs[i] * cs[j] / (a * xs[i] * xs[j]), l[i] + l[j], -1)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.poch(b * c / (a * x), Ls).poch(b * x * Q / c, Ls - l[i])
        tb.power(c, l[i] * r).power(x, l[i] * -r)
    tb.pochs([d, b * b * Q ** (1 + M) / (a * d), Q ** -M], Ls)
    for i, (c, x) in enumerate(zip(cs, xs)):
        tb.pochs([b * c * Q / (a * d * x), d * c * Q ** -M / (b * x),
                  b * c * Q ** (1 + M) / (a * x)], l[i], -1)
    tb.power(b, Ls * -r)
    tb.qpow(binom2(Ls).scale(-r))
    for li in l:
        tb.qpow(binom2(li + 1).scale(r))


@dataclass(frozen=True)
class ProofSequences:
    """Explicit ``a``/``b`` sequences of a derivation via inverse relations.

    For ``rotinv`` the given relation is ``sum_k g_{kl} b_k = a_l`` and the
    implied one ``sum_n f_{nk} a_n = b_k``; for ``invrel`` the given
    relation is ``sum_l g_{kl} b_l = a_k`` and the implied one
    ``sum_k f_{nk} a_k = b_n``.
    """

    id: str
    direction: str
    pair: str
    a: Callable
    b: Callable
    description: str


PROOF_SEQUENCES = {
    "a88s": ProofSequences("a88s", "rotinv", "armi", _a88s_a, _a88s_b,
                           "A_r 8psi8 from the first A_r inverse and Milne's A_r 8phi7"),
    "av88s": ProofSequences("av88s", "invrel", "arvmi", _av88s_a, _av88s_b,
                            "second A_r 8psi8 from the second A_r inverse and Milne's A_r 8phi7"),
    "c88s": ProofSequences("c88s", "invrel", "crmi", _c88s_a, _c88s_b,
                           "C_r 8psi8 from the C_r/D_r inverse and the D_r 8phi7"),
}


def sequence_for(direction: str, pair: str) -> ProofSequences:
    for s in PROOF_SEQUENCES.values():
        if s.direction == direction and s.pair == pair:
            return s
    raise KeyError(f"no proof sequences registered for ({direction}, {pair})")


@dataclass
class RelationReport:
    direction: str
    pair: str
    sequences: str
    relation: str
    r: int
    radius: int
    params: dict
    cells: list = dc_field(default_factory=list)
    max_residual: object = None
    wall: float = 0.0

    @property
    def complete(self) -> bool:
        return all(c.residual is not None for c in self.cells)

    def passed(self, tol) -> bool:
        return self.complete and self.max_residual is not None and self.max_residual <= tol

    def to_json(self):
        return {"direction": self.direction, "pair": self.pair, "sequences": self.sequences,
                "relation": self.relation, "r": self.r, "radius": self.radius,
                "params": self.params, "max_residual": _num(self.max_residual),
                "cells": [c.to_json() for c in self.cells], "wall_seconds": round(self.wall, 4)}


def apply_inverse_relation(direction: str, pair, params: ParamSet, a_seq=None, b_seq=None,
                           window: int = 1, policy: ConvergencePolicy | None = None,
                           tol=1e-12, mode: NumericMode | None = None,
                           relation: str = "implied") -> RelationReport:
    """Check one side of an inverse-relation pair at every window point.

    ``a_seq``/``b_seq`` are builder callables ``(tb, params, index_forms)``;
    when omitted, the registered proof sequences for ``(direction, pair)``
    are used.  ``relation="implied"`` checks the equation the proof
    deduces; ``"given"`` checks the summation it starts from.
    """
    if direction not in ("invrel", "rotinv"):
        raise ValueError("direction must be 'invrel' or 'rotinv'")
    pr = get_pair(pair)
    pr.check(params)
    name = "custom"
    if a_seq is None or b_seq is None:
        seqs = sequence_for(direction, pr.id)
        a_seq = a_seq or seqs.a
        b_seq = b_seq or seqs.b
        name = seqs.id
    policy = policy or ConvergencePolicy(shell_tol=tol / 10)
    r = params.r
    t0 = time.perf_counter()
    field = _field(params, mode, tol / 1e6)
    implied = relation == "implied"
    cells = []
    with field:
        outer, inner = variables(0, r), variables(r, r)
        tb = TermBuilder(field, 2 * r)
        target = TermBuilder(field, r)
        own = variables(0, r)
        if direction == "invrel":
            if implied:  # sum_k f_{nk} a_k = b_n
                pr.f(tb, params, outer, inner)
                a_seq(tb, params, inner)
                b_seq(target, params, own)
            else:  # sum_l g_{kl} b_l = a_k
                pr.g(tb, params, outer, inner)
                b_seq(tb, params, inner)
                a_seq(target, params, own)
        else:
            if implied:  # sum_n f_{nk} a_n = b_k
                pr.f(tb, params, inner, outer)
                a_seq(tb, params, inner)
                b_seq(target, params, own)
            else:  # sum_k g_{kl} b_k = a_l
                pr.g(tb, params, inner, outer)
                b_seq(tb, params, inner)
                a_seq(target, params, own)
        plan = tb.build()
        tplan = target.build()
        for idx in _window(r, window):
            s = _Slice(plan, idx, (), r)
            out = _inner_sum(s, policy)
            expected = tplan(idx)
            res, status = _judge(out, expected, tol)
            cells.append(CellResult((idx,), out.value, expected, res, status, out.shells_used))
    return RelationReport(direction, pr.id, name, relation, r, window, params.as_dict(), cells,
                          _max_res(cells), time.perf_counter() - t0)


# -- Milne's lemma ---------------------------------------------------------------


def milne_lemma_check(params: ParamSet, n, mode: NumericMode | None = None):
    """Both sides of the product identity used to collapse the A_r orthogonality sum.

    Returns ``(lhs, rhs)``; in rational mode they are exact.
    """
    mode = mode or NumericMode.rational()
    r = params.r
    n = tuple(int(v) for v in n)
    if len(n) != r:
        raise ValueError("index length must equal r")
    q = to_mpq(params.q)
    with mode.context():
        cx = [mode.convert(to_mpq(c)) / mode.convert(to_mpq(x))
              for c, x in zip(params.cs, params.xs)]
        qq = mode.convert(q)
        lhs = mode.convert(1)
        for i in range(r):
            for j in range(r):
                base = qq ** (1 + n[j] - n[i]) * cx[j] / cx[i]
                lhs = lhs * _poch_num(base, qq, n[i] - n[j])
        N = sum(n)
        expo = N * (N - 1) // 2 - r * sum(v * (v - 1) // 2 for v in n)
        rhs = (-qq ** 0 if (r - 1) * N % 2 else qq ** 0) * qq ** expo
        for i in range(r):
            rhs = rhs * cx[i] ** (N - r * n[i])
        for i in range(r):
            for j in range(i + 1, r):
                den = cx[i] * qq ** n[i] - cx[j] * qq ** n[j]
                rhs = rhs * (cx[i] - cx[j]) / den
    return lhs, rhs


def _poch_num(x, q, k):
    """Plain ``(x; q)_k`` for integer k, written out independently of the ladders."""
    out = x * 0 + 1
    if k >= 0:
        for j in range(k):
            out = out * (1 - x * q ** j)
        return out
    for j in range(1, -k + 1):
        out = out / (1 - x * q ** -j)
    return out
