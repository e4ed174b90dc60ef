"""Summand and closed-form builders, one per registered identity.

Each builder receives a :class:`~qlattice.terms.TermBuilder` over the
summation slots, one over zero slots for the closed form, and the
parameter set.  Index forms: ``n[i]`` is the i-th summation index and
``N`` their sum.
"""
from __future__ import annotations

from ..scalarfield import Param, Q
from ..terms import e2, total, variables
from .structure import P, add_ar, add_cr, prod

ONE = Param(1)


def _common(p):
    a = P(p.a) if p.a is not None else None
    b = P(p.b) if p.b is not None else None
    c = P(p.c) if p.c is not None else None
    d = P(p.d) if p.d is not None else None
    return a, b, c, d


def _vecs(p):
    xs = [P(x) for x in p.xs] if p.xs else [ONE] * p.r
    cs = [P(x) for x in p.cs]
    es = [P(x) for x in p.es]
    return xs, cs, es


def _ar_vwp(tb, a, xs, n, N):
    """``prod_i (1 - a x_i q^{n_i+N}) / (1 - a x_i)``."""
    for i, x in enumerate(xs):
        tb.factor(a * x, n[i] + N)
        tb.factor(a * x, 0, -1)


# -- one-dimensional ----------------------------------------------------------


def bailey_6psi6(tb, rhs, p):
    a, b, c, d = _common(p)
    e = P(p.e)
    n = variables(0, 1)[0]
    z = a * a * Q / (b * c * d * e)
    tb.vwp(a, n).ratio([b, c, d, e], [a * Q / b, a * Q / c, a * Q / d, a * Q / e], n)
    tb.power(z, n)
    rhs.inf([Q, a * Q, Q / a, a * Q / (b * c), a * Q / (b * d), a * Q / (b * e),
             a * Q / (c * d), a * Q / (c * e), a * Q / (d * e)],
            [a * Q / b, a * Q / c, a * Q / d, a * Q / e, Q / b, Q / c, Q / d, Q / e, z])


def jackson_8phi7(tb, rhs, p):
    a, b, c, d = _common(p)
    M = p.M
    n = variables(0, 1)[0]
    tb.vwp(a, n)
    tb.ratio([a, b, c, d, a * a * Q ** (1 + M) / (b * c * d), Q ** -M],
             [Q, a * Q / b, a * Q / c, a * Q / d, b * c * d * Q ** -M / a, a * Q ** (1 + M)], n)
    tb.qpow(n)
    rhs.ratio([a * Q, a * Q / (b * c), a * Q / (b * d), a * Q / (c * d)],
              [a * Q / b, a * Q / c, a * Q / d, a * Q / (b * c * d)], M)


def schlosser_8psi8(tb, rhs, p):
    a, b, c, d = _common(p)
    M, k = p.M, p.k
    n = variables(0, 1)[0]
    tb.vwp(a, n)
    tb.ratio([b, c, d * Q ** k, a * Q ** -k / c, a * Q ** (1 + M) / b, a * Q ** -M / d],
             [a * Q / b, a * Q / c, a * Q ** (1 - k) / d, c * Q ** (1 + k), b * Q ** -M,
              d * Q ** (1 + M)], n)
    tb.qpow(n)
    rhs.ratio([a * Q / (b * c), c * Q / b, d * Q, d * Q / a],
              [c * d * Q / a, d * Q / c, Q / b, a * Q / b], M)
    rhs.ratio([c * d / a, b * d / a, c * Q, c * Q / a, d * Q ** (1 + M) / b, Q ** -M],
              [Q, c * Q / b, d / a, d, b * c * Q ** -M / a, c * d * Q ** (1 + M) / a], k)
    rhs.inf([Q, Q, a * Q, Q / a, c * d * Q / a, a * Q / (c * d), c * Q / d, d * Q / c],
            [c * Q, Q / c, d * Q, Q / d, c * Q / a, a * Q / c, d * Q / a, a * Q / d])


def vwp_8psi8(tb, p, a, b, c, d, e, f, g):
    """Summand of the very-well-poised 8psi8 with argument a^3q^2/bcdefg."""
    n = variables(0, 1)[0]
    z = a ** 3 * Q ** 2 / (b * c * d * e * f * g)
    tb.vwp(a, n)
    tb.ratio([b, c, d, e, f, g], [a * Q / x for x in (b, c, d, e, f, g)], n)
    tb.power(z, n)
    return z


def vwp_8phi7(tb, A, uppers, lowers, z):
    """Summand of a very-well-poised 8phi7 in A with five further numerator parameters."""
    n = variables(0, 1)[0]
    tb.vwp(A, n)
    tb.ratio([A] + list(uppers), [Q] + list(lowers), n)
    tb.power(z, n)


def transform_prefactors(p):
    """Numerator/denominator lists of the two infinite-product prefactors."""
    a, b, c, d = _common(p)
    e, f, g = P(p.e), P(p.f), P(p.g)
    pre1 = ([Q, a * Q, Q / a, d, d / a, b * Q / c, b * Q / e, b * Q / f, b * Q / g,
             a * Q / (b * c), a * Q / (b * e), a * Q / (b * f), a * Q / (b * g)],
            [Q / b, Q / c, Q / e, Q / f, Q / g, a * Q / b, a * Q / c, a * Q / e, a * Q / f,
             a * Q / g, d / b, b * d / a, b * b * Q / a])
    pre2 = ([Q, a * Q, Q / a, b, b / a, d * Q / c, d * Q / e, d * Q / f, d * Q / g,
             a * Q / (c * d), a * Q / (d * e), a * Q / (d * f), a * Q / (d * g)],
            [Q / c, Q / d, Q / e, Q / f, Q / g, a * Q / c, a * Q / d, a * Q / e, a * Q / f,
             a * Q / g, b / d, b * d / a, d * d * Q / a])
    return pre1, pre2


def transform_series(p):
    """``(A, uppers, lowers, z)`` of the two 8phi7 series on the right-hand side."""
    a, b, c, d = _common(p)
    e, f, g = P(p.e), P(p.f), P(p.g)
    z = a ** 3 * Q ** 2 / (b * c * d * e * f * g)
    s1 = (b * b / a, [b * x / a for x in (c, d, e, f, g)], [b * Q / x for x in (c, d, e, f, g)], z)
    s2 = (d * d / a, [d * x / a for x in (b, c, e, f, g)], [d * Q / x for x in (b, c, e, f, g)], z)
    return s1, s2


def mjackson_lhs(tb, p):
    a, b, c, d = _common(p)
    return vwp_8psi8(tb, p, a, b, c, d, P(p.e), P(p.f), P(p.g))


# -- A_r, C_r, D_r terminating ---------------------------------------------------


def milne_ar_8phi7(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M = p.r, p.M
    n = variables(0, r)
    N = total(n)
    C = prod(cs)
    add_ar(tb, xs, n)
    _ar_vwp(tb, a, xs, n, N)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i]).poch(Q * xs[i] / xs[j], n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(a * x, N).poch(a * x * Q / cs[i], N, -1)
        tb.ratio([d * x, a * a * x * Q ** (1 + M) / (b * C * d)],
                 [a * x * Q / b, a * x * Q ** (1 + M)], n[i])
    tb.ratio([b, Q ** -M], [a * Q / d, b * C * d * Q ** -M / a], N)
    tb.qpow(N)
    rhs.ratio([a * Q / (b * d), a * Q / (C * d)], [a * Q / d, a * Q / (b * C * d)], M)
    for i, x in enumerate(xs):
        rhs.ratio([a * x * Q, a * x * Q / (b * cs[i])], [a * x * Q / b, a * x * Q / cs[i]], M)


def schlosser_ar_8phi7(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M = p.r, p.M
    n = variables(0, r)
    N = total(n)
    C = prod(cs)
    tb.vwp(a, N)
    add_ar(tb, xs, n)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i]).poch(Q * xs[i] / xs[j], n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(a * Q / (C * x * d), N - n[i]).poch(b / x, N).poch(d * x, n[i])
        tb.poch(b / x, N - n[i], -1).poch(a * cs[i] * Q / (C * x * d), N, -1)
        tb.poch(a * x * Q / b, n[i], -1)
    tb.ratio([a, a * a * Q ** (1 + M) / (b * C * d), Q ** -M],
             [a * Q / C, b * C * d * Q ** -M / a, a * Q ** (1 + M)], N)
    tb.qpow(N)
    rhs.ratio([a * Q, a * Q / (b * d)], [a * Q / C, a * Q / (b * C * d)], M)
    for i, x in enumerate(xs):
        rhs.ratio([a * Q / (C * x * d), a * x * Q / (b * cs[i])],
                  [a * x * Q / b, a * cs[i] * Q / (C * x * d)], M)


def dgml_cr_8phi7(tb, rhs, p):
    a, b, c, d = _common(p)
    xs, _, _ = _vecs(p)
    r, ms = p.r, p.ms
    m = sum(ms)
    n = variables(0, r)
    N = total(n)
    add_cr(tb, xs, n, a)
    for i in range(r):
        for j in range(r):
            tb.ratio([Q ** -ms[j] * xs[i] / xs[j], a * xs[i] * xs[j]],
                     [a * xs[i] * xs[j] * Q ** (1 + ms[j]), Q * xs[i] / xs[j]], n[i])
    for i, x in enumerate(xs):
        tb.ratio([b * x, c * x, d * x, a * a * x * Q ** (1 + m) / (b * c * d)],
                 [a * x * Q / b, a * x * Q / c, a * x * Q / d, b * c * d * x * Q ** -m / a], n[i])
    tb.qpow(N)
    for i in range(r):
        for j in range(i + 1, r):
            rhs.poch(a * xs[i] * xs[j] * Q, ms[i] + ms[j], -1)
    for i in range(r):
        for j in range(r):
            rhs.poch(a * xs[i] * xs[j] * Q, ms[i])
    rhs.pochs([a * Q / (b * c), a * Q / (b * d), a * Q / (c * d)], m)
    for i, x in enumerate(xs):
        rhs.pochs([a * x * Q / b, a * x * Q / c, a * x * Q / d], ms[i], -1)
        rhs.poch(a * Q ** (1 + m - ms[i]) / (b * c * d * x), ms[i], -1)


def schlosser_dr_8phi7(tb, rhs, p):
    a, b, c, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M = p.r, p.M
    n = variables(0, r)
    N = total(n)
    add_ar(tb, xs, n)
    _ar_vwp(tb, a, xs, n, N)
    for i, x in enumerate(xs):
        tb.poch(a * x, N).poch(a * Q / (c * d * x), N - n[i])
        tb.pochs([a * x * Q / cs[i], a * cs[i] * Q / (c * d * x)], N, -1)
    for i in range(r):
        for j in range(i + 1, r):
            tb.poch(c * d * xs[i] * xs[j], n[i] + n[j], -1)
    for i in range(r):
        for j in range(r):
            tb.pochs([cs[j] * xs[i] / xs[j], c * d * xs[i] * xs[j] / cs[j]], n[i])
            tb.poch(Q * xs[i] / xs[j], n[i], -1)
    tb.pochs([b, a * a * Q ** (1 + M) / (b * c * d), Q ** -M], N)
    for i, x in enumerate(xs):
        tb.pochs([a * x * Q / b, b * c * d * x * Q ** -M / a, a * x * Q ** (1 + M)], n[i], -1)
    tb.qpow(N)
    for i, x in enumerate(xs):
        rhs.ratio([a * x * Q, a * x * Q / (b * cs[i]), a * cs[i] * Q / (b * c * d * x),
                   a * Q / (c * d * x)],
                  [a * Q / (b * c * d * x), a * cs[i] * Q / (c * d * x), a * x * Q / cs[i],
                   a * x * Q / b], M)


# -- bilateral 6psi6 extensions ---------------------------------------------------


def gustafson_ar_6psi6(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, es = _vecs(p)
    r = p.r
    n = variables(0, r)
    N = total(n)
    C, E = prod(cs), prod(es)
    z = a ** (r + 1) * Q / (b * C * d * E)
    add_ar(tb, xs, n)
    _ar_vwp(tb, a, xs, n, N)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i]).poch(a * xs[i] * Q / (es[j] * xs[j]), n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(es[i] * x, N).poch(d * x, n[i])
        tb.poch(a * x * Q / cs[i], N, -1).poch(a * x * Q / b, n[i], -1)
    tb.ratio([b], [a * Q / d], N)
    tb.power(z, N)
    rhs.inf([a * Q / (b * d), a ** r * Q / (b * E), a * Q / (C * d)], [z, a * Q / d, Q / b])
    for i in range(r):
        for j in range(r):
            rhs.inf([a * xs[i] * Q / (cs[i] * es[j] * xs[j]), Q * xs[i] / xs[j]],
                    [Q * xs[i] / (cs[i] * xs[j]), a * xs[i] * Q / (es[j] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q / (b * cs[i]), a * Q / (d * es[i] * x), a * x * Q, Q / (a * x)],
                [a * x * Q / b, a * x * Q / cs[i], Q / (d * x), Q / (es[i] * x)])


def schlosser_ar_6psi6(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, es = _vecs(p)
    r = p.r
    n = variables(0, r)
    N = total(n)
    C, E = prod(cs), prod(es)
    z = a ** (r + 1) * Q / (b * C * d * E)
    tb.vwp(a, N)
    add_ar(tb, xs, n)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i]).poch(a * xs[i] * Q / (es[j] * xs[j]), n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(a * Q / (C * d * x), N - n[i]).poch(b * E / (a ** (r - 1) * es[i] * x), N)
        tb.poch(d * x, n[i])
        tb.poch(b * E / (a ** r * x), N - n[i], -1).poch(a * cs[i] * Q / (C * d * x), N, -1)
        tb.poch(a * x * Q / b, n[i], -1)
    tb.ratio([E / a ** (r - 1)], [a * Q / C], N)
    tb.power(z, N)
    rhs.inf([a * Q, Q / a, a * Q / (b * d)], [a * Q / C, z, a ** (r - 1) * Q / E])
    for i in range(r):
        for j in range(r):
            rhs.inf([Q * xs[i] / xs[j], a * xs[i] * Q / (cs[i] * es[j] * xs[j])],
                    [Q * xs[i] / (cs[i] * xs[j]), a * xs[i] * Q / (es[j] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a ** r * x * Q / (b * E), a * Q / (es[i] * d * x), a * Q / (C * d * x),
                 a * x * Q / (b * cs[i])],
                [a ** (r - 1) * es[i] * x * Q / (b * E), Q / (d * x), a * x * Q / b,
                 a * cs[i] * Q / (C * d * x)])


def gustafson_cr_6psi6(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, es = _vecs(p)
    r = p.r
    n = variables(0, r)
    N = total(n)
    C, E = prod(cs), prod(es)
    z = a ** (r + 1) * Q / (b * C * d * E)
    add_cr(tb, xs, n, a)
    for i in range(r):
        for j in range(r):
            tb.ratio([cs[j] * xs[i] / xs[j], es[j] * xs[i] * xs[j]],
                     [a * xs[i] * xs[j] * Q / cs[j], a * xs[i] * Q / (es[j] * xs[j])], n[i])
    for i, x in enumerate(xs):
        tb.ratio([b * x, d * x], [a * x * Q / b, a * x * Q / d], n[i])
    tb.power(z, N)
    for i in range(r):
        for j in range(i + 1, r):
            rhs.inf([a * xs[i] * xs[j] * Q / (cs[i] * cs[j]),
                     a * Q / (es[i] * es[j] * xs[i] * xs[j])])
    for i in range(r):
        for j in range(i, r):
            rhs.inf([a * xs[i] * xs[j] * Q, Q / (a * xs[i] * xs[j])])
    rhs.inf([a * Q / (b * d)], [z])
    for i in range(r):
        for j in range(r):
            rhs.inf([a * xs[i] * Q / (cs[i] * es[j] * xs[j]), Q * xs[i] / xs[j]],
                    [a * xs[i] * Q / (es[j] * xs[j]), Q / (es[j] * xs[i] * xs[j]),
                     a * xs[i] * xs[j] * Q / cs[i], Q * xs[i] / (cs[i] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q / (b * cs[i]), a * Q / (b * es[i] * x), a * x * Q / (cs[i] * d),
                 a * Q / (d * es[i] * x)],
                [a * x * Q / b, Q / (b * x), a * x * Q / d, Q / (d * x)])


# -- balanced 8psi8 extensions ------------------------------------------------------


def ar_8psi8(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M, ks = p.r, p.M, p.ks
    K = sum(ks)
    n = variables(0, r)
    N = total(n)
    C = prod(cs)
    add_ar(tb, xs, n)
    _ar_vwp(tb, a, xs, n, N)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i])
            tb.poch(Q ** (1 + ks[j]) * cs[j] * xs[i] / xs[j], n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(a * x * Q ** -ks[i] / cs[i], N).poch(a * x * Q / cs[i], N, -1)
        tb.ratio([b * x, a * x * Q ** -M / d], [b * x * Q ** -M, a * x * Q ** (1 - K) / d], n[i])
    tb.ratio([d * Q ** K, a * Q ** (1 + M) / b], [d * Q ** (1 + M), a * Q / b], N)
    tb.qpow(N)
    for i in range(r):
        for j in range(r):
            rhs.inf([Q * cs[j] * xs[i] / (cs[i] * xs[j]), Q * xs[i] / xs[j]],
                    [Q * cs[j] * xs[i] / xs[j], Q * xs[i] / (cs[i] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q, Q / (a * x), a * x * Q / (cs[i] * d), cs[i] * d * Q / (a * x)],
                [a * x * Q / cs[i], cs[i] * Q / (a * x), a * x * Q / d, d * Q / (a * x)])
    rhs.inf([d * Q / C, C * Q / d], [d * Q, Q / d])
    rhs.ratio([d * Q, a * Q / (b * C)], [a * Q / b, d * Q / C], M)
    for i, x in enumerate(xs):
        rhs.ratio([cs[i] * Q / (b * x), d * Q / (a * x)], [cs[i] * d * Q / (a * x), Q / (b * x)], M)
    for i in range(r):
        for j in range(r):
            rhs.poch(Q * cs[i] * xs[j] / xs[i], ks[i])
            rhs.poch(Q * cs[i] * xs[j] / (cs[j] * xs[i]), ks[i], -1)
    rhs.ratio([b * d / a, Q ** -M], [d, b * C * Q ** -M / a], K)
    for i, x in enumerate(xs):
        rhs.poch(cs[i] * d / (a * x), K).poch(d / (a * x), K, -1)
        rhs.ratio([cs[i] * Q / (a * x), cs[i] * d * Q ** (1 + M) / (b * C * x)],
                  [cs[i] * Q / (b * x), cs[i] * d * Q ** (1 + M) / (a * x)], ks[i])


def arv_8psi8(tb, rhs, p):
    a, b, _, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M, ks = p.r, p.M, p.ks
    K = sum(ks)
    n = variables(0, r)
    N = total(n)
    C = prod(cs)
    tb.vwp(a, N)
    tb.ratio([b, a * Q ** (1 + M) / b, a * Q ** -K / C], [b * Q ** -M, a * Q / b, a * Q / C], N)
    tb.qpow(N)
    add_ar(tb, xs, n)
    for i in range(r):
        for j in range(r):
            tb.poch(cs[j] * xs[i] / xs[j], n[i])
            tb.poch(Q ** (1 + ks[j]) * cs[j] * xs[i] / xs[j], n[i], -1)
    for i, x in enumerate(xs):
        tb.poch(d * Q ** (1 + M) / (C * x), N - n[i]).poch(d / (C * x), N - n[i], -1)
        tb.poch(cs[i] * d * Q ** ks[i] / (C * x), N)
        tb.poch(cs[i] * d * Q ** (1 + M) / (C * x), N, -1)
        tb.poch(a * x * Q ** -M / d, n[i]).poch(a * x * Q ** (1 - K) / d, n[i], -1)
    for i in range(r):
        for j in range(r):
            rhs.inf([Q * cs[j] * xs[i] / (cs[i] * xs[j]), Q * xs[i] / xs[j]],
                    [Q * cs[j] * xs[i] / xs[j], Q * xs[i] / (cs[i] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q / (cs[i] * d), cs[i] * d * Q / (a * x), C * x * Q / d, d * Q / (C * x)],
                [a * x * Q / d, d * Q / (a * x), cs[i] * d * Q / (C * x), C * x * Q / (cs[i] * d)])
    rhs.inf([a * Q, Q / a], [a * Q / C, C * Q / a])
    rhs.ratio([C * Q / b, a * Q / (b * C)], [a * Q / b, Q / b], M)
    for i, x in enumerate(xs):
        rhs.ratio([cs[i] * d * Q / (C * x), d * Q / (a * x)],
                  [cs[i] * d * Q / (a * x), d * Q / (C * x)], M)
    for i in range(r):
        for j in range(r):
            rhs.poch(Q * cs[i] * xs[j] / xs[i], ks[i])
            rhs.poch(Q * cs[i] * xs[j] / (cs[j] * xs[i]), ks[i], -1)
    rhs.ratio([C * Q / a, Q ** -M], [C * Q / b, b * C * Q ** -M / a], K)
    for i, x in enumerate(xs):
        rhs.poch(cs[i] * d / (a * x), K).poch(d / (a * x), K, -1)
        rhs.ratio([b * cs[i] * d / (a * C * x), cs[i] * d * Q ** (1 + M) / (b * C * x)],
                  [cs[i] * d / (C * x), cs[i] * d * Q ** (1 + M) / (a * x)], ks[i])


def cr_8psi8(tb, rhs, p, lower_index="j"):
    a, b, _, d = _common(p)
    xs, cs, _ = _vecs(p)
    r, M, ks = p.r, p.M, p.ks
    K = sum(ks)
    n = variables(0, r)
    N = total(n)
    tb.qpow(N)
    add_cr(tb, xs, n, a)
    for i in range(r):
        for j in range(r):
            cl = cs[i] if lower_index == "i" else cs[j]
            tb.ratio([cs[j] * xs[i] / xs[j], a * xs[i] * xs[j] * Q ** -ks[j] / cs[j]],
                     [a * xs[i] * xs[j] * Q / cl, Q ** (1 + ks[j]) * cs[j] * xs[i] / xs[j]], n[i])
    for i, x in enumerate(xs):
        tb.ratio([b * x, d * x * Q ** K, a * x * Q ** (1 + M) / b, a * x * Q ** -M / d],
                 [a * x * Q / b, a * x * Q ** (1 - K) / d, b * x * Q ** -M, d * x * Q ** (1 + M)],
                 n[i])
    for i in range(r):
        for j in range(r):
            rhs.inf([Q * cs[j] * xs[i] / (cs[i] * xs[j]), Q * xs[i] / xs[j]],
                    [Q * cs[j] * xs[i] / xs[j], Q * xs[i] / (cs[i] * xs[j]),
                     a * xs[i] * xs[j] * Q / cs[i], cs[j] * Q / (a * xs[i] * xs[j])])
    for i in range(r):
        for j in range(i, r):
            rhs.inf([a * xs[i] * xs[j] * Q, Q / (a * xs[i] * xs[j])])
    for i in range(r):
        for j in range(i + 1, r):
            rhs.inf([a * xs[i] * xs[j] * Q / (cs[i] * cs[j]), cs[i] * cs[j] * Q / (a * xs[i] * xs[j])])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q / (cs[i] * d), cs[i] * d * Q / (a * x), d * x * Q / cs[i], cs[i] * Q / (d * x)],
                [a * x * Q / d, d * Q / (a * x), d * x * Q, Q / (d * x)])
    for i, x in enumerate(xs):
        rhs.ratio([a * x * Q / (b * cs[i]), cs[i] * Q / (b * x), d * x * Q, d * Q / (a * x)],
                  [cs[i] * d * Q / (a * x), d * x * Q / cs[i], Q / (b * x), a * x * Q / b], M)
        rhs.poch(cs[i] * d / (a * x), K)
        rhs.pochs([d * x, d / (a * x)], K, -1)
    for i in range(r):
        for j in range(i + 1, r):
            rhs.poch(Q * cs[i] * cs[j] / (a * xs[i] * xs[j]), ks[i] + ks[j], -1)
    rhs.pochs([b * d / a, d * Q ** (1 + M) / b, Q ** -M], K)
    for i, x in enumerate(xs):
        rhs.poch(d * x / cs[i], K - ks[i])
        rhs.pochs([cs[i] * Q / (b * x), b * cs[i] * Q ** -M / (a * x),
                   cs[i] * d * Q ** (1 + M) / (a * x)], ks[i], -1)
    for i in range(r):
        for j in range(r):
            rhs.pochs([Q * cs[j] * xs[i] / xs[j], cs[j] * Q / (a * xs[i] * xs[j])], ks[j])
            rhs.poch(Q * cs[j] * xs[i] / (cs[i] * xs[j]), ks[j], -1)


def dr_6psi6_false(tb, rhs, p):
    a, b, c, d = _common(p)
    xs, cs, es = _vecs(p)
    r = p.r
    n = variables(0, r)
    N = total(n)
    E = prod(es)
    add_ar(tb, xs, n)
    _ar_vwp(tb, a, xs, n, N)
    for i in range(r):
        for j in range(i + 1, r):
            tb.poch(a * a * xs[i] * xs[j] * Q / (b * c), n[i] + n[j])
    for i in range(r):
        for j in range(r):
            tb.poch(es[j] * xs[i] / xs[j], n[i])
            tb.pochs([a * xs[i] * Q / (cs[j] * xs[j]),
                      a * cs[i] * xs[i] * xs[j] * Q / (b * c)], n[i], -1)
    for i, x in enumerate(xs):
        tb.pochs([b * c / (cs[i] * x), cs[i] * x], N).poch(d * x, n[i])
        tb.poch(a * x * Q / es[i], N, -1).poch(b * c / (a * x), N - n[i], -1)
        tb.power(x, n[i])
    tb.poch(a * Q / d, N, -1)
    tb.power(a * a * Q / (b * c * d * E), N)
    tb.qpow(-e2(n))
    for i in range(r):
        for j in range(i + 1, r):
            rhs.inf([a * a * xs[i] * xs[j] * Q / (b * c)],
                    [a * a * xs[i] * xs[j] * Q / (b * c * es[i] * es[j])])
    for i in range(r):
        for j in range(r):
            rhs.inf([a * xs[i] * Q / (cs[j] * es[i] * xs[j]),
                     a * cs[i] * xs[i] * xs[j] * Q / (b * c * es[j]), Q * xs[i] / xs[j]],
                    [a * xs[i] * Q / (cs[j] * xs[j]), a * cs[i] * xs[i] * xs[j] * Q / (b * c),
                     Q * xs[i] / (es[i] * xs[j])])
    rhs.inf([a * Q / (d * E)], [a * Q / d])
    for i, x in enumerate(xs):
        rhs.inf([a * x * Q, Q / (a * x), a * x * Q / (b * c), a * Q / (cs[i] * d * x),
                 a * cs[i] * x * Q / (b * c * d)],
                [a * x * Q / es[i], cs[i] * x * Q / (b * c), Q / (cs[i] * x), Q / (d * x),
                 a * a * x * Q / (b * c * d * es[i])])
