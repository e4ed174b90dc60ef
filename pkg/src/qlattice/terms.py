"""Compiled term plans: products of shifted q-Pochhammers over integer points.

A summand of any identity here is a product of factors of the shape
``(x; q)_{L(k)}^{+-1}``, ``base^{L(k)}``, ``q^{Q(k)}`` and constants, where
``L`` is affine and ``Q`` quadratic in the integer index vector ``k``.
:class:`TermBuilder` collects such factors; :class:`Plan` evaluates them
in batches through the kernel in :mod:`qlattice.kernels`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .scalarfield import POLE, Param, QField, finalize, ratio_value


class Lin:
    """Affine integer form ``sum_i c_i k_i + offset``."""

    __slots__ = ("coeffs", "offset")

    def __init__(self, coeffs=None, offset: int = 0):
        self.coeffs = {i: c for i, c in (coeffs or {}).items() if c}
        self.offset = int(offset)

    @staticmethod
    def of(x) -> "Lin":
        if isinstance(x, Lin):
            return x
        if isinstance(x, (int, np.integer)):
            return Lin({}, int(x))
        raise TypeError(f"cannot use {x!r} as an index form")

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        o = Lin.of(other)
        c = dict(self.coeffs)
        for i, v in o.coeffs.items():
            c[i] = c.get(i, 0) + v
        return Lin(c, self.offset + o.offset)

    __radd__ = __add__

    def __neg__(self):
        return Lin({i: -v for i, v in self.coeffs.items()}, -self.offset)

    def __sub__(self, other):
        return self + (-Lin.of(other))

    def __rsub__(self, other):
        return Lin.of(other) - self

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return Lin({i: v * n for i, v in self.coeffs.items()}, self.offset * n)

    __rmul__ = __mul__

    def at(self, point: Sequence[int]) -> int:
        return self.offset + sum(v * point[i] for i, v in self.coeffs.items())

    def __repr__(self):
        parts = [f"{v}*k{i}" for i, v in sorted(self.coeffs.items())]
        if self.offset or not parts:
            parts.append(str(self.offset))
        return " + ".join(parts)


def variables(start: int, count: int) -> list[Lin]:
    """Unit forms for index slots ``start .. start+count-1``."""
    return [Lin({start + i: 1}) for i in range(count)]


def total(forms: Iterable) -> Lin:
    out = Lin()
    for f in forms:
        out = out + f
    return out


class Quad:
    """Quadratic form with rational coefficients that is integral on the lattice."""

    __slots__ = ("quad", "lin", "const")

    def __init__(self, quad=None, lin=None, const=0):
        self.quad = {k: Fraction(v) for k, v in (quad or {}).items() if v}
        self.lin = {k: Fraction(v) for k, v in (lin or {}).items() if v}
        self.const = Fraction(const)

    @staticmethod
    def of(x) -> "Quad":
        if isinstance(x, Quad):
            return x
        L = Lin.of(x)
        return Quad({}, L.coeffs, L.offset)

    @staticmethod
    def product(a, b, coef=1) -> "Quad":
        a, b = Lin.of(a), Lin.of(b)
        coef = Fraction(coef)
        quad = {}
        for i, u in a.coeffs.items():
            for j, v in b.coeffs.items():
                key = (min(i, j), max(i, j))
                quad[key] = quad.get(key, 0) + coef * u * v
        lin = {}
        for i, u in a.coeffs.items():
            lin[i] = lin.get(i, 0) + coef * u * b.offset
        for j, v in b.coeffs.items():
            lin[j] = lin.get(j, 0) + coef * v * a.offset
        return Quad(quad, lin, coef * a.offset * b.offset)

    def __add__(self, other):
        o = Quad.of(other)
        quad = dict(self.quad)
        for k, v in o.quad.items():
            quad[k] = quad.get(k, 0) + v
        lin = dict(self.lin)
        for k, v in o.lin.items():
            lin[k] = lin.get(k, 0) + v
        return Quad(quad, lin, self.const + o.const)

    __radd__ = __add__

    def scale(self, c) -> "Quad":
        c = Fraction(c)
        return Quad({k: v * c for k, v in self.quad.items()},
                    {k: v * c for k, v in self.lin.items()}, self.const * c)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-Quad.of(other))

    def at(self, point) -> int:
        v = self.const
        for (i, j), c in self.quad.items():
            v += c * point[i] * point[j]
        for i, c in self.lin.items():
            v += c * point[i]
        if v.denominator != 1:
            raise ValueError("q-exponent is not integral at this point")
        return int(v)


def binom2(L) -> Quad:
    """``L (L - 1) / 2``."""
    L = Lin.of(L)
    return Quad.product(L, L - 1, Fraction(1, 2))


def e2(forms: Sequence) -> Quad:
    """Second elementary symmetric function of the given forms."""
    out = Quad()
    forms = list(forms)
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            out = out + Quad.product(forms[i], forms[j])
    return out


class TermBuilder:
    """Collects factors of a summand over ``dim`` integer slots."""

    def __init__(self, field: QField, dim: int):
        self.field = field
        self.dim = dim
        self.factors: list = []  # (ladder, Lin, sign)
        self.quad = Quad()
        self.unit = field.one
        self.order = 0
        self.inf_num: list = []
        self.inf_den: list = []

    # constants ---------------------------------------------------------
    def _mul_const(self, u, o, sign):
        if sign > 0:
            self.unit = self.unit * u
            self.order += o
        else:
            self.unit = self.unit / u
            self.order -= o

    def const(self, value, sign: int = 1):
        f = self.field
        if isinstance(value, Param):
            value = f.value(value)
        else:
            value = f.mode.convert(value)
        if value == 0:
            self._mul_const(f.one, 1, sign)
        else:
            self._mul_const(value, 0, sign)
        return self

    # index-dependent factors --------------------------------------------
    def poch(self, x, L, sign: int = 1):
        """``(x; q)_L`` (or its reciprocal for ``sign=-1``)."""
        L = Lin.of(L)
        with self.field:
            lad = self.field.poch_ladder(x)
            if L.is_const:
                self._mul_const(*lad.get(L.offset), sign)
            else:
                self.factors.append((lad, L, sign))
        return self

    def pochs(self, xs: Iterable, L, sign: int = 1):
        for x in xs:
            self.poch(x, L, sign)
        return self

    def ratio(self, num: Iterable, den: Iterable, L):
        self.pochs(num, L, 1)
        self.pochs(den, L, -1)
        return self

    def factor(self, x, L, sign: int = 1):
        """``1 - x q^L``."""
        L = Lin.of(L)
        self.poch(x, L + 1, sign)
        self.poch(x, L, -sign)
        return self

    def vwp(self, a, L):
        """``(1 - a q^{2L}) / (1 - a)``."""
        self.factor(a, 2 * Lin.of(L))
        self.factor(a, 0, -1)
        return self

    def diff(self, x, Lx, y, Ly, sign: int = 1):
        """``(x q^{Lx} - y q^{Ly}) / (x - y)``."""
        x, y = Param.of(x), Param.of(y)
        f = self.field
        with f:
            xv, yv = f.value(x), f.value(y)
            d = xv - yv
            if d == 0:
                self._mul_const(f.one, -1, sign)
            else:
                self._mul_const(xv / d, 0, sign)
        Lx = Lin.of(Lx)
        self.qpow(Lx * sign)
        self.factor(y / x, Lin.of(Ly) - Lx, sign)
        return self

    def power(self, base, L, sign: int = 1):
        """``base^L`` for a parameter or number ``base``."""
        L = Lin.of(L) * sign
        f = self.field
        if isinstance(base, Param):
            if base.qexp:
                self.qpow(Quad.product(L, base.qexp))
            base = base.coef
        with f:
            lad = f.pow_ladder(base)
            if L.is_const:
                self._mul_const(*lad.get(L.offset), 1)
            else:
                self.factors.append((lad, L, 1))
        return self

    def sign(self, L):
        """``(-1)^L``."""
        return self.power(-1, L)

    def qpow(self, Qf):
        """``q^{Q}`` for a linear or quadratic exponent."""
        self.quad = self.quad + Quad.of(Qf)
        return self

    # infinite products ---------------------------------------------------
    def inf(self, num: Iterable = (), den: Iterable = ()):
        """Multiply by ``prod (num)_inf / prod (den)_inf``."""
        self.inf_num.extend(num)
        self.inf_den.extend(den)
        return self

    def build(self, inf_tol=None) -> "Plan":
        f = self.field
        unit, order = self.unit, self.order
        if self.inf_num or self.inf_den:
            with f:
                if f.mode.exact:
                    from .scalarfield import cancel_identical, pair_infinite
                    n, d = cancel_identical(self.inf_num, self.inf_den, f)
                    _, n, d = pair_infinite(f, n, d)
                    if n or d:
                        raise TypeError(
                            "infinite products that do not reduce to finite ones "
                            "need BigFloat mode")
                u, o = ratio_value(f, self.inf_num, self.inf_den, math.inf, inf_tol)
                unit = unit * u
                order += o
        return Plan(f, self.dim, list(self.factors), self.quad, unit, order)


class Plan:
    """Batch evaluator for a product term over ``dim`` integer slots."""

    def __init__(self, field: QField, dim: int, factors, quad: Quad, unit, order):
        self.field = field
        self.dim = dim
        self.ladders = [lad for lad, _, _ in factors]
        self.forms = [L for _, L, _ in factors]
        self.signs = np.array([s for _, _, s in factors], dtype=np.int64)
        F = len(factors)
        self.coef = np.zeros((F, dim), dtype=np.int64)
        self.offset = np.zeros(F, dtype=np.int64)
        for j, L in enumerate(self.forms):
            for i, v in L.coeffs.items():
                self.coef[j, i] = v
            self.offset[j] = L.offset
        self.quad = quad
        # twice the quadratic exponent has integer coefficients
        self.q2 = np.zeros((dim, dim), dtype=np.int64)
        self.l2 = np.zeros(dim, dtype=np.int64)
        for (i, j), c in quad.quad.items():
            self.q2[i, j] = int(2 * c)
        for i, c in quad.lin.items():
            self.l2[i] = int(2 * c)
        self.c2 = int(2 * quad.const)
        for c in list(quad.quad.values()) + list(quad.lin.values()) + [quad.const]:
            if (2 * c).denominator != 1:
                raise ValueError("q-exponent coefficients must be half-integers")
        self.unit = unit
        self.order = order

    def exponents(self, pts: np.ndarray) -> np.ndarray:
        e2x = (pts @ self.q2 * pts).sum(axis=1) + pts @ self.l2 + self.c2
        if np.any(e2x % 2):
            raise ValueError("q-exponent is not integral on the lattice")
        return e2x // 2

    def evaluate(self, points) -> tuple[list, list]:
        """``(units, orders)`` at each row of ``points``."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.dim)
        f = self.field
        with f:
            idx = pts @ self.coef.T + self.offset
            if idx.size:
                span = np.abs(idx).max(axis=0)
                for lad, s in zip(self.ladders, span):
                    lad.ensure(int(s))
            qe = self.exponents(pts)
            qlad = f.qpow_ladder()
            if qe.size:
                qlad.ensure(int(np.abs(qe).max()))
            return kernels.eval_points(
                idx, self.signs,
                [lad.units for lad in self.ladders],
                [lad.orders for lad in self.ladders],
                [lad.origin for lad in self.ladders],
                qe, qlad.units, qlad.origin, self.unit, self.order)

    def __call__(self, point):
        """Single term value: number, exact zero, or :data:`POLE`."""
        u, o = self.evaluate([tuple(point)])
        with self.field:
            return finalize(u[0], o[0])

    def value(self):
        """Value of a zero-dimensional plan (a closed-form product)."""
        if self.dim:
            raise ValueError("plan depends on an index")
        with self.field:
            return finalize(self.unit, self.order)

    def scan_truncation(self):
        """Half-spaces on which the term is forced to vanish.

        Returns a list of ``(Lin, bound, kind)`` with ``kind`` '<=' or '>='
        meaning the term can be nonzero only when ``L <= bound`` (resp.
        ``>=``).  Derived from numerator/denominator Pochhammers whose
        argument is an integral power of q.
        """
        out = []
        f = self.field
        for lad, L, s in zip(self.ladders, self.forms, self.signs):
            key = None
            for k, v in f._poch.items():
                if v is lad:
                    key = k
                    break
            if key is None or key[0] != 1:
                continue
            e = key[1]
            if s > 0 and e <= 0:
                out.append((L, -e, "<="))
            elif s < 0 and e >= 1:
                out.append((L, 1 - e, ">="))
        return out


__all__ = ["Lin", "Quad", "variables", "total", "binom2", "e2", "TermBuilder", "Plan", "POLE"]
