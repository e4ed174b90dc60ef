"""Two-mode scalar arithmetic and q-shifted factorials.

Scalars are plain gmpy2 numbers: ``mpq`` in exact mode, ``mpfr`` in
big-float mode.  Parameters of q-series are carried as monomials
``coef * q**qexp`` (:class:`Param`) so that vanishing factors such as
``1 - q^{-M} q^{M}`` are detected exactly in either mode.

Term values are either a finite number, an exact zero (the number 0) or
the :data:`POLE` sentinel.  Internally every value is tracked as a pair
``(unit, order)``: ``order`` counts vanishing numerator factors minus
vanishing denominator factors and ``unit`` is the product of the
non-vanishing ones.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpfr, mpq

__all__ = [
    "NumericMode",
    "Param",
    "Q",
    "POLE",
    "is_pole",
    "QField",
    "Ladder",
    "finalize",
    "qpoch",
    "qpoch_inf",
    "qpoch_multi",
    "qpoch_ratio",
]


class _Pole:
    __slots__ = ()

    def __repr__(self):
        return "POLE"

    def __reduce__(self):
        return (_get_pole, ())


def _get_pole():
    return POLE


POLE = _Pole()


def is_pole(value) -> bool:
    return value is POLE


def finalize(unit, order):
    """Collapse a ``(unit, order)`` pair to a term value."""
    if order > 0:
        return unit * 0
    if order < 0:
        return POLE
    return unit


@dataclass(frozen=True)
class NumericMode:
    """Exact rationals (``digits is None``) or binary floats of ``digits`` decimal digits."""

    digits: int | None = 50

    def __post_init__(self):
        if self.digits is not None and self.digits < 30:
            raise ValueError("BigFloat mode needs at least 30 digits")

    @classmethod
    def rational(cls) -> "NumericMode":
        return cls(None)

    @classmethod
    def bigfloat(cls, digits: int = 50) -> "NumericMode":
        return cls(digits)

    @property
    def exact(self) -> bool:
        return self.digits is None

    @property
    def bits(self) -> int:
        return int(math.ceil(self.digits * math.log2(10))) + 16

    @property
    def name(self) -> str:
        return "rational" if self.exact else f"float{self.digits}"

    def context(self):
        if self.exact:
            return contextlib.nullcontext()
        return gmpy2.context(precision=self.bits)

    def convert(self, x):
        if self.exact:
            if isinstance(x, mpfr) or isinstance(x, float):
                raise TypeError("inexact value in ExactRational mode")
            return to_mpq(x)
        if isinstance(x, (Fraction,)):
            x = mpq(x.numerator, x.denominator)
        return mpfr(x)

    def eps(self):
        """Relative threshold under which a float factor counts as zero."""
        return mpfr(2) ** (-(self.bits - 12))


def to_mpq(x):
    if isinstance(x, type(mpq(0))):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x).numerator, Fraction(x).denominator)
    return mpq(x)


def _coerce_coef(x):
    if isinstance(x, (int, Fraction, str)) or type(x) is type(mpq(0)):
        return to_mpq(x)
    if isinstance(x, float):
        return mpq(x)
    return x


class Param:
    """A monomial ``coef * q**qexp`` in the (symbolic) base q."""

    __slots__ = ("coef", "qexp")

    def __init__(self, coef=1, qexp: int = 0):
        if isinstance(coef, Param):
            coef, qexp = coef.coef, coef.qexp + qexp
        object.__setattr__(self, "coef", _coerce_coef(coef))
        object.__setattr__(self, "qexp", int(qexp))

    def __setattr__(self, name, value):
        raise AttributeError("Param is immutable")

    @staticmethod
    def of(x) -> "Param":
        return x if isinstance(x, Param) else Param(x, 0)

    def __mul__(self, other):
        o = Param.of(other)
        return Param(self.coef * o.coef, self.qexp + o.qexp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Param.of(other)
        return Param(self.coef / o.coef, self.qexp - o.qexp)

    def __rtruediv__(self, other):
        return Param.of(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Param powers must be integers")
        return Param(self.coef ** n, self.qexp * n)

    def __neg__(self):
        return Param(-self.coef, self.qexp)

    def __eq__(self, other):
        if not isinstance(other, Param):
            other = Param.of(other)
        return self.coef == other.coef and self.qexp == other.qexp

    def __hash__(self):
        return hash((self.coef, self.qexp))

    def __repr__(self):
        if self.qexp == 0:
            return f"Param({self.coef})"
        return f"Param({self.coef}*q^{self.qexp})"


Q = Param(1, 1)


class Ladder:
    """Cached table of ``(unit, order)`` for an integer-indexed sequence.

    ``units[origin + m]`` / ``orders[origin + m]`` hold the entry at index
    ``m`` for ``-radius <= m <= radius``.
    """

    __slots__ = ("units", "orders", "origin", "radius", "_step", "_one")

    def __init__(self, step, one):
        # step(j) -> (factor, is_zero): entry[m+1] = entry[m] * factor(m)
        self._step = step
        self._one = one
        self.units = [one]
        self.orders = [0]
        self.origin = 0
        self.radius = 0

    def ensure(self, radius: int) -> None:
        if radius <= self.radius:
            return
        radius = max(radius, 2 * self.radius, 8)
        step = self._step
        up_u, up_o = [], []
        u, o = self._one, 0
        for m in range(radius):
            f, zero = step(m)
            if zero:
                o += 1
            else:
                u = u * f
            up_u.append(u)
            up_o.append(o)
        dn_u, dn_o = [], []
        u, o = self._one, 0
        for m in range(-1, -radius - 1, -1):
            f, zero = step(m)
            if zero:
                o -= 1
            else:
                u = u / f
            dn_u.append(u)
            dn_o.append(o)
        dn_u.reverse()
        dn_o.reverse()
        self.units = dn_u + [self._one] + up_u
        self.orders = dn_o + [0] + up_o
        self.origin = radius
        self.radius = radius

    def get(self, m: int):
        if abs(m) > self.radius:
            self.ensure(abs(m))
        i = self.origin + m
        return self.units[i], self.orders[i]


class QField:
    """Evaluation context for one numeric mode and one base q.

    Holds memoised powers of q, Pochhammer ladders keyed by normalised
    argument and power ladders.  Build one per verification run; values
    computed here must be used under ``with field:`` (float precision).
    """

    def __init__(self, mode: NumericMode, q, tail_tol=None):
        self.mode = mode
        self.q = _coerce_coef(q.coef if isinstance(q, Param) and q.qexp == 0 else q)
        self._exact_q = type(self.q) is type(mpq(0))
        with mode.context():
            self.qv = mode.convert(self.q)
            if not (0 < self.qv < 1):
                raise ValueError("base q must satisfy 0 < q < 1")
            self.one = mode.convert(1)
            self.zero = mode.convert(0)
            self._eps = None if mode.exact else mode.eps()
        if tail_tol is None:
            tail_tol = None if mode.exact else mpfr(10) ** (-(mode.digits - 5))
        self.tail_tol = tail_tol
        self._qpow = Ladder(self._qpow_step, self.one)
        self._norm: dict = {}
        self._values: dict = {}
        self._poch: dict = {}
        self._pow: dict = {}
        self._inf: dict = {}
        self._ctx = []

    # -- context -------------------------------------------------------
    def __enter__(self):
        ctx = self.mode.context()
        ctx.__enter__()
        self._ctx.append(ctx)
        return self

    def __exit__(self, *exc):
        return self._ctx.pop().__exit__(*exc)

    # -- basic values --------------------------------------------------
    def _qpow_step(self, m):
        return self.qv, False

    def qpow(self, n: int):
        return self._qpow.get(n)[0]

    def normalize(self, x) -> Param:
        """Fold an exact power of q out of the coefficient of ``x``."""
        x = Param.of(x)
        key = (x.coef, x.qexp)
        hit = self._norm.get(key)
        if hit is not None:
            return hit
        out = x
        c = x.coef
        if c != 1 and self._exact_q and type(c) is type(mpq(0)) and c > 0:
            try:
                t = round(math.log(float(c)) / math.log(float(self.q)))
            except (OverflowError, ValueError):
                t = None
            if t is not None and abs(t) < 100000 and self.q ** t == c:
                out = Param(1, x.qexp + t)
        self._norm[key] = out
        return out

    def value(self, x):
        """Numeric value of a parameter (mode scalar)."""
        if not isinstance(x, Param):
            return self.mode.convert(x)
        key = (x.coef, x.qexp)
        v = self._values.get(key)
        if v is None:
            v = self.mode.convert(x.coef)
            if x.qexp:
                v = v * self.qpow(x.qexp)
            self._values[key] = v
        return v

    def is_q_power(self, x) -> bool:
        return self.normalize(x).coef == 1

    def _factor(self, xn: Param, j: int):
        """``1 - x q^j`` together with an exact-zero flag."""
        if xn.coef == 1:
            e = xn.qexp + j
            if e == 0:
                return self.zero, True
            return self.one - self.qpow(e), False
        f = self.one - self.value(Param(xn.coef, xn.qexp + j))
        if f == 0:
            return f, True
        if self._eps is not None and type(xn.coef) is not type(mpq(0)) and abs(f) < self._eps:
            return f, True
        return f, False

    # -- ladders -------------------------------------------------------
    def poch_ladder(self, x) -> Ladder:
        xn = self.normalize(x)
        key = (xn.coef, xn.qexp)
        lad = self._poch.get(key)
        if lad is None:
            lad = Ladder(lambda j, xn=xn: self._factor(xn, j), self.one)
            self._poch[key] = lad
        return lad

    def pow_ladder(self, base) -> Ladder:
        if isinstance(base, Param):
            base = self.value(base)
        else:
            base = self.mode.convert(base)
        lad = self._pow.get(base)
        if lad is None:
            zero = base == 0
            lad = Ladder(lambda j, b=base, z=zero: (b, z), self.one)
            self._pow[base] = lad
        return lad

    def qpow_ladder(self) -> Ladder:
        return self._qpow

    def poch(self, x, k: int):
        """``(x; q)_k`` as ``(unit, order)`` for any integer k."""
        return self.poch_ladder(x).get(k)

    def poch_inf(self, x, rel_tol=None):
        """``(x; q)_inf`` as ``(unit, order)`` with relative error <= rel_tol."""
        if self.mode.exact:
            raise TypeError("infinite q-products are not available in ExactRational mode")
        xn = self.normalize(x)
        tol = self.tail_tol if rel_tol is None else mpfr(rel_tol)
        key = (xn.coef, xn.qexp, tol)
        hit = self._inf.get(key)
        if hit is not None:
            return hit
        unit, order = _inf_product(self, xn, tol, absolute=False)
        self._inf[key] = (unit, order)
        return unit, order


def _inf_product(field: QField, xn: Param, tol, absolute: bool):
    """Tail-bounded product over j >= 0 of ``1 - x q^j``.

    Stops at J once the remaining log-product is bounded by
    ``delta = |x| q^J / ((1-q)(1 - |x| q^J))`` and ``2*delta`` (times
    ``max(|P|,1)`` for an absolute bound) is below ``tol/2``.
    """
    q = field.qv
    one = field.one
    ax = abs(field.value(xn))
    unit, order = one, 0
    j = 0
    while True:
        t = ax * field.qpow(j)
        if t < 0.5:
            delta = t / ((one - q) * (one - t))
            scale = max(abs(unit), one) if absolute else one
            if 2 * delta * scale <= tol / 2:
                break
        f, zero = field._factor(xn, j)
        if zero:
            order += 1
        else:
            unit = unit * f
        j += 1
    return unit, order


# ---------------------------------------------------------------------------
# Public one-shot operations


def _field(q, mode: NumericMode | None) -> QField:
    return QField(mode or NumericMode.rational(), q)


def qpoch(a, q, k: int, mode: NumericMode | None = None):
    """q-shifted factorial ``(a; q)_k`` for any integer ``k``.

    Returns a finite scalar, an exact zero, or :data:`POLE` when a
    denominator factor of a negative-index product vanishes.
    """
    f = _field(q, mode)
    with f:
        return finalize(*f.poch(a, int(k)))


def qpoch_inf(a, q, tail_tol, mode: NumericMode | None = None):
    """``(a; q)_inf`` with absolute error at most ``tail_tol`` (BigFloat only)."""
    mode = mode or NumericMode.bigfloat()
    if mode.exact:
        raise TypeError("qpoch_inf rejects ExactRational mode")
    f = QField(mode, q)
    with f:
        xn = f.normalize(a)
        unit, order = _inf_product(f, xn, mpfr(tail_tol), absolute=True)
        return finalize(unit, order)


def qpoch_multi(args: Sequence, q, k, mode: NumericMode | None = None):
    """``(a_1, ..., a_m; q)_k``; a pole anywhere in the list dominates."""
    f = _field(q, mode) if k != math.inf else QField(mode or NumericMode.bigfloat(), q)
    with f:
        vals = [f.poch_inf(a) if k == math.inf else f.poch(a, int(k)) for a in args]
        if any(o < 0 for _, o in vals):
            return POLE
        unit = f.one
        order = 0
        for u, o in vals:
            unit = unit * u
            order += o
        return finalize(unit, order)


def cancel_identical(num: Iterable, den: Iterable, field: QField | None = None):
    """Multiset difference of numerator and denominator parameter lists."""
    norm = field.normalize if field is not None else Param.of
    num = [norm(x) for x in num]
    den = [norm(x) for x in den]
    rest = []
    for x in num:
        if x in den:
            den.remove(x)
        else:
            rest.append(x)
    return rest, den


def pair_infinite(field: QField, num: list, den: list):
    """Pair ``(x q^m)_inf`` with ``(x)_inf`` across numerator and denominator.

    Each pair reduces to the finite ratio ``(x q^m)_inf / (x)_inf = 1/(x)_m``.
    Returns ``(finite_factors, num_left, den_left)``; finite factors are
    ``(param, index, sign)`` triples.
    """
    num = [field.normalize(x) for x in num]
    den = [field.normalize(x) for x in den]
    finite = []
    left_num = []
    for x in num:
        best = None
        for i, y in enumerate(den):
            if y.coef == x.coef:
                d = abs(x.qexp - y.qexp)
                if best is None or d < best[0]:
                    best = (d, i)
        if best is None:
            left_num.append(x)
            continue
        y = den.pop(best[1])
        # (x)_inf / (y)_inf with x = y q^m  ->  1 / (y)_m
        finite.append((y, x.qexp - y.qexp, -1))
    return finite, left_num, den


def ratio_value(field: QField, num: Sequence, den: Sequence, k, rel_tol=None):
    """``(unit, order)`` of ``prod (num)_k / prod (den)_k`` with pre-cancellation."""
    num, den = cancel_identical(num, den, field)
    unit, order = field.one, 0
    if k == math.inf:
        finite, num, den = pair_infinite(field, num, den)
        parts = [(field.poch(x, m), s) for x, m, s in finite]
        n_inf = len(num) + len(den)
        tol = None
        if n_inf:
            base = field.tail_tol if rel_tol is None else mpfr(rel_tol)
            tol = base / n_inf
        parts += [(field.poch_inf(x, tol), 1) for x in num]
        parts += [(field.poch_inf(x, tol), -1) for x in den]
    else:
        parts = [(field.poch(x, int(k)), 1) for x in num]
        parts += [(field.poch(x, int(k)), -1) for x in den]
    for (u, o), s in parts:
        if s > 0:
            unit = unit * u
            order += o
        else:
            unit = unit / u
            order -= o
    return unit, order


def qpoch_ratio(num: Sequence, den: Sequence, q, k, tail_tol=None, mode: NumericMode | None = None):
    """``prod (num)_k / prod (den)_k`` with zero/pole bookkeeping.

    Identical entries cancel first.  A vanishing denominator factor gives
    :data:`POLE` unless a vanishing numerator factor cancels it.  At
    ``k = math.inf`` arguments differing by an integral power of q are
    reduced to finite products; the rest are tail-bounded so that the
    relative error of the result is at most ``tail_tol``.
    """
    if mode is None:
        mode = NumericMode.bigfloat() if k == math.inf else NumericMode.rational()
    f = QField(mode, q)
    with f:
        unit, order = ratio_value(f, num, den, k, tail_tol)
        return finalize(unit, order)
