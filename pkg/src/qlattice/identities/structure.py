"""Root-system structure factors and the parameter container."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from ..scalarfield import NumericMode, Param, QField
from ..terms import Lin, TermBuilder, variables

__all__ = ["ParamSet", "P", "prod", "add_ar", "add_cr", "add_dr",
           "ar_factor", "cr_factor", "dr_factor"]


def P(x) -> Param:
    return Param.of(x)


def prod(xs, start=None):
    out = Param(1) if start is None else Param.of(start)
    for x in xs:
        out = out * x
    return out


def _frac(x):
    if isinstance(x, Param):
        return x
    if x is None:
        return None
    return Fraction(x)


@dataclass(frozen=True)
class ParamSet:
    """Values for every symbol an identity may use.

    Scalars are exact rationals or :class:`~qlattice.scalarfield.Param`
    monomials (for specialisations such as ``c_i = q^{-k_i}``).
    """

    q: Fraction
    r: int = 1
    a: object = None
    b: object = None
    c: object = None
    d: object = None
    e: object = None
    f: object = None
    g: object = None
    cs: tuple = ()
    es: tuple = ()
    xs: tuple = ()
    M: int = 0
    ms: tuple = ()
    ks: tuple = ()
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        for name in "abcdefg":
            object.__setattr__(self, name, _frac(getattr(self, name)))
        for name in ("cs", "es", "xs"):
            object.__setattr__(self, name, tuple(_frac(v) for v in getattr(self, name)))
        object.__setattr__(self, "ms", tuple(int(v) for v in self.ms))
        object.__setattr__(self, "ks", tuple(int(v) for v in self.ks))

    @property
    def C(self) -> Param:
        return prod(P(c) for c in self.cs)

    @property
    def E(self) -> Param:
        return prod(P(e) for e in self.es)

    def with_(self, **kw) -> "ParamSet":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        out = {"q": str(self.q), "r": self.r}
        for name in "abcdefg":
            v = getattr(self, name)
            if v is not None:
                out[name] = _show(v)
        for name in ("cs", "es", "xs"):
            v = getattr(self, name)
            if v:
                out[name] = [_show(x) for x in v]
        out["M"] = self.M
        if self.ms:
            out["ms"] = list(self.ms)
        if self.ks:
            out["ks"] = list(self.ks)
        if self.k:
            out["k"] = self.k
        return out

    def digest(self) -> str:
        import hashlib
        import json
        return hashlib.sha256(json.dumps(self.as_dict(), sort_keys=True).encode()).hexdigest()[:16]


def _show(v):
    if isinstance(v, Param):
        return f"{v.coef}*q^{v.qexp}" if v.qexp else str(v.coef)
    return str(v)


# -- structure factors as term-builder pieces --------------------------------


def add_ar(tb: TermBuilder, xs: Sequence, n: Sequence[Lin]):
    """``prod_{i<j} (x_i q^{n_i} - x_j q^{n_j}) / (x_i - x_j)``."""
    r = len(xs)
    for i in range(r):
        for j in range(i + 1, r):
            tb.diff(xs[i], n[i], xs[j], n[j])
    return tb


def add_pair_vwp(tb: TermBuilder, a, xs, n, diagonal: bool):
    """``prod (1 - a x_i x_j q^{n_i+n_j}) / (1 - a x_i x_j)`` over i<j (or i<=j)."""
    r = len(xs)
    for i in range(r):
        for j in range(i if diagonal else i + 1, r):
            y = P(a) * xs[i] * xs[j]
            tb.factor(y, n[i] + n[j])
            tb.factor(y, 0, -1)
    return tb


def add_cr(tb, xs, n, a=1):
    add_ar(tb, xs, n)
    return add_pair_vwp(tb, a, xs, n, True)


def add_dr(tb, xs, n, a=1):
    add_ar(tb, xs, n)
    return add_pair_vwp(tb, a, xs, n, False)


def _factor_value(kind, params: ParamSet, k, mode):
    mode = mode or NumericMode.rational()
    field = QField(mode, params.q)
    xs = [P(x) for x in params.xs]
    r = len(xs)
    if len(k) != r:
        raise ValueError("index length must match the number of x_i")
    tb = TermBuilder(field, r)
    n = variables(0, r)
    {"A": add_ar, "C": add_cr, "D": add_dr}[kind](tb, xs, n)
    return tb.build()(tuple(k))


def ar_factor(params: ParamSet, k, mode=None):
    """A_r structure factor at index ``k`` (pole when two x_i coincide)."""
    return _factor_value("A", params, k, mode)


def cr_factor(params: ParamSet, k, mode=None):
    """C_r factor: the A_r factor times ``prod_{i<=j}(1-x_i x_j q^{k_i+k_j})/(1-x_i x_j)``."""
    return _factor_value("C", params, k, mode)


def dr_factor(params: ParamSet, k, mode=None):
    return _factor_value("D", params, k, mode)
