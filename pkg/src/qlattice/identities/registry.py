"""Identity registry: specs, building, and verification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from gmpy2 import mpfr

from ..latticesum import (CONVERGED, DIVERGENT, INCONCLUSIVE, Bilateral, Box,
                          ConvergencePolicy, Simplex, SumOutcome, Summand,
                          detect_natural_truncation, sum_bilateral, sum_finite)
from ..scalarfield import NumericMode, Q, QField, is_pole
from ..terms import TermBuilder
from . import builders as B
from .structure import P, ParamSet

__all__ = ["IdentitySpec", "REGISTRY", "get", "ids", "Built", "build", "verify",
           "VerificationRecord", "ConstraintError", "residual", "PASS", "FAIL"]

PASS = "Pass"
FAIL = "Fail"


class ConstraintError(ValueError):
    """A parameter set violates a named constraint of an identity."""

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        super().__init__(f"{predicate}: {detail}" if detail else predicate)


def _mod_bailey(p):
    return P(p.a) ** 2 * Q / (P(p.b) * P(p.c) * P(p.d) * P(p.e))


def _mod_transform(p):
    return P(p.a) ** 3 * Q ** 2 / (P(p.b) * P(p.c) * P(p.d) * P(p.e) * P(p.f) * P(p.g))


def _mod_multi66(p):
    return P(p.a) ** (p.r + 1) * Q / (P(p.b) * p.C * P(p.d) * p.E)


def _mod_dr66(p):
    return P(p.a) ** 2 * Q / (P(p.b) * P(p.c) * P(p.d) * p.E)


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    root_system: str  # "A", "C", "D" or "OneDim"
    anchor: str
    builder: Callable
    kind: str  # "terminating", "bilateral", "transform"
    scalars: tuple
    vectors: tuple = ()
    ints: tuple = ()
    modulus: Callable | None = None
    expected: str = "Valid"
    one_dim: bool = False

    @property
    def terminating(self) -> bool:
        return self.kind == "terminating"

    def support(self, p: ParamSet):
        if self.id == "dgml_cr_8phi7":
            return Box(p.ms)
        if self.id == "jackson_8phi7":
            return Simplex(p.M)
        return Simplex(p.M)

    def check(self, p: ParamSet, field: QField | None = None) -> None:
        """Raise :class:`ConstraintError` naming the first failing predicate."""
        if self.one_dim and p.r != 1:
            raise ConstraintError("dimension", f"{self.id} is one-dimensional")
        for s in self.scalars:
            if getattr(p, s) is None:
                raise ConstraintError(f"symbol {s}", "missing")
        for v in self.vectors:
            if len(getattr(p, v)) != p.r:
                raise ConstraintError(f"vector {v}", f"needs length r={p.r}")
        if "ms" in self.ints and len(p.ms) != p.r:
            raise ConstraintError("vector m", f"needs length r={p.r}")
        if "ks" in self.ints and len(p.ks) != p.r:
            raise ConstraintError("vector k", f"needs length r={p.r}")
        if p.M < 0 or any(m < 0 for m in p.ms):
            raise ConstraintError("nonnegative M, m_i")
        if self.modulus is not None:
            z = self.modulus(p)
            zv = abs(float(z.coef) * float(p.q) ** z.qexp)
            if not zv < 1:
                raise ConstraintError("convergence modulus", f"|z| = {zv:.4g} >= 1")
        xs = list(p.xs) if p.xs else [1] * p.r
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                if P(xs[i]) == P(xs[j]):
                    raise ConstraintError("distinct x_i", f"x_{i + 1} = x_{j + 1}")


IDENTITIES = [
    IdentitySpec("bailey_6psi6", "OneDim", "very-well-poised 6psi6 summation (Bailey)",
                 B.bailey_6psi6, "bilateral", ("a", "b", "c", "d", "e"),
                 modulus=_mod_bailey, one_dim=True),
    IdentitySpec("jackson_8phi7", "OneDim",
                 "terminating balanced very-well-poised 8phi7 summation (Jackson)",
                 B.jackson_8phi7, "terminating", ("a", "b", "c", "d"), one_dim=True),
    IdentitySpec("schlosser_8psi8", "OneDim", "balanced very-well-poised 8psi8 summation",
                 B.schlosser_8psi8, "bilateral", ("a", "b", "c", "d"), ints=("k",),
                 one_dim=True),
    IdentitySpec("mjackson_8psi8_transform", "OneDim",
                 "8psi8 into two 8phi7 transformation (M. Jackson)",
                 None, "transform", ("a", "b", "c", "d", "e", "f", "g"),
                 modulus=_mod_transform, one_dim=True),
    IdentitySpec("milne_ar_8phi7", "A", "A_r terminating balanced VWP 8phi7 (Milne)",
                 B.milne_ar_8phi7, "terminating", ("a", "b", "d"), ("cs", "xs")),
    IdentitySpec("schlosser_ar_8phi7", "A", "A_r terminating balanced VWP 8phi7, second form",
                 B.schlosser_ar_8phi7, "terminating", ("a", "b", "d"), ("cs", "xs")),
    IdentitySpec("dgml_cr_8phi7", "C",
                 "C_r terminating balanced VWP 8phi7 (Denis-Gustafson; Milne-Lilly)",
                 B.dgml_cr_8phi7, "terminating", ("a", "b", "c", "d"), ("xs",), ("ms",)),
    IdentitySpec("schlosser_dr_8phi7", "D", "D_r terminating balanced VWP 8phi7",
                 B.schlosser_dr_8phi7, "terminating", ("a", "b", "c", "d"), ("cs", "xs")),
    IdentitySpec("gustafson_ar_6psi6", "A", "A_r very-well-poised 6psi6 (Gustafson)",
                 B.gustafson_ar_6psi6, "bilateral", ("a", "b", "d"), ("cs", "es", "xs"),
                 modulus=_mod_multi66),
    IdentitySpec("schlosser_ar_6psi6", "A", "A_r very-well-poised 6psi6, second form",
                 B.schlosser_ar_6psi6, "bilateral", ("a", "b", "d"), ("cs", "es", "xs"),
                 modulus=_mod_multi66),
    IdentitySpec("gustafson_cr_6psi6", "C", "C_r very-well-poised 6psi6 (Gustafson)",
                 B.gustafson_cr_6psi6, "bilateral", ("a", "b", "d"), ("cs", "es", "xs"),
                 modulus=_mod_multi66),
    IdentitySpec("ar_8psi8", "A", "A_r balanced VWP 8psi8 via the first A_r inverse",
                 B.ar_8psi8, "bilateral", ("a", "b", "d"), ("cs", "xs"), ("ks",)),
    IdentitySpec("arv_8psi8", "A", "A_r balanced VWP 8psi8 via the second A_r inverse",
                 B.arv_8psi8, "bilateral", ("a", "b", "d"), ("cs", "xs"), ("ks",)),
    IdentitySpec("cr_8psi8", "C", "C_r balanced VWP 8psi8 via the C_r/D_r inverse",
                 B.cr_8psi8, "bilateral", ("a", "b", "d"), ("cs", "xs"), ("ks",)),
    IdentitySpec("dr_6psi6_false", "D",
                 "D_r 6psi6 obtained by a false right-inverse (diverges for r >= 2)",
                 B.dr_6psi6_false, "bilateral", ("a", "b", "c", "d"), ("cs", "es", "xs"),
                 modulus=_mod_dr66, expected="DivergentForRGe2"),
]

REGISTRY = {spec.id: spec for spec in IDENTITIES}


def ids() -> list[str]:
    return [s.id for s in IDENTITIES]


def get(identity: str) -> IdentitySpec:
    try:
        return REGISTRY[identity]
    except KeyError:
        raise KeyError(f"unknown identity {identity!r}; known: {', '.join(ids())}") from None


def default_mode(spec: IdentitySpec) -> NumericMode:
    return NumericMode.rational() if spec.terminating else NumericMode.bigfloat()


@dataclass
class Built:
    spec: IdentitySpec
    params: ParamSet
    field: QField
    summand: object
    support: object
    rhs: object


def build(identity: str, params: ParamSet, mode: NumericMode | None = None,
          tail_tol=None, check: bool = True, **options) -> Built:
    """Summand plan, support hint and closed-form value of one identity."""
    spec = get(identity)
    if spec.kind == "transform":
        raise ValueError("the transformation entry is evaluated by qseries1d.verify_8psi8_transform")
    mode = mode or default_mode(spec)
    if check:
        spec.check(params)
    field = QField(mode, params.q, tail_tol=_tail(mode, tail_tol))
    with field:
        tb = TermBuilder(field, params.r)
        rhs = TermBuilder(field, 0)
        spec.builder(tb, rhs, params, **options)
        plan = tb.build()
        rhs_val = rhs.build().value()
    support = spec.support(params) if spec.terminating else Bilateral()
    return Built(spec, params, field, Summand(plan), support, rhs_val)


def _tail(mode, tail_tol):
    if mode.exact:
        return None
    if tail_tol is None:
        tail_tol = 1e-17  # campaign_tol / 100 at the default 1e-15
    return mpfr(tail_tol)


@dataclass
class VerificationRecord:
    id: str
    r: int
    seed: int | None
    params: dict
    digest: str
    lhs: SumOutcome | None
    rhs: object
    residual: object
    status: str
    wall: float = 0.0
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        lhs = None
        if self.lhs is not None:
            lhs = {"value": _num(self.lhs.value), "status": self.lhs.status,
                   "shells_used": self.lhs.shells_used, "exact": self.lhs.exact,
                   "terms": self.lhs.terms,
                   "pole_hit": list(self.lhs.pole_hit.entries) if self.lhs.pole_hit else None}
        return {"id": self.id, "r": self.r, "seed": self.seed, "params": self.params,
                "digest": self.digest, "lhs": lhs, "rhs": _num(self.rhs),
                "residual": _num(self.residual), "status": self.status,
                "wall_seconds": round(self.wall, 4), "note": self.note,
                **({"extra": self.extra} if self.extra else {})}


def _num(v):
    if v is None:
        return None
    if is_pole(v):
        return "pole"
    try:
        import gmpy2
        if isinstance(v, type(gmpy2.mpq(0))):
            return str(v)
        if isinstance(v, type(gmpy2.mpfr(0))):
            return format(v, ".40g") if gmpy2.is_finite(v) else str(v)
    except Exception:
        pass
    return str(v)


def residual(lhs, rhs):
    """``|lhs - rhs| / max(|rhs|, 1)``."""
    return abs(lhs - rhs) / max(abs(rhs), 1)


def decide(outcome: SumOutcome, rhs, tol, exact: bool):
    """``(status, residual)`` for one comparison."""
    if outcome.status == DIVERGENT:
        return DIVERGENT, None
    if outcome.status != CONVERGED or is_pole(rhs):
        return INCONCLUSIVE, None
    res = residual(outcome.value, rhs)
    if exact:
        return (PASS if res == 0 else FAIL), res
    return (PASS if res <= tol else FAIL), res


def evaluate_lhs(built: Built, policy: ConvergencePolicy, probe_radius: int = 8) -> SumOutcome:
    if built.spec.terminating:
        return sum_finite(built.summand, built.support)
    support = detect_natural_truncation(built.summand, probe_radius)
    if support is not None:
        out = sum_finite(built.summand, support)
        out.note = f"natural truncation to {support}"
        return out
    return sum_bilateral(built.summand, policy)


def verify(identity: str, params: ParamSet, policy: ConvergencePolicy | None = None,
           mode: NumericMode | None = None, tol=1e-15, seed=None, **options) -> VerificationRecord:
    """Evaluate both sides of one identity and compare them."""
    spec = get(identity)
    t0 = time.perf_counter()
    if spec.kind == "transform":
        from ..qseries1d import verify_8psi8_transform
        rec = verify_8psi8_transform(params, policy, mode=mode, tol=tol)
        rec.seed = seed
        rec.wall = time.perf_counter() - t0
        return rec
    policy = policy or ConvergencePolicy(shell_tol=tol / 10)
    mode = mode or default_mode(spec)
    try:
        built = build(identity, params, mode, tail_tol=tol / 100, **options)
    except ConstraintError as exc:
        return VerificationRecord(identity, params.r, seed, params.as_dict(), params.digest(),
                                  None, None, None, INCONCLUSIVE,
                                  time.perf_counter() - t0, note=f"constraint violated: {exc}")
    with built.field:
        lhs = evaluate_lhs(built, policy)
        status, res = decide(lhs, built.rhs, tol, mode.exact)
    note = lhs.note
    if lhs.pole_hit is not None:
        note = f"pole at {lhs.pole_hit.entries}"
    return VerificationRecord(identity, params.r, seed, params.as_dict(), params.digest(), lhs,
                              built.rhs, res, status, time.perf_counter() - t0, note)
