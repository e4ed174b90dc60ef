"""Numeric shadows of the limiting and truncating specialisations.

Two kinds of chain are provided.

*Limit chains* follow a bilateral 8psi8 as ``M`` grows.  Its closed form
at ``M`` is compared with the 6psi6 it tends to, at matched parameters:

* ``88n_limit``:  ``schlosser_8psi8 -> bailey_6psi6`` with
  ``(b, c, d, e) = (b, c, d q^k, a q^{-k}/c)``;
* ``a88s_limit``: ``ar_8psi8 -> gustafson_ar_6psi6`` with
  ``b' = d q^{|k|}``, ``d' = b``, ``e_i = a q^{-k_i}/c_i``;
* ``c88s_limit``: ``cr_8psi8 -> gustafson_cr_6psi6`` with
  ``b' = b``, ``d' = d q^{|k|}``, ``e_i = a q^{-k_i}/c_i``.

In each case the summand converges termwise because
``(a x q^{-M}/d)_n / (b x q^{-M})_n -> (a/bd)^n``.

*Truncation chains* set ``c = q^{-k}`` (or ``c_i = q^{-k_i}``), which cuts
the bilateral sum to a finite box; the parent identity is then checked
exactly in rational arithmetic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from gmpy2 import mpfr

from ..latticesum import ConvergencePolicy
from ..scalarfield import NumericMode, Param, Q
from .registry import FAIL, INCONCLUSIVE, PASS, VerificationRecord, build, verify
from .structure import P, ParamSet

__all__ = ["CHAINS", "chain_ids", "degeneration_check", "LIMIT_MS"]

LIMIT_MS = (10, 20, 30)


def _limit_88n(p: ParamSet) -> ParamSet:
    a, c, d = P(p.a), P(p.c), P(p.d)
    return ParamSet(q=p.q, r=1, a=p.a, b=p.b, c=p.c, d=d * Q ** p.k, e=a * Q ** -p.k / c)


def _limit_a88s(p: ParamSet) -> ParamSet:
    a = P(p.a)
    es = tuple(a * Q ** -k / P(c) for k, c in zip(p.ks, p.cs))
    return ParamSet(q=p.q, r=p.r, a=p.a, b=P(p.d) * Q ** sum(p.ks), d=p.b, cs=p.cs, es=es,
                    xs=p.xs)


def _limit_c88s(p: ParamSet) -> ParamSet:
    a = P(p.a)
    es = tuple(a * Q ** -k / P(c) for k, c in zip(p.ks, p.cs))
    return ParamSet(q=p.q, r=p.r, a=p.a, b=p.b, d=P(p.d) * Q ** sum(p.ks), cs=p.cs, es=es,
                    xs=p.xs)


def _trunc_scalar(p: ParamSet) -> ParamSet:
    return p.with_(c=Param(1, -p.k))


def _trunc_vector(p: ParamSet) -> ParamSet:
    return p.with_(cs=tuple(Param(1, -k) for k in p.ks))


@dataclass(frozen=True)
class Chain:
    id: str
    kind: str  # "limit" or "truncation"
    parent: str
    target: str | None
    transform: object
    description: str


CHAINS = {
    "88n_limit": Chain("88n_limit", "limit", "schlosser_8psi8", "bailey_6psi6", _limit_88n,
                       "balanced 8psi8 tends to the 6psi6 as M grows"),
    "a88s_limit": Chain("a88s_limit", "limit", "ar_8psi8", "gustafson_ar_6psi6", _limit_a88s,
                        "first A_r 8psi8 tends to the A_r 6psi6 as M grows"),
    "c88s_limit": Chain("c88s_limit", "limit", "cr_8psi8", "gustafson_cr_6psi6", _limit_c88s,
                        "C_r 8psi8 tends to the C_r 6psi6 as M grows"),
    "88n_trunc": Chain("88n_trunc", "truncation", "schlosser_8psi8", None, _trunc_scalar,
                       "c = q^{-k} makes the balanced 8psi8 finite"),
    "a88s_trunc": Chain("a88s_trunc", "truncation", "ar_8psi8", None, _trunc_vector,
                        "c_i = q^{-k_i} makes the first A_r 8psi8 finite"),
    "av88s_trunc": Chain("av88s_trunc", "truncation", "arv_8psi8", None, _trunc_vector,
                         "c_i = q^{-k_i} makes the second A_r 8psi8 finite"),
    "c88s_trunc": Chain("c88s_trunc", "truncation", "cr_8psi8", None, _trunc_vector,
                        "c_i = q^{-k_i} makes the C_r 8psi8 finite"),
}


def chain_ids() -> list[str]:
    return list(CHAINS)


def _rhs(identity, params, mode, tail):
    built = build(identity, params, mode, tail_tol=tail, check=False)
    return built.rhs


def degeneration_check(chain_id: str, params: ParamSet, policy: ConvergencePolicy | None = None,
                       Ms=LIMIT_MS, tol=1e-8, digits: int = 50, with_lhs: bool = False):
    """Run one chain and report its outcome as a verification record.

    For a limit chain ``params`` are those of the parent without ``M``;
    the record's ``extra["residuals"]`` lists the relative gap between
    the parent at each ``M`` and the limit.  Pass requires a strictly
    decreasing sequence ending below ``tol``.  With ``with_lhs`` the
    parent's series is summed at each ``M`` as well, and its gap to the
    parent's closed form is recorded.

    For a truncation chain the specialised parent is verified exactly.
    """
    chain = CHAINS[chain_id]
    t0 = time.perf_counter()
    if chain.kind == "truncation":
        sp = chain.transform(params)
        rec = verify(chain.parent, sp, policy, mode=NumericMode.rational())
        rec.id = chain.id
        rec.extra = {"parent": chain.parent, "finite": bool(rec.lhs and rec.lhs.exact)}
        if rec.status == PASS and not (rec.lhs and rec.lhs.exact):
            rec.status = FAIL
            rec.note = "series did not truncate"
        return rec

    mode = NumericMode.bigfloat(digits)
    tail = mpfr(10) ** (-(digits - 5))
    target = chain.transform(params)
    limit = _rhs(chain.target, target, mode, tail)
    residuals, lhs_gaps = [], []
    with mode.context():
        for M in Ms:
            value = _rhs(chain.parent, params.with_(M=M), mode, tail)
            residuals.append(abs(value - limit) / max(abs(limit), 1))
            if with_lhs:
                rec = verify(chain.parent, params.with_(M=M), policy, mode=mode, tol=1e-30)
                lhs_gaps.append(None if rec.residual is None else float(rec.residual))
    decreasing = all(b < a for a, b in zip(residuals, residuals[1:]))
    final = residuals[-1]
    if final != final:  # NaN guard
        status = INCONCLUSIVE
    else:
        status = PASS if decreasing and final < tol else FAIL
    extra = {"parent": chain.parent, "target": chain.target, "Ms": list(Ms),
             "residuals": [float(x) for x in residuals], "limit_params": target.as_dict()}
    if with_lhs:
        extra["lhs_gaps"] = lhs_gaps
    note = "residuals " + ", ".join(f"M={M}: {float(x):.3e}" for M, x in zip(Ms, residuals))
    return VerificationRecord(chain.id, params.r, None, params.as_dict(), params.digest(), None,
                              limit, final, status, time.perf_counter() - t0, note, extra)
