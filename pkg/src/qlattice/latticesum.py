"""Summation over finite lattice sets and adaptive max-norm shells of Z^r."""
from __future__ import annotations

import contextlib
import itertools
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import gmpy2
import numpy as np

from .scalarfield import NumericMode, is_pole, to_mpq

__all__ = [
    "MultiIndex", "Bilateral", "Simplex", "Box", "Window", "ConvergencePolicy",
    "SumOutcome", "Summand", "FunctionSummand", "as_summand", "sum_finite",
    "sum_bilateral", "detect_natural_truncation", "shell_points", "pairwise_sum",
    "CONVERGED", "DIVERGENT", "INCONCLUSIVE",
]

CONVERGED = "Converged"
DIVERGENT = "Divergent"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple

    def __init__(self, entries):
        object.__setattr__(self, "entries", tuple(int(e) for e in entries))
        if not self.entries:
            raise ValueError("a multi-index needs r >= 1 entries")

    @property
    def r(self) -> int:
        return len(self.entries)

    @property
    def abs(self) -> int:
        return sum(self.entries)

    @property
    def e2(self) -> int:
        k = self.entries
        s = sum(k)
        return (s * s - sum(x * x for x in k)) // 2

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __len__(self):
        return len(self.entries)


# -- supports -------------------------------------------------------------


@dataclass(frozen=True)
class Bilateral:
    pass


@dataclass(frozen=True)
class Simplex:
    """``k_i >= 0`` and ``|k| <= M``."""

    M: int

    def points(self, r: int) -> np.ndarray:
        return _simplex_points(r, self.M)


@dataclass(frozen=True)
class Box:
    """``lo_i <= k_i <= hi_i``; ``Box(m)`` is ``0 <= k_i <= m_i``."""

    hi: tuple
    lo: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "hi", tuple(int(h) for h in self.hi))
        lo = (0,) * len(self.hi) if self.lo is None else tuple(int(v) for v in self.lo)
        object.__setattr__(self, "lo", lo)

    def points(self, r: int | None = None) -> np.ndarray:
        axes = [range(a, b + 1) for a, b in zip(self.lo, self.hi)]
        pts = list(itertools.product(*axes))
        return np.array(pts, dtype=np.int64).reshape(-1, len(self.hi))


@dataclass(frozen=True)
class Window:
    """``max_i |k_i| <= radius``."""

    radius: int

    def points(self, r: int) -> np.ndarray:
        return Box((self.radius,) * r, (-self.radius,) * r).points()


@lru_cache(maxsize=256)
def _simplex_cached(r, M):
    pts = [p for p in itertools.product(range(M + 1), repeat=r) if sum(p) <= M]
    arr = np.array(pts, dtype=np.int64).reshape(-1, r)
    arr.setflags(write=False)
    return arr


def _simplex_points(r, M):
    return _simplex_cached(r, M)


@lru_cache(maxsize=512)
def _shell_cached(r, N):
    if N == 0:
        arr = np.zeros((1, r), dtype=np.int64)
    else:
        pts = [p for p in itertools.product(range(-N, N + 1), repeat=r)
               if max(abs(x) for x in p) == N]
        arr = np.array(pts, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def shell_points(r: int, N: int) -> np.ndarray:
    """Points with max-norm exactly N, in lexicographic order."""
    return _shell_cached(r, N)


@dataclass(frozen=True)
class ConvergencePolicy:
    shell_tol: float = 1e-16
    min_shells: int = 3
    divergence_patience: int = 5
    max_shell: int = 60
    divergence_after: int = 10

    def __post_init__(self):
        if not (self.max_shell >= self.min_shells >= 1):
            raise ValueError("need max_shell >= min_shells >= 1")


@dataclass
class SumOutcome:
    value: object
    shells_used: int
    status: str
    pole_hit: MultiIndex | None = None
    exact: bool = False
    terms: int = 0
    note: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


# -- summands ---------------------------------------------------------------


class Summand:
    """Batch evaluator ``points -> (units, orders)`` over ``r`` slots."""

    def __init__(self, plan, r: int | None = None):
        self.plan = plan
        self.r = plan.dim if r is None else r
        self.field = plan.field

    def evaluate(self, points):
        return self.plan.evaluate(points)

    def __call__(self, k):
        return self.plan(k)


class FunctionSummand:
    """Wrap a scalar function of a tuple of integers."""

    def __init__(self, fn: Callable, r: int, mode: NumericMode | None = None):
        self.fn = fn
        self.r = r
        self.mode = mode
        self.field = None

    def _convert(self, v):
        if self.mode is not None:
            return self.mode.convert(v)
        if isinstance(v, float):
            return gmpy2.mpfr(v)
        if isinstance(v, (int, Fraction)):
            return to_mpq(v)
        return v

    def evaluate(self, points):
        us, os_ = [], []
        with _mode_context(self.mode):
            for p in np.asarray(points, dtype=np.int64).reshape(-1, self.r).tolist():
                v = self.fn(tuple(p))
                if is_pole(v):
                    us.append(1)
                    os_.append(-1)
                elif v == 0:
                    us.append(v)
                    os_.append(1)
                else:
                    us.append(self._convert(v))
                    os_.append(0)
        return us, os_

    def __call__(self, k):
        return self.fn(tuple(k))


def as_summand(s, r=None):
    if isinstance(s, (Summand, FunctionSummand)):
        return s
    if hasattr(s, "evaluate") and hasattr(s, "dim"):
        return Summand(s)
    if callable(s):
        if r is None:
            raise ValueError("callable summands need r")
        return FunctionSummand(s, r)
    raise TypeError("unsupported summand")


def _mode_context(mode):
    return contextlib.nullcontext() if mode is None else mode.context()


def _context(s):
    if s.field is not None:
        return s.field
    return _mode_context(s.mode)


def pairwise_sum(values: list):
    """Deterministic pairwise (tree) reduction."""
    if not values:
        return 0
    vals = list(values)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def _collect(points, units, orders):
    """Nonzero finite values and the first pole site (if any)."""
    vals = []
    pole = None
    for i, (u, o) in enumerate(zip(units, orders)):
        if o == 0:
            if u != 0:
                vals.append(u)
        elif o < 0 and pole is None:
            pole = MultiIndex(points[i])
    return vals, pole


def sum_finite(summand, support, r: int | None = None) -> SumOutcome:
    """Sum over a Simplex or Box support (exact in rational mode)."""
    s = as_summand(summand, r)
    if isinstance(support, Simplex):
        pts = support.points(s.r)
    elif isinstance(support, (Box, Window)):
        pts = support.points(s.r)
    else:
        raise TypeError("sum_finite needs a finite support")
    with _context(s):
        units, orders = s.evaluate(pts)
        vals, pole = _collect(pts, units, orders)
        total = pairwise_sum(vals)
    if s.field is not None:
        total = total if vals else s.field.zero
    status = INCONCLUSIVE if pole is not None else CONVERGED
    return SumOutcome(total, 0, status, pole, exact=True, terms=len(pts))


class ShellScanner:
    """Shell-by-shell partial sums of several components at once.

    ``shell_fn(N)`` returns a list of per-component term lists (already
    multiplied out) for shell N, plus a pole site or None.
    """

    def __init__(self, shell_fn, ncomp: int, policy: ConvergencePolicy, one, zero):
        self.shell_fn = shell_fn
        self.ncomp = ncomp
        self.policy = policy
        self.one = one
        self.zero = zero

    def run(self):
        pol = self.policy
        partial = [self.zero] * self.ncomp
        masses: list[list] = []
        peaks: list = []
        quiet = 0
        rising = 0
        for N in range(pol.max_shell + 1):
            comps, pole = self.shell_fn(N)
            if pole is not None:
                return partial, N, INCONCLUSIVE, pole, masses
            mass = []
            peak = self.zero
            for c, terms in enumerate(comps):
                tot = pairwise_sum(terms) if terms else self.zero
                partial[c] = partial[c] + tot
                m = self.zero
                for t in terms:
                    m = m + abs(t)
                    if abs(t) > peak:
                        peak = abs(t)
                mass.append(m)
            masses.append(mass)
            if N >= 1:
                if peaks and peak > peaks[-1] and peak > 0:
                    rising += 1
                else:
                    rising = 0
                if N > pol.divergence_after and rising >= pol.divergence_patience:
                    return partial, N, DIVERGENT, None, masses
            peaks.append(peak)
            ok = all(m <= pol.shell_tol * max(abs(p), self.one)
                     for m, p in zip(mass, partial))
            quiet = quiet + 1 if (ok and N >= 1) else 0
            if quiet >= pol.min_shells:
                return partial, N, CONVERGED, None, masses
        return partial, pol.max_shell, INCONCLUSIVE, None, masses


def sum_bilateral(summand, policy: ConvergencePolicy | None = None,
                  r: int | None = None) -> SumOutcome:
    """Adaptive max-norm shell summation over Z^r."""
    s = as_summand(summand, r)
    policy = policy or ConvergencePolicy()
    count = [0]

    def shell(N):
        pts = shell_points(s.r, N)
        units, orders = s.evaluate(pts)
        count[0] += len(pts)
        vals, pole = _collect(pts, units, orders)
        return [vals], pole

    with _context(s):
        if s.field is not None:
            one, zero = s.field.one, s.field.zero
        elif s.mode is not None:
            one, zero = s.mode.convert(1), s.mode.convert(0)
        else:
            one, zero = gmpy2.mpq(1), gmpy2.mpq(0)
        partial, N, status, pole, _ = ShellScanner(shell, 1, policy, one, zero).run()
    return SumOutcome(partial[0], N, status, pole, terms=count[0])


def _probe_shell_nonzero(s, N):
    pts = shell_points(s.r, N)
    units, orders = s.evaluate(pts)
    return [tuple(p) for p, u, o in zip(pts.tolist(), units, orders)
            if o < 0 or (o == 0 and u != 0)]


def detect_natural_truncation(summand, probe_radius: int = 8, r: int | None = None):
    """Finite support implied by identically vanishing terms, or None.

    The outer probe shells are checked first: any nonvanishing term there
    means no truncation within the probe.  Otherwise the bounding region of
    the nonvanishing terms is returned as a Simplex (when it fits one) or a
    Box.
    """
    s = as_summand(summand, r)
    with _context(s):
        for N in (probe_radius, probe_radius - 1):
            if N >= 0 and _probe_shell_nonzero(s, N):
                return None
        live = []
        for N in range(probe_radius - 1):
            live.extend(_probe_shell_nonzero(s, N))
    if not live:
        return Box((0,) * s.r)
    arr = np.array(live, dtype=np.int64)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    if lo.min() >= 0:
        M = int(arr.sum(axis=1).max())
        n_simplex = len(_simplex_points(s.r, M))
        n_box = int(np.prod(hi - lo + 1))
        if n_simplex <= n_box:
            return Simplex(M)
    return Box(tuple(int(h) for h in hi), tuple(int(v) for v in lo))


def value_of(outcome: SumOutcome):
    return outcome.value
