"""Parameter sampling, campaign orchestration and reports."""
from __future__ import annotations

import json
import math
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .identities import registry as R
from .identities.degenerations import CHAINS
from .identities.structure import ParamSet
from .latticesum import (DIVERGENT, INCONCLUSIVE, ConvergencePolicy, Summand, detect_natural_truncation,
                         shell_points)
from .matinv import LEFT, PAIRS, RIGHT, check_orthogonality, get_pair
from .scalarfield import NumericMode, Param, QField, is_pole
from .terms import TermBuilder, variables

__all__ = ["SamplingError", "ConfigError", "sample_params", "CampaignConfig", "Case",
           "Report", "plan_cases", "run_case", "run_campaign", "load_config", "exit_code",
           "expected_outcome", "DEFAULT_TOL"]

DEFAULT_TOL = 1e-15
ORTHO_TOL = 1e-12
Q_RANGE = (Fraction(15, 100), Fraction(45, 100))
MAG_RANGE = (Fraction(1, 5), Fraction(9, 10))
MAX_DEN = 64
MODULUS_CAP = 0.8
POLE_GAP = 1e-6
STRUCT_GAP = 1e-4
MAX_TRIES = 10000
MAX_INDEX = 4  # bound on M, m_i and |k|
NEAR, MID, FAR = 3, 8, 16
# a bilateral summand is accepted when its projected shell mass three shells
# before the default max_shell is below the default shell tolerance
HORIZON = ConvergencePolicy().max_shell - ConvergencePolicy().min_shells
TAIL_TARGET = DEFAULT_TOL / 10

# symbols drawn for targets that are not registry identities
_PAIR_SYMBOLS = {"bmi": (("a", "b", "c"), (), ())}
_MULTI_PAIR = (("a", "b"), ("cs", "xs"), ())
_SEQ_SYMBOLS = (("a", "b", "d"), ("cs", "xs"), ("M",))


class SamplingError(ValueError):
    """No admissible draw was found; names the constraint that rejected most draws."""

    def __init__(self, target, r, counts: Counter):
        self.target = target
        self.counts = counts
        tight = counts.most_common(1)[0][0] if counts else "none"
        self.tightest = tight
        super().__init__(f"no admissible parameters for {target} at r={r} after "
                         f"{sum(counts.values())} draws; tightest constraint: {tight}")


class ConfigError(ValueError):
    pass


# -- sampling -------------------------------------------------------------------


def _rational(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    den = rng.randint(2, MAX_DEN)
    a, b = math.ceil(lo * den), math.floor(hi * den)
    if a > b:
        return _rational(rng, lo, hi)
    return Fraction(rng.randint(a, b), den)


def _signed(rng):
    x = _rational(rng, *MAG_RANGE)
    return -x if rng.random() < 0.25 else x


def _symbols(target: str):
    """``(kind, scalars, vectors, ints)`` for any sampling target."""
    if target in R.REGISTRY:
        s = R.REGISTRY[target]
        ints = tuple(s.ints)
        if s.terminating and "ms" not in ints or "ks" in ints or "k" in ints:
            ints = ints + ("M",)
        return "identity", s.scalars, s.vectors, ints
    if target in PAIRS:
        sc, vec, ints = _PAIR_SYMBOLS.get(get_pair(target).id, _MULTI_PAIR)
        return "pair", sc, vec, ints
    from .matinv import PROOF_SEQUENCES
    if target in PROOF_SEQUENCES:
        return "sequence", *_SEQ_SYMBOLS
    if target in CHAINS:
        return ("chain",) + _symbols(CHAINS[target].parent)[1:]
    raise KeyError(f"unknown target {target!r}")


def _draw(rng, target, r, fixed):
    _, scalars, vectors, ints = _symbols(target)
    kw = {"q": _rational(rng, *Q_RANGE), "r": r}
    for s in scalars:
        kw[s] = _signed(rng)
    for v in vectors:
        kw[v] = tuple(_rational(rng, *MAG_RANGE) if v == "xs" else _signed(rng)
                      for _ in range(r))
    if "ms" in ints:
        kw["ms"] = tuple(rng.randint(0, MAX_INDEX) for _ in range(r))
    K = None
    if "ks" in ints:
        while True:
            ks = tuple(rng.randint(-2, 2) for _ in range(r))
            if sum(ks) <= MAX_INDEX:
                break
        kw["ks"], K = ks, sum(ks)
    if "k" in ints:
        kw["k"] = K = rng.randint(-2, 2)
    if "M" in ints:
        # M >= |k| keeps the closed form away from the trivially vanishing (q^{-M})_{|k|}
        kw["M"] = rng.randint(max(0, K or 0), MAX_INDEX)
    kw.update(fixed)
    return ParamSet(**kw)


def _q_distance(c, q: float) -> float:
    """Distance of ``1`` from the lattice ``{c q^j}``, relative to 1."""
    c = float(c)
    if c <= 0 or not math.isfinite(c):
        return math.inf
    lq = math.log(q)
    j0 = round(-math.log(c) / lq)
    best = math.inf
    for j in (j0 - 1, j0, j0 + 1):
        try:
            best = min(best, abs(1 - c * q ** j))
        except OverflowError:
            pass
    return best


def _pole_reason(field: QField):
    q = float(field.q)
    keys = [k[:2] for k in field._poch] + [k[:2] for k in field._inf]
    for coef, _ in keys:
        if coef == 1:
            continue  # pure q-powers are structural, not accidental
        if _q_distance(coef, q) < POLE_GAP:
            return "pole proximity"
    return None


def _structure_reason(p: ParamSet):
    xs = [float(x.coef) if isinstance(x, Param) else float(x) for x in p.xs]
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if abs(xs[i] - xs[j]) < STRUCT_GAP or abs(1 - xs[i] * xs[j]) < STRUCT_GAP:
                return "structure denominator"
    return None


_FREE = ("a", "b", "c", "d", "e", "f", "g", "cs", "es", "xs")


def _coincidence_reason(p: ParamSet, fixed=()):
    """Drawn values must be pairwise distinct: ``d = x_2`` can split a
    truncated support into two cancelling blocks."""
    vals = []
    for name in _FREE:
        if name in fixed:
            continue
        v = getattr(p, name)
        for u in (v if isinstance(v, tuple) else (v,)):
            if isinstance(u, Fraction):
                vals.append(float(u))
    vals.sort()
    if any(b - a < STRUCT_GAP for a, b in zip(vals, vals[1:])):
        return "coincident parameters"
    return None


def _modulus(target, p):
    spec = R.REGISTRY.get(target)
    if spec is None or spec.modulus is None:
        return None
    z = spec.modulus(p)
    return abs(float(z.coef) * float(p.q) ** z.qexp)


def _peak(s: Summand, N: int) -> float:
    units, orders = s.evaluate(shell_points(s.r, N))
    best = 0.0
    for u, o in zip(units, orders):
        if o < 0:
            return math.inf
        if o == 0:
            best = max(best, abs(float(u)))
    return best


def decay_rate(s: Summand):
    """``(rate, far_peak)``: geometric decay rate between two probe shells.

    ``rate`` is 0 for a naturally truncating summand and infinite when the
    terms grow or a probe shell hits a pole.
    """
    with s.field:
        if detect_natural_truncation(s, 6) is not None:
            return 0.0, 0.0
        near = max(_peak(s, N) for N in range(NEAR + 1))
        mid, far = _peak(s, MID), _peak(s, FAR)
    if math.isinf(near) or math.isinf(mid) or math.isinf(far):
        return math.inf, far
    if far == 0:
        return 0.0, 0.0
    if mid == 0 or far > near:
        return math.inf, far
    return (far / mid) ** (1 / (FAR - MID)), far


def projected_tail(s: Summand) -> float:
    """Projected absolute shell mass at ``HORIZON``."""
    rate, far = decay_rate(s)
    if rate == 0:
        return 0.0
    if rate >= 1:
        return math.inf
    npts = len(shell_points(s.r, HORIZON))
    return far * rate ** (HORIZON - FAR) * npts


def _probe_identity(target, p):
    """Field used by the identity's build, plus its summand (None for the transform)."""
    spec = R.REGISTRY[target]
    mode = NumericMode.bigfloat(30)
    if spec.kind == "transform":
        from .qseries1d import _transform_parts
        field = QField(mode, p.q, tail_tol=1e-25)
        lhs, _, _ = _transform_parts(p, field, None)
        return field, Summand(lhs), None
    built = R.build(target, p, mode, tail_tol=1e-25, check=False)
    return built.field, built.summand, built.rhs


def _probe_pair(target, p):
    from .matinv import _Slice
    pr = get_pair(target)
    r = p.r
    field = QField(NumericMode.bigfloat(30), p.q, tail_tol=1e-25)
    with field:
        tb = TermBuilder(field, 3 * r)
        n, k, l = variables(0, r), variables(r, r), variables(2 * r, r)
        pr.f(tb, p, n, k)
        pr.g(tb, p, k, l)
        tb2 = TermBuilder(field, 3 * r)
        pr.g(tb2, p, n, k)
        pr.f(tb2, p, k, l)
        plans = [tb.build(), tb2.build()]
    zero = (0,) * r
    return field, [_Slice(pl, zero, zero, r) for pl in plans]


def _probe_sequence(target, p):
    """Both summands of a proof's inverse relation, oriented as the check sums them."""
    from .matinv import PROOF_SEQUENCES, _Slice
    seq = PROOF_SEQUENCES[target]
    pr = get_pair(seq.pair)
    r = p.r
    field = QField(NumericMode.bigfloat(30), p.q, tail_tol=1e-25)
    outer, inner = variables(0, r), variables(r, r)
    with field:
        tb, tb2 = TermBuilder(field, 2 * r), TermBuilder(field, 2 * r)
        if seq.direction == "invrel":
            pr.f(tb, p, outer, inner)
            pr.g(tb2, p, outer, inner)
        else:
            pr.f(tb, p, inner, outer)
            pr.g(tb2, p, inner, outer)
        seq.a(tb, p, inner)
        seq.b(tb2, p, inner)
        plans = [tb.build(), tb2.build()]
    return field, [_Slice(pl, (0,) * r, (), r) for pl in plans]


def _reject_reason(target, p: ParamSet):
    kind = _symbols(target)[0]
    if kind == "chain":
        chain = CHAINS[target]
        why = _reject_reason(chain.parent, p)
        if why is None and chain.target is not None:
            why = _reject_reason(chain.target, chain.transform(p))
        elif why is None:
            why = _reject_reason(chain.parent, chain.transform(p))
        return why
    if kind == "identity":
        spec = R.REGISTRY[target]
        try:
            spec.check(p)
        except R.ConstraintError as exc:
            if exc.predicate in ("convergence modulus", "distinct x_i"):
                return exc.predicate
            raise  # structural: no redraw can fix it
        z = _modulus(target, p)
        if z is not None and z > MODULUS_CAP:
            return "convergence modulus"
    elif kind == "pair":
        get_pair(target).check(p)
    why = _structure_reason(p)
    if why:
        return why
    try:
        if kind == "identity":
            field, summand, rhs = _probe_identity(target, p)
            summands = [summand]
            if rhs is not None and is_pole(rhs):
                return "closed form pole"
            if rhs is not None and rhs == 0:
                return "vanishing closed form"  # e.g. a negative k_i: 0 = 0 tests nothing
        elif kind == "pair":
            field, summands = _probe_pair(target, p)
        else:
            field, summands = _probe_sequence(target, p)
    except (ZeroDivisionError, ValueError, TypeError):
        return "evaluation error"
    why = _pole_reason(field)
    if why:
        return why
    with field:
        if any(_peak(s, 0) == 0 for s in summands):
            return "vanishing summand"
    if kind == "identity":
        spec = R.REGISTRY[target]
        if spec.terminating or (spec.expected == "DivergentForRGe2" and p.r >= 2):
            return None
    for s in summands:
        if projected_tail(s) > TAIL_TARGET:
            return "empirical convergence"
    return None


def sample_params(target: str, r: int, seed, **fixed) -> ParamSet:
    """Deterministic admissible draw for an identity, pair, proof-sequence or chain id.

    ``fixed`` pins symbols (for instance ``cs=(Param(1, -2),) * r``); the
    remaining ones are drawn as rationals with denominators at most 64.
    Raises :class:`SamplingError` after ``MAX_TRIES`` rejected draws.
    """
    _symbols(target)
    rng = random.Random(f"{target}|r={r}|seed={seed}")
    counts: Counter = Counter()
    for _ in range(MAX_TRIES):
        p = _draw(rng, target, r, fixed)
        why = _coincidence_reason(p, fixed) or _reject_reason(target, p)
        if why is None:
            return p
        counts[why] += 1
    raise SamplingError(target, r, counts)


# -- campaigns ------------------------------------------------------------------


@dataclass
class CampaignConfig:
    """What to run and how; ``seed`` fixes every sampled parameter set."""

    identities: list = field(default_factory=lambda: list(R.ids()))
    pairs: list = field(default_factory=list)  # pair ids or {"pair": id, "side": s}
    r_values: list = field(default_factory=lambda: [1, 2])
    samples: int = 5
    seed: int = 0
    mode: str = "auto"  # auto | rational | float
    digits: int = 50
    campaign_tol: float = DEFAULT_TOL
    ortho_tol: float = ORTHO_TOL
    window: int | None = None
    policy: dict = field(default_factory=dict)
    report: str | None = None
    workers: int | None = None

    def validate(self):
        for i in self.identities:
            if i not in R.REGISTRY:
                raise ConfigError(f"unknown identity {i!r}")
        for p in self.pairs:
            pid = p["pair"] if isinstance(p, dict) else p
            if pid not in PAIRS:
                raise ConfigError(f"unknown pair {pid!r}")
            side = p.get("side", "both") if isinstance(p, dict) else "both"
            if side.lower() not in ("left", "right", "both"):
                raise ConfigError(f"bad side {side!r}")
        if self.mode not in ("auto", "rational", "float"):
            raise ConfigError("mode must be auto, rational or float")
        if any(int(r) < 1 for r in self.r_values) or self.samples < 0 or self.digits < 10:
            raise ConfigError("r values must be >= 1, samples >= 0 and digits >= 10")
        if not (self.campaign_tol > 0 and self.ortho_tol > 0):
            raise ConfigError("campaign_tol and ortho_tol must be positive")
        known = {f.name for f in fields(ConvergencePolicy)}
        bad = set(self.policy) - known
        if bad:
            raise ConfigError(f"unknown policy fields {sorted(bad)}")
        try:
            self.convergence_policy()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad policy: {exc}") from None
        return self

    def convergence_policy(self, tol=None) -> ConvergencePolicy:
        kw = {"shell_tol": (tol or self.campaign_tol) / 10}
        kw.update(self.policy)
        return ConvergencePolicy(**kw)

    def to_json(self):
        return asdict(self)


def load_config(path) -> CampaignConfig:
    """Read a JSON or YAML campaign description."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            import yaml
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except Exception as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    known = {f.name for f in fields(CampaignConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    try:
        cfg = CampaignConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


@dataclass(frozen=True)
class Case:
    kind: str  # "identity" or "ortho"
    target: str
    r: int
    sample: int
    seed: int
    params: ParamSet
    side: str | None = None
    window: int = 1
    expected: str = "Pass"


def expected_outcome(kind, target, r, side=None) -> str:
    """``Pass``, ``Divergent`` (the false D_r 6psi6 at r >= 2) or ``NotDelta``."""
    if kind == "identity":
        spec = R.REGISTRY[target]
        return "Divergent" if spec.expected == "DivergentForRGe2" and r >= 2 else "Pass"
    if get_pair(target).relation == "LeftOnly" and side == RIGHT and r >= 2:
        return "NotDelta"
    return "Pass"


def plan_cases(cfg: CampaignConfig) -> list[Case]:
    """Every (target, r, sample) with its parameters, in report order."""
    cases = []
    for ident in cfg.identities:
        spec = R.REGISTRY[ident]
        for r in cfg.r_values:
            if (spec.one_dim or spec.kind == "transform") and r != 1:
                continue
            for i in range(cfg.samples):
                seed = cfg.seed + i
                p = sample_params(ident, r, seed)
                cases.append(Case("identity", ident, r, i, seed, p,
                                  expected=expected_outcome("identity", ident, r)))
    for entry in cfg.pairs:
        pid = entry["pair"] if isinstance(entry, dict) else entry
        side = entry.get("side", "both") if isinstance(entry, dict) else "both"
        sides = [LEFT, RIGHT] if side.lower() == "both" else [side.capitalize()]
        for r in cfg.r_values:
            if get_pair(pid).one_dim and r != 1:
                continue
            window = cfg.window if cfg.window is not None else (2 if r == 1 else 1)
            for i in range(cfg.samples):
                seed = cfg.seed + i
                p = sample_params(pid, r, seed)
                for s in sides:
                    cases.append(Case("ortho", pid, r, i, seed, p, s, window,
                                      expected_outcome("ortho", pid, r, s)))
    return cases


NOT_DELTA_FLOOR = 1e-3


def _mode(cfg, spec):
    if cfg.mode == "rational":
        return NumericMode.rational()
    if cfg.mode == "float" or not spec.terminating:
        return NumericMode.bigfloat(cfg.digits)
    return NumericMode.rational()


def run_case(case: Case, cfg: CampaignConfig) -> dict:
    """One record as a JSON-ready dict; errors are captured, not raised."""
    t0 = time.perf_counter()
    try:
        if case.kind == "identity":
            spec = R.REGISTRY[case.target]
            rec = R.verify(case.target, case.params, cfg.convergence_policy(),
                           mode=_mode(cfg, spec), tol=cfg.campaign_tol, seed=case.seed)
            out = rec.to_json()
        else:
            tol = cfg.ortho_tol
            rep = check_orthogonality(case.target, case.params, case.side, case.window,
                                      cfg.convergence_policy(tol), tol=tol,
                                      mode=NumericMode.bigfloat(cfg.digits))
            out = rep.to_json()
            out["seed"] = case.seed
            out["digest"] = case.params.digest()
            out["status"] = _ortho_status(rep, tol, case.expected)
    except Exception as exc:  # isolation: one bad case never aborts the campaign
        out = {"id": case.target, "r": case.r, "seed": case.seed,
               "params": case.params.as_dict(), "status": INCONCLUSIVE,
               "note": f"error: {type(exc).__name__}: {exc}"}
    out["kind"] = case.kind
    out["expected"] = case.expected
    out["as_expected"] = out["status"] == ("Divergent" if case.expected == "Divergent"
                                           else "Pass")
    out["wall_seconds"] = round(time.perf_counter() - t0, 4)
    return out


def _ortho_status(rep, tol, expected):
    statuses = [c.status for c in rep.cells]
    if expected == "NotDelta":
        if rep.max_residual is not None and rep.max_residual > NOT_DELTA_FLOOR:
            return "Pass"  # the expected failure of the delta relation is reproduced
        return INCONCLUSIVE if INCONCLUSIVE in statuses else "Fail"
    if "Fail" in statuses:
        return "Fail"
    if DIVERGENT in statuses:
        return DIVERGENT
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return "Pass"


def _run_one(args):
    return run_case(*args)


@dataclass
class Report:
    config: dict
    records: list
    summary: dict
    wall_seconds: float

    def to_json(self) -> dict:
        return {"config": self.config, "records": self.records, "summary": self.summary,
                "wall_seconds": round(self.wall_seconds, 4)}

    def write(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2, default=str) + "\n")

    @property
    def exit_code(self) -> int:
        return exit_code(self)


def _summary(records):
    c = Counter(r["status"] for r in records)
    return {"pass": c.get("Pass", 0), "fail": c.get("Fail", 0),
            "divergent": c.get(DIVERGENT, 0), "inconclusive": c.get(INCONCLUSIVE, 0),
            "unexpected": sum(not r["as_expected"] for r in records)}


def exit_code(report: Report) -> int:
    """0 clean, 1 any Fail or missed divergence, 3 inconclusive results only."""
    s = report.summary
    if s["fail"]:
        return 1
    for rec in report.records:
        if rec["expected"] == "Divergent" and rec["status"] != DIVERGENT:
            return 1
    if s["inconclusive"]:
        return 3
    return 0


def run_campaign(cfg: CampaignConfig) -> Report:
    """Sample, run every case (in parallel when ``workers`` > 1) and assemble the report."""
    cfg.validate()
    t0 = time.perf_counter()
    cases = plan_cases(cfg)
    workers = cfg.workers if cfg.workers is not None else min(len(cases), os.cpu_count() or 1)
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_one, [(c, cfg) for c in cases]))
    else:
        records = [run_case(c, cfg) for c in cases]
    report = Report(cfg.to_json(), records, _summary(records), time.perf_counter() - t0)
    if cfg.report:
        report.write(cfg.report)
    return report
