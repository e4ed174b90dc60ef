"""Command line entry point: ``qlattice list | verify | ortho | campaign``."""
from __future__ import annotations

import argparse
import sys

from . import harness as H
from .identities import registry as R
from .matinv import PAIRS, PROOF_SEQUENCES

CONFIG_ERROR = 2


def _cmd_list(args) -> int:
    print("identities:")
    for spec in R.IDENTITIES:
        tag = " [expected divergent for r >= 2]" if spec.expected != "Valid" else ""
        print(f"  {spec.id:26s} {spec.root_system:6s} {spec.kind:11s} {spec.anchor}{tag}")
    print("inverse pairs:")
    for p in PAIRS.values():
        print(f"  {p.id:26s} {p.relation:9s} {p.anchor}")
    print("proof sequences:")
    for s in PROOF_SEQUENCES.values():
        print(f"  {s.id:26s} {s.direction:7s} {s.pair:6s} {s.description}")
    return 0


def _policy(args) -> dict:
    return {"max_shell": args.max_shell} if args.max_shell is not None else {}


def _fmt(v):
    if v is None:
        return "-"
    try:
        return f"{float(v):.3e}"
    except (TypeError, ValueError):
        return str(v)


def _print_records(report, quiet=False):
    for rec in [] if quiet else report.records:
        ident = rec.get("id") or rec.get("pair")
        side = f" {rec['side']}" if rec.get("side") else ""
        res = rec.get("residual", rec.get("max_residual"))
        flag = "" if rec["as_expected"] else "  <-- unexpected"
        print(f"{ident}{side} r={rec['r']} seed={rec['seed']}: {rec['status']} "
              f"residual={_fmt(res)} ({rec['wall_seconds']:.2f}s){flag}")
    s = report.summary
    print(f"summary: pass={s['pass']} fail={s['fail']} divergent={s['divergent']} "
          f"inconclusive={s['inconclusive']} unexpected={s['unexpected']}")


def _run(cfg: H.CampaignConfig, quiet=False) -> int:
    report = H.run_campaign(cfg)
    _print_records(report, quiet)
    return report.exit_code


def _cmd_verify(args) -> int:
    cfg = H.CampaignConfig(identities=[args.id], pairs=[], r_values=[args.r],
                           samples=args.samples, seed=args.seed, mode=args.mode,
                           digits=args.digits, campaign_tol=args.tol, policy=_policy(args),
                           report=args.out, workers=args.workers)
    return _run(cfg)


def _cmd_ortho(args) -> int:
    cfg = H.CampaignConfig(identities=[], pairs=[{"pair": args.pair, "side": args.side}],
                           r_values=[args.r], samples=args.samples, seed=args.seed,
                           digits=args.digits, ortho_tol=args.tol, window=args.window,
                           policy=_policy(args), report=args.out, workers=args.workers)
    return _run(cfg)


def _cmd_campaign(args) -> int:
    cfg = H.load_config(args.config)
    if args.out:
        cfg.report = args.out
    if args.workers is not None:
        cfg.workers = args.workers
    return _run(cfg, args.quiet)


def _common(p, tol):
    p.add_argument("--r", type=int, default=1, help="dimension r")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--digits", type=int, default=50, help="BigFloat precision in digits")
    p.add_argument("--tol", type=float, default=tol, help="relative tolerance")
    p.add_argument("--max-shell", type=int, default=None, dest="max_shell")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--workers", type=int, default=None, help="worker processes")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qlattice", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="identity, pair and proof-sequence ids")
    v = sub.add_parser("verify", help="verify one identity on sampled parameters")
    v.add_argument("--id", required=True, choices=R.ids(), metavar="ID")
    v.add_argument("--mode", choices=["auto", "rational", "float"], default="auto")
    _common(v, H.DEFAULT_TOL)
    o = sub.add_parser("ortho", help="orthogonality of an inverse pair over a window")
    o.add_argument("--pair", required=True, choices=list(PAIRS))
    o.add_argument("--side", choices=["left", "right", "both"], default="both")
    o.add_argument("--window", type=int, default=1, help="max-norm radius of (n, l)")
    _common(o, H.ORTHO_TOL)
    c = sub.add_parser("campaign", help="run a campaign from a JSON or YAML config")
    c.add_argument("--config", required=True)
    c.add_argument("--out", default=None)
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--quiet", action="store_true", help="print only the summary line")
    return ap


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    handlers = {"list": _cmd_list, "verify": _cmd_verify, "ortho": _cmd_ortho,
                "campaign": _cmd_campaign}
    try:
        return handlers[args.command](args)
    except (H.ConfigError, H.SamplingError, R.ConstraintError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
