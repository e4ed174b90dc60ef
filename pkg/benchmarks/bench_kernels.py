"""Compare the compiled term kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each workload is timed under both backends and the results are checked
to agree exactly, so the benchmark doubles as an equivalence test.
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from fractions import Fraction as F

from qlattice import kernels
from qlattice.identities import ParamSet, build
from qlattice.latticesum import ConvergencePolicy, Simplex, sum_bilateral, sum_finite
from qlattice.scalarfield import NumericMode


def _bilateral():
    p = ParamSet(q=F(3, 10), r=2, a=F(1, 2), b=F(4, 7), d=F(5, 7), cs=(F(2, 3), F(3, 5)),
                 xs=(F(1), F(2, 3)), ks=(1, -1), M=2)
    built = build("cr_8psi8", p, NumericMode.bigfloat(50), tail_tol=1e-17)
    policy = ConvergencePolicy(shell_tol=1e-16)

    def run():
        with built.field:
            return sum_bilateral(built.summand, policy).value
    return "cr_8psi8 r=2 bilateral, BigFloat(50)", run


def _terminating():
    p = ParamSet(q=F(2, 7), r=3, a=F(3, 5), b=F(5, 11), d=F(7, 13),
                 cs=(F(2, 3), F(3, 4), F(4, 9)), xs=(F(1), F(3, 5), F(5, 8)), M=6)
    built = build("milne_ar_8phi7", p, NumericMode.rational())

    def run():
        return sum_finite(built.summand, Simplex(p.M)).value
    return "milne_ar_8phi7 r=3 M=6, exact rational", run


def _float_terminating():
    p = ParamSet(q=F(2, 7), r=3, a=F(3, 5), b=F(5, 11), c=F(2, 9), d=F(7, 13),
                 xs=(F(1), F(3, 5), F(5, 8)), ms=(3, 3, 3))
    built = build("dgml_cr_8phi7", p, NumericMode.bigfloat(50))

    def run():
        with built.field:
            return sum_finite(built.summand, built.support).value
    return "dgml_cr_8phi7 r=3 m=(3,3,3), BigFloat(50)", run


WORKLOADS = [_bilateral, _terminating, _float_terminating]


def _time(fn, repeat):
    fn()  # warm ladders and caches
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return statistics.median(out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    if "compiled" not in kernels.available():
        print("compiled kernel not built; only the Python backend can be timed")
    rows = []
    try:
        for make in WORKLOADS:
            label, fn = make()
            times, values = {}, {}
            for name in kernels.available():
                kernels.set_backend(name)
                values[name] = fn()
                times[name] = _time(fn, args.repeat)
            agree = len({str(v) for v in values.values()}) == 1
            speedup = times["python"] / times["compiled"] if "compiled" in times else None
            rows.append({"workload": label, "seconds": times, "speedup": speedup,
                         "agree": agree})
    finally:
        kernels.set_backend("compiled" if "compiled" in kernels.available() else "python")
    print(f"{'workload':44s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s} agree")
    for r in rows:
        c = r["seconds"].get("compiled")
        sp = f"{r['speedup']:.2f}x" if r["speedup"] else "-"
        print(f"{r['workload']:44s} {r['seconds']['python']:10.4f} "
              f"{(f'{c:.4f}' if c else '-'):>11s} {sp:>8s} {r['agree']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
