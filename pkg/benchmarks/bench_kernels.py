"""Compiled vs numpy kernels, plus an end-to-end table run under each backend.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

from ggmlab import _kernels_py
from ggmlab._backend import COMPILED
from ggmlab.fock import build_added_fmsv


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    return label, best


def kernel_cases(mod):
    s = build_added_fmsv(0.6, (3, 1, 0, 0), eps_tail=1e-12)
    return [
        ("fmsv_shells    n=0..120", lambda: mod.fmsv_shells(math.log(0.27), (3, 1, 0, 0), False, 0, 120)),
        ("crystal_shells k=0..150", lambda: mod.crystal_shells(-0.4, -0.2, False, False, (2, 1, 0), True, 2, 150)),
        (f"ladder_moments K={len(s)}", lambda: mod.ladder_moments(s.occ, s.amps, s.keys, s.shifts)),
    ]


def end_to_end(pure):
    env = dict(os.environ, GGMLAB_PURE_PYTHON="1" if pure else "0")
    code = "import time; from ggmlab.nongauss import nongauss_table; t=time.perf_counter(); nongauss_table(0.4); print(time.perf_counter()-t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not COMPILED:
        sys.exit("compiled kernels unavailable; build with `pip install -e . --no-build-isolation`")
    from ggmlab import _kernels

    print(f"{'kernel':28s} {'cython [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for (label, fc), (_, fp) in zip(kernel_cases(_kernels), kernel_cases(_kernels_py)):
        _, tc = bench(label, fc, args.repeat)
        _, tp = bench(label, fp, args.repeat)
        print(f"{label:28s} {tc * 1e3:12.3f} {tp * 1e3:12.3f} {tp / tc:8.1f}")
    tc, tp = end_to_end(False), end_to_end(True)
    print(f"{'six-row table, end to end':28s} {tc * 1e3:12.1f} {tp * 1e3:12.1f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
