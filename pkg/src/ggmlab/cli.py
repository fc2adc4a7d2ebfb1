"""Command-line front end: CSV sweeps of GGM and non-Gaussianity.

Exit codes: 0 success, 1 failed check (``freeze-check``), 2 usage error,
3 numerical or capacity failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .canonical import ggm_fock
from .errors import GgmError
from .fock import EPS_TAIL, FockState, build_crystal_family, build_fmsv_family
from .gaussian import CrystalParams, crystal_cm, detect_kinks, fmsv_cm, ggm_gaussian, tritter_cm
from .nongauss import TABLE_ROWS, delta_ng, nongauss_table

FAMILY_MODES = {"tritter": 3, "crystal": 3, "fmsv": 4}
INT_VARS = ("m1", "m2", "m3", "m4")
DESK_M = 8
FREEZE_TOL = 1e-9


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.15g}"


def parse_range(text: str, integer: bool = False) -> list:
    """``a:b:step`` (inclusive), ``a..b`` (integers), or a comma list."""
    text = text.strip()
    try:
        if ".." in text and ":" not in text:
            lo, hi = (int(v) for v in text.split(".."))
            return list(range(lo, hi + 1))
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"range {text!r} must be start:stop:step")
            a, b, step = (float(v) for v in parts)
            if step <= 0:
                raise UsageError("sweep step must be positive")
            n = int(math.floor((b - a) / step + 1e-9)) + 1
            vals = [round(a + i * step, 12) for i in range(max(n, 0))]
        else:
            vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse range {text!r}: {exc}") from None
    if integer:
        if any(v != int(v) for v in vals):
            raise UsageError(f"integer variable needs integer range, got {text!r}")
        return [int(v) for v in vals]
    return vals


def parse_counts(text: str | None) -> tuple[dict, tuple | None]:
    """Parse ``m1=2,m2=0..5``; at most one entry may be a range (a sweep)."""
    fixed, sweep = {}, None
    if not text:
        return fixed, sweep
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"bad count {item!r}, expected mK=value")
        key, val = (s.strip() for s in item.split("=", 1))
        if key not in INT_VARS:
            raise UsageError(f"unknown count {key!r}")
        if ".." in val or ":" in val:
            if sweep is not None:
                raise UsageError("only one count may be swept")
            sweep = (key, parse_range(val, integer=True))
        else:
            try:
                fixed[key] = int(val)
            except ValueError:
                raise UsageError(f"count {key} must be an integer, got {val!r}") from None
            if fixed[key] < 0:
                raise UsageError(f"count {key} must be non-negative")
    return fixed, sweep


@dataclass
class SweepSpec:
    family: str
    variable: str | None
    values: list
    fixed: dict
    op: str = "none"
    engine: str = "gaussian"
    eps_tail: float = EPS_TAIL
    counts: dict = field(default_factory=dict)

    def validate(self):
        n = FAMILY_MODES[self.family]
        if self.engine == "gaussian" and self.op != "none":
            raise UsageError("--engine gaussian requires --op none")
        if self.family == "tritter" and self.engine != "gaussian":
            raise UsageError("the tritter family is only available with --engine gaussian")
        if self.op != "none" and self.engine == "both":
            raise UsageError("--engine both compares Gaussian states; use --op none")
        for key in list(self.counts) + ([self.variable] if self.variable in INT_VARS else []):
            if int(key[1]) > n:
                raise UsageError(f"{key} does not exist for the {n}-mode {self.family} family")
        if self.variable == "t" and self.family != "crystal":
            raise UsageError("t can only be swept for the crystal family")
        if self.variable in INT_VARS and self.op == "none":
            raise UsageError("sweeping a photon count requires --op add or --op subtract")


def _point_params(spec: SweepSpec, value) -> tuple[dict, tuple]:
    params = dict(spec.fixed)
    counts = dict(spec.counts)
    if spec.variable in INT_VARS:
        counts[spec.variable] = value
    elif spec.variable is not None:
        params[spec.variable] = value
    n = FAMILY_MODES[spec.family]
    return params, tuple(counts.get(f"m{i + 1}", 0) for i in range(n))


def _crystal(params) -> CrystalParams:
    return CrystalParams(params["gamma1"], params["gamma2"], params["t"], params["phi2"], params["phi3"])


def _gaussian_cm(family, params):
    if family == "tritter":
        return tritter_cm(params["r"])
    if family == "fmsv":
        return fmsv_cm(params["r"])
    return crystal_cm(_crystal(params))


def _fock_state(family, params, counts, op, eps_tail) -> FockState:
    kind = "add" if op == "none" else op
    if family == "fmsv":
        return build_fmsv_family(params["r"], counts, kind, eps_tail)
    return build_crystal_family(_crystal(params), counts, kind, eps_tail)


def evaluate_point(job):
    """Worker: one sweep point -> ``(gaussian result, fock result, tail)``."""
    spec, value = job
    params, counts = _point_params(spec, value)
    g = f = None
    tail = 0.0
    if spec.engine in ("gaussian", "both"):
        g = ggm_gaussian(_gaussian_cm(spec.family, params))
    if spec.engine in ("fock", "both"):
        state = _fock_state(spec.family, params, counts, spec.op, spec.eps_tail)
        f = ggm_fock(state)
        tail = state.tail_bound
    return g, f, tail


def _run_jobs(fn, jobs, n_workers):
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _default_jobs():
    return os.cpu_count() or 1


def cmd_ggm(args, out) -> int:
    fixed = {
        "r": args.r,
        "gamma1": args.gamma1,
        "gamma2": args.gamma2,
        "t": args.t,
        "phi2": args.phi2,
        "phi3": args.phi3,
    }
    counts, count_sweep = parse_counts(args.counts)
    variable, values = None, None
    if args.sweep:
        if count_sweep:
            raise UsageError("give either --sweep or a ranged --counts entry, not both")
        if "=" not in args.sweep:
            raise UsageError("--sweep must look like VAR=start:stop:step")
        variable, rng = args.sweep.split("=", 1)
        variable = variable.strip()
        if variable not in ("r", "t") + INT_VARS:
            raise UsageError(f"cannot sweep {variable!r} here")
        values = parse_range(rng, integer=variable in INT_VARS)
    elif count_sweep:
        variable, values = count_sweep
    if values is None:
        variable = "t" if args.family == "crystal" else "r"
        values = [fixed[variable]]
    spec = SweepSpec(args.family, variable, values, fixed, args.op, args.engine, args.eps_tail, counts)
    spec.validate()

    results = _run_jobs(evaluate_point, [(spec, v) for v in values], args.jobs)

    if args.engine == "both":
        out.write("param,ggm_gaussian,ggm_fock,argmax_partition,engine,tail_bound\n")
    else:
        out.write("param,ggm,argmax_partition,engine,tail_bound\n")
    max_diff = 0.0
    for v, (g, f, tail) in zip(values, results):
        if args.engine == "both":
            max_diff = max(max_diff, abs(g.value - f.value))
            out.write(f"{fmt(v)},{fmt(g.value)},{fmt(f.value)},{g.argmax_partition},both,{fmt(tail)}\n")
        else:
            res = g if g is not None else f
            out.write(f"{fmt(v)},{fmt(res.value)},{res.argmax_partition},{args.engine},{fmt(tail)}\n")
    if args.engine == "both":
        out.write(f"# max_abs_diff={max_diff:.3e}\n")

    if args.engine in ("gaussian", "both") and variable in ("r", "t") and len(values) > 1:
        series = [(v, g) for v, (g, _, _) in zip(values, results)]

        def evaluate(x):
            params, _ = _point_params(spec, x)
            return ggm_gaussian(_gaussian_cm(spec.family, params))

        for k in detect_kinks(series, evaluate):
            t_cross = "" if k.t_cross is None else fmt(k.t_cross)
            out.write(
                f"# kink {variable}_lo={fmt(k.t_lo)} {variable}_hi={fmt(k.t_hi)} "
                f"{variable}_cross={t_cross} from={k.before} to={k.after} crossing={k.crossing}\n"
            )

    if args.dump_state:
        if len(values) != 1 or args.engine == "gaussian":
            raise UsageError("--dump-state needs a single Fock-engine point")
        params, cts = _point_params(spec, values[0])
        _fock_state(spec.family, params, cts, spec.op, spec.eps_tail).dump(args.dump_state)
    return 0


def _table_worker(job):
    r, m1, m2, eps = job
    return nongauss_table(r, [(m1, m2)], eps)[0]


def parse_rows(text: str | None):
    if not text:
        return list(TABLE_ROWS)
    rows = []
    for item in text.split(";"):
        try:
            m1, m2 = (int(v) for v in item.split(","))
        except ValueError:
            raise UsageError(f"bad row {item!r}, expected m1,m2") from None
        if m1 < 0 or m2 < 0:
            raise UsageError("row counts must be non-negative")
        rows.append((m1, m2))
    return rows


def cmd_nongauss_table(args, out) -> int:
    rows = parse_rows(args.rows)
    results = _run_jobs(_table_worker, [(args.r, m1, m2, args.eps_tail) for m1, m2 in rows], args.jobs)
    out.write("m1,m2,delta_add,f_add,delta_sub,f_sub\n")
    for row in results:
        if math.isnan(row["f_add"]) or math.isnan(row["f_sub"]):
            print(f"warning: baseline GGM vanishes at r={args.r}; f reported as nan", file=sys.stderr)
        out.write(",".join(fmt(row[k]) for k in ("m1", "m2", "delta_add", "f_add", "delta_sub", "f_sub")) + "\n")
    return 0


def _desk_warning(M):
    if M > DESK_M:
        print(
            f"warning: photon total {M} exceeds the desk-scale default {DESK_M}; "
            "expect large Fock bases and memory use",
            file=sys.stderr,
        )


def _fmsv_ggm_worker(job):
    r, counts, kind, eps = job
    return ggm_fock(build_fmsv_family(r, counts, kind, eps)).value


def cmd_freeze_check(args, out) -> int:
    if args.M < 0 or args.m2 < 0:
        raise UsageError("M and m2 must be non-negative")
    _desk_warning(args.M)
    splits = [(m1, args.M - m1) for m1 in range(args.M + 1)]
    jobs = [(args.r, (m1, args.m2, m3, 0), args.op, args.eps_tail) for m1, m3 in splits]
    values = _run_jobs(_fmsv_ggm_worker, jobs, args.jobs)
    out.write("m1,m3,ggm\n")
    for (m1, m3), v in zip(splits, values):
        out.write(f"{m1},{m3},{fmt(v)}\n")
    spread = max(values) - min(values)
    frozen = spread < FREEZE_TOL
    out.write(f"# spread={spread:.3e}\n# frozen={'yes' if frozen else 'no'}\n")
    return 0 if frozen else 1


def _pair_counts(m1, n, pairing):
    return (m1, n, 0, 0) if pairing == "adjacent" else (m1, 0, n, 0)


def cmd_compare_modes(args, out) -> int:
    if args.three_mode is not None:
        M = args.three_mode
        _desk_warning(M)
        if args.op not in ("add", "subtract"):
            raise UsageError("--three-mode supports --op add or --op subtract")
        grid = [(m1, m2) for m1 in range(M + 1) for m2 in range(M + 1 - m1)]
        jobs = [(args.r, (m1, m2, M - m1 - m2, 0), args.op, args.eps_tail) for m1, m2 in grid]
        values = _run_jobs(_fmsv_ggm_worker, jobs, args.jobs)
    else:
        if args.constrained is not None:
            _desk_warning(args.constrained)
            grid = [(m1, args.constrained - m1) for m1 in range(args.constrained + 1)]
        else:
            grid = [(m1, n) for m1 in range(args.m1_max + 1) for n in range(args.n_max + 1)]
        # every GGM needed, as (pairing, kind) per grid point
        if args.op in ("add", "subtract"):
            terms = [((args.pairing, args.op), 1.0)]
        elif args.op == "diff-sub-add":
            terms = [((args.pairing, "subtract"), 1.0), ((args.pairing, "add"), -1.0)]
        else:
            terms = [(("alternate", args.kind), 1.0), (("adjacent", args.kind), -1.0)]
        jobs = [
            (args.r, _pair_counts(m1, n, pairing), kind, args.eps_tail)
            for m1, n in grid
            for (pairing, kind), _ in terms
        ]
        flat = _run_jobs(_fmsv_ggm_worker, jobs, args.jobs)
        k = len(terms)
        values = [sum(w * flat[i * k + j] for j, (_, w) in enumerate(terms)) for i in range(len(grid))]
    out.write("m1,m2_or_n,value\n")
    for (m1, n), v in zip(grid, values):
        out.write(f"{m1},{n},{fmt(v)}\n")
    return 0


def cmd_state(args, out) -> int:
    state = FockState.load(args.path)
    res = ggm_fock(state)
    out.write("ggm,argmax_partition,delta_ng,tail_bound\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = delta_ng(state)
    out.write(f"{fmt(res.value)},{res.argmax_partition},{fmt(d)},{fmt(state.tail_bound)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ggmlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--eps-tail", type=float, default=EPS_TAIL, help="Fock truncation tail target")
        sp.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes")
        sp.add_argument("--seed", type=int, default=None, help="reserved; all computations are deterministic")

    g = sub.add_parser("ggm", help="GGM of a Gaussian family, optionally photon-varied, over a sweep")
    g.add_argument("--family", choices=sorted(FAMILY_MODES), required=True)
    g.add_argument("--r", type=float, default=0.4, help="squeezing strength")
    g.add_argument("--gamma1", type=float, default=0.8)
    g.add_argument("--gamma2", type=float, default=0.5)
    g.add_argument("--t", type=float, default=1.0, help="crystal evolution time")
    g.add_argument("--phi2", type=float, default=0.0)
    g.add_argument("--phi3", type=float, default=0.0)
    g.add_argument("--sweep", help="VAR=start:stop:step (VAR in r, t, m1..m4)")
    g.add_argument("--counts", help="photon counts, e.g. m1=2,m2=0..5")
    g.add_argument("--op", choices=("none", "add", "subtract"), default="none")
    g.add_argument("--engine", choices=("gaussian", "fock", "both"), default="gaussian")
    g.add_argument("--dump-state", metavar="PATH", help="write the Fock state of a single point")
    common(g)
    g.set_defaults(func=cmd_ggm)

    t = sub.add_parser("nongauss-table", help="non-Gaussianity and GGM enhancement table")
    t.add_argument("--r", type=float, default=0.4)
    t.add_argument("--rows", help="semicolon-separated m1,m2 pairs (default: the six reference rows)")
    common(t)
    t.set_defaults(func=cmd_nongauss_table)

    f = sub.add_parser("freeze-check", help="GGM spread over splits m1 + m3 = M")
    f.add_argument("--M", type=int, required=True)
    f.add_argument("--r", type=float, default=0.4)
    f.add_argument("--op", choices=("add", "subtract"), default="subtract")
    f.add_argument("--m2", type=int, default=0, help="fixed count on mode 2")
    common(f)
    f.set_defaults(func=cmd_freeze_check)

    c = sub.add_parser("compare-modes", help="GGM grids comparing operations and mode pairings")
    c.add_argument("--r", type=float, default=0.4)
    c.add_argument("--m1-max", type=int, default=4)
    c.add_argument("--n-max", type=int, default=4)
    c.add_argument("--pairing", choices=("adjacent", "alternate"), default="adjacent")
    c.add_argument("--op", choices=("add", "subtract", "diff-sub-add", "diff-alt-adj"), default="diff-sub-add")
    c.add_argument("--kind", choices=("add", "subtract"), default="add", help="operation for diff-alt-adj")
    c.add_argument("--constrained", type=int, metavar="M", help="m1 + n = M instead of a grid")
    c.add_argument("--three-mode", type=int, metavar="M", help="m1 + m2 + m3 = M grid")
    common(c)
    c.set_defaults(func=cmd_compare_modes)

    s = sub.add_parser("state", help="GGM and non-Gaussianity of a dumped Fock state")
    s.add_argument("path")
    s.set_defaults(func=cmd_state)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except (GgmError, ArithmeticError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
