"""Command-line experiment runner.

    python3 -m lamplighter <subcommand> [--group G] [--steps N] [--trials N]
        [--radius R] [--seed S] [--tol T] [--out PATH] [--format csv|json]

Exit status: 0 on success, 2 on parameter errors, 1 on internal failure or
a failed verification.  Output goes to ``--out`` or, by default, to
``$LAMPLIGHTER_OUT/<subcommand>.<format>`` (current directory if unset).
"""
import argparse
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .report import Result, RunManifest, emit_report

ENV_OUT = "LAMPLIGHTER_OUT"


class ParameterError(ValueError):
    pass


# defaults per subcommand; None marks a flag the subcommand ignores
DEFAULTS = {
    "coupling": dict(radius=64, trials=100000, seed=0),
    "kernel": dict(radius=30, tol=1e-10),
    "harmonic-check": dict(group="C2 wr Z2", radius=30, tol=1e-8, seed=0),
    "growth-profile": dict(group="C2 wr Z2", radius=100),
    "entropy-exact": dict(group="C2 wr Z", steps=10),
    "audit-inequalities": dict(trials=10000, seed=0, steps=10),
    "visit-profile": dict(group="Z2", steps=4096, trials=200, seed=0),
    "entropy-growth": dict(group="C2 wr Z2", steps=2 ** 14, trials=200, seed=0),
    "expansion-check": dict(steps=40, radius=64, tol=1e-12),
    "binomial-bound": dict(steps=200, radius=10),
}

FLAGS = ("group", "steps", "trials", "radius", "seed", "tol")


def _params(cmd, args):
    allowed = DEFAULTS[cmd]
    out = {}
    for flag in FLAGS:
        given = getattr(args, flag)
        if flag not in allowed:
            if given is not None:
                raise ParameterError(f"--{flag} does not apply to {cmd}")
            continue
        out[flag] = allowed[flag] if given is None else given
    for flag in ("steps", "trials", "radius"):
        if flag in out and out[flag] < 0:
            raise ParameterError(f"--{flag} must be nonnegative")
    if "trials" in out and out["trials"] < 1:
        raise ParameterError("--trials must be positive")
    if "tol" in out and not out["tol"] > 0:
        raise ParameterError("--tol must be positive")
    return out


def run_coupling(p):
    from .walks import coupled_gluing_experiment, coupling_escape_exact
    r = p["radius"]
    if r < 1:
        raise ParameterError("--radius must be at least 1")
    est = coupled_gluing_experiment(r, p["trials"], p["seed"])
    exact = coupling_escape_exact(r) if r <= 512 else None
    return Result(["r", "estimate", "stderr"], [(r, est.mean, est.stderr)],
                  {"exact": exact, "trials": p["trials"]})


def run_kernel(p):
    from .kernel import build_kernel_table
    t = build_kernel_table(p["radius"], tol=p["tol"])
    return Result(["x", "y", "a"], list(t.rows()),
                  dict(t.header(), harmonicity_residual=t.harmonicity_residual(),
                       origin_defect=t.origin_defect()))


def _spec_text(group):
    from .groups import parse_group_spec
    return str(parse_group_spec(group))


def run_harmonic_check(p):
    from .harmonic import BaseCoordinate, LampSignTimesKernel, residual_scan, harmonicity_residual
    from .kernel import build_kernel_table
    group = _spec_text(p["group"])
    r = p["radius"]
    if group == "C2 wr Z2":
        h = LampSignTimesKernel(build_kernel_table(r + 1, normalization="shifted"))
        res = residual_scan(h, r, np.random.default_rng(p["seed"]), extra_lamps=2)
        kind = h.kind
    elif group in ("C2 wr Z", "Z wr Z"):
        h = BaseCoordinate(group)
        G = h.spec
        res = max(harmonicity_residual(h, h.measure, G.element(cfg, x))
                  for x in range(-r, r + 1) for cfg in ({}, {0: G.lamp.generators()[0][1]}))
        kind = h.kind
    else:
        raise ParameterError(f"no harmonic function registered for {group}")
    ok = res <= p["tol"]
    return Result(["group", "function", "radius", "max_residual", "tol", "pass"],
                  [(group, kind, r, res, p["tol"], ok)],
                  {"max_residual": res, "pass": ok}), (0 if ok else 1)


def run_growth_profile(p):
    from .harmonic import BaseCoordinate, LampSignTimesKernel, growth_profile
    from .kernel import LOG_SLOPE, build_kernel_table
    group = _spec_text(p["group"])
    R = p["radius"]
    if group == "C2 wr Z2":
        h = LampSignTimesKernel(build_kernel_table(max(R, 1), normalization="shifted"))
    elif group in ("C2 wr Z", "Z wr Z"):
        h = BaseCoordinate(group)
    else:
        raise ParameterError(f"no harmonic function registered for {group}")
    rows = []
    for pt in growth_profile(h, range(R + 1)):
        ratio = pt.lower / math.log(pt.r) if pt.r > 1 else float("nan")
        rows.append((pt.r, pt.lower, pt.upper, ratio))
    return Result(["r", "lower", "upper", "lower_over_log_r"], rows,
                  {"function": h.kind, "reference_slope": LOG_SLOPE})


def run_entropy_exact(p):
    from .entropy import entropy_sequence
    seq = entropy_sequence(_spec_text(p["group"]), None, p["steps"])
    inc = np.concatenate([[float("nan")], seq.increments])
    rows = [(int(n), float(h), float(d)) for n, h, d in zip(seq.n, seq.H, inc)]
    return Result(["n", "entropy", "increment"], rows,
                  {"monotone_increments": seq.monotone_increments(),
                   "n_delta_bound": seq.n_delta_bound()})


def run_audit(p):
    from .entropy import check_inequality_suite
    reps = check_inequality_suite({"trials": p["trials"], "seed": p["seed"],
                                   "walk": {"group": "C2 wr Z", "n_max": p["steps"]}})
    cols = ["inequality", "trials", "violations", "max_ratio", "seed"]
    rows = [tuple(r[c] for c in cols) for r in reps]
    bad = sum(r["violations"] for r in reps)
    return Result(cols, rows, {"reports": reps, "total_violations": bad}), (0 if bad == 0 else 1)


def run_visit_profile(p):
    from .growth import visit_count_profile
    n = p["steps"]
    thr = math.log(n) if n > 1 else 1.0
    rows = []
    for i in range(p["trials"]):
        prof = visit_count_profile(p["group"], n, p["seed"], trial=i)
        heavy = sum(1 for c in prof.counts.values() if c >= thr)
        rows.append((i, n, prof.sites, heavy))
    sites = np.array([r[2] for r in rows], float)
    heavy = np.array([r[3] for r in rows], float)
    return Result(["trial", "n", "sites", "heavy_sites"], rows,
                  {"mean_sites": sites.mean(), "mean_heavy_sites": heavy.mean(),
                   "heavy_threshold": thr,
                   "n_over_log_n": n / math.log(n) if n > 1 else float("nan")})


def _depth(group):
    from .groups import CyclicTwo, Wreath, parse_group_spec
    spec = parse_group_spec(group)
    depth = 0
    while isinstance(spec, Wreath):
        depth += 1
        base = spec.base
        spec = spec.lamp
    if not isinstance(spec, CyclicTwo) or depth == 0:
        raise ParameterError("entropy-growth needs C2 wr B, (C2 wr Z2) wr Z2, ...")
    return depth, str(base)


def run_entropy_growth(p):
    from .growth import conditional_entropy_lower_bound, iterated_growth_experiment
    depth, base = _depth(p["group"])
    top = p["steps"]
    if top < 8:
        raise ParameterError("--steps must be at least 8")
    ns = [2 ** j for j in range(3, int(math.log2(top)) + 1)]
    cols = ["n", "estimate", "stderr", "reference", "ratio"]
    if base == "Z":
        if depth != 1:
            raise ParameterError("line bases are supported at depth 1 only")
        ests = conditional_entropy_lower_bound("C2", "Z", ns, p["trials"], p["seed"])
        rows = [(n, e, s, math.sqrt(n), e / math.sqrt(n)) for n, (e, s) in zip(ns, ests)]
        slope = float(np.polyfit(np.log(ns), np.log([r[1] for r in rows]), 1)[0])
        return Result(cols, rows, {"depth": 1, "base": base, "reference": "sqrt(n)",
                                   "exponent": slope})
    if base != "Z2":
        raise ParameterError(f"unsupported base {base}")
    rows = iterated_growth_experiment(depth, ns, p["trials"], p["seed"])
    return Result(cols, rows, {"depth": depth, "base": base,
                               "reference": f"n / log^({depth}) n"})


def run_expansion(p):
    from .operators import FiniteMarkovOperator, lazy_power_expansion_check
    P = FiniteMarkovOperator.cycle(p["radius"])
    rows, worst = [], 0.0
    for alpha in (0.25, 0.5, 0.75):
        for k in range(p["steps"] + 1):
            for m in range(6):
                r = lazy_power_expansion_check(P, alpha, k, m)
                if m == 0:
                    rows.append(("expansion", r["size"], k, m, alpha, r["expansion"]))
                rows.append(("difference", r["size"], k, m, alpha, r["difference"]))
                worst = max(worst, r["expansion"], r["difference"])
    ok = worst <= p["tol"]
    return Result(["identity", "size", "k", "m", "alpha", "max_discrepancy"], rows,
                  {"max_discrepancy": worst, "pass": ok}), (0 if ok else 1)


def run_binomial(p):
    from .operators import verify_derivative_bound
    ps = [round(0.1 * i, 1) for i in range(1, 10)]
    rows, total = [], 0
    for m in range(1, p["radius"] + 1):
        for q in ps:
            rep = verify_derivative_bound(range(1, p["steps"] + 1), [m], [q])
            total += rep["violations"]
            rows.append((m, q, p["steps"], rep["worst"]["n"], rep["max_ratio"], rep["violations"]))
    return Result(["m", "p", "n_max", "worst_n", "max_ratio", "violations"], rows,
                  {"violations": total}), (0 if total == 0 else 1)


COMMANDS = {
    "coupling": run_coupling,
    "kernel": run_kernel,
    "harmonic-check": run_harmonic_check,
    "growth-profile": run_growth_profile,
    "entropy-exact": run_entropy_exact,
    "audit-inequalities": run_audit,
    "visit-profile": run_visit_profile,
    "entropy-growth": run_entropy_growth,
    "expansion-check": run_expansion,
    "binomial-bound": run_binomial,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser():
    ap = _Parser(prog="lamplighter", description="Lamplighter random-walk experiments.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--group")
        sp.add_argument("--steps", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--radius", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--threads", type=int, default=1)
    return ap


def _output(args):
    fmt = args.format
    path = args.out
    if path is not None:
        ext = os.path.splitext(path)[1].lstrip(".").lower()
        if fmt is None:
            fmt = ext if ext in ("csv", "json") else "csv"
        elif ext in ("csv", "json") and ext != fmt:
            raise ParameterError(f"--format {fmt} conflicts with --out {path}")
    else:
        fmt = fmt or "csv"
        path = os.path.join(os.environ.get(ENV_OUT, "."), f"{args.command}.{fmt}")
    return path, fmt


def run(argv=None):
    """Parse ``argv``, run the experiment and write outputs; returns the exit status."""
    from .groups import GroupSyntaxError
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads is not None and args.threads < 1:
            raise ParameterError("--threads must be positive")
        params = _params(args.command, args)
        path, fmt = _output(args)
    except (ParameterError, GroupSyntaxError) as exc:
        print(f"lamplighter: error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        out = COMMANDS[args.command](params)
    except (ParameterError, GroupSyntaxError) as exc:
        print(f"lamplighter: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # invalid parameter values detected by the library
        print(f"lamplighter: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"lamplighter: internal error: {exc!r}", file=sys.stderr)
        return 1
    result, status = out if isinstance(out, tuple) else (out, 0)
    manifest = RunManifest(args.command, params, params.get("seed"))
    try:
        emit_report(result, fmt, path, manifest, wall_clock=time.perf_counter() - start,
                    extra={"threads": args.threads})
    except OSError as exc:
        print(f"lamplighter: error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return status


def main():
    sys.exit(run())
