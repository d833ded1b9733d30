"""Command-line entry point: ``edl <subcommand> ...``.

Every stdout document is JSON (or CSV where ``--format csv`` applies) and
carries ``"schema": "1"``.  Timings and log lines go to stderr.  Exit status
is 0 on success, 1 on a domain error and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time

from . import extremal, graph, shifting, threshold, verify

SCHEMA = "1"
log = logging.getLogger("edl")


# -- output ----------------------------------------------------------------------

def _encode(obj) -> str:
    # floats at 17 significant digits; non-finite floats become null
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return _encode({"schema": SCHEMA, **doc})


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- argument types ------------------------------------------------------------------

def _ranged(kind, lo=None, hi=None, lo_open=False):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}") from None
        if isinstance(value, float) and not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"{text!r} is not finite")
        if lo is not None and (value < lo or (lo_open and value == lo)):
            raise argparse.ArgumentTypeError(f"{value} must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and value > hi:
            raise argparse.ArgumentTypeError(f"{value} must be <= {hi}")
        return value
    parse.__name__ = kind.__name__
    return parse


SIZE = _ranged(int, 2, 64)
BIG = _ranged(int, 3, 64)
POSITIVE = _ranged(float, 0.0, lo_open=True)
UNIT = _ranged(float, 0.0, 1.0)
COUNT = _ranged(int, 0)


def _threads_default():
    env = os.environ.get("EDL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring EDL_THREADS=%r", env)
    return os.cpu_count() or 1


class _Parser(argparse.ArgumentParser):
    # unknown flags and bad values exit with status 2, naming the flag
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="edl", description="Clique and independent-set density toolkit.")
    ap.add_argument("--threads", type=_ranged(int, 1), default=None,
                    help="worker threads for counting kernels (default: EDL_THREADS or all cores)")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="largest K_s density given independent r-set density p")
    p.add_argument("--r", type=SIZE, required=True)
    p.add_argument("--s", type=SIZE, required=True)
    p.add_argument("--p", type=UNIT, required=True)

    p = sub.add_parser("maxmin", help="asymptotic max of min(d(K_r), d(indep r-set))")
    p.add_argument("--r", type=BIG, required=True)

    p = sub.add_parser("curve", help="density curves of the two extremal families")
    p.add_argument("--r", type=SIZE, required=True)
    p.add_argument("--s", type=SIZE, required=True)
    p.add_argument("--steps", type=_ranged(int, 2, 10**6), default=101)
    p.add_argument("--profile", metavar="FILE", help="also evaluate this profile (JSON)")
    p.add_argument("--step-model", metavar="FILE", help="also evaluate this step model (JSON)")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("optimize", help="multistart search over W_k profiles")
    p.add_argument("--a", type=POSITIVE, required=True)
    p.add_argument("--b", type=POSITIVE, required=True)
    p.add_argument("--r", type=BIG, required=True)
    p.add_argument("--s", type=BIG, required=True)
    p.add_argument("--k", type=_ranged(int, 1, 5), default=2)
    p.add_argument("--starts", type=_ranged(int, 1, 10**5), default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", metavar="FILE", help="extra starting profile (JSON)")

    p = sub.add_parser("shift", help="apply a shift or shift to a fixpoint")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")
    p.add_argument("--kind", choices=("graph", "sets"), default="graph")
    p.add_argument("--u", type=_ranged(int, 1))
    p.add_argument("--v", type=_ranged(int, 1))
    p.add_argument("--fixpoint", action="store_true")
    p.add_argument("--out", metavar="FILE", help="write the result in the input's text format")
    p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("threshold", help="threshold recognition with witness order")
    p.add_argument("--in", dest="input", required=True, metavar="FILE")

    p = sub.add_parser("verify", help="run brute-force and fuzz suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    p.add_argument("--max-n", type=_ranged(int, 0, 12), default=6)
    p.add_argument("--trials", type=COUNT, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    sub.add_parser("franek-rodl", help="K4 / independent 4-set densities of the 8192-vertex Cayley graph")
    return ap


# -- commands ----------------------------------------------------------------------

def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_bound(args, threads):
    pt = extremal.m_bound(args.r, args.s, args.p)
    return dumps({"value": pt.value, "family": pt.family, "t": pt.t, "q": pt.roots["q"],
                  "roots": pt.roots})


def cmd_maxmin(args, threads):
    pt = extremal.rho_maxmin(args.r)
    return dumps({"rho": pt.t, "value": pt.value})


def cmd_curve(args, threads):
    rows = [(row.theta, row.family, row.q_density, row.p_density)
            for row in extremal.curve(args.r, args.s, args.steps)]
    extra = []
    if args.profile:
        P = threshold.Profile.from_json(_load_json(args.profile))
        extra.append(("profile", threshold.q_density(P, args.r), threshold.p_density(P, args.s)))
    if args.step_model:
        M = threshold.StepModel.from_json(_load_json(args.step_model))
        extra.append(("step-model", threshold.step_densities(M, args.r)[0],
                      threshold.step_densities(M, args.s)[1]))
    if args.format == "csv":
        return _csv(("theta", "family", "q_density", "p_density"),
                    rows + [("", fam, q, p) for fam, q, p in extra])
    doc = {"r": args.r, "s": args.s,
           "rows": [dict(zip(("theta", "family", "q_density", "p_density"), row)) for row in rows]}
    try:
        q, p = extremal.curve_intersection(extremal.curve(args.r, args.s, args.steps))
        doc["intersection"] = {"q_density": q, "p_density": p}
    except extremal.SolverError:
        doc["intersection"] = None
    if extra:
        doc["points"] = [{"source": fam, "q_density": q, "p_density": p} for fam, q, p in extra]
    return dumps(doc)


def cmd_optimize(args, threads):
    initial = threshold.Profile.from_json(_load_json(args.profile)) if args.profile else None
    res = extremal.optimize_profile(args.a, args.b, args.r, args.s, args.k, args.starts, args.seed,
                                    initial=initial)
    return dumps(res.to_json())


def _read_object(path, kind):
    return graph.read_graph(path) if kind == "graph" else shifting.read_set_system(path)


def _object_json(F, kind):
    if kind == "graph":
        return {"n": F.n, "edges": [list(e) for e in F.edges()]}
    return {"n": F.ground_n, "members": [list(m) for m in F.sets()]}


def cmd_shift(args, threads):
    if args.fixpoint == (args.u is not None or args.v is not None):
        raise _Usage("give either --fixpoint or both --u and --v")
    if not args.fixpoint and (args.u is None or args.v is None):
        raise _Usage("--u and --v must be given together")
    F = _read_object(args.input, args.kind)
    out = shifting.shift_to_fixpoint(F) if args.fixpoint else shifting.shift(F, args.u, args.v)
    text = graph.format_graph(out) if args.kind == "graph" else shifting.format_set_system(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if args.format == "text":
        return text
    doc = {"kind": args.kind, "operation": "fixpoint" if args.fixpoint else "shift",
           "changed": out != F, "shifted": shifting.is_shifted(out), **_object_json(out, args.kind)}
    if not args.fixpoint:
        doc.update(u=args.u, v=args.v)
    return dumps(doc)


def cmd_threshold(args, threads):
    G = graph.read_graph(args.input)
    check = shifting.is_threshold(G)
    doc = {"threshold": check.is_threshold,
           "order": list(check.order) if check else None,
           "kinds": list(check.kinds) if check else None,
           "reason": check.reason}
    if check:
        doc["relabeling"] = {str(k): v for k, v in sorted(shifting.shifted_relabeling(check).items())}
    return dumps(doc)


def cmd_verify(args, threads):
    reports = verify.run_suite(args.suite, max_n=args.max_n, trials=args.trials, seed=args.seed)
    for rep in reports:
        log.info("%s: %d trials, %d violations, %.2fs", rep.suite, rep.trials, rep.violations, rep.elapsed)
    if args.format == "csv":
        return _csv(("suite", "trials", "violations"), [(r.suite, r.trials, r.violations) for r in reports])
    total = sum(r.violations for r in reports)
    return dumps({"suite": args.suite, "max_n": args.max_n, "trials": args.trials, "seed": args.seed,
                  "violations": total, "pass": total == 0, "reports": [r.to_json() for r in reports]})


def cmd_franek_rodl(args, threads):
    rep = verify.franek_rodl_check(threads=threads)
    return dumps(rep.to_json())


COMMANDS = {
    "bound": cmd_bound, "maxmin": cmd_maxmin, "curve": cmd_curve, "optimize": cmd_optimize,
    "shift": cmd_shift, "threshold": cmd_threshold, "verify": cmd_verify,
    "franek-rodl": cmd_franek_rodl,
}


class _Usage(Exception):
    pass


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="edl: %(message)s")
    threads = args.threads or _threads_default()
    t0 = time.perf_counter()
    try:
        text = COMMANDS[args.command](args, threads)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"edl {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, AssertionError) as exc:
        print(f"edl {args.command}: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    log.info("%s finished in %.3fs", args.command, time.perf_counter() - t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
