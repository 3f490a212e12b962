"""Command-line interface: ``kdisc gen|match|disc|sample|eval|experiment``.

Exit codes: 0 success, 1 a verification or experiment assertion failed,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from kdisc.errors import UsageError

log = logging.getLogger("kdisc")

THREADS_ENV = "KDISC_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_globals(p, suppress=False):
    # subcommands accept the global flags too; SUPPRESS keeps them from
    # overwriting a value given before the subcommand
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=dflt(None), help="base seed for every random stream (default 0)")
    p.add_argument("--threads", type=_positive_int, default=dflt(None),
                   help=f"worker threads for evaluation loops (default: ${THREADS_ENV} or all cores)")
    p.add_argument("--format", choices=("json", "csv"), default=dflt("json"), help="stdout format")
    p.add_argument("--quiet", action="store_true", default=dflt(False), help="suppress progress logging")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kdisc", description="Low-discrepancy colorings and epsilon-samples for kernels.")
    _add_globals(p)
    common = _Parser(add_help=False)
    _add_globals(common, suppress=True)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    g = add("gen", help="generate a point set")
    g.add_argument("generator")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--dim", type=_positive_int, default=2)
    g.add_argument("--t", type=_positive_int, help="site count for coincident-clusters")
    g.add_argument("--separation", type=float)
    g.add_argument("--k", type=_positive_int, help="component count for gaussian-mixture")
    g.add_argument("--spread", type=float)
    g.add_argument("--inner", type=float)
    g.add_argument("--outer", type=float)
    g.add_argument("--pair-gap", type=float)
    g.add_argument("--out", help="output file (.json for JSON, otherwise CSV)")

    m = add("match", help="min-cost perfect matching of a point file")
    m.add_argument("points")
    m.add_argument("--algo", choices=("exact", "greedy", "brute"), default="exact")

    d = add("disc", help="max kernel discrepancy of colorings")
    d.add_argument("points")
    d.add_argument("--kernel", default="gaussian")
    d.add_argument("--coloring", choices=("matching", "random", "brute"), default="matching")
    d.add_argument("--matching", choices=("exact", "greedy"), default="exact")
    d.add_argument("--net-tau", default="auto")
    d.add_argument("--max-centers", type=_positive_int, default=10**7)
    d.add_argument("--trials", type=_positive_int, default=1)
    d.add_argument("--no-polish", action="store_true", help="report the net maximum only")
    d.add_argument("--per-center-csv", help="write |disc| at every net center (first trial)")

    s = add("sample", help="build an epsilon-sample by halving")
    s.add_argument("points")
    tgt = s.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--eps", type=float)
    tgt.add_argument("--size", type=_positive_int)
    s.add_argument("--kernel", default="gaussian")
    s.add_argument("--matching", choices=("exact", "greedy"), default="exact")
    s.add_argument("--c", type=float, default=1.0, help="size constant of the stopping rule")
    s.add_argument("--phi", type=float, default=0.1, help="overall failure-probability knob")
    s.add_argument("--verify", action="store_true", help="measure L-infinity error of the sample")
    s.add_argument("--max-centers", type=_positive_int, default=10**7)
    s.add_argument("--out", help="write the sample points here")
    s.add_argument("--diagnostics", help="write the JSON diagnostics here as well")

    e = add("eval", help="L-infinity distance between two KDEs")
    e.add_argument("points1")
    e.add_argument("points2")
    e.add_argument("--kernel", default="gaussian")
    e.add_argument("--kernel2", help="kernel for the second set (must equal --kernel)")
    e.add_argument("--resolution", type=float)
    e.add_argument("--max-centers", type=_positive_int, default=10**7)
    e.add_argument("--field-csv", help="write kde1 - kde2 at every grid center")

    x = add("experiment", help="run an experiment spec")
    x.add_argument("--spec", required=True)
    x.add_argument("--out-dir", help="directory for the CSV table and JSON summary")
    return p


def _set_threads(n):
    import numba
    n = n or int(os.environ.get(THREADS_ENV, 0) or 0) or numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()


def _emit(args, payload: dict, rows=None, header=None):
    if args.format == "json":
        json.dump(payload, sys.stdout, indent=1, allow_nan=False)
        sys.stdout.write("\n")
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        for r in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else ("" if v is None else v) for v in r])


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items()}


def cmd_gen(args):
    from kdisc.experiments import generate
    from kdisc.pointio import format_points, write_points
    params = {k: getattr(args, a) for k, a in (("t", "t"), ("separation", "separation"), ("k", "k"),
                                               ("spread", "spread"), ("inner", "inner"), ("outer", "outer"),
                                               ("pair_gap", "pair_gap")) if getattr(args, a) is not None}
    P = generate(args.generator, args.n, args.dim, args.seed, **params)
    if args.out is None:
        sys.stdout.write(format_points(P, args.format))
        return 0
    write_points(args.out, P)
    _emit(args, {"config": _config(args), "out": args.out, "n": len(P), "dim": P.shape[1]},
          [[args.out, len(P), P.shape[1]]], ["out", "n", "dim"])
    return 0


def cmd_match(args):
    from kdisc.matching import check_matching, min_cost_matching
    from kdisc.pointio import read_points
    P = read_points(args.points)
    M = min_cost_matching(P, args.algo)
    check_matching(M)
    _emit(args, {"config": _config(args), **M.to_dict()},
          [[int(i), int(j)] for i, j in M.pairs], ["i", "j"])
    return 0


def cmd_disc(args):
    from kdisc.discrepancy import (build_net, color_from_matching, disc_max, min_disc_bruteforce,
                                   random_coloring)
    from kdisc.geometry import parse_kernel
    from kdisc.matching import min_cost_matching
    from kdisc.pointio import read_points
    from kdisc.rng import derive_seed
    P = read_points(args.points)
    k = parse_kernel(args.kernel, P.shape[1])
    tau = None if args.net_tau == "auto" else _float_arg(args.net_tau, "--net-tau")
    net = build_net(P, k, tau=tau, max_centers=args.max_centers)
    net_info = {"tau": net.tau, "tau_target": net.tau_target, "n_centers": net.n_centers,
                "coarsened": net.coarsened, "coverage_region": net.coverage_region()}
    if args.coloring == "brute":
        v, chi = min_disc_bruteforce(P, k, net, return_coloring=True)
        payload = {"config": _config(args), "net": net_info, "min_disc": v,
                   "signs": chi.signs.tolist()}
        _emit(args, payload, [[v]], ["min_disc"])
        return 0
    M = min_cost_matching(P, args.matching) if args.coloring == "matching" else None
    reports = []
    for t in range(args.trials):
        s = derive_seed(args.seed, "disc-trial", t)
        chi = color_from_matching(M, s) if M is not None else random_coloring(len(P), s)
        rep = disc_max(P, chi, k, net, matching=M, polish=not args.no_polish,
                       per_center=bool(args.per_center_csv) and t == 0)
        if rep.per_center is not None:
            _write_field_csv(args.per_center_csv, net.centers, rep.per_center, "abs_disc")
        reports.append({"trial": t, "seed": s, **rep.to_dict()})
    vals = [r["max_disc"] for r in reports]
    payload = {"config": _config(args), "kernel": str(k), "net": net_info, "reports": reports,
               "median_max_disc": float(np.median(vals))}
    _emit(args, payload, [[r["trial"], r["seed"], r["max_disc"], r["upper_bound"]] for r in reports],
          ["trial", "seed", "max_disc", "upper_bound"])
    return 0


def cmd_sample(args):
    from kdisc.coreset import HalvingConfig, build_eps_sample
    from kdisc.geometry import parse_kernel
    from kdisc.pointio import read_points, write_points
    P = read_points(args.points)
    k = parse_kernel(args.kernel, P.shape[1])
    cfg = HalvingConfig(k, eps=args.eps, size=args.size, matching_algo=args.matching, seed=args.seed,
                        c=args.c, phi=args.phi)
    res = build_eps_sample(P, cfg, verify=args.verify, verify_max_centers=args.max_centers)
    if args.out:
        write_points(args.out, res.sample)
    payload = {"config": _config(args), "kernel": str(k), **res.to_dict()}
    if args.diagnostics:
        Path(args.diagnostics).write_text(json.dumps(payload, indent=1) + "\n")
    ok = True
    if args.verify and args.eps is not None:
        ok = res.measured_linf.value <= args.eps
        payload["verified"] = ok
    lv = None if res.measured_linf is None else res.measured_linf.value
    _emit(args, payload, [[len(res.indices), res.target_size, lv]], ["size", "target_size", "measured_linf"])
    return 0 if ok else 1


def cmd_eval(args):
    from kdisc.geometry import parse_kernel
    from kdisc.kde import KdeQuery, difference_on_grid, linf_distance
    from kdisc.pointio import read_points
    P = read_points(args.points1)
    S = read_points(args.points2)
    if P.shape[1] != S.shape[1]:
        raise UsageError(f"dimension mismatch: {P.shape[1]} vs {S.shape[1]}")
    k1 = parse_kernel(args.kernel, P.shape[1])
    k2 = parse_kernel(args.kernel2, P.shape[1]) if args.kernel2 else k1
    q1, q2 = KdeQuery(P, k1), KdeQuery(S, k2)
    rep = linf_distance(q1, q2, args.resolution, max_centers=args.max_centers)
    if args.field_csv:
        X, V = difference_on_grid(q1, q2, args.resolution, max_centers=args.max_centers)
        _write_field_csv(args.field_csv, X, V, "kde_difference")
    _emit(args, {"config": _config(args), "kernel": str(k1), **rep.to_dict()},
          [[rep.value, rep.slack, rep.upper_bound, rep.grid_tau]], ["value", "slack", "upper_bound", "grid_tau"])
    return 0


def cmd_experiment(args):
    from kdisc.experiments import ExperimentSpec, run_experiment
    try:
        raw = json.loads(Path(args.spec).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid experiment spec JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("experiment spec must be a JSON object")
    if args.seed is not None:
        raw["seed"] = args.seed
    spec = ExperimentSpec.from_dict(raw)
    res = run_experiment(spec)
    out_dir = args.out_dir or spec.outputs.get("dir")
    files = {}
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        files["csv"] = str(Path(out_dir) / f"{spec.kind}.csv")
        files["summary"] = str(Path(out_dir) / f"{spec.kind}.summary.json")
        res.write_csv(files["csv"])
        Path(files["summary"]).write_text(json.dumps(res.summary, indent=1, default=_json_default) + "\n")
    payload = {"config": _config(args), "spec": raw, "files": files,
               "summary": json.loads(json.dumps(res.summary, default=_json_default))}
    _emit(args, payload, [[a["name"], a["value"], a["op"], a["threshold"], a["passed"]]
                          for a in res.summary["assertions"]],
          ["assertion", "value", "op", "threshold", "passed"])
    return 0 if res.passed else 1


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _float_arg(text, name):
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{name} expects 'auto' or a number, got {text!r}") from None


def _write_field_csv(path, X, V, name):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{c}" for c in range(X.shape[1])] + [name])
        for x, v in zip(X, V):
            w.writerow([f"{c:.17g}" for c in x] + [f"{v:.17g}"])


COMMANDS = {"gen": cmd_gen, "match": cmd_match, "disc": cmd_disc, "sample": cmd_sample,
            "eval": cmd_eval, "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 2
        logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        seed_given = args.seed is not None
        if args.command != "experiment" and not seed_given:
            args.seed = 0
        args.threads = _set_threads(args.threads)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kdisc: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"kdisc: I/O error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"kdisc: check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
