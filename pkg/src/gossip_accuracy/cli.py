"""Command-line interface.

Subcommands: analytic-binary, analytic-multistate, split, simulate, sweep,
and figures.  All tabular output is CSV (stdout or --out); exit codes are
0 on success, 1 for input errors, 2 for numeric failures, and 3 when a
strict-mode sweep comparison flags a significant disagreement.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

from .binary import (
    average_accuracy,
    freshness_recursion,
    symmetric_accuracy,
    symmetric_freshness,
)
from .errors import INPUT_ERRORS, NUMERIC_ERRORS, InvalidParameter
from .figures import FIGURES, render
from .markov import NetworkParams, load_generator
from .multistate import backward_construct, mode_tagged_accuracy
from .sim import load_sim_config, report_rows, run, sim_config_to_json
from .split import fresh_accurate_fraction, g_recursion
from .sweep import MODES, PARAMETERS, QUANTITIES, SweepSpec, max_abs_z, run_sweep


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped onto exit code 1 (input error)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def _open_out(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return x


def cmd_analytic_binary(args) -> int:
    if args.symmetric is not None:
        q12 = q21 = args.symmetric
        if (args.q12 is not None and args.q12 != q12) or (
            args.q21 is not None and args.q21 != q21
        ):
            raise InvalidParameter("--symmetric conflicts with the supplied --q12/--q21")
    else:
        if args.q12 is None or args.q21 is None:
            raise InvalidParameter("need --q12 and --q21 (or --symmetric)")
        q12, q21 = args.q12, args.q21

    params = NetworkParams(n=args.n, lambda_s=args.lambda_s, lambda_=args.lambda_)
    prof = freshness_recursion(q12, q21, params)
    rep = average_accuracy(q12, q21, params, prof.pair(2))

    sym = None
    if args.symmetric is not None:
        fsym = symmetric_freshness(args.symmetric, params)
        csym = symmetric_accuracy(args.symmetric, params, fsym[1])
        sym = (fsym, csym)

    with _open_out(args.out) as fh:
        w = _writer(fh)
        header = ["k", "f1_mode1", "f1_mode2", "f_k", "c_mode1", "c_mode2", "c"]
        if sym:
            header += ["f_sym", "c_sym", "delta"]
        w.writerow(header)
        for k in range(1, params.n + 1):
            pair = prof.pair(k)
            row = [k, _fmt(pair.v1), _fmt(pair.v2), _fmt(pair.total),
                   _fmt(rep.c1), _fmt(rep.c2), _fmt(rep.c)]
            if sym:
                fsym, csym = sym
                delta = max(abs(fsym[k - 1] - pair.total), abs(csym - rep.c))
                row += [_fmt(fsym[k - 1]), _fmt(csym), _fmt(delta)]
            w.writerow(row)
    return 0


def cmd_analytic_multistate(args) -> int:
    gen = load_generator(args.generator)
    params = NetworkParams(n=args.n, lambda_s=args.lambda_s, lambda_=args.lambda_)
    prof = backward_construct(gen, params)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(["k", "f_k"])
        for k in range(1, params.n + 1):
            w.writerow([k, _fmt(prof.f[k])])
    if args.emit_pi:
        with open(args.emit_pi, "w", newline="") as fh:
            w = _writer(fh)
            w.writerow(["k", "q", "r", "prob"])
            for k in range(1, params.n + 1):
                mat = prof.by_k[k].as_matrix()
                for q in range(gen.size):
                    for r in range(gen.size):
                        w.writerow([k, q, r, _fmt(float(mat[q, r]))])
    return 0


def _load_source(args):
    """Either a binary chain from --q12/--q21 or a generator file."""
    if args.generator:
        return load_generator(args.generator)
    if args.q12 is None or args.q21 is None:
        raise InvalidParameter("need --generator, or both --q12 and --q21")
    from .markov import validate_generator

    return validate_generator([[-args.q12, args.q12], [args.q21, -args.q21]])


def cmd_split(args) -> int:
    gen = _load_source(args)
    params = NetworkParams(n=args.n, lambda_s=args.lambda_s, lambda_=args.lambda_)
    occ = g_recursion(gen, params)
    if gen.size == 2:
        q12, q21 = float(gen.rates[0, 1]), float(gen.rates[1, 0])
        prof = freshness_recursion(q12, q21, params)
        rep = average_accuracy(q12, q21, params, prof.pair(2))
        c_modes = [rep.c1, rep.c2]
    else:
        c_modes = mode_tagged_accuracy(backward_construct(gen, params).by_k[1])
    split = fresh_accurate_fraction(occ, c_modes)

    if args.k == "all":
        ks = list(range(1, params.n + 1))
    else:
        k = int(args.k) if args.k is not None else params.n
        if not 1 <= k <= params.n:
            raise InvalidParameter(f"--k must be in 1..{params.n} or 'all'")
        ks = [k]

    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(["k", "G_k", "stale_accurate"])
        for k in ks:
            w.writerow([k, _fmt(float(split.fresh_accurate[k - 1])),
                        _fmt(float(split.stale_accurate[k - 1]))])
    target = args.out_g
    with _open_out(target) as fh:
        w = _writer(fh)
        w.writerow(["k", "m", "g_km"])
        for k in ks:
            for m in range(gen.size):
                w.writerow([k, m, _fmt(float(occ.values[k - 1, m]))])
    return 0


def cmd_simulate(args) -> int:
    cfg = load_sim_config(args.config)
    rep = run(cfg)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(["quantity", "k_or_q", "estimate", "stderr", "batches", "sim_time"])
        for quantity, key, est, err, batches, t in report_rows(rep):
            w.writerow([quantity, key, _fmt(est), _fmt(err), batches, _fmt(t)])
    sidecar = args.sidecar
    if sidecar is None and args.out:
        sidecar = str(Path(args.out).with_suffix(".config.json"))
    if sidecar:
        with open(sidecar, "w", encoding="utf-8") as fh:
            json.dump(sim_config_to_json(cfg), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_sweep_and_compare(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        base = Path(args.config).parent
        gspec = doc["generator"]
        if isinstance(gspec, str):
            gen = load_generator(base / gspec)
        else:
            from .markov import generator_from_json

            gen = generator_from_json(gspec)
        spec = SweepSpec(
            parameter=doc["parameter"],
            values=tuple(doc["values"]),
            quantity=doc["quantity"],
            generator=gen,
            n=int(doc["n"]),
            lambda_s=float(doc.get("lambda_s", 1.0)),
            lambda_=float(doc.get("lambda", 1.0)),
            k=doc.get("k"),
            modes=tuple(doc.get("modes", MODES)),
            events=int(doc.get("events", 2_250_000)),
            warmup_events=doc.get("warmup_events"),
            batches=int(doc.get("batches", 30)),
            seed=int(doc.get("seed", 1)),
            jobs=int(doc.get("jobs", args.jobs)),
        )
    else:
        gen = _load_source(args)
        if args.parameter is None or args.values is None or args.quantity is None:
            raise InvalidParameter("need --parameter, --values and --quantity (or --config)")
        values = tuple(float(v) for v in args.values.split(","))
        spec = SweepSpec(
            parameter=args.parameter,
            values=values,
            quantity=args.quantity,
            generator=gen,
            n=args.n,
            lambda_s=args.lambda_s,
            lambda_=args.lambda_,
            k=args.k,
            modes=tuple(args.modes.split(",")),
            events=args.events,
            warmup_events=args.warmup,
            batches=args.batches,
            seed=args.seed,
            jobs=args.jobs,
        )

    rows = run_sweep(spec)
    with _open_out(args.out) as fh:
        w = _writer(fh)
        w.writerow(["parameter", "value", "quantity", "analytic", "simulated",
                    "stderr", "z", "flag"])
        for r in rows:
            w.writerow([r.parameter, _fmt(r.value), r.quantity, _fmt(r.analytic),
                        _fmt(r.simulated), _fmt(r.stderr), _fmt(r.z), int(r.flag)])
    flagged = [r for r in rows if r.flag]
    print(f"max |z| = {max_abs_z(rows):.3f} over {len(rows)} rows "
          f"({len(flagged)} flagged)", file=sys.stderr)
    if flagged and args.strict:
        return 3
    return 0


def cmd_figures(args) -> int:
    which = FIGURES if "all" in args.which else tuple(args.which)
    written = render(args.out_dir, which=which, events=args.events,
                     seed=args.seed, jobs=args.jobs, n=args.n)
    for path in written:
        print(path, file=sys.stderr)
    return 0


def _add_rate_flags(p, need_n=True):
    if need_n:
        p.add_argument("--n", type=int, required=True, help="number of nodes")
    p.add_argument("--lambda-s", dest="lambda_s", type=float, required=True,
                   help="aggregate source push rate")
    p.add_argument("--lambda", dest="lambda_", type=float, required=True,
                   help="aggregate per-node gossip rate")


def _add_source_flags(p):
    p.add_argument("--q12", type=float, help="binary rate state0 -> state1")
    p.add_argument("--q21", type=float, help="binary rate state1 -> state0")
    p.add_argument("--generator", help="generator JSON file (multi-state source)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gossip-accuracy",
                     description="Information accuracy in timeliness-based gossip networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic-binary", help="binary-source accuracy tables")
    p.add_argument("--q12", type=float)
    p.add_argument("--q21", type=float)
    _add_rate_flags(p)
    p.add_argument("--symmetric", type=float, metavar="Q",
                   help="treat the source as symmetric with flip rate Q and cross-check")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic_binary)

    p = sub.add_parser("analytic-multistate", help="multi-state source accuracy table")
    p.add_argument("--generator", required=True)
    _add_rate_flags(p)
    p.add_argument("--emit-pi", help="also dump the joint stationary distributions")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic_multistate)

    p = sub.add_parser("split", help="fresh-and-accurate versus stale-accurate split")
    _add_source_flags(p)
    _add_rate_flags(p)
    p.add_argument("--k", help="subset size (default n) or 'all'")
    p.add_argument("--out", help="G table output")
    p.add_argument("--out-g", help="per-mode zero-age table output")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("simulate", help="run the event-driven simulator")
    p.add_argument("--config", required=True, help="simulation config JSON")
    p.add_argument("--out")
    p.add_argument("--sidecar", help="config echo path (default: <out>.config.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep a parameter and compare analytic vs simulated")
    p.add_argument("--config", help="sweep spec JSON (overrides the flags)")
    _add_source_flags(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--lambda-s", dest="lambda_s", type=float, default=1.0)
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    p.add_argument("--parameter", choices=PARAMETERS)
    p.add_argument("--values", help="comma-separated, strictly increasing")
    p.add_argument("--quantity", choices=QUANTITIES)
    p.add_argument("--k", type=int, help="subset size for nq/Gn (default n)")
    p.add_argument("--modes", default="analytic,simulate")
    p.add_argument("--events", type=int, default=2_250_000)
    p.add_argument("--warmup", type=int)
    p.add_argument("--batches", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help="exit 3 when any |z| > 3 comparison fires")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep_and_compare)

    p = sub.add_parser("figures", help="render figure reproductions (PNG + CSV)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--which", nargs="+", default=["all"],
                   choices=list(FIGURES) + ["all"])
    p.add_argument("--events", type=int, default=150_000,
                   help="simulated events per overlay point (0 disables overlays)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
