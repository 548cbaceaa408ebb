"""Command-line entry point.

Exit codes: 0 success, 2 parameter/regime error, 3 I/O or format error,
4 enumeration cap exceeded, 5 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .errors import FeasibilityError, FormatError, InfeasibleConditioningError, ParameterError
from .hypergraph import (
    SampleConfig,
    format_hypergraph,
    read_hypergraph,
    sample_uniform_hypergraph,
    sampling_strategy,
)
from .metrics import count_remote_pairs, diameter, distance_matrix
from .parametrization import GRAPH, HYPERGRAPH, MODES, solve_p

EXIT_OK, EXIT_PARAM, EXIT_IO, EXIT_CAP, EXIT_VERIFY = 0, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _default_workers() -> int:
    raw = os.environ.get("HYPERDIAM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperdiam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve-p", help="critical p for (t, d, c, n)")
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=MODES, default=HYPERGRAPH)

    sp = sub.add_parser("sample", help="sample H(n, t, p) in the text format")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, help="output file (default: stdout)")

    sp = sub.add_parser("diam", help="diameter and remote pairs of a hypergraph")
    sp.add_argument("--in", dest="infile", type=Path, help="hypergraph file")
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--d", type=int, default=2, help="remote-pair threshold")

    sp = sub.add_parser("experiment", help="Monte Carlo over an n grid")
    sp.add_argument("--config", type=Path, help="JSON document with ExperimentConfig fields")
    sp.add_argument("--mode", choices=MODES)
    sp.add_argument("--t", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--c", type=float)
    sp.add_argument("--n-grid", type=_int_list)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", dest="master_seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--collect-layers", action="store_true", default=None)
    sp.add_argument("--layer-sources", type=int)
    sp.add_argument("--out", type=Path, default=Path("results"))

    sp = sub.add_parser("oracle", help="exact law of (diameter, W) by enumeration")
    _oracle_args(sp, required=True)
    sp.add_argument("--json", action="store_true", help="print the report as JSON")

    sp = sub.add_parser("verify", help="run the exact and Monte Carlo check battery")
    _oracle_args(sp, required=False)
    sp.add_argument("--trials", type=int, default=20000, help="Monte Carlo trials for oracle agreement")
    sp.add_argument("--seed", type=int, default=0)
    return parser


def _oracle_args(sp, required: bool) -> None:
    sp.add_argument("--n", type=int, required=required)
    sp.add_argument("--t", type=int, default=2 if required else None)
    sp.add_argument("--p", type=float, required=required)
    sp.add_argument("--d", type=int, default=2 if required else None)
    sp.add_argument("--cap", type=int, default=24)


# -- commands --------------------------------------------------------------

def cmd_solve_p(args) -> int:
    params = solve_p(args.t, args.d, args.c, args.n, args.mode)
    print(json.dumps(params.as_dict(), indent=2))
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = SampleConfig(args.n, args.t, args.p, args.seed)
    h = sample_uniform_hypergraph(cfg)
    info = sampling_strategy(args.n, args.t, args.p)
    text = f"# seed={args.seed} p={args.p!r} path={info['path']} edge_count={info['edge_count']}\n"
    text += format_hypergraph(h)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_diam(args) -> int:
    if args.infile is not None:
        h = read_hypergraph(args.infile)
        print(f"# source={args.infile}")
    else:
        if args.n is None or args.p is None:
            raise ParameterError("diam needs --in FILE or --n and --p")
        h = sample_uniform_hypergraph(SampleConfig(args.n, args.t, args.p, args.seed))
        print(f"# seed={args.seed} n={args.n} t={args.t} p={args.p!r}")
    dist = distance_matrix(h)
    print(f"diam={diameter(h, dist)} w(d={args.d})={count_remote_pairs(h, args.d, dist)}")
    return EXIT_OK


def _experiment_config(args):
    from .montecarlo import ExperimentConfig

    doc = {}
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text())
        except OSError as exc:
            raise FormatError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise FormatError(f"config is not valid JSON: {exc.msg}", line=exc.lineno) from None
        if not isinstance(doc, dict):
            raise FormatError("config must be a JSON object")
    doc.setdefault("workers", _default_workers())
    for name in ("mode", "t", "d", "c", "n_grid", "trials", "master_seed", "workers",
                 "collect_layers", "layer_sources"):
        value = getattr(args, name)
        if value is not None:
            doc[name] = value
    if "t" in doc and "mode" not in doc:
        doc["mode"] = GRAPH if doc["t"] == 2 else HYPERGRAPH
    try:
        return ExperimentConfig.from_dict(doc)
    except TypeError as exc:
        raise ParameterError(str(exc)) from None


def cmd_experiment(args) -> int:
    from .montecarlo import run_experiment, write_outputs

    cfg = _experiment_config(args)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FormatError(f"cannot create output directory {args.out}: {exc}") from None
    cfg.regimes()  # fail on regime violations before any sampling
    result = run_experiment(cfg)
    paths = write_outputs(result, args.out)
    d = cfg.d
    print(f"# mode={cfg.mode} t={cfg.t} d={d} c={cfg.c} trials={cfg.trials} master_seed={cfg.master_seed}")
    print(f"{'n':>7} {'p':>11} {'P(d)':>7} {'P(d+1)':>7} {'other':>7} {'E W':>7} {'TV':>7} {'bound':>8}")
    for s in result.summaries:
        bound = "n/a" if s.combined_bound is None else f"{s.combined_bound:8.4f}"
        print(f"{s.n:>7} {s.p:>11.5g} {s.p_diam_d:>7.4f} {s.p_diam_d1:>7.4f} "
              f"{1 - s.p_diam_two_point:>7.4f} {s.mean_w:>7.4f} {s.tv_poisson:>7.4f} {bound:>8}")
    s0 = result.summaries[0]
    print(f"{'limit':>7} {'':>11} {s0.target_p_d:>7.4f} {s0.target_p_d1:>7.4f} {0:>7.4f} "
          f"{s0.target_mean_w:>7.4f}")
    for name, path in paths.items():
        print(f"# wrote {name}: {path}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import enumerate_exact

    law = enumerate_exact(args.n, args.t, args.p, args.d, cap=args.cap)
    if args.json:
        print(json.dumps(law.as_dict(), indent=2))
        return EXIT_OK
    print(f"# exact law over all 2^{math.comb(args.n, args.t)} hypergraphs: "
          f"n={args.n} t={args.t} p={args.p!r} d={args.d}")
    for k, v in sorted(law.diameter.items()):
        print(f"P(diam={'inf' if k == math.inf else k})={v:.12g}")
    for k, v in sorted(law.remote.items()):
        print(f"P(W={k})={v:.12g}")
    print(f"E[W]={law.mean_w():.12g} total={law.total():.15g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import default_battery, setting_battery

    if args.n is not None:
        if args.p is None:
            raise ParameterError("verify --n needs --p")
        checks = setting_battery(args.n, args.t or 2, args.p, args.d or 2,
                                 trials=args.trials, seed=args.seed, cap=args.cap)
    else:
        checks = default_battery(trials=args.trials, seed=args.seed, cap=args.cap)
    failed = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        failed += not check.passed
        print(f"[{status}] {check.name}: {check.detail}")
    print(f"# {len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "solve-p": cmd_solve_p,
    "sample": cmd_sample,
    "diam": cmd_diam,
    "experiment": cmd_experiment,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_PARAM
    try:
        return COMMANDS[args.command](args)
    except FeasibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParameterError, InfeasibleConditioningError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
