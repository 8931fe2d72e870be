"""Command-line entry point.

Exit status: 0 success, 2 unreadable or malformed input, 3 estimation
failure, 4 invalid or non-stationary model, 5 too many censored runs.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
import warnings
from pathlib import Path


from . import charts, data_path, estimation, performance, var_model
from .errors import ParseError, Vart2Error, exit_code_for
from .numerics import RngStream


def _resolve(arg: str, *candidates: str) -> Path:
    """A filesystem path, or the name of a packaged data file."""
    path = Path(arg)
    if path.exists():
        return path
    for pattern in candidates:
        packaged = data_path(pattern.format(arg))
        if packaged.exists():
            return packaged
    raise ParseError(f"no such file or packaged data set: {arg}")


def _load_model(arg: str) -> var_model.VarModel:
    return var_model.load_model(_resolve(arg, "{}.json", "models/{}.json", "models/case_{}.json"))


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {value}")
    return value


def _phase(text: str) -> str:
    key = text.strip().lower()
    if key in ("1", "i", "one"):
        return "I"
    if key in ("2", "ii", "two"):
        return "II"
    raise argparse.ArgumentTypeError(f"phase must be one or two, got {text!r}")


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_json(doc, path: str | None) -> None:
    with _output(path) as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


# -- commands --------------------------------------------------------------

def cmd_fit(args) -> int:
    data = estimation.read_series_csv(args.data)
    order, table = estimation.select_order(data, args.p_max)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fit = estimation.fit_var_ols(data, order)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_json(fit.model.to_dict(), args.out)
    if args.report:
        _write_json(estimation.fit_report(data, fit, table), args.report)
    return 0


def cmd_design(args) -> int:
    model = _load_model(args.model)
    design = charts.build_design(model, args.n, args.alpha, args.mode, args.phase, args.m)
    _write_json(design.to_dict(), args.out)
    return 0


def cmd_monitor(args) -> int:
    design = charts.load_design(args.design)
    model = _load_model(args.model) if args.model else design.model
    p = model.p if design.mode == "residuals" else 0
    names, blocks = charts.read_block_csv(args.data, design.n, p)
    if len(names) != design.v:
        raise ParseError(f"data has {len(names)} variables, design expects {design.v}")
    points = charts.monitor(design, model, blocks)
    with _output(args.out) as fh:
        charts.write_chart_csv(fh, points)
    return 0


def cmd_arl(args) -> int:
    grid = performance.load_scenarios(_resolve(args.scenarios, "{}.json"))
    rows = performance.arl_table(grid)
    with _output(args.out) as fh:
        performance.write_arl_csv(fh, rows)
    if args.json:
        _write_json([r.__dict__ for r in rows], args.json)
    return 0


def cmd_compare(args) -> int:
    model = _load_model(args.model)
    results = []
    for delta in args.delta:
        obs = charts.build_design(model, args.n, args.alpha, "observations")
        res = charts.build_design(model, args.n, args.alpha, "residuals")
        entry = {
            "delta": delta,
            "arl_observations": performance.arl1(obs, model, delta) if delta else performance.arl0(args.alpha),
            "arl_residuals": performance.arl1(res, model, delta) if delta else performance.arl0(args.alpha),
        }
        if args.fts is not None:
            reps = args.fts if args.fts > 0 else args.reps
            fts = performance.first_to_signal(model, args.n, args.alpha, delta, reps, args.max_cap, args.seed,
                                              args.continuous)
            entry["fts"] = fts.to_dict()
        results.append(entry)
    _write_json({"model": model.to_dict(), "n": args.n, "alpha": args.alpha, "seed": args.seed,
                 "results": results}, args.out)
    return 0


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    var_model.require_stationary(model)
    shifted = model.shifted(args.shift if len(args.shift) > 1 else args.shift[0]) if args.shift else model
    n = args.n
    if args.blocks is not None:
        gen = RngStream(args.seed, 0).generator()
        history, rows = performance.BlockSampler(shifted, n).draw(gen, args.blocks)
        blocks = [charts.SampleBlock(t + 1, rows[t], history[t]) for t in range(args.blocks)]
    elif args.length is not None:
        if args.length % n:
            raise ParseError(f"--length {args.length} is not a multiple of --n {n}")
        seg = performance.simulate_segment(shifted, args.length, None, RngStream(args.seed, 0))
        blocks = [charts.SampleBlock(t + 1, seg[t * n:(t + 1) * n]) for t in range(args.length // n)]
    else:
        raise ParseError("give either --blocks or --length")
    with _output(args.out) as fh:
        charts.write_block_csv(fh, model.names, blocks, include_history=args.history)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vart2", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="select a VAR order by AIC and fit it")
    p.add_argument("data", help="CSV with header t,<name1>,...")
    p.add_argument("--p-max", type=_positive_int, default=3)
    p.add_argument("--out", help="model JSON (default stdout)")
    p.add_argument("--report", help="fit report JSON")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("design", help="build a chart design from a model")
    p.add_argument("--model", required=True, help="model JSON or packaged name")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--alpha", type=_alpha, default=charts.DEFAULT_ALPHA)
    p.add_argument("--mode", choices=charts.MODES, default="observations")
    p.add_argument("--phase", type=_phase, default="II", help="one or two")
    p.add_argument("--m", type=_positive_int, help="number of blocks behind a phase one design")
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("monitor", help="chart a block CSV")
    p.add_argument("--design", required=True)
    p.add_argument("--model", help="override the model stored in the design")
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("arl", help="analytic ARL over a scenario grid")
    p.add_argument("--scenarios", required=True, help="scenario JSON or packaged name (table1, table2, cases_I_VIII)")
    p.add_argument("--out", help="CSV (default stdout)")
    p.add_argument("--json", help="also write the rows as JSON")
    p.set_defaults(func=cmd_arl)

    p = sub.add_parser("compare", help="observation chart against residual chart")
    p.add_argument("--model", required=True, help="model JSON or packaged name, e.g. IV")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--alpha", type=_alpha, default=charts.DEFAULT_ALPHA)
    p.add_argument("--delta", type=_floats, default=[1.0], help="comma-separated shift sizes")
    p.add_argument("--reps", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fts", type=int, nargs="?", const=0, default=None,
                   help="also simulate first-alarm probabilities, optionally with this many replications")
    p.add_argument("--max-cap", type=_positive_int, default=performance.DEFAULT_MAX_CAP)
    p.add_argument("--continuous", action="store_true", help="cut one unbroken series into blocks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="generate a block CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--length", type=_positive_int, help="rows of one continuous series")
    p.add_argument("--n", type=_positive_int, default=1)
    p.add_argument("--blocks", type=_positive_int, help="number of independent blocks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shift", type=_floats, default=None, help="shift in innovation standard deviations")
    p.add_argument("--history", action="store_true", help="write each block's lag history before it")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Vart2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
