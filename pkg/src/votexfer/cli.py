"""Command-line front end for vote transfer experiments.

Subcommands:

* ``allocate`` - seat allocation for a concrete election JSON file.
* ``analytic`` - closed-form expected share curves as CSV.
* ``simulate`` - one Monte Carlo cell as a JSON tally.
* ``sweep``    - a grid of Monte Carlo cells as CSV.

All shares are emitted as fractions in [0, 1], never percentages.
Exit codes: 0 success, 2 invalid input or parameters, 3 rejected district
tie, 4 sweep finished with failed rows.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import analytic, core, montecarlo
from .core import TieBreakPolicy, TierWeights, TransferFormula

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TIE = 3
EXIT_PARTIAL = 4

#: Fixed column order of the sweep CSV; guarded by golden tests.
SWEEP_COLUMNS = (
    "k",
    "h",
    "m",
    "alpha",
    "runs",
    "seed",
    "mean_vote_share",
    "mean_seat_share_dvt",
    "mean_seat_share_pvt",
    "mean_seat_share_nvt",
    "count_all_three",
    "count_pvt_nvt",
    "count_dvt_nvt",
    "count_dvt_pvt",
    "count_dvt_only",
    "count_pvt_only",
    "count_nvt_only",
    "count_minority",
    "net_advantage_pvt",
    "net_advantage_nvt",
)

ALLOCATE_COLUMNS = (
    "formula",
    "party",
    "direct",
    "losing",
    "wasted",
    "total",
    "ssd_share",
    "list_share",
    "combined",
)


def parse_grid(text: str) -> list[float]:
    """Parse a float grid: a value, a comma list, or ``start:stop:step``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"grid must be START:STOP:STEP, got {text!r}"
            )
        start, stop, step = (float(p) for p in parts)
        try:
            return analytic.k_grid(start, stop, step)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or grid: {text!r}")


def parse_int_grid(text: str) -> list[int]:
    """Parse an integer grid: a value, a comma list, or ``start:stop:step``."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"grid must be START:STOP:STEP, got {text!r}"
            )
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"empty integer grid: {text!r}")
        return list(range(start, stop + 1, step))
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer or grid: {text!r}")


def _default_seed() -> int:
    raw = os.environ.get("VOTEXFER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _formulas(selection: str) -> tuple[TransferFormula, ...]:
    if selection == "all":
        return core.FORMULAS
    return (TransferFormula(selection),)


def _add_weight_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument(
        "--alpha", type=float, default=None,
        help="share of seats allocated in districts, in [0, 1]",
    )
    group.add_argument(
        "--list-seats", type=int, default=None, metavar="M",
        help="list seat count; alpha = districts / (districts + M)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votexfer",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_alloc = sub.add_parser(
        "allocate", help="allocate seats for an election file"
    )
    p_alloc.add_argument(
        "--input", required=True,
        help='election JSON: {"parties": [...], "districts": [[...], ...]}',
    )
    p_alloc.add_argument("--output", default=None, help="output path (default stdout)")
    p_alloc.add_argument(
        "--formula", choices=["dvt", "pvt", "nvt", "all"], default="all"
    )
    _add_weight_flags(p_alloc, required=True)
    p_alloc.add_argument(
        "--tie-policy", choices=["reject", "lowest-index"], default="reject"
    )
    p_alloc.add_argument("--format", choices=["csv", "json"], default="csv")

    p_analytic = sub.add_parser(
        "analytic", help="closed-form expected share curves"
    )
    p_analytic.add_argument(
        "--k", type=parse_grid, required=True, metavar="GRID",
        help="expected vote share value(s): X, X,Y,Z or START:STOP:STEP",
    )
    p_analytic.add_argument(
        "--h", type=float, required=True,
        help="half-width of the uniform district share distribution",
    )
    p_analytic.add_argument(
        "--formula", choices=["dvt", "pvt", "nvt", "all"], default="all"
    )
    _add_weight_flags(p_analytic, required=False)
    p_analytic.add_argument(
        "--districts", type=int, default=100,
        help="district count used to derive alpha from --list-seats",
    )
    p_analytic.add_argument("--output", default=None)
    p_analytic.add_argument(
        "--plot", default=None, metavar="PATH",
        help="also render the curves to this figure file",
    )

    p_sim = sub.add_parser("simulate", help="one Monte Carlo cell, JSON tally")
    p_sim.add_argument("--k", type=parse_grid, required=True, metavar="K")
    p_sim.add_argument("--h", type=float, required=True)
    p_sim.add_argument("--districts", type=int, default=100)
    _add_weight_flags(p_sim, required=True)
    p_sim.add_argument("--runs", type=int, default=100_000)
    p_sim.add_argument(
        "--seed", type=int, default=None,
        help="RNG seed (default: VOTEXFER_SEED env var, else 0)",
    )
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--output", default=None)

    p_sweep = sub.add_parser("sweep", help="a grid of Monte Carlo cells, CSV")
    p_sweep.add_argument("--k", type=parse_grid, required=True, metavar="GRID")
    p_sweep.add_argument("--h", type=parse_grid, required=True, metavar="GRID")
    p_sweep.add_argument("--districts", type=int, default=100)
    group = p_sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=parse_grid, default=None, metavar="GRID")
    group.add_argument(
        "--list-seats", type=parse_int_grid, default=None, metavar="GRID"
    )
    p_sweep.add_argument("--runs", type=int, default=100_000)
    p_sweep.add_argument(
        "--seed", type=int, default=None,
        help="master seed; row seeds are derived from (seed, row index)",
    )
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument(
        "--plot", default=None, metavar="PATH",
        help="also render net advantages and mean seat shares to a figure",
    )
    return parser


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _resolve_seed(seed: Optional[int]) -> int:
    return _default_seed() if seed is None else seed


def cmd_allocate(args: argparse.Namespace) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as handle:
            election = core.parse_election(handle.read())
        validated = core.validate_election(election)
    except (OSError, ValueError, core.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.alpha is not None:
            weights = TierWeights(args.alpha)
        else:
            weights = TierWeights.from_seats(validated.n_districts, args.list_seats)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    policy = TieBreakPolicy(args.tie_policy)

    results = {}
    try:
        for formula in _formulas(args.formula):
            breakdown = core.list_vote_breakdown(validated, formula, policy)
            shares = core.seat_shares(validated, formula, weights, policy)
            results[formula] = (breakdown, shares)
    except core.TieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIE

    names = [p.name for p in validated.parties]
    if args.format == "json":
        payload = {
            "alpha": weights.alpha,
            "parties": names,
            "results": {
                formula.value: {
                    "direct": list(b.direct),
                    "losing": list(b.losing),
                    "wasted": list(b.wasted),
                    "total": list(b.total),
                    "ssd_share": list(s.ssd_share),
                    "list_share": list(s.list_share),
                    "combined": list(s.combined),
                }
                for formula, (b, s) in results.items()
            },
        }
        _write_text(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(ALLOCATE_COLUMNS)
        for formula, (b, s) in results.items():
            for p, name in enumerate(names):
                writer.writerow(
                    [
                        formula.value,
                        name,
                        b.direct[p],
                        b.losing[p],
                        b.wasted[p],
                        b.total[p],
                        s.ssd_share[p],
                        s.list_share[p],
                        s.combined[p],
                    ]
                )
        _write_text(args.output, buffer.getvalue())
    return EXIT_OK


def cmd_analytic(args: argparse.Namespace) -> int:
    try:
        weights = None
        if args.alpha is not None:
            weights = TierWeights(args.alpha)
        elif args.list_seats is not None:
            weights = TierWeights.from_seats(args.districts, args.list_seats)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    formulas = _formulas(args.formula)
    try:
        series = {
            formula: analytic.curve(formula, args.h, args.k, weights)
            for formula in formulas
        }
    except (analytic.DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["k", "formula", "value"])
    for formula in formulas:
        for k, value in series[formula]:
            writer.writerow([k, formula.value, value])
    _write_text(args.output, buffer.getvalue())

    if args.plot is not None:
        from . import plotting

        ylabel = (
            "Expected seat share" if weights is not None
            else "Expected list vote share"
        )
        plotting.plot_curves(
            {f.value.upper(): series[f] for f in formulas}, args.plot, ylabel
        )
    return EXIT_OK


def write_curve_csv(series: Sequence[tuple[float, float]]) -> str:
    """Serialize one curve as bare ``k,value`` CSV."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["k", "value"])
    writer.writerows(series)
    return buffer.getvalue()


def cmd_simulate(args: argparse.Namespace) -> int:
    if len(args.k) != 1:
        print("error: simulate takes a single k; use sweep for grids", file=sys.stderr)
        return EXIT_INVALID
    try:
        config = montecarlo.SimConfig(
            n_districts=args.districts,
            k=args.k[0],
            h=args.h,
            runs=args.runs,
            seed=_resolve_seed(args.seed),
            m=args.list_seats,
            alpha=args.alpha,
        )
        tally = montecarlo.simulate(config, threads=args.threads)
    except analytic.DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write_text(args.output, json.dumps(tally.to_json_dict(), indent=2) + "\n")
    return EXIT_OK


def _sweep_configs(args: argparse.Namespace) -> list[montecarlo.SimConfig]:
    cells = []
    for h in args.h:
        if args.list_seats is not None:
            for m in args.list_seats:
                for k in args.k:
                    cells.append((k, h, m, None))
        else:
            for a in args.alpha:
                for k in args.k:
                    cells.append((k, h, None, a))
    configs = []
    for k, h, m, a in cells:
        # Row seeds are derived inside sweep(); 0 is a placeholder.
        configs.append(
            montecarlo.SimConfig(
                n_districts=args.districts,
                k=k,
                h=h,
                runs=args.runs,
                seed=0,
                m=m,
                alpha=a,
            )
        )
    return configs


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        configs = _sweep_configs(args)
    except analytic.DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not configs:
        print("error: empty sweep grid", file=sys.stderr)
        return EXIT_INVALID

    rows = montecarlo.sweep(
        configs, master_seed=_resolve_seed(args.seed), threads=args.threads
    )

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(SWEEP_COLUMNS)
    failed = 0
    for index, row in enumerate(rows):
        if row.tally is None:
            failed += 1
            print(f"error: row {index}: {row.error}", file=sys.stderr)
            continue
        tally = row.tally
        cfg = row.config
        counts = tally.counts
        writer.writerow(
            [
                cfg.k,
                cfg.h,
                "" if cfg.m is None else cfg.m,
                cfg.alpha,
                tally.runs,
                cfg.seed,
                tally.mean_vote_share,
                tally.mean_seat_share[TransferFormula.DVT],
                tally.mean_seat_share[TransferFormula.PVT],
                tally.mean_seat_share[TransferFormula.NVT],
                counts[montecarlo.MajorityCategory.ALL_THREE],
                counts[montecarlo.MajorityCategory.PVT_NVT],
                counts[montecarlo.MajorityCategory.DVT_NVT],
                counts[montecarlo.MajorityCategory.DVT_PVT],
                counts[montecarlo.MajorityCategory.DVT_ONLY],
                counts[montecarlo.MajorityCategory.PVT_ONLY],
                counts[montecarlo.MajorityCategory.NVT_ONLY],
                counts[montecarlo.MajorityCategory.MINORITY],
                montecarlo.net_advantage(tally, TransferFormula.PVT),
                montecarlo.net_advantage(tally, TransferFormula.NVT),
            ]
        )
    _write_text(args.output, buffer.getvalue())

    if args.plot is not None and any(row.tally is not None for row in rows):
        from . import plotting

        plotting.plot_sweep(rows, args.plot)
    return EXIT_PARTIAL if failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "allocate": cmd_allocate,
        "analytic": cmd_analytic,
        "simulate": cmd_simulate,
        "sweep": cmd_sweep,
    }
    return handlers[args.command](args)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
