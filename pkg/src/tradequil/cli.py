"""Command-line interface.

Exit codes: 0 success, 1 domain or I/O error (diagnostic on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .analytics import (
    ShareReport,
    caption_share_report,
    merge_reports,
    share_dynamics,
    share_report,
    trade_balances,
)
from .equilibrium import SolverConfig, solve_relative_prices
from .errors import NoProgress, TradeModelError
from .ingest import CaptionFixture, InstanceFixture, aggregate, fixture_names, load_fixture, read_flows
from .model import CountrySet, GoodsSet, build_demand_matrix, build_supply_matrix
from .report import FullReport, SolveReport, emit_report, to_json

SOLVER_FLAGS = {
    "damping": float,
    "max_iterations": int,
    "tolerance": float,
    "zero_threshold": float,
    "expenditure_guard": float,
    "stall_window": int,
}


@dataclass
class Dataset:
    """Demand/supply pair for one year, whatever its origin."""

    C: object
    B: object
    year: int | None
    countries: tuple[str, ...]
    goods: tuple[str, ...]
    source: str


class UsageError(Exception):
    pass


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", help="flow-record CSV file")
    p.add_argument(
        "--year",
        type=int,
        action="append",
        default=[],
        help="year to select from --input (repeatable)",
    )
    p.add_argument(
        "--fixture",
        action="append",
        default=[],
        help="bundled fixture name (repeatable); see `tradequil fixtures`",
    )
    p.add_argument("--countries", help="country-set file, one label per line")
    p.add_argument("--goods", help="goods-set file, one label per line")
    p.add_argument("--lenient", action="store_true", help="skip records with unknown labels")


def _add_solver(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver overrides")
    for name, kind in SOLVER_FLAGS.items():
        g.add_argument("--" + name.replace("_", "-"), type=kind, dest=name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tradequil",
        description="Relative equilibrium prices and market shares from bilateral trade flows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest-check", help="validate a flow-record CSV file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--year", type=int, action="append", default=[])
    p.add_argument("--countries")
    p.add_argument("--goods")
    p.add_argument("--lenient", action="store_true")
    _add_output(p)

    p = sub.add_parser("solve", help="solve for the relative equilibrium price vector")
    _add_source(p)
    _add_solver(p)
    _add_output(p)

    p = sub.add_parser("shares", help="country and goods market shares")
    _add_source(p)
    _add_output(p)

    p = sub.add_parser("dynamics", help="year-over-year share changes")
    _add_source(p)
    _add_output(p)

    p = sub.add_parser("report", help="equilibrium, shares and balances per year")
    _add_source(p)
    _add_solver(p)
    _add_output(p)

    sub.add_parser("fixtures", help="list bundled fixtures")
    return parser


def _label_sets(args) -> tuple[CountrySet, GoodsSet]:
    countries = CountrySet.from_file(args.countries) if args.countries else CountrySet.default()
    goods = GoodsSet.from_file(args.goods) if args.goods else GoodsSet.default()
    return countries, goods


def _check_source(args) -> None:
    if args.input and args.fixture:
        raise UsageError("give either --input or --fixture, not both")
    if not args.input and not args.fixture:
        raise UsageError("one of --input or --fixture is required")
    if args.input and not args.year:
        raise UsageError("--input needs at least one --year")
    if args.fixture and args.year:
        raise UsageError("--year applies to --input only")


def _load_datasets(args) -> list[Dataset]:
    countries, goods = _label_sets(args)
    records = read_flows(args.input)
    out = []
    for year in sorted(set(args.year)):
        t = aggregate(records, countries, goods, year, strict=not args.lenient)
        out.append(
            Dataset(
                build_demand_matrix(t),
                build_supply_matrix(t),
                year,
                tuple(countries),
                tuple(goods),
                args.input,
            )
        )
    return out


def _instance(name: str) -> Dataset:
    fx = load_fixture(name)
    if not isinstance(fx, InstanceFixture):
        raise TradeModelError(f"fixture {name!r} holds caption shares only; it has no trade matrices")
    return Dataset(fx.demand, fx.supply, fx.year, tuple(fx.countries), tuple(fx.goods), name)


def _solver_config(args) -> SolverConfig:
    overrides = {k: getattr(args, k) for k in SOLVER_FLAGS if getattr(args, k) is not None}
    return SolverConfig(**overrides)


def _solve(ds: Dataset, cfg: SolverConfig) -> tuple[SolveReport, str | None]:
    warning = None
    try:
        result = solve_relative_prices(ds.C, ds.B, cfg)
    except NoProgress as exc:
        result, warning = exc.result, f"{ds.source} {ds.year}: {exc}"
    return SolveReport(result, ds.goods, ds.countries, ds.year, ds.source), warning


def _cmd_ingest_check(args) -> tuple[object, list[str]]:
    records = read_flows(args.input)
    summary: dict = {
        "input": args.input,
        "records": len(records),
        "years": sorted({r.year for r in records}),
        "reporters": sorted({r.reporter for r in records}),
        "products": sorted({r.product for r in records}),
    }
    if args.year:
        countries, goods = _label_sets(args)
        summary["selection"] = []
        for year in sorted(set(args.year)):
            t = aggregate(records, countries, goods, year, strict=not args.lenient)
            summary["selection"].append(
                {"year": year, "used": t.records_used, "skipped": t.records_skipped}
            )
    return _Plain(summary), []


@dataclass
class _Plain:
    data: dict

    def to_dict(self) -> dict:
        return self.data

    def to_rows(self) -> list[tuple]:
        rows = [(None, "", "records", self.data["records"])]
        for sel in self.data.get("selection", []):
            rows.append((sel["year"], "", "used", sel["used"]))
            rows.append((sel["year"], "", "skipped", sel["skipped"]))
        return rows


def _datasets(args) -> list[Dataset]:
    _check_source(args)
    if args.input:
        return _load_datasets(args)
    return [_instance(name) for name in args.fixture]


def _cmd_solve(args):
    cfg = _solver_config(args)
    out, warnings = [], []
    for ds in _datasets(args):
        rep, warn = _solve(ds, cfg)
        out.append(rep)
        if warn:
            warnings.append(warn)
    return out, warnings


def _share_reports(args) -> list[ShareReport]:
    _check_source(args)
    if args.input:
        return [share_report(ds.C, ds.B, ds.year, ds.countries, ds.goods) for ds in _load_datasets(args)]
    reports = []
    for name in args.fixture:
        fx = load_fixture(name)
        if isinstance(fx, CaptionFixture):
            reports.append(caption_share_report(fx))
        else:
            reports.append(share_report(fx.demand, fx.supply, fx.year, fx.countries, fx.goods))
    return reports


def _cmd_shares(args):
    return _share_reports(args), []


def _cmd_dynamics(args):
    reports = _share_reports(args)
    by_year: dict = {}
    for r in reports:
        by_year.setdefault(r.year, []).append(r)
    if None in by_year and len(by_year) > 1:
        raise TradeModelError("cannot order reports without a year")
    merged = [merge_reports(by_year[y]) for y in sorted(by_year, key=lambda y: (y is None, y))]
    return share_dynamics(merged), []


def _cmd_report(args):
    cfg = _solver_config(args)
    out, warnings = [], []
    for ds in _datasets(args):
        rep, warn = _solve(ds, cfg)
        if warn:
            warnings.append(warn)
        ones = [1.0] * len(ds.goods)
        out.append(
            FullReport(
                solve=rep,
                shares=share_report(ds.C, ds.B, ds.year, ds.countries, ds.goods),
                balances_at_p0=trade_balances(ds.C, ds.B, rep.result.p0),
                balances_raw=trade_balances(ds.C, ds.B, ones),
            )
        )
    return out, warnings


COMMANDS = {
    "ingest-check": _cmd_ingest_check,
    "solve": _cmd_solve,
    "shares": _cmd_shares,
    "dynamics": _cmd_dynamics,
    "report": _cmd_report,
}


def _write(data: bytes, path: str | None) -> None:
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "fixtures":
        _write(to_json(fixture_names()).encode("utf-8"), None)
        return 0

    try:
        result, warnings = COMMANDS[args.command](args)
        data = emit_report(result, args.format)
        _write(data, args.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tradequil {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (TradeModelError, ValueError, OSError) as exc:
        print(f"tradequil {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for w in warnings:
        print(f"tradequil {args.command}: NoProgress: {w}", file=sys.stderr)
    return 1 if warnings else 0


def main() -> None:
    sys.exit(run())
