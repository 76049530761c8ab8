"""Deterministic JSON / long-CSV rendering of result objects.

JSON floats carry 17 significant digits and keys keep insertion order; CSV
rows are ``year,entity,metric,value`` with 6 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .analytics import ShareReport
from .equilibrium import EquilibriumResult

CSV_HEADER = ("year", "entity", "metric", "value")


@dataclass(frozen=True)
class SolveReport:
    """An equilibrium result tagged with the labels it refers to."""

    result: EquilibriumResult
    goods: tuple[str, ...]
    countries: tuple[str, ...]
    year: int | None = None
    source: str = ""

    def to_dict(self) -> dict:
        return {
            "year": self.year,
            "source": self.source,
            "goods": list(self.goods),
            "countries": list(self.countries),
            **self.result.to_dict(),
        }

    def to_rows(self) -> list[tuple]:
        r = self.result
        rows: list[tuple] = []
        for g, p, d in zip(self.goods, r.p0, r.excess):
            rows.append((self.year, g, "p0", float(p)))
            rows.append((self.year, g, "excess", float(d)))
        for c, y, inc, exp in zip(self.countries, r.balance_ratios, r.incomes, r.expenditures):
            rows.append((self.year, c, "balance_ratio", float(y)))
            rows.append((self.year, c, "income", float(inc)))
            rows.append((self.year, c, "expenditure", float(exp)))
        rows += [
            (self.year, "", "degeneracy", r.degeneracy),
            (self.year, "", "recession_level_proxy", r.recession_level),
            (self.year, "", "complementarity_residual", r.complementarity_residual),
            (self.year, "", "iterations", r.iterations),
            (self.year, "", "converged", int(r.converged)),
        ]
        return rows


@dataclass(frozen=True)
class FullReport:
    """Everything computed for one dataset: equilibrium, shares, balances."""

    solve: SolveReport
    shares: ShareReport
    balances_at_p0: np.ndarray
    balances_raw: np.ndarray
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        countries = self.solve.countries
        return {
            "equilibrium": self.solve.to_dict(),
            "shares": self.shares.to_dict(),
            "trade_balances_raw": dict(zip(countries, self.balances_raw.tolist())),
            "trade_balances_at_p0": dict(zip(countries, self.balances_at_p0.tolist())),
            **self.extra,
        }

    def to_rows(self) -> list[tuple]:
        year = self.solve.year
        rows = self.solve.to_rows() + self.shares.to_rows()
        for c, raw, at in zip(self.solve.countries, self.balances_raw, self.balances_at_p0):
            rows.append((year, c, "trade_balance_raw", float(raw)))
            rows.append((year, c, "trade_balance_at_p0", float(at)))
        return rows


def _json_scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        if not any(ch in text for ch in ".e"):
            text += ".0"
        return text
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _json(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_scalar(str(k))}: {_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_json(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _json_scalar(obj)


def to_json(obj: Any, indent: int = 2) -> str:
    """Serialize plain data (dicts, lists, scalars) with 17-digit floats."""
    return _json(obj, indent, 0) + "\n"


def _csv_value(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".6g")
    return "" if x is None else str(x)


def to_csv(rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_csv_value(x) for x in row])
    return buf.getvalue()


def emit_report(result: Any, fmt: str = "json") -> bytes:
    """Render one report object, or a list of them, as UTF-8 bytes.

    Report objects expose ``to_dict`` (JSON) and ``to_rows`` (CSV). Bare
    :class:`EquilibriumResult` values are accepted too.
    """
    items = list(result) if isinstance(result, (list, tuple)) else [result]
    if fmt == "json":
        dicts = [r.to_dict() for r in items]
        return to_json(dicts[0] if len(dicts) == 1 else dicts).encode("utf-8")
    if fmt == "csv":
        rows: list[tuple] = []
        for r in items:
            if isinstance(r, EquilibriumResult):
                n, M = len(r.p0), len(r.incomes)
                r = SolveReport(
                    r, tuple(f"goods{i + 1}" for i in range(n)), tuple(f"country{i + 1}" for i in range(M))
                )
            rows.extend(r.to_rows())
        return to_csv(rows).encode("utf-8")
    raise ValueError(f"unknown output format {fmt!r}")
