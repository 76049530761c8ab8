"""Market-share decompositions, trade balances and year-over-year dynamics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import InconsistentSets, ZeroSupply
from .ingest import CaptionFixture
from .model import FloatArray, as_matrix, as_prices, check_pair, label_list

METRICS = (
    "country_supply_share",
    "country_demand_share",
    "goods_supply_share",
    "goods_demand_share",
)


def _shares(totals: FloatArray, total: float | None, what: str) -> FloatArray:
    if total is None:
        total = float(totals.sum())
    if not total > 0:
        raise ZeroSupply(f"{what} sums to zero; shares are undefined")
    return totals / total


def country_supply_shares(B: ArrayLike, total: float | None = None) -> FloatArray:
    """Each country's part of all exports.

    ``total`` overrides the denominator (default: the matrix sum).
    """
    return _shares(as_matrix(B, "supply matrix").sum(axis=0), total, "supply")


def country_demand_shares(C: ArrayLike, total: float | None = None) -> FloatArray:
    return _shares(as_matrix(C, "demand matrix").sum(axis=0), total, "demand")


def goods_supply_shares(B: ArrayLike, total: float | None = None) -> FloatArray:
    return _shares(as_matrix(B, "supply matrix").sum(axis=1), total, "supply")


def goods_demand_shares(C: ArrayLike, total: float | None = None) -> FloatArray:
    return _shares(as_matrix(C, "demand matrix").sum(axis=1), total, "demand")


def trade_balances(C: ArrayLike, B: ArrayLike, p0: ArrayLike) -> FloatArray:
    """Export income minus import cost per country, valued at ``p0``."""
    C, B = check_pair(C, B)
    p = as_prices(p0, C.shape[0])
    return p @ B - p @ C


@dataclass(frozen=True)
class ShareReport:
    """Share vectors for one year.

    Vectors are None when the source does not provide them (a single caption
    fixture carries only one of the four).
    """

    year: int | None
    countries: tuple[str, ...]
    goods: tuple[str, ...]
    country_supply_shares: FloatArray | None = None
    country_demand_shares: FloatArray | None = None
    goods_supply_shares: FloatArray | None = None
    goods_demand_shares: FloatArray | None = None

    def vectors(self) -> Iterator[tuple[str, tuple[str, ...], FloatArray]]:
        for metric in METRICS:
            v = getattr(self, metric + "s")
            if v is not None:
                yield metric, self.countries if metric.startswith("country") else self.goods, v

    def to_dict(self) -> dict:
        out: dict = {"year": self.year}
        for metric, labels, v in self.vectors():
            out[metric + "s"] = dict(zip(labels, v.tolist()))
        return out

    def to_rows(self) -> list[tuple]:
        return [
            (self.year, label, metric, float(x))
            for metric, labels, v in self.vectors()
            for label, x in zip(labels, v)
        ]


def share_report(
    C: ArrayLike,
    B: ArrayLike,
    year: int | None = None,
    countries: Sequence[str] | None = None,
    goods: Sequence[str] | None = None,
) -> ShareReport:
    C, B = check_pair(C, B)
    n, M = C.shape
    return ShareReport(
        year=year,
        countries=tuple(label_list(countries, M, "country")),
        goods=tuple(label_list(goods, n, "goods")),
        country_supply_shares=country_supply_shares(B),
        country_demand_shares=country_demand_shares(C),
        goods_supply_shares=goods_supply_shares(B),
        goods_demand_shares=goods_demand_shares(C),
    )


def caption_share_report(fixture: CaptionFixture) -> ShareReport:
    """Recompute a caption fixture's shares against its unit total."""
    M = fixture.as_matrix()
    share = {
        "country_supply": country_supply_shares,
        "country_demand": country_demand_shares,
        "goods_supply": goods_supply_shares,
        "goods_demand": goods_demand_shares,
    }[fixture.kind](M, total=fixture.total)
    labels = fixture.labels
    return ShareReport(
        year=fixture.year,
        countries=labels if fixture.by_country else (),
        goods=() if fixture.by_country else labels,
        **{fixture.kind + "_shares": share},
    )


def merge_reports(reports: Sequence[ShareReport]) -> ShareReport:
    """Combine partial reports of the same year into one."""
    if not reports:
        raise ValueError("nothing to merge")
    years = {r.year for r in reports}
    if len(years) != 1:
        raise InconsistentSets(f"cannot merge reports of different years {sorted(years)}")
    countries = next((r.countries for r in reports if r.countries), ())
    goods = next((r.goods for r in reports if r.goods), ())
    fields: dict = {}
    for r in reports:
        if r.countries and r.countries != countries or r.goods and r.goods != goods:
            raise InconsistentSets("label sets differ between merged reports")
        for metric, _, v in r.vectors():
            if metric + "s" in fields:
                raise InconsistentSets(f"{metric} supplied twice for {r.year}")
            fields[metric + "s"] = v
    return ShareReport(year=years.pop(), countries=countries, goods=goods, **fields)


@dataclass(frozen=True)
class DynamicsReport:
    """Share changes between consecutive reports.

    ``deltas[metric]`` has one row per consecutive pair in ``years``.
    """

    years: tuple
    countries: tuple[str, ...]
    goods: tuple[str, ...]
    deltas: dict[str, FloatArray]

    def delta(self, metric: str, label: str, step: int = 0) -> float:
        labels = self.countries if metric.startswith("country") else self.goods
        return float(self.deltas[metric][step, labels.index(label)])

    def to_dict(self) -> dict:
        steps = []
        for i, (a, b) in enumerate(zip(self.years, self.years[1:])):
            entry: dict = {"from_year": a, "to_year": b}
            for metric, arr in self.deltas.items():
                labels = self.countries if metric.startswith("country") else self.goods
                entry[metric + "_deltas"] = dict(zip(labels, arr[i].tolist()))
            steps.append(entry)
        return {"years": list(self.years), "steps": steps}

    def to_rows(self) -> list[tuple]:
        rows = []
        for i, year in enumerate(self.years[1:]):
            for metric, arr in self.deltas.items():
                labels = self.countries if metric.startswith("country") else self.goods
                rows.extend((year, lab, metric + "_delta", float(x)) for lab, x in zip(labels, arr[i]))
        return rows


def share_dynamics(reports: Sequence[ShareReport]) -> DynamicsReport:
    """Year-over-year share deltas for every vector present in all reports."""
    if len(reports) < 2:
        raise ValueError("share_dynamics needs at least two reports")
    first = reports[0]
    for r in reports[1:]:
        if r.countries != first.countries or r.goods != first.goods:
            raise InconsistentSets(f"label sets of year {r.year} differ from year {first.year}")
    common = [m for m in METRICS if all(getattr(r, m + "s") is not None for r in reports)]
    if not common:
        raise InconsistentSets("the reports share no common share vector")
    deltas = {}
    for m in common:
        stacked = np.vstack([getattr(r, m + "s") for r in reports])
        deltas[m] = np.diff(stacked, axis=0)
    return DynamicsReport(
        years=tuple(r.year for r in reports),
        countries=first.countries,
        goods=first.goods,
        deltas=deltas,
    )
