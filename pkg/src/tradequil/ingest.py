"""Flow-record CSV parsing, aggregation into trade tensors, bundled fixtures.

The canonical input is UTF-8 CSV with the header::

    year,reporter,partner,product,direction,value_usd

``value_cents`` (integer cents) may replace ``value_usd``. ``direction`` is
``export`` or ``import`` from the reporter's point of view.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import (
    EmptySelection,
    IngestError,
    MalformedRow,
    NegativeValue,
    SelfFlow,
    UnknownDirection,
    UnknownFixture,
    UnknownLabel,
)
from .model import CountrySet, FloatArray, GoodsSet, TradeTensors

BASE_COLUMNS = ("year", "reporter", "partner", "product", "direction")
VALUE_COLUMNS = {"value_usd": 1.0, "value_cents": 0.01}
DIRECTIONS = ("export", "import")


@dataclass(frozen=True)
class FlowRecord:
    year: int
    reporter: str
    partner: str
    product: str
    direction: str
    value: float


def _text_stream(stream) -> IO[str]:
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(bytes(stream).decode("utf-8-sig"))
    if isinstance(stream, io.TextIOBase):
        return stream
    if hasattr(stream, "read"):
        return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")
    raise TypeError(f"expected bytes or a file object, got {type(stream).__name__}")


def parse_flows(stream, fmt: str = "csv") -> list[FlowRecord]:
    """Parse flow records from bytes or a (binary or text) file object.

    Rows are numbered from 1 after the header; blank lines are ignored.
    """
    if fmt != "csv":
        raise IngestError(f"unsupported format {fmt!r}; only 'csv' is supported")
    reader = csv.reader(_text_stream(stream))
    header = next(reader, None)
    if header is None:
        raise MalformedRow("missing header", row=0)
    header = [h.strip().lower() for h in header]
    if tuple(header[:5]) != BASE_COLUMNS or len(header) != 6 or header[5] not in VALUE_COLUMNS:
        raise MalformedRow(
            "header must be year,reporter,partner,product,direction,value_usd "
            f"(or value_cents), got {','.join(header)}",
            row=0,
        )
    unit = VALUE_COLUMNS[header[5]]

    records = []
    row = 0
    for fields in reader:
        if not fields or all(not f.strip() for f in fields):
            continue
        row += 1
        if len(fields) != 6:
            raise MalformedRow(f"expected 6 fields, got {len(fields)}", row=row)
        year_s, reporter, partner, product, direction, value_s = (f.strip() for f in fields)
        try:
            year = int(year_s)
        except ValueError:
            raise MalformedRow(f"year {year_s!r} is not an integer", row=row) from None
        try:
            value = float(value_s) * unit
        except ValueError:
            raise MalformedRow(f"value {value_s!r} is not numeric", row=row) from None
        if not math.isfinite(value):
            raise MalformedRow(f"value {value_s!r} is not finite", row=row)
        if value < 0:
            raise NegativeValue(f"negative value {value_s}", row=row)
        direction = direction.lower()
        if direction not in DIRECTIONS:
            raise UnknownDirection(f"direction {direction!r} is not export/import", row=row)
        if not reporter or not partner or not product:
            raise MalformedRow("empty reporter, partner or product", row=row)
        if reporter == partner:
            raise SelfFlow(f"reporter and partner are both {reporter!r}", row=row)
        records.append(FlowRecord(year, reporter, partner, product, direction, value))
    return records


def read_flows(path) -> list[FlowRecord]:
    with open(path, "rb") as fh:
        return parse_flows(fh)


def serialize_flows(records: Iterable[FlowRecord]) -> bytes:
    """Inverse of :func:`parse_flows`; values use ``repr`` so floats round-trip."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*BASE_COLUMNS, "value_usd"])
    for r in records:
        writer.writerow([r.year, r.reporter, r.partner, r.product, r.direction, repr(r.value)])
    return buf.getvalue().encode("utf-8")


def aggregate(
    records: Sequence[FlowRecord],
    countries: CountrySet,
    goods: GoodsSet,
    year: int,
    strict: bool = True,
) -> TradeTensors:
    """Sum the records of ``year`` into import/export tensors.

    Strict mode raises :class:`UnknownLabel` for a selected-year record whose
    labels fall outside the sets; lenient mode skips it. Records of other
    years are skipped in both modes, so ``records_used + records_skipped``
    always equals ``len(records)``. Cells are summed with ``math.fsum`` to
    make the result independent of record order.
    """
    M, n = len(countries), len(goods)
    cells: dict[tuple[int, int, int, int], list[float]] = defaultdict(list)
    used = skipped = 0
    matched_year = False
    for row, r in enumerate(records, start=1):
        if r.year != year:
            skipped += 1
            continue
        matched_year = True
        missing = [
            lab
            for lab, ok in (
                (r.reporter, r.reporter in countries),
                (r.partner, r.partner in countries),
                (r.product, r.product in goods),
            )
            if not ok
        ]
        if missing:
            if strict:
                raise UnknownLabel(f"unknown label(s) {missing}", row=row)
            skipped += 1
            continue
        which = 0 if r.direction == "import" else 1
        key = (which, countries.index(r.reporter), countries.index(r.partner), goods.index(r.product))
        cells[key].append(r.value)
        used += 1
    if not matched_year:
        raise EmptySelection(f"no records for year {year}")

    tensors = np.zeros((2, M, M, n))
    for key, values in cells.items():
        tensors[key] = math.fsum(values)
    return TradeTensors(
        imports=tensors[0],
        exports=tensors[1],
        year=year,
        countries=countries,
        goods=goods,
        records_used=used,
        records_skipped=skipped,
    )


# -- bundled fixtures -------------------------------------------------------


@dataclass(frozen=True)
class CaptionFixture:
    """Share values as printed under one of the published pie charts.

    The captions are rounded, so they need not sum to one. ``as_matrix``
    encodes them as totals of a unit market (``total = 1.0``).
    """

    name: str
    figure: int
    year: int
    kind: str
    labels: tuple[str, ...]
    captions: tuple[str, ...]

    total = 1.0

    @property
    def values(self) -> FloatArray:
        return np.array([float(c) for c in self.captions])

    @property
    def by_country(self) -> bool:
        return self.kind.startswith("country")

    def as_matrix(self) -> FloatArray:
        v = self.values
        return v[None, :] if self.by_country else v[:, None]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values.tolist()))


@dataclass(frozen=True)
class InstanceFixture:
    """A small synthetic demand/supply pair."""

    name: str
    countries: CountrySet
    goods: GoodsSet
    demand: FloatArray
    supply: FloatArray
    year: int | None = None


@lru_cache(maxsize=1)
def _fixture_table() -> dict:
    text = resources.files("tradequil").joinpath("data/fixtures.json").read_text("utf-8")
    return json.loads(text)


def fixture_names() -> list[str]:
    return list(_fixture_table())


def load_fixture(name: str) -> CaptionFixture | InstanceFixture:
    table = _fixture_table()
    if name not in table:
        raise UnknownFixture(f"unknown fixture {name!r}; available: {', '.join(table)}")
    raw = table[name]
    if raw["kind"] == "instance":
        return InstanceFixture(
            name=name,
            countries=CountrySet(raw["countries"]),
            goods=GoodsSet(raw["goods"]),
            demand=np.array(raw["demand"], dtype=np.float64),
            supply=np.array(raw["supply"], dtype=np.float64),
        )
    return CaptionFixture(
        name=name,
        figure=raw["figure"],
        year=raw["year"],
        kind=raw["kind"],
        labels=tuple(raw["shares"]),
        captions=tuple(raw["shares"].values()),
    )
