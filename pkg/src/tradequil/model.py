"""Domain types and the deterministic matrix constructions of the exchange model.

Arrays follow one layout throughout the package:

* trade tensors are ``(M, M, n)``: ``imports[k, j, s]`` is the value of goods
  ``s`` imported by country ``k`` from country ``j``;
* demand ``C`` and supply ``B`` matrices are ``(n, M)`` (goods by countries);
* price vectors have length ``n``.

All values are USD in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]

# Matrix aliases; the constructors below guarantee shape and sign.
DemandMatrix = FloatArray
SupplyMatrix = FloatArray
SupplyVector = FloatArray
PriceVector = FloatArray

STUDY_COUNTRIES = (
    "Canada",
    "China",
    "Germany",
    "France",
    "United Kingdom",
    "Italy",
    "Japan",
    "United States",
)

STUDY_GOODS = (
    "Animal",
    "Vegetable",
    "FoodProd",
    "Minerals",
    "Fuels",
    "Chemicals",
    "PlastiRub",
    "HidesSkin",
    "Wood",
    "TextCloth",
    "Footwear",
    "StoneGlas",
    "Metals",
    "MachElec",
    "Transport",
    "Miscellan",
)


@dataclass(frozen=True)
class LabelSet:
    """Ordered, duplicate-free collection of labels."""

    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __init__(self, labels: Iterable[str]) -> None:
        labels = tuple(str(x) for x in labels)
        if not labels:
            raise ValueError(f"{type(self).__name__} must not be empty")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise ValueError(f"duplicate labels: {', '.join(dupes)}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        return self._index[label]

    @classmethod
    def from_file(cls, path) -> "LabelSet":
        """Read one label per line; blank lines are ignored, order is kept."""
        with open(path, encoding="utf-8") as fh:
            return cls(line.strip() for line in fh if line.strip())


class GoodsSet(LabelSet):
    @classmethod
    def default(cls) -> "GoodsSet":
        return cls(STUDY_GOODS)


class CountrySet(LabelSet):
    @classmethod
    def default(cls) -> "CountrySet":
        return cls(STUDY_COUNTRIES)


def _frozen(a: ArrayLike) -> FloatArray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TradeTensors:
    """Bilateral import and export values for one year.

    ``records_used`` and ``records_skipped`` are filled in by
    :func:`tradequil.ingest.aggregate` and are informational only.
    """

    imports: FloatArray
    exports: FloatArray
    year: int | None = None
    countries: CountrySet | None = None
    goods: GoodsSet | None = None
    records_used: int = 0
    records_skipped: int = 0

    def __post_init__(self) -> None:
        imports = _frozen(self.imports)
        exports = _frozen(self.exports)
        for name, arr in (("imports", imports), ("exports", exports)):
            if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"{name} must have shape (M, M, n), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            if np.any(arr < 0):
                raise ValueError(f"{name} contains negative values")
            diag = arr[np.arange(arr.shape[0]), np.arange(arr.shape[0]), :]
            if np.any(diag != 0):
                raise ValueError(f"{name} has nonzero self-flows on the diagonal")
        if imports.shape != exports.shape:
            raise ValueError(f"shape mismatch: imports {imports.shape} vs exports {exports.shape}")
        M, _, n = imports.shape
        if self.countries is not None and len(self.countries) != M:
            raise ValueError(f"{len(self.countries)} country labels for M={M}")
        if self.goods is not None and len(self.goods) != n:
            raise ValueError(f"{len(self.goods)} goods labels for n={n}")
        object.__setattr__(self, "imports", imports)
        object.__setattr__(self, "exports", exports)

    @property
    def n_countries(self) -> int:
        return self.imports.shape[0]

    @property
    def n_goods(self) -> int:
        return self.imports.shape[2]

    @classmethod
    def zeros(cls, n_countries: int, n_goods: int, **kwargs) -> "TradeTensors":
        z = np.zeros((n_countries, n_countries, n_goods))
        return cls(z, z, **kwargs)


def as_matrix(a: ArrayLike, name: str = "matrix") -> FloatArray:
    """Validate a goods-by-countries value matrix (finite, nonnegative, 2-D)."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (goods x countries), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative values")
    return arr


def as_prices(p: ArrayLike, n: int | None = None) -> PriceVector:
    """Validate a price vector: finite, nonnegative, not identically zero."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"price vector must be 1-D, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"price vector has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("price vector contains non-finite values")
    if np.any(arr < 0):
        raise ValueError("price vector contains negative values")
    if not np.any(arr > 0):
        raise ValueError("price vector is identically zero")
    return arr


def normalize_prices(p: ArrayLike) -> PriceVector:
    """Rescale so that the largest component equals 1 (canonical gauge)."""
    arr = as_prices(p)
    return arr / arr.max()


def build_demand_matrix(tensors: TradeTensors) -> DemandMatrix:
    """``C[s, k]``: total value of goods ``s`` imported by country ``k``."""
    return tensors.imports.sum(axis=1).T.copy()


def build_supply_matrix(tensors: TradeTensors) -> SupplyMatrix:
    """``B[s, k]``: total value of goods ``s`` exported by country ``k``."""
    return tensors.exports.sum(axis=1).T.copy()


def supply_vector(B: ArrayLike) -> SupplyVector:
    return as_matrix(B, "supply matrix").sum(axis=1)


def incomes(B: ArrayLike, p: ArrayLike) -> FloatArray:
    """Export income of each country at prices ``p``."""
    B = as_matrix(B, "supply matrix")
    return as_prices(p, B.shape[0]) @ B


def expenditures(C: ArrayLike, p: ArrayLike) -> FloatArray:
    """Cost of each country's import bundle at prices ``p``."""
    C = as_matrix(C, "demand matrix")
    return as_prices(p, C.shape[0]) @ C


def check_pair(C: ArrayLike, B: ArrayLike) -> tuple[DemandMatrix, SupplyMatrix]:
    C = as_matrix(C, "demand matrix")
    B = as_matrix(B, "supply matrix")
    if C.shape != B.shape:
        raise ValueError(f"demand {C.shape} and supply {B.shape} shapes differ")
    return C, B


def label_list(labels: Sequence[str] | LabelSet | None, size: int, prefix: str) -> list[str]:
    if labels is None:
        return [f"{prefix}{i + 1}" for i in range(size)]
    return list(labels)
