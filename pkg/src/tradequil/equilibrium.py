"""Excess demand, equilibrium checks and the relative-price solver.

Country ``k`` spends its export income ``D_k(p) = p @ B[:, k]`` on a bundle
proportional to its import column ``C[:, k]``, so the quantity multiplier is
``y_k = D_k / E_k`` with ``E_k = p @ C[:, k]``. Market demand for goods ``s``
is ``sum_k C[s, k] * y_k`` and the excess over supply ``psi_s`` must be
nonpositive at an equilibrium.

A country whose import column is identically zero demands nothing and is
skipped. A country with positive imports, zero expenditure and positive
income makes demand diverge; that raises :class:`UndefinedDemand`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from .errors import NoProgress, UndefinedDemand, ZeroSupply
from .model import FloatArray, PriceVector, as_prices, check_pair

POLISH_THRESHOLDS = (1e-2, 1e-4, 1e-6)
NEWTON_STEPS = 40


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for :func:`solve_relative_prices`.

    ``tolerance`` and ``expenditure_guard`` are relative to total supply
    value; ``zero_threshold`` is relative to the largest price.
    """

    damping: float = 0.5
    max_iterations: int = 100_000
    tolerance: float = 1e-10
    zero_threshold: float = 1e-9
    expenditure_guard: float = 1e-12
    stall_window: int = 20_000
    polish_every: int = 50

    def __post_init__(self) -> None:
        for name in (
            "damping",
            "max_iterations",
            "tolerance",
            "zero_threshold",
            "expenditure_guard",
            "stall_window",
            "polish_every",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.damping > 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class EquilibriumResult:
    p0: PriceVector
    excess: FloatArray
    binding_set: tuple[int, ...]
    slack_set: tuple[int, ...]
    degeneracy: int
    recession_level: float
    balance_ratios: FloatArray
    incomes: FloatArray
    expenditures: FloatArray
    iterations: int
    converged: bool
    complementarity_residual: float
    config: SolverConfig = field(default_factory=SolverConfig, repr=False)

    def to_dict(self) -> dict[str, Any]:
        """Plain-Python view with the serialized key order and names.

        The recession figure is exported as ``recession_level_proxy``: it is
        the unsold share of supply value, not a published formula.
        """
        return {
            "p0": self.p0.tolist(),
            "excess": self.excess.tolist(),
            "binding_set": list(self.binding_set),
            "slack_set": list(self.slack_set),
            "degeneracy": self.degeneracy,
            "recession_level_proxy": self.recession_level,
            "balance_ratios": self.balance_ratios.tolist(),
            "incomes": self.incomes.tolist(),
            "expenditures": self.expenditures.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "complementarity_residual": self.complementarity_residual,
        }


def _default_guard(B: FloatArray, p: FloatArray, rel: float = 1e-12) -> float:
    return rel * float(B.sum()) * float(p.max())


def _market(C: FloatArray, B: FloatArray, p: FloatArray, guard: float):
    """Incomes, expenditures and quantity multipliers at ``p``."""
    D = p @ B
    E = p @ C
    demanding = C.any(axis=0)
    active = demanding & (E > guard)
    bad = demanding & ~active & (D > guard)
    if bad.any():
        idx = tuple(int(k) for k in np.flatnonzero(bad))
        raise UndefinedDemand(
            f"countries {list(idx)} have zero expenditure but positive income at these prices",
            countries=idx,
        )
    y = np.zeros_like(D)
    np.divide(D, E, out=y, where=active)
    return D, E, y, active


def _excess(C: FloatArray, B: FloatArray, p: FloatArray, guard: float) -> FloatArray:
    _, _, y, _ = _market(C, B, p, guard)
    return C @ y - B.sum(axis=1)


def excess_demand(
    C: ArrayLike, B: ArrayLike, p: ArrayLike, guard: float | None = None
) -> FloatArray:
    """Per-good excess demand ``d[s]`` in USD.

    ``guard`` is the absolute expenditure threshold below which a country is
    treated as not spending; by default ``1e-12 * sum(B) * max(p)``.
    """
    C, B = check_pair(C, B)
    p = as_prices(p, C.shape[0])
    if guard is None:
        guard = _default_guard(B, p)
    return _excess(C, B, p, guard)


def is_equilibrium(
    C: ArrayLike, B: ArrayLike, p: ArrayLike, tol: float = 1e-10, guard: float | None = None
) -> bool:
    C, B = check_pair(C, B)
    d = excess_demand(C, B, p, guard)
    psi = B.sum(axis=1)
    return bool(np.all(d <= tol * np.maximum(1.0, psi)))


def _residual(p: FloatArray, d: FloatArray) -> float:
    p = p / p.max()
    return float(np.sum(p * np.maximum(0.0, -d)) + np.sum(np.maximum(0.0, d)))


def complementarity_residual(
    C: ArrayLike, B: ArrayLike, p: ArrayLike, guard: float | None = None
) -> float:
    """``sum p*max(0,-d) + sum max(0,d)`` with ``p`` max-normalized (USD).

    Zero exactly at an equilibrium: no good is over-demanded and every good
    left in excess supply is free.
    """
    d = excess_demand(C, B, p, guard)
    return _residual(np.asarray(p, dtype=np.float64), d)


def degeneracy_multiplicity(p0: ArrayLike, zero_threshold: float = 1e-9) -> int:
    p = as_prices(p0)
    p = p / p.max()
    return int(np.count_nonzero(p <= zero_threshold))


def recession_level(
    C: ArrayLike, B: ArrayLike, p0: ArrayLike, guard: float | None = None
) -> float:
    """Unsold fraction of total supply value at ``p0``, in ``[0, 1]``.

    Used as a stand-in recession indicator: 0 when every market clears,
    1 when nothing is bought.
    """
    C, B = check_pair(C, B)
    psi = B.sum(axis=1)
    total = float(psi.sum())
    if total <= 0:
        raise ZeroSupply("total supply is zero")
    d = excess_demand(C, B, p0, guard)
    return min(1.0, float(np.sum(np.maximum(0.0, -d))) / total)


def balance_ratios(
    C: ArrayLike, B: ArrayLike, p0: ArrayLike, guard: float | None = None
) -> FloatArray:
    """Income over expenditure per country; 1 means balanced trade.

    Countries with neither income nor expenditure at ``p0`` report 1.
    """
    C, B = check_pair(C, B)
    p = as_prices(p0, C.shape[0])
    if guard is None:
        guard = _default_guard(B, p)
    D = p @ B
    E = p @ C
    dead = (E <= guard) & (D > guard)
    if dead.any():
        idx = tuple(int(k) for k in np.flatnonzero(dead))
        raise UndefinedDemand(
            f"countries {list(idx)} have positive income but zero expenditure", countries=idx
        )
    y = np.ones_like(D)
    np.divide(D, E, out=y, where=E > guard)
    return y


def _jacobian(C: FloatArray, B: FloatArray, E: FloatArray, y: FloatArray, active) -> FloatArray:
    # d(d_s)/d(p_t) = sum_k C[s,k] * (B[t,k] - y_k * C[t,k]) / E_k
    w = np.zeros_like(E)
    np.divide(1.0, E, out=w, where=active)
    return (C * w) @ B.T - (C * (y * w)) @ C.T


def _newton_on_support(
    C: FloatArray, B: FloatArray, p: FloatArray, support, guard: float
) -> FloatArray | None:
    """Solve ``d_S(p) = 0`` with prices off ``S`` pinned at zero.

    One equation is redundant by the Walras identity; the gauge row fixes the
    largest component at 1. Returns None if the iterate leaves the positive
    orthant or demand becomes undefined.
    """
    p = np.where(support, p, 0.0)
    p = p / p.max()
    idx = np.flatnonzero(support)
    gauge = (idx == np.argmax(p)).astype(np.float64)
    psi = B.sum(axis=1)
    for _ in range(NEWTON_STEPS):
        try:
            _, E, y, active = _market(C, B, p, guard)
        except UndefinedDemand:
            return None
        d = C @ y - psi
        J = _jacobian(C, B, E, y, active)
        A = np.vstack([J[np.ix_(idx, idx)], gauge])
        rhs = -np.append(d[idx], 0.0)
        step = np.linalg.lstsq(A, rhs, rcond=None)[0]
        q = p.copy()
        q[idx] += step
        if not np.all(q[idx] > 0):
            return None
        p = q
        if np.max(np.abs(step)) <= 1e-15:
            break
    return p / p.max()


def _build_result(C, B, p, iterations, converged, cfg: SolverConfig) -> EquilibriumResult:
    p = p / p.max()
    psi = B.sum(axis=1)
    total = float(psi.sum())
    guard = cfg.expenditure_guard * total
    tau_scale = cfg.tolerance * total
    D, E, _, _ = _market(C, B, p, guard)
    d = _excess(C, B, p, guard)
    return EquilibriumResult(
        p0=p,
        excess=d,
        binding_set=tuple(int(s) for s in np.flatnonzero(np.abs(d) <= tau_scale)),
        slack_set=tuple(int(s) for s in np.flatnonzero(d < -tau_scale)),
        degeneracy=degeneracy_multiplicity(p, cfg.zero_threshold),
        recession_level=min(1.0, float(np.sum(np.maximum(0.0, -d))) / total),
        balance_ratios=balance_ratios(C, B, p, guard),
        incomes=D,
        expenditures=E,
        iterations=iterations,
        converged=converged,
        complementarity_residual=_residual(p, d),
        config=cfg,
    )


def solve_relative_prices(
    C: ArrayLike, B: ArrayLike, config: SolverConfig | None = None
) -> EquilibriumResult:
    """Find a nonnegative relative price vector satisfying the equilibrium inequalities.

    Starts from all-ones and runs multiplicative tatonnement

        p[s] <- p[s] * ((demand_s + kappa) / (psi_s + kappa)) ** damping

    with max-renormalization and zero-flooring of cheap, over-supplied goods.
    Every ``polish_every`` steps a Newton solve on the current positive
    support is attempted; it is accepted only if the full convergence test
    passes. Goods pinned at zero that become over-demanded are re-seeded.

    Convergence means ``max d_s / max(1, psi_s) <= tolerance`` and the
    complementarity residual is at most ``tolerance * sum(psi)``.

    Raises :class:`NoProgress` (carrying the best iterate) when the residual
    does not improve for ``stall_window`` iterations. Hitting
    ``max_iterations`` returns the best iterate with ``converged=False``.
    """
    cfg = config or SolverConfig()
    C, B = check_pair(C, B)
    psi = B.sum(axis=1)
    total = float(psi.sum())
    if total <= 0:
        raise ZeroSupply("total supply is zero; nothing to price")
    guard = cfg.expenditure_guard * total
    kappa = guard
    tau_scale = cfg.tolerance * total
    scale = np.maximum(1.0, psi)

    def done(p: FloatArray) -> bool:
        try:
            d = _excess(C, B, p, guard)
        except UndefinedDemand:
            return False
        return bool(np.max(d / scale) <= cfg.tolerance and _residual(p, d) <= tau_scale)

    p = np.ones(C.shape[0])
    best_p, best_res, last_gain = p, np.inf, 0
    it = 0
    for it in range(cfg.max_iterations + 1):
        d = _excess(C, B, p, guard)
        res = _residual(p, d)
        if np.max(d / scale) <= cfg.tolerance and res <= tau_scale:
            return _build_result(C, B, p, it, True, cfg)
        if res < best_res:
            best_p, best_res, last_gain = p, res, it
        elif it - last_gain >= cfg.stall_window:
            raise NoProgress(
                f"residual stuck at {best_res:.6g} for {cfg.stall_window} iterations",
                result=_build_result(C, B, best_p, it, False, cfg),
            )
        if it == cfg.max_iterations:
            break

        if it and it % cfg.polish_every == 0:
            tried = set()
            for th in POLISH_THRESHOLDS:
                support = p >= th
                key = support.tobytes()
                if key in tried:
                    continue
                tried.add(key)
                q = _newton_on_support(C, B, p, support, guard)
                if q is not None and done(q):
                    return _build_result(C, B, q, it, True, cfg)

        q = p * ((d + psi + kappa) / (psi + kappa)) ** cfg.damping
        revive = (q == 0) & (d > tau_scale)
        q[revive] = cfg.zero_threshold * q.max()
        q = q / q.max()
        floor = (q < cfg.zero_threshold) & (d < 0)
        if floor.any():
            trial = np.where(floor, 0.0, q)
            try:
                _market(C, B, trial, guard)
                q = trial
            except UndefinedDemand:
                pass
        p = q

    return _build_result(C, B, best_p, it, False, cfg)
