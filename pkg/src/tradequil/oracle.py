"""Exhaustive simplex search used to cross-check the solver on tiny instances.

The evaluation here is deliberately written from scratch (vectorized over
all grid nodes) rather than calling into :mod:`tradequil.equilibrium`, so
that agreement between the two is evidence rather than tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DimensionTooLarge, ZeroSupply
from .model import FloatArray, check_pair

MAX_GOODS = 3


@dataclass(frozen=True)
class OracleResult:
    """Grid evaluation of the equilibrium inequalities.

    ``nodes`` lie on the unit simplex (rows sum to 1). ``residuals`` is the
    complementarity residual at each node (inf where demand is undefined);
    ``feasible`` marks nodes with no good over-demanded beyond
    ``feasibility_tol``.
    """

    nodes: FloatArray
    residuals: FloatArray
    feasible: np.ndarray
    best: FloatArray
    best_residual: float
    grid_step: float

    @property
    def feasible_nodes(self) -> FloatArray:
        return self.nodes[self.feasible]


def simplex_grid(n: int, grid_step: float) -> FloatArray:
    steps = int(round(1.0 / grid_step))
    if steps < 1 or abs(steps * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must divide 1 evenly, got {grid_step}")
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        i = np.arange(steps + 1)
        return np.column_stack([i, steps - i]) / steps
    i, j = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
    keep = i + j <= steps
    i, j = i[keep], j[keep]
    return np.column_stack([i, j, steps - i - j]) / steps


def brute_force_oracle(
    C: ArrayLike,
    B: ArrayLike,
    grid_step: float = 1e-3,
    feasibility_tol: float = 1e-12,
    tie_tol: float = 1e-12,
) -> OracleResult:
    """Evaluate every simplex node at resolution ``grid_step``.

    ``feasibility_tol`` is relative to total supply and only absorbs
    round-off; a node is feasible when the inequalities hold at the node
    itself. Residual ties within ``tie_tol * sum(psi)`` are broken toward
    the least degenerate node.
    """
    C, B = check_pair(C, B)
    n = C.shape[0]
    if n > MAX_GOODS:
        raise DimensionTooLarge(f"oracle supports at most {MAX_GOODS} goods, got {n}")
    psi = B.sum(axis=1)
    total = float(psi.sum())
    if total <= 0:
        raise ZeroSupply("total supply is zero")

    nodes = simplex_grid(n, grid_step)
    prices = nodes / nodes.max(axis=1, keepdims=True)
    income = prices @ B
    spend = prices @ C
    demanding = C.sum(axis=0) > 0
    # Undefined nodes: a demanding country cannot spend positive income.
    undefined = (demanding & (spend <= 0) & (income > 0)).any(axis=1)

    mult = np.zeros_like(income)
    ok = demanding & (spend > 0)
    mult[ok] = income[ok] / spend[ok]
    excess = mult @ C.T - psi

    residuals = (prices * np.clip(-excess, 0, None)).sum(axis=1) + np.clip(excess, 0, None).sum(
        axis=1
    )
    residuals[undefined] = np.inf
    feasible = ~undefined & (excess.max(axis=1) <= feasibility_tol * total)

    # Ties (continua of equilibria) go to the node with the fewest zero
    # prices, then to enumeration order.
    lowest = residuals.min()
    tied = np.flatnonzero(residuals <= lowest + tie_tol * total)
    zeros = (nodes[tied] == 0).sum(axis=1)
    best = int(tied[np.argmin(zeros)])
    return OracleResult(
        nodes=nodes,
        residuals=residuals,
        feasible=feasible,
        best=nodes[best],
        best_residual=float(residuals[best]),
        grid_step=grid_step,
    )
