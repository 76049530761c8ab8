"""Relative equilibrium prices and market shares for a cost-form trade exchange model."""

from .analytics import (
    DynamicsReport,
    ShareReport,
    country_demand_shares,
    country_supply_shares,
    goods_demand_shares,
    goods_supply_shares,
    share_dynamics,
    share_report,
    trade_balances,
)
from .equilibrium import (
    EquilibriumResult,
    SolverConfig,
    balance_ratios,
    complementarity_residual,
    degeneracy_multiplicity,
    excess_demand,
    is_equilibrium,
    recession_level,
    solve_relative_prices,
)
from .errors import *  # noqa: F401,F403
from .ingest import FlowRecord, aggregate, load_fixture, parse_flows, serialize_flows
from .model import (
    CountrySet,
    GoodsSet,
    TradeTensors,
    build_demand_matrix,
    build_supply_matrix,
    expenditures,
    incomes,
    normalize_prices,
    supply_vector,
)
from .oracle import OracleResult, brute_force_oracle

__version__ = "0.1.0"
