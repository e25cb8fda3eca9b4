"""Reference switching policies: all-ON, blind all-OFF, load sorting, exhaustive search."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .network import FEASIBILITY_TOL, apply_policy, default_phis, policy_count
from .power_model import BaseStation, PowerTable, network_power

EXHAUSTIVE_CAP = 15


class SearchTooLargeError(ValueError):
    pass


def all_on(demand) -> np.ndarray:
    return np.ones(len(demand), dtype=np.int8)


def all_off(demand) -> np.ndarray:
    """Every small cell asleep, whatever the macro load ends up being."""
    policy = np.zeros(len(demand), dtype=np.int8)
    policy[0] = 1
    return policy


def sorting(demand, phis=None) -> np.ndarray:
    """Switch off the least-loaded small cells while the macro cell has room.

    Cells are tried in ascending order of demand (ties by index). A cell that
    does not fit is skipped and the next one is still tried.
    """
    demand = np.asarray(demand, dtype=float)
    phis = default_phis(demand.size) if phis is None else np.asarray(phis, dtype=float)
    if demand[0] > 1.0 + FEASIBILITY_TOL:
        raise ValueError(f"macro cell already overloaded (demand {demand[0]})")
    policy = np.ones(demand.size, dtype=np.int8)
    macro = demand[0]
    for j in np.argsort(demand[1:], kind="stable") + 1:
        extra = phis[j] * demand[j]
        if macro + extra <= 1.0 + FEASIBILITY_TOL:
            macro += extra
            policy[j] = 0
    return policy


def status_matrix(s: int) -> np.ndarray:
    """All 2**s small-cell status vectors, row c being the binary digits of c (MSB first)."""
    codes = np.arange(policy_count(s), dtype=np.int64)[:, None]
    shifts = np.arange(s - 1, -1, -1, dtype=np.int64)[None, :]
    return ((codes >> shifts) & 1).astype(np.int8)


def exhaustive(demand, stations: Sequence[BaseStation], phis=None,
               s_cap: int = EXHAUSTIVE_CAP) -> np.ndarray:
    """Minimum-power policy among those that keep the macro load within capacity.

    Ties go to the smallest status code. If even all-ON overloads the macro
    cell there is nothing to choose, and all-ON is returned.
    """
    demand = np.asarray(demand, dtype=float)
    s = demand.size - 1
    if s > s_cap:
        raise SearchTooLargeError(
            f"exhaustive search over s={s} small cells exceeds the cap of {s_cap}")
    if len(stations) != demand.size:
        raise ValueError("stations and demand differ in length")
    phis = default_phis(demand.size) if phis is None else np.asarray(phis, dtype=float)
    if demand[0] > 1.0 + FEASIBILITY_TOL:
        return all_on(demand)

    table = PowerTable.from_stations(stations)
    sc = status_matrix(s)
    macro_load = demand[0] + (1 - sc) @ (phis[1:] * demand[1:])
    on_gain = table.p_op[1:] + table.slope[1:] * demand[1:] - table.p_sleep[1:]
    power = (table.p_op[0] + table.slope[0] * np.minimum(macro_load, 1.0)
             + table.p_sleep[1:].sum() + sc @ on_gain)
    power[macro_load > 1.0 + FEASIBILITY_TOL] = np.inf
    best = power.min()
    # re-rank near-ties with the exact per-station sum so the choice does not
    # depend on matmul rounding
    shortlist = np.flatnonzero(power <= best + 1e-9 * max(abs(best), 1.0))
    ranked = []
    for code in shortlist:
        policy = np.concatenate(([1], sc[code])).astype(np.int8)
        state = apply_policy(demand, policy, phis)
        ranked.append((network_power(stations, state.loads, state.statuses), int(code), policy))
    return min(ranked, key=lambda r: (r[0], r[1]))[2]


METHODS = ("vfa", "all_on", "all_off", "sorting", "exhaustive")
