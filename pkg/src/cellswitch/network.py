"""Network state, offloading arithmetic and the macro-capacity constraint."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-12


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class NetworkState:
    """Loads and ON/OFF statuses of all cells for one slot.

    Index 0 is the macro cell, which is always ON. Its load may exceed 1,
    which marks an infeasible (overloaded) state.
    """

    loads: np.ndarray
    statuses: np.ndarray
    slot: int = 0

    def __post_init__(self):
        loads = _frozen(self.loads, float)
        statuses = _frozen(self.statuses, np.int8)
        if loads.ndim != 1 or loads.shape != statuses.shape or loads.size == 0:
            raise ValueError("loads and statuses must be 1-D vectors of equal, non-zero length")
        if statuses[0] != 1:
            raise ValueError("the macro cell must be ON")
        if np.any((statuses != 0) & (statuses != 1)):
            raise ValueError("statuses must be 0 or 1")
        if np.any(loads < 0):
            raise ValueError("loads must be non-negative")
        if np.any(loads[1:][statuses[1:] == 0] != 0):
            raise ValueError("a sleeping small cell cannot carry load")
        if np.any(loads[1:] > 1):
            raise ValueError("small-cell loads cannot exceed 1")
        object.__setattr__(self, "loads", loads)
        object.__setattr__(self, "statuses", statuses)

    def __eq__(self, other):
        if not isinstance(other, NetworkState):
            return NotImplemented
        return (self.slot == other.slot
                and np.array_equal(self.loads, other.loads)
                and np.array_equal(self.statuses, other.statuses))

    @property
    def n_small_cells(self) -> int:
        return self.loads.size - 1

    @property
    def macro_load(self) -> float:
        return float(self.loads[0])


def _check_demand(demand) -> np.ndarray:
    demand = np.asarray(demand, dtype=float)
    if demand.ndim != 1 or demand.size == 0:
        raise ValueError("demand must be a non-empty 1-D vector")
    if np.any(demand < 0) or np.any(demand > 1):
        raise ValueError("demand entries must lie in [0, 1]")
    return demand


def default_phis(n_cells: int) -> np.ndarray:
    return np.ones(n_cells)


def apply_policy(demand, policy, phis=None, slot: int = 0) -> NetworkState:
    """Loads that result from holding ``policy`` at the given native demand.

    Each sleeping small cell hands its native demand, scaled by its relative
    capacity ``phi``, to the macro cell. Switching a cell back on returns
    exactly its own native demand to it.
    """
    demand = _check_demand(demand)
    policy = np.asarray(policy, dtype=np.int8)
    if policy.shape != demand.shape:
        raise ValueError(f"policy has {policy.size} entries, demand has {demand.size}")
    if policy[0] != 1:
        raise ValueError("the macro cell cannot be switched off")
    phis = default_phis(demand.size) if phis is None else np.asarray(phis, dtype=float)
    off = policy[1:] == 0
    loads = demand * policy
    loads[0] = demand[0] + float(np.dot(phis[1:][off], demand[1:][off]))
    return NetworkState(loads, policy, slot)


def is_feasible(state: NetworkState, tol: float = FEASIBILITY_TOL) -> bool:
    return state.macro_load <= 1.0 + tol


def policy_count(s: int) -> int:
    if s < 0:
        raise ValueError("number of small cells must be non-negative")
    if s > 62:
        raise OverflowError(f"2**{s} policies overflow a signed 64-bit count")
    return 1 << s
