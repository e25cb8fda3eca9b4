"""Energy, gain over all-ON, and normalized network throughput."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import NetworkState
from .traffic import SLOT_SECONDS


@dataclass(frozen=True)
class SlotResult:
    slot: int
    policy: tuple[int, ...]
    power_w: float
    cost: float
    feasible: bool
    tput_norm: float


@dataclass(frozen=True)
class RunSummary:
    method: str
    s: int
    energy_j: float
    gain_pct: float
    mean_tput: float
    infeasible_slots: int


def energy(results: Sequence[SlotResult], slot_seconds: float = SLOT_SECONDS) -> float:
    """Joules, holding each slot's power constant over the slot."""
    if not results:
        raise ValueError("no slot results to integrate")
    return float(sum(r.power_w for r in results) * slot_seconds)


def gain(e_on: float, e_x: float) -> float:
    """Percentage energy saved relative to the all-ON baseline (negative = worse)."""
    if not e_on > 0:
        raise ValueError(f"baseline energy must be positive, got {e_on}")
    return (e_on - e_x) / e_on * 100.0


def cell_throughput(loads) -> np.ndarray:
    """Per-cell normalized throughput: a cell delivers at most its capacity."""
    loads = np.asarray(loads, dtype=float)
    if np.any(loads < 0):
        raise ValueError("loads must be non-negative")
    return np.minimum(loads, 1.0)


def normalized_throughput(state: NetworkState | Sequence[float]) -> float:
    loads = state.loads if isinstance(state, NetworkState) else state
    return float(cell_throughput(loads).sum())


def throughput_oracle(required: float, provided_cap: float, n_users: int) -> float:
    """Cell throughput built up from per-user rates.

    When demand exceeds capacity every user's rate is cut by an equal share
    of the excess. Only used to check :func:`normalized_throughput`.
    """
    if n_users < 1:
        raise ValueError("a cell needs at least one user")
    if required < 0 or provided_cap < 0:
        raise ValueError("throughputs must be non-negative")
    rate = required / n_users
    penalty = (required - provided_cap) / n_users if required > provided_cap else 0.0
    return (rate - penalty) * n_users


def summarize(method: str, s: int, results: Sequence[SlotResult], e_on: float,
              slot_seconds: float = SLOT_SECONDS) -> RunSummary:
    e = energy(results, slot_seconds)
    return RunSummary(
        method=method,
        s=s,
        energy_j=e,
        gain_pct=gain(e_on, e),
        mean_tput=float(np.mean([r.tput_norm for r in results])),
        infeasible_slots=sum(not r.feasible for r in results),
    )
