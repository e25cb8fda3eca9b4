"""Station layouts for the two evaluation scenarios and a per-method trace runner."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import benchmarks
from .agent import AgentConfig, WeightVectors, run_simulation, slot_result
from .metrics import SlotResult
from .network import apply_policy
from .power_model import (DEFAULT_PROFILES, BaseStation, BsType, PowerProfile,
                          build_stations, relative_capacities, with_zero_sleep)
from .traffic import TrafficTrace

# remainder cells go to the last types in this order: 13 -> 3, 3, 3, 4
SCENARIO_B_ORDER = (BsType.MICRO, BsType.RRH, BsType.PICO, BsType.FEMTO)


def type_counts(s: int, order: Sequence[BsType] = SCENARIO_B_ORDER) -> dict[BsType, int]:
    k = len(order)
    base, extra = divmod(s, k)
    return {t: base + (1 if i >= k - extra else 0) for i, t in enumerate(order)}


def scenario_a(s: int, profiles: dict[BsType, PowerProfile] | None = None) -> list[BaseStation]:
    """Homogeneous micro cells that draw nothing while asleep."""
    profiles = {**DEFAULT_PROFILES, **(profiles or {})}
    micro = with_zero_sleep(profiles[BsType.MICRO])
    return build_stations([BsType.MICRO] * s, {**profiles, BsType.MICRO: micro})


def scenario_b(s: int, profiles: dict[BsType, PowerProfile] | None = None) -> list[BaseStation]:
    """Micro, RRH, pico and femto cells in near-equal numbers, listed type by type."""
    types = [t for t, n in type_counts(s).items() for _ in range(n)]
    return build_stations(types, profiles)


def scenario_stations(name: str, s: int, profiles=None) -> list[BaseStation]:
    name = name.upper()
    if name == "A":
        return scenario_a(s, profiles)
    if name == "B":
        return scenario_b(s, profiles)
    raise ValueError(f"unknown scenario {name!r}")


def run_benchmark(method: str, trace: TrafficTrace, stations: Sequence[BaseStation],
                  kappa: float = 0.0, exhaustive_cap: int = benchmarks.EXHAUSTIVE_CAP) -> list[SlotResult]:
    phis = relative_capacities(stations)
    if method == "all_on":
        choose = benchmarks.all_on
    elif method == "all_off":
        choose = benchmarks.all_off
    elif method == "sorting":
        def choose(d):
            return benchmarks.sorting(d, phis)
    elif method == "exhaustive":
        def choose(d):
            return benchmarks.exhaustive(d, stations, phis, exhaustive_cap)
    else:
        raise ValueError(f"unknown benchmark {method!r}")
    results = []
    for t in range(trace.n_slots):
        d = trace.slot(t)
        results.append(slot_result(apply_policy(d, choose(d), phis, t), stations, kappa))
    return results


def run_method(method: str, trace: TrafficTrace, stations: Sequence[BaseStation],
               config: AgentConfig, seed: int,
               exhaustive_cap: int = benchmarks.EXHAUSTIVE_CAP) -> list[SlotResult]:
    if method == "vfa":
        results, _ = run_simulation(trace, stations, config, seed)
        return results
    return run_benchmark(method, trace, stations, config.kappa, exhaustive_cap)


def power_series(results: Sequence[SlotResult]) -> np.ndarray:
    return np.array([r.power_w for r in results])
