"""EARTH-style base station power model.

A station that is ON draws ``p_op + eta * load * p_tx``; a sleeping station
draws ``p_sleep``. Loads above 1 (an overloaded macro cell under the blind
all-OFF policy) are clamped to 1 for power purposes only.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np


class BsType(enum.Enum):
    MACRO = "macro"
    RRH = "rrh"
    MICRO = "micro"
    PICO = "pico"
    FEMTO = "femto"


@dataclass(frozen=True)
class PowerProfile:
    """Power constants shared by all stations of one type (watts)."""

    eta: float
    p_tx: float
    p_op: float
    p_sleep: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.p_tx < 0:
            raise ValueError(f"p_tx must be non-negative, got {self.p_tx}")
        if not self.p_op > self.p_sleep >= 0:
            raise ValueError(
                f"need p_op > p_sleep >= 0, got p_op={self.p_op}, p_sleep={self.p_sleep}")

    @property
    def slope(self) -> float:
        """Watts added per unit of load while ON."""
        return self.eta * self.p_tx


DEFAULT_PROFILES: dict[BsType, PowerProfile] = {
    BsType.MACRO: PowerProfile(eta=4.7, p_tx=20.0, p_op=130.0, p_sleep=75.0),
    BsType.RRH: PowerProfile(eta=2.8, p_tx=20.0, p_op=84.0, p_sleep=56.0),
    BsType.MICRO: PowerProfile(eta=2.6, p_tx=6.3, p_op=56.0, p_sleep=39.0),
    BsType.PICO: PowerProfile(eta=4.0, p_tx=0.13, p_op=6.8, p_sleep=4.3),
    BsType.FEMTO: PowerProfile(eta=8.0, p_tx=0.05, p_op=4.8, p_sleep=2.9),
}

# bandwidth in MHz; both tiers use 20 MHz by default, so phi = 1
DEFAULT_CAPACITY_MHZ = 20.0


@dataclass(frozen=True)
class BaseStation:
    """One cell. ``index`` 0 is always the macro cell."""

    index: int
    bs_type: BsType
    profile: PowerProfile
    capacity: float = DEFAULT_CAPACITY_MHZ

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if (self.bs_type is BsType.MACRO) != (self.index == 0):
            raise ValueError("the macro cell must sit at index 0 and only there")

    @property
    def is_macro(self) -> bool:
        return self.index == 0


def build_stations(sc_types: Sequence[BsType],
                   profiles: Mapping[BsType, PowerProfile] | None = None,
                   macro_capacity: float = DEFAULT_CAPACITY_MHZ,
                   sc_capacity: float = DEFAULT_CAPACITY_MHZ) -> list[BaseStation]:
    """Macro cell followed by one small cell per entry of ``sc_types``."""
    profiles = {**DEFAULT_PROFILES, **(profiles or {})}
    stations = [BaseStation(0, BsType.MACRO, profiles[BsType.MACRO], macro_capacity)]
    for i, t in enumerate(sc_types, start=1):
        if t is BsType.MACRO:
            raise ValueError("small cells cannot be of macro type")
        stations.append(BaseStation(i, t, profiles[t], sc_capacity))
    return stations


def with_zero_sleep(profile: PowerProfile) -> PowerProfile:
    return replace(profile, p_sleep=0.0)


def bs_power(profile: PowerProfile, load: float, is_on: bool) -> float:
    if load < 0:
        raise ValueError(f"load must be non-negative, got {load}")
    if not is_on:
        if load != 0:
            raise ValueError("a sleeping station cannot carry load")
        return profile.p_sleep
    return profile.p_op + profile.slope * min(load, 1.0)


def network_power(stations: Sequence[BaseStation], loads: Sequence[float],
                  statuses: Sequence[int]) -> float:
    """Total power of the network: sum of per-station power."""
    if not (len(stations) == len(loads) == len(statuses)):
        raise ValueError(
            f"length mismatch: {len(stations)} stations, {len(loads)} loads, "
            f"{len(statuses)} statuses")
    # fsum: exact, so equal multisets of station terms give equal totals
    return math.fsum(bs_power(st.profile, float(lam), bool(d))
                     for st, lam, d in zip(stations, loads, statuses))


@dataclass(frozen=True)
class PowerTable:
    """Per-station constants as arrays, for vectorized power evaluation."""

    p_op: np.ndarray
    p_sleep: np.ndarray
    slope: np.ndarray

    @classmethod
    def from_stations(cls, stations: Sequence[BaseStation]) -> "PowerTable":
        return cls(
            p_op=np.array([st.profile.p_op for st in stations], dtype=float),
            p_sleep=np.array([st.profile.p_sleep for st in stations], dtype=float),
            slope=np.array([st.profile.slope for st in stations], dtype=float),
        )

    def power(self, loads, statuses) -> np.ndarray:
        """Network power for one state or a batch of states (last axis = stations)."""
        loads = np.asarray(loads, dtype=float)
        on = np.asarray(statuses).astype(bool)
        per_bs = np.where(on, self.p_op + self.slope * np.minimum(loads, 1.0), self.p_sleep)
        return per_bs.sum(axis=-1)


def profitability_threshold(sc: BaseStation, mc: BaseStation, phi: float = 1.0) -> float | None:
    """Load above which keeping ``sc`` ON uses less power than offloading it.

    Returns None when the macro cell is no more efficient per unit of load
    than the small cell, in which case no such load exists.
    """
    if sc.is_macro:
        raise ValueError("the macro cell is never switched off")
    denom = phi * mc.profile.slope - sc.profile.slope
    if denom <= 0:
        return None
    return (sc.profile.p_op - sc.profile.p_sleep) / denom


def delta_power_switch_on(sc: BaseStation, mc: BaseStation, phi: float,
                          sc_load_after_on: float) -> float:
    """Change in network power from switching ``sc`` on, everything else frozen.

    Negative means switching on saves power.
    """
    lam = sc_load_after_on
    if not 0 <= lam <= 1:
        raise ValueError(f"small-cell load must lie in [0, 1], got {lam}")
    p, m = sc.profile, mc.profile
    return p.p_op + p.eta * lam * p.p_tx - m.eta * phi * lam * m.p_tx - p.p_sleep


def relative_capacities(stations: Sequence[BaseStation]) -> np.ndarray:
    """``phi_j = C_j / C_0`` for every cell (1 for the macro cell itself)."""
    c0 = stations[0].capacity
    return np.array([st.capacity / c0 for st in stations], dtype=float)
