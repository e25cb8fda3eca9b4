"""Traffic traces: CDR-style activity CSV ingestion and a synthetic generator.

Raw activity comes per grid square and 10-minute slot as separate call, SMS
and internet levels. A trace assigns two random grids to the macro cell and
one grid to every small cell, then min-max normalizes all cell series
together so the whole matrix spans [0, 1].
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SLOTS_PER_DAY = 144
SLOT_SECONDS = 600.0
MACRO_GRIDS = 2

RAW_HEADER = ["grid_id", "slot", "call", "sms", "internet"]


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RawActivity:
    grid_id: int
    slot: int
    call: float
    sms: float
    internet: float

    @property
    def total(self) -> float:
        return self.call + self.sms + self.internet


@dataclass(frozen=True, eq=False)
class TrafficTrace:
    """Native demand per slot and cell, as load factors in [0, 1].

    ``demands[t, 0]`` is the macro cell; columns 1..s are the small cells.
    ``cell_grid_map[j]`` lists the raw grid ids feeding cell j (empty for
    synthetic traces).
    """

    demands: np.ndarray
    slot_seconds: float = SLOT_SECONDS
    cell_grid_map: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        d = np.array(self.demands, dtype=float)
        if d.ndim != 2 or d.shape[0] == 0 or d.shape[1] == 0:
            raise ValueError("demands must be a non-empty slots x cells matrix")
        if np.any(d < 0) or np.any(d > 1) or not np.all(np.isfinite(d)):
            raise ValueError("demands must lie in [0, 1]")
        d.setflags(write=False)
        object.__setattr__(self, "demands", d)

    @property
    def n_slots(self) -> int:
        return self.demands.shape[0]

    @property
    def n_small_cells(self) -> int:
        return self.demands.shape[1] - 1

    def slot(self, t: int) -> np.ndarray:
        return self.demands[t]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["slot"] + [f"cell_{j}" for j in range(self.demands.shape[1])])
            for t, row in enumerate(self.demands):
                w.writerow([t] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, slot_seconds: float = SLOT_SECONDS) -> "TrafficTrace":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if len(rows) < 2:
            raise TraceFormatError(f"{path}: no trace rows")
        body = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)
        return cls(body, slot_seconds)


def _field(value: str, name: str, lineno: int) -> float:
    value = value.strip()
    if value == "":
        return 0.0
    try:
        x = float(value)
    except ValueError:
        raise TraceFormatError(f"line {lineno}: {name}={value!r} is not a number") from None
    if x < 0:
        raise TraceFormatError(f"line {lineno}: {name} must be non-negative")
    return x


def load_raw_csv(path) -> list[RawActivity]:
    """Parse a ``grid_id,slot,call,sms,internet`` file. Blank activity fields read as 0."""
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path}: empty file")
        if [h.strip() for h in header] != RAW_HEADER:
            raise TraceFormatError(f"{path}: expected header {','.join(RAW_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise TraceFormatError(f"line {lineno}: expected 5 fields, got {len(row)}")
            try:
                grid, slot = int(row[0]), int(row[1])
            except ValueError:
                raise TraceFormatError(f"line {lineno}: grid_id and slot must be integers") from None
            records.append(RawActivity(grid, slot, *(_field(v, n, lineno)
                                                     for v, n in zip(row[2:], RAW_HEADER[2:]))))
    if not records:
        raise TraceFormatError(f"{path}: no data rows")
    return records


def grid_series(raw: Sequence[RawActivity]) -> dict[int, np.ndarray]:
    """Combined activity per grid, indexed by consecutive slot.

    Duplicate (grid, slot) rows are summed. Slot indices of each grid must
    form a contiguous run.
    """
    per_grid: dict[int, dict[int, float]] = {}
    for r in raw:
        slots = per_grid.setdefault(r.grid_id, {})
        slots[r.slot] = slots.get(r.slot, 0.0) + r.total
    out = {}
    for grid, slots in sorted(per_grid.items()):
        keys = sorted(slots)
        if keys[-1] - keys[0] + 1 != len(keys):
            raise TraceFormatError(f"grid {grid}: slot indices are not contiguous")
        out[grid] = np.array([slots[k] for k in keys], dtype=float)
    return out


def joint_minmax(series: np.ndarray) -> np.ndarray:
    """Scale the whole matrix to [0, 100] with one shared min and max.

    A constant matrix carries no load signal and maps to all zeros.
    """
    lo, hi = float(series.min()), float(series.max())
    if hi == lo:
        return np.zeros_like(series, dtype=float)
    return (series - lo) / (hi - lo) * 100.0


def build_trace(raw: Sequence[RawActivity], s: int, seed: int,
                slots: int = SLOTS_PER_DAY) -> TrafficTrace:
    series = grid_series(raw)
    eligible = [g for g, v in series.items() if v.size >= slots]
    need = s + MACRO_GRIDS
    if len(eligible) < need:
        raise ValueError(f"need {need} grids with at least {slots} slots, found {len(eligible)}")
    rng = np.random.default_rng(seed)
    picked = [int(g) for g in rng.choice(eligible, size=need, replace=False)]
    mapping = (tuple(picked[:MACRO_GRIDS]),) + tuple((g,) for g in picked[MACRO_GRIDS:])
    cols = [sum(series[g][:slots] for g in grids) for grids in mapping]
    demands = joint_minmax(np.column_stack(cols)) / 100.0
    return TrafficTrace(demands, SLOT_SECONDS, mapping)


def synthetic_trace(s: int, slots: int = SLOTS_PER_DAY, seed: int = 0, *,
                    midpoint: float = 0.35, amplitude: tuple[float, float] = (0.1, 0.3),
                    noise: float = 0.05, period: int = SLOTS_PER_DAY,
                    phase_spread: float = np.pi / 3) -> TrafficTrace:
    """Diurnal sinusoid per cell with random amplitude and phase, plus uniform noise.

    Cell j gets ``midpoint - a_j * cos(2*pi*t/period + p_j) + e_{t,j}`` with
    ``a_j ~ U(amplitude)``, ``p_j ~ U(-phase_spread, phase_spread)`` and
    ``e ~ U(-noise, noise)``, clamped to [0, 1]. Without clamping the
    mean over a whole period is ``midpoint`` up to the noise term.
    """
    if slots < 1:
        raise ValueError("slots must be at least 1")
    if s < 0:
        raise ValueError("number of small cells must be non-negative")
    rng = np.random.default_rng(seed)
    n = s + 1
    amp = rng.uniform(amplitude[0], amplitude[1], size=n)
    phase = rng.uniform(-phase_spread, phase_spread, size=n)
    t = np.arange(slots)[:, None]
    base = midpoint - amp * np.cos(2 * np.pi * t / period + phase)
    eps = rng.uniform(-noise, noise, size=(slots, n))
    return TrafficTrace(np.clip(base + eps, 0.0, 1.0), SLOT_SECONDS)
