# Traffic traces: parse the bundled miniature CDR-style file, map grids to
# cells, and compare with the synthetic diurnal generator.
from pathlib import Path

import numpy as np

from cellswitch.traffic import build_trace, load_raw_csv, synthetic_trace

here = Path(__file__).resolve().parent
raw = load_raw_csv(here.parent / "tests" / "data" / "mini_raw.csv")
print(len(raw), "activity rows, grids", sorted({r.grid_id for r in raw}))

# two grids feed the macro cell, one grid per small cell; min-max is joint
trace = build_trace(raw, s=2, seed=3, slots=6)
print("cell -> grids:", trace.cell_grid_map)
print(np.round(trace.demands, 3))
print("matrix min/max:", trace.demands.min(), trace.demands.max())

# the synthetic generator: one day of 10-minute slots, quiet at night
syn = synthetic_trace(s=4, slots=144, seed=7)
hourly = syn.demands.reshape(24, 6, -1).mean(axis=1)
for h in range(0, 24, 3):
    print(f"{h:02d}:00  " + "  ".join(f"{v:.2f}" for v in hourly[h]))
print("mean demand:", round(float(syn.demands.mean()), 3))

# a denser day for stress tests
busy = synthetic_trace(s=4, slots=144, seed=7, midpoint=0.7)
print("busy-day mean demand:", round(float(busy.demands.mean()), 3))
