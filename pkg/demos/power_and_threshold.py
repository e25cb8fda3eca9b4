# Power model walk-through: what each cell type draws, and the load above
# which keeping a small cell on beats handing its traffic to the macro cell.
import numpy as np

from cellswitch.power_model import (DEFAULT_PROFILES, BaseStation, BsType, bs_power,
                                    delta_power_switch_on, profitability_threshold)

macro = BaseStation(0, BsType.MACRO, DEFAULT_PROFILES[BsType.MACRO])

# per-type draw when idle-on, fully loaded and asleep
for t, p in DEFAULT_PROFILES.items():
    print(f"{t.value:6s} on@0 {bs_power(p, 0, True):7.2f} W   on@1 {bs_power(p, 1, True):7.2f} W"
          f"   sleep {bs_power(p, 0, False):6.2f} W")

# an overloaded macro cell is clamped at its full-load draw
print("macro at load 1.4:", bs_power(macro.profile, 1.4, True), "W")

# thresholds with equal bandwidth (phi = 1)
print()
for t in (BsType.RRH, BsType.MICRO, BsType.PICO, BsType.FEMTO):
    sc = BaseStation(1, t, DEFAULT_PROFILES[t])
    th = profitability_threshold(sc, macro)
    print(f"{t.value:6s} threshold {th:.4f}")

# the power change from switching a micro cell on crosses zero at its threshold
micro = BaseStation(1, BsType.MICRO, DEFAULT_PROFILES[BsType.MICRO])
lam = np.linspace(0, 1, 11)
dp = [delta_power_switch_on(micro, macro, 1.0, x) for x in lam]
print()
for x, d in zip(lam, dp):
    print(f"micro load {x:.1f}: switching on changes power by {d:+7.2f} W")
