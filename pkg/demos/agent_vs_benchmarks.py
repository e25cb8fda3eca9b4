# One simulated day in the heterogeneous layout: the learning agent against
# all-ON, blind all-OFF, load sorting and exhaustive search.
import numpy as np

from cellswitch.agent import AgentConfig, run_simulation
from cellswitch.metrics import energy, gain
from cellswitch.scenarios import run_benchmark, scenario_b
from cellswitch.traffic import synthetic_trace

s = 8
stations = scenario_b(s)
print("small cells:", [st.bs_type.value for st in stations[1:]])

trace = synthetic_trace(s, 144, seed=11)
config = AgentConfig(kappa=10.0)

results = {"vfa": run_simulation(trace, stations, config, seed=12)[0]}
for m in ("all_on", "all_off", "sorting", "exhaustive"):
    results[m] = run_benchmark(m, trace, stations, config.kappa)

e_on = energy(results["all_on"])
for m, rs in results.items():
    late = rs[36:]
    print(f"{m:10s} gain {gain(e_on, energy(rs)):6.2f}%   infeasible slots {sum(not r.feasible for r in rs):3d}"
          f"   mean throughput {np.mean([r.tput_norm for r in late]):.3f}")

# how close the agent gets to the optimum once the first quarter of the day is over
vfa = np.array([r.power_w for r in results["vfa"]])[36:]
best = np.array([r.power_w for r in results["exhaustive"]])[36:]
print("slots within 10% of exhaustive:", f"{np.mean(np.abs(vfa - best) <= 0.1 * best):.0%}")

# without the overload penalty the agent happily overloads the macro cell
free = run_simulation(trace, stations, AgentConfig(kappa=0.0), seed=12)[0]
print("kappa=0 infeasible slots:", sum(not r.feasible for r in free))
