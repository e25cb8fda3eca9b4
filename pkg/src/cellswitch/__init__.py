"""Energy-saving small-cell switching for control/data-separated cellular networks."""
from .power_model import (BaseStation, BsType, DEFAULT_PROFILES, PowerProfile, bs_power,
                          build_stations, delta_power_switch_on, network_power,
                          profitability_threshold, relative_capacities)
from .network import NetworkState, apply_policy, is_feasible, policy_count
from .traffic import (RawActivity, TrafficTrace, build_trace, load_raw_csv,
                      synthetic_trace)
from .metrics import (RunSummary, SlotResult, energy, gain, normalized_throughput,
                      throughput_oracle)
from .agent import AgentConfig, WeightVectors, run_episode, run_simulation
from .benchmarks import all_off, all_on, exhaustive, sorting
from .scenarios import run_benchmark, scenario_a, scenario_b

__version__ = "0.1.0"
