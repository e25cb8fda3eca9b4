"""SARSA with a linear action-value approximation for small-cell switching.

The ON/OFF pattern of the small cells is read as a binary number (first
small cell = most significant bit). An action adds one of
``0, +-xi**0, +-xi**1, ..., +-xi**s`` to that number, so the agent moves
through the 2**s patterns using only 2(s+1)+1 actions. Each action keeps
its own weight vector over the features ``[P, load_0, ..., load_s]``.
Q-values estimate cost, so the greedy choice is the minimum.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .metrics import SlotResult, normalized_throughput
from .network import NetworkState, apply_policy, default_phis, is_feasible
from .power_model import BaseStation, PowerTable, network_power, relative_capacities
from .traffic import TrafficTrace


AFTERSTATE = "afterstate"
PER_ACTION = "per_action"


class TrainingDivergedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class AgentConfig:
    epsilon: float = 0.8
    alpha: float = 1e-7
    gamma: float = 0.9
    xi: int = 2
    j_min: int = 10
    omega: float = 5e-2
    j_rep: int = 10
    max_iter: int = 100
    kappa: float = 10.0
    epsilon_decay: float = 0.95
    epsilon_min: float = 0.0
    value_model: str = AFTERSTATE
    restart_on_overload: bool = True

    def epsilon_at(self, episode: int) -> float:
        return max(self.epsilon_min, self.epsilon * self.epsilon_decay ** episode)

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must lie in [0, 1)")
        if int(self.xi) != self.xi or self.xi < 2:
            raise ValueError("xi must be an integer >= 2")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.max_iter >= self.j_min >= 1:
            raise ValueError("need max_iter >= j_min >= 1")
        if self.j_rep < 1:
            raise ValueError("j_rep must be at least 1")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.value_model not in (AFTERSTATE, PER_ACTION):
            raise ValueError(f"unknown value model {self.value_model!r}")


# ---------------------------------------------------------------------------
# status encoding and actions
# ---------------------------------------------------------------------------

def encode_status(statuses: Sequence[int]) -> int:
    """Small-cell ON/OFF bits as an integer, first cell most significant."""
    code = 0
    for bit in statuses:
        if bit not in (0, 1):
            raise ValueError(f"status bits must be 0 or 1, got {bit}")
        code = (code << 1) | int(bit)
    return code


def decode_status(code: int, s: int) -> tuple[int, ...]:
    if not 0 <= code < (1 << s) or (s == 0 and code != 0):
        raise ValueError(f"status code {code} out of range for s={s}")
    return tuple((code >> (s - 1 - i)) & 1 for i in range(s))


def action_set(s: int, xi: int = 2) -> tuple[int, ...]:
    """``(0, +xi**0, -xi**0, +xi**1, -xi**1, ..., +xi**s, -xi**s)``."""
    actions = [0]
    for k in range(s + 1):
        actions += [xi ** k, -xi ** k]
    return tuple(actions)


def valid_actions(code: int, s: int, actions: Sequence[int]) -> list[int]:
    """Indices of the actions that keep the status code inside [0, 2**s - 1]."""
    top = (1 << s) - 1
    return [i for i, a in enumerate(actions) if 0 <= code + a <= top]


# ---------------------------------------------------------------------------
# value approximation
# ---------------------------------------------------------------------------

def features(state: NetworkState, stations: Sequence[BaseStation]) -> np.ndarray:
    p = network_power(stations, state.loads, state.statuses)
    return np.concatenate(([p], state.loads))


def q_hat(x, theta_a) -> float:
    x, theta_a = np.asarray(x, dtype=float), np.asarray(theta_a, dtype=float)
    if x.shape != theta_a.shape:
        raise ValueError(f"feature length {x.size} != weight length {theta_a.size}")
    return float(x @ theta_a)


def cost(state: NetworkState, stations: Sequence[BaseStation], kappa: float,
         power: float | None = None) -> float:
    """Network power plus ``s * kappa * load_0`` when the macro cell is overloaded."""
    if power is None:
        power = network_power(stations, state.loads, state.statuses)
    s = state.n_small_cells
    overloaded = state.macro_load > 1.0
    return power + (s * kappa * state.macro_load if overloaded else 0.0)


def select_action(q_values: Sequence[float], epsilon: float, rng: np.random.Generator) -> int:
    """Position of the chosen entry of ``q_values``.

    Explores uniformly with probability ``epsilon``, otherwise takes the
    lowest estimated cost; ties go to the earliest position.
    """
    if len(q_values) == 0:
        raise ValueError("no actions to choose from")
    if rng.random() < epsilon:
        return int(rng.integers(len(q_values)))
    return int(np.argmin(q_values))


def sarsa_update(theta_a, x, c: float, x_next, theta_a_next,
                 alpha: float, gamma: float) -> np.ndarray:
    """One semi-gradient step of ``0.5 * (target - x @ theta_a)**2``.

    The target ``c + gamma * x_next @ theta_a_next`` is held fixed.
    """
    theta_a = np.asarray(theta_a, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        target = c + gamma * q_hat(x_next, theta_a_next)
        new = theta_a + alpha * (target - q_hat(x, theta_a)) * x
    if not np.all(np.isfinite(new)):
        raise TrainingDivergedError("weights became non-finite; lower alpha")
    return new


def weight_shape(s: int, xi: int, value_model: str) -> tuple[int, int]:
    rows = len(action_set(s, xi)) if value_model == PER_ACTION else 1
    return rows, s + 2


@dataclass
class WeightVectors:
    """One weight vector per action, each over ``s + 2`` features."""

    theta: np.ndarray

    @classmethod
    def zeros(cls, s: int, xi: int = 2, value_model: str = AFTERSTATE) -> "WeightVectors":
        return cls(np.zeros(weight_shape(s, xi, value_model)))

    def copy(self) -> "WeightVectors":
        return WeightVectors(self.theta.copy())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["action_index", "feature_index", "value"])
            for a, row in enumerate(self.theta):
                for f, v in enumerate(row):
                    w.writerow([a, f, repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "WeightVectors":
        with open(path, newline="") as fh:
            rows = [(int(a), int(f), float(v)) for a, f, v in list(csv.reader(fh))[1:]]
        if not rows:
            raise ValueError(f"{path}: no weights")
        theta = np.zeros((max(r[0] for r in rows) + 1, max(r[1] for r in rows) + 1))
        for a, f, v in rows:
            theta[a, f] = v
        if not np.all(np.isfinite(theta)):
            raise ValueError(f"{path}: non-finite weight")
        return cls(theta)


# ---------------------------------------------------------------------------
# episodes
# ---------------------------------------------------------------------------

@dataclass
class EpisodeResult:
    policy: np.ndarray
    state: NetworkState
    costs: list[float] = field(default_factory=list)
    iterations: int = 0


class _Env:
    """Features and cost of every status code at one slot's fixed demand.

    Works on raw arrays and memoizes per code; the power feature is divided
    by :func:`power_scale`.
    """

    def __init__(self, demand, stations, phis, kappa, slot=0):
        self.demand = np.asarray(demand, dtype=float)
        self.stations = stations
        self.s = self.demand.size - 1
        self.phis = default_phis(self.s + 1) if phis is None else np.asarray(phis, dtype=float)
        self.kappa = kappa
        self.slot = slot
        self.table = PowerTable.from_stations(stations)
        self.power_scale = power_scale(stations)
        self._offload = self.phis * self.demand
        self._cache: dict[int, tuple[np.ndarray, float]] = {}

    def policy(self, code: int) -> np.ndarray:
        return np.array((1,) + decode_status(code, self.s), dtype=np.int8)

    def observe(self, code: int) -> tuple[np.ndarray, float]:
        hit = self._cache.get(code)
        if hit is None:
            policy = self.policy(code)
            loads = self.demand * policy
            loads[0] = self.demand[0] + self._offload[1:] @ (1 - policy[1:])
            p = float(self.table.power(loads, policy))
            c = p + (self.s * self.kappa * loads[0] if loads[0] > 1.0 else 0.0)
            x = np.concatenate(([p / self.power_scale], loads))
            hit = self._cache[code] = (x, c)
        return hit

    def state(self, code: int) -> NetworkState:
        return apply_policy(self.demand, self.policy(code), self.phis, self.slot)


def power_scale(stations: Sequence[BaseStation]) -> float:
    """Full-load all-ON power, used to bring the power feature to order 1."""
    return float(sum(st.profile.p_op + st.profile.slope for st in stations))


def run_episode(demand, config: AgentConfig, weights: WeightVectors,
                rng: np.random.Generator, stations: Sequence[BaseStation],
                phis=None, start_policy=None, slot: int = 0) -> EpisodeResult:
    """Learn on one slot's demand; ``weights`` are updated in place.

    The episode starts from ``start_policy`` (all-ON if omitted) and returns
    the policy held when it stops.
    """
    env = _Env(demand, stations, phis, config.kappa, slot)
    s = env.s
    actions = action_set(s, config.xi)
    theta = weights.theta
    expected = weight_shape(s, config.xi, config.value_model)
    if theta.shape != expected:
        raise ValueError(f"weights have shape {theta.shape}, expected {expected}")
    # the power feature is divided by power_scale; rescaling alpha keeps the
    # step along that feature identical to alpha applied to raw watts
    alpha = config.alpha * env.power_scale ** 2
    per_action = config.value_model == PER_ACTION
    candidates: dict[int, tuple[list[int], np.ndarray, np.ndarray]] = {}

    def choose(code):
        hit = candidates.get(code)
        if hit is None:
            valid = valid_actions(code, s, actions)
            if per_action:
                rows = np.array(valid)
                feats = np.tile(env.observe(code)[0], (len(valid), 1))
            else:
                rows = np.zeros(len(valid), dtype=int)
                feats = np.array([env.observe(code + actions[i])[0] for i in valid])
            hit = candidates[code] = (valid, rows, feats)
        valid, rows, feats = hit
        q = np.einsum("ij,ij->i", theta[rows], feats)
        k = select_action(q, config.epsilon, rng)
        return valid[k], rows[k], feats[k]

    code = (1 << s) - 1 if start_policy is None else encode_status(list(start_policy)[1:])
    a, row, x = choose(code)

    costs: list[float] = []
    c_min, c_max = np.inf, -np.inf
    repeats = 0
    j = 0
    while j < config.max_iter:
        j += 1
        code = code + actions[a]
        c = env.observe(code)[1]
        costs.append(c)
        c_min, c_max = min(c_min, c), max(c_max, c)

        a_next, row_next, x_next = choose(code)
        theta[row] = sarsa_update(theta[row], x, c, x_next, theta[row_next],
                                  alpha, config.gamma)
        a, row, x = a_next, row_next, x_next

        if j > config.j_min:
            spread = c_max - c_min
            scaled = 0.0 if spread == 0 else (c - c_min) / spread
            if scaled <= config.omega and len(costs) > 1 and c == costs[-2]:
                repeats += 1
            else:
                repeats = 0
            if repeats >= config.j_rep:
                break

    state = env.state(code)
    return EpisodeResult(state.statuses.copy(), state, costs, j)


def slot_result(state: NetworkState, stations: Sequence[BaseStation], kappa: float) -> SlotResult:
    p = network_power(stations, state.loads, state.statuses)
    return SlotResult(
        slot=state.slot,
        policy=tuple(int(v) for v in state.statuses),
        power_w=p,
        cost=cost(state, stations, kappa, power=p),
        feasible=is_feasible(state),
        tput_norm=normalized_throughput(state),
    )


def run_simulation(trace: TrafficTrace, stations: Sequence[BaseStation],
                   config: AgentConfig, seed: int,
                   weights: WeightVectors | None = None) -> tuple[list[SlotResult], WeightVectors]:
    """Online learning over the trace, one episode per slot.

    Weights carry over between slots, and each episode starts from the
    previous slot's final policy (all-ON for the first slot). With
    ``restart_on_overload`` a carried-over policy that would overload the
    macro cell under the new demand is replaced by all-ON: one action at a
    time, the agent cannot climb out of such a state through the states
    between, which cost more while the macro cell stays overloaded.
    """
    s = trace.n_small_cells
    if len(stations) != s + 1:
        raise ValueError(f"trace has {s + 1} cells, got {len(stations)} stations")
    phis = relative_capacities(stations)
    rng = np.random.default_rng(seed)
    weights = WeightVectors.zeros(s, config.xi, config.value_model) if weights is None else weights
    policy = None
    results = []
    for t in range(trace.n_slots):
        cfg = replace(config, epsilon=config.epsilon_at(t))
        d = trace.slot(t)
        if (config.restart_on_overload and policy is not None
                and not is_feasible(apply_policy(d, policy, phis))):
            policy = None
        ep = run_episode(d, cfg, weights, rng, stations, phis, policy, slot=t)
        policy = ep.policy
        results.append(slot_result(ep.state, stations, config.kappa))
    return results, weights
