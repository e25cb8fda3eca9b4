"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``criterion N: PASS|FAIL`` line (collected again in
the terminal summary) and then asserts.
"""
import time
from dataclasses import replace

import numpy as np
import pytest

from cellswitch import benchmarks
from cellswitch.agent import AgentConfig, run_simulation
from cellswitch.cli import main, round_seeds
from cellswitch.metrics import normalized_throughput, throughput_oracle
from cellswitch.network import apply_policy
from cellswitch.power_model import (DEFAULT_PROFILES, BaseStation, BsType,
                                    delta_power_switch_on, network_power,
                                    profitability_threshold)
from cellswitch.scenarios import run_benchmark, scenario_a, scenario_b
from cellswitch.traffic import synthetic_trace

from conftest import ACCEPTANCE_LINES

LEARNING_FRACTION = 0.25
AGENT_S = (4, 8, 12)
ROUNDS = 25


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def slot_powers(stations, demand, policy):
    state = apply_policy(demand, policy)
    return network_power(stations, state.loads, state.statuses)


def test_criterion_1_threshold_sign_agreement():
    t0 = time.perf_counter()
    mc = BaseStation(0, BsType.MACRO, DEFAULT_PROFILES[BsType.MACRO])
    checked = agree = 0
    for t in (BsType.RRH, BsType.MICRO, BsType.PICO, BsType.FEMTO):
        sc = BaseStation(1, t, DEFAULT_PROFILES[t])
        th = profitability_threshold(sc, mc, 1.0)
        for k in range(101):
            lam = k / 100
            dp = delta_power_switch_on(sc, mc, 1.0, lam)
            if abs(dp) < 1e-9:
                continue
            checked += 1
            agree += (dp < 0) == (th is not None and lam > th)
    elapsed = time.perf_counter() - t0
    ok = agree == checked and elapsed < 1.0
    report(1, ok, f"{agree}/{checked} sign agreements, {elapsed:.3f} s")
    assert ok


def test_criterion_2_sorting_equals_exhaustive_scenario_a():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240601)
    mismatched = {}
    for s in range(2, 13):
        stations = scenario_a(s)
        demand = rng.uniform(0.0, 1.0, size=(100, s + 1))
        e_sort = sum(slot_powers(stations, d, benchmarks.sorting(d)) for d in demand)
        e_ex = sum(slot_powers(stations, d, benchmarks.exhaustive(d, stations)) for d in demand)
        if abs(e_sort - e_ex) > 1e-9 * e_ex:
            bad = sum(slot_powers(stations, d, benchmarks.sorting(d))
                      != slot_powers(stations, d, benchmarks.exhaustive(d, stations))
                      for d in demand)
            mismatched[s] = (bad, (e_sort - e_ex) / e_ex)
    elapsed = time.perf_counter() - t0
    ok = not mismatched and elapsed < 30.0
    detail = ", ".join(f"s={s}: {b} slots differ (rel {r:.2e})" for s, (b, r) in mismatched.items())
    report(2, ok, f"{detail or 'all s equal'}; {elapsed:.1f} s")
    assert ok


@pytest.fixture(scope="module")
def scenario_b_runs():
    """Per s: power, feasibility and throughput arrays (rounds x slots) for every method."""
    out = {}
    agent_time = 0.0
    cfg10 = AgentConfig(kappa=10.0)
    cfg0 = replace(cfg10, kappa=0.0)
    for s in AGENT_S:
        stations = scenario_b(s)
        runs = {k: [] for k in ("vfa", "vfa_k0", "exhaustive", "sorting", "all_on", "all_off")}
        for trace_seed, agent_seed in round_seeds(1234 + s, ROUNDS):
            trace = synthetic_trace(s, 144, trace_seed)
            t0 = time.perf_counter()
            runs["vfa"].append(run_simulation(trace, stations, cfg10, agent_seed)[0])
            runs["exhaustive"].append(run_benchmark("exhaustive", trace, stations, 10.0))
            agent_time += time.perf_counter() - t0
            runs["vfa_k0"].append(run_simulation(trace, stations, cfg0, agent_seed)[0])
            for m in ("sorting", "all_on", "all_off"):
                runs[m].append(run_benchmark(m, trace, stations, 10.0))
        out[s] = {m: {"power": np.array([[r.power_w for r in rd] for rd in rs]),
                      "feasible": np.array([[r.feasible for r in rd] for rd in rs]),
                      "tput": np.array([[r.tput_norm for r in rd] for rd in rs])}
                  for m, rs in runs.items()}
    out["agent_time"] = agent_time
    return out


def test_criterion_3_agent_near_optimal(scenario_b_runs):
    start = int(144 * LEARNING_FRACTION)
    fractions = {}
    for s in AGENT_S:
        vfa = scenario_b_runs[s]["vfa"]["power"].mean(axis=0)[start:]
        ex = scenario_b_runs[s]["exhaustive"]["power"].mean(axis=0)[start:]
        fractions[s] = float(np.mean(np.abs(vfa - ex) <= 0.10 * ex))
    elapsed = scenario_b_runs["agent_time"]
    ok = all(f >= 0.80 for f in fractions.values()) and elapsed < 300.0
    detail = ", ".join(f"s={s}: {f:.1%} of slots within 10%" for s, f in fractions.items())
    report(3, ok, f"{detail}; {elapsed:.0f} s")
    assert ok


def test_criterion_4_qos_under_penalty(scenario_b_runs):
    start = int(144 * LEARNING_FRACTION)
    parts = []
    ok = True
    for s in AGENT_S:
        f10 = 1 - scenario_b_runs[s]["vfa"]["feasible"][:, start:].mean()
        f0 = 1 - scenario_b_runs[s]["vfa_k0"]["feasible"][:, start:].mean()
        ok &= f10 <= 0.05 and f0 >= f10
        parts.append(f"s={s}: kappa=10 {f10:.2%}, kappa=0 {f0:.2%}")
    report(4, ok, "infeasible fraction " + "; ".join(parts))
    assert ok


def test_criterion_5_throughput_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(10_000):
        cap = float(rng.uniform(0.01, 100.0))
        required = float(rng.uniform(0.0, 3.0) * cap)
        n = int(rng.integers(1, 1000))
        per_user = throughput_oracle(required, cap, n) / cap
        per_cell = normalized_throughput([required / cap])
        worst = max(worst, abs(per_user - per_cell))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    report(5, ok, f"max deviation {worst:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_6_benchmark_orderings(scenario_b_runs):
    # power dominance is exact; throughput sums of the same demand taken in a
    # different order may differ by round-off, so allow 1e-12 there
    violations = []
    n = 0
    excess = 0.0
    for s in AGENT_S:
        r = scenario_b_runs[s]
        ex = r["exhaustive"]["power"]
        n += ex.size
        if np.any(ex > r["sorting"]["power"]):
            violations.append(f"s={s} exhaustive > sorting")
        if np.any(ex > r["all_on"]["power"]):
            violations.append(f"s={s} exhaustive > all_on")
        for m in ("vfa", "vfa_k0", "exhaustive", "sorting", "all_off"):
            diff = float(np.max(r[m]["tput"] - r["all_on"]["tput"]))
            excess = max(excess, diff)
            if diff > 1e-12:
                violations.append(f"s={s} {m} throughput above all_on by {diff:.2e}")
    ok = not violations
    report(6, ok, f"{n} slots checked, largest throughput excess {excess:.1e}"
                  + (": " + "; ".join(violations) if violations else ""))
    assert ok


def test_criterion_7_all_off_sign():
    energies = {}
    means = {}
    for s in (4, 28):
        stations = scenario_b(s)
        e_on = e_off = 0.0
        demand_means = []
        for trace_seed, _ in round_seeds(77 + s, ROUNDS):
            trace = synthetic_trace(s, 144, trace_seed, midpoint=0.7)
            demand_means.append(trace.demands.mean())
            e_on += sum(r.power_w for r in run_benchmark("all_on", trace, stations))
            e_off += sum(r.power_w for r in run_benchmark("all_off", trace, stations))
        energies[s] = (e_on, e_off)
        means[s] = float(np.mean(demand_means))
    high_load = all(m >= 0.6 for m in means.values())
    neg_small = energies[4][1] > energies[4][0]
    pos_large = energies[28][1] < energies[28][0]
    ok = high_load and neg_small and pos_large
    gains = {s: (on - off) / on * 100 for s, (on, off) in energies.items()}
    report(7, ok, f"mean demand {means[4]:.2f}/{means[28]:.2f}; all-OFF gain "
                  f"s=4 {gains[4]:+.1f}% (need < 0), s=28 {gains[28]:+.1f}% (need > 0)")
    assert ok


def test_criterion_8_determinism(tmp_path):
    configs = [
        ["run", "--scenario", "A", "--s", "4", "--rounds", "2", "--slots", "48"],
        ["run", "--scenario", "B", "--s", "6", "--rounds", "2", "--slots", "48", "--workers", "2"],
        ["sweep", "--scenario", "B", "--s", "3,5", "--rounds", "2", "--slots", "24"],
    ]
    differing = []
    n_files = 0
    for i, args in enumerate(configs):
        dirs = []
        for rep in range(2):
            d = tmp_path / f"c{i}_{rep}"
            assert main(args + ["--seed", "99", "--out", str(d)]) == 0
            dirs.append(d)
        files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
        other = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
        if files != other:
            differing.append(f"config {i}: file sets differ")
        for f in files:
            n_files += 1
            if (dirs[0] / f).read_bytes() != (dirs[1] / f).read_bytes():
                differing.append(f"config {i}: {f}")
    ok = not differing
    report(8, ok, f"{n_files} files compared" + (": " + ", ".join(differing) if differing else ""))
    assert ok
