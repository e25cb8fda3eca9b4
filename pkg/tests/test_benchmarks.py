import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cellswitch.benchmarks import (SearchTooLargeError, all_off, all_on, exhaustive,
                                   sorting, status_matrix)
from cellswitch.network import apply_policy, is_feasible
from cellswitch.power_model import (BsType, build_stations, network_power,
                                    profitability_threshold)
from cellswitch.scenarios import scenario_a, scenario_b


def power_of(policy, demand, stations):
    state = apply_policy(demand, policy)
    return network_power(stations, state.loads, state.statuses)


def brute_force(demand, stations):
    # plain enumeration with itertools as an independent oracle
    best = None
    for bits in itertools.product((0, 1), repeat=len(demand) - 1):
        policy = (1,) + bits
        state = apply_policy(demand, policy)
        if not is_feasible(state):
            continue
        p = network_power(stations, state.loads, state.statuses)
        if best is None or p < best[0]:
            best = (p, policy)
    return best


demands = st.integers(0, 7).flatmap(
    lambda s: st.lists(st.floats(0, 1), min_size=s + 1, max_size=s + 1))


def test_all_on_and_off():
    d = [0.2, 0.1, 0.3, 0.4, 0.5]
    np.testing.assert_array_equal(all_on(d), [1, 1, 1, 1, 1])
    np.testing.assert_array_equal(all_off(d), [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(all_off([0.3]), all_on([0.3]))


def test_all_off_blind_overload():
    state = apply_policy([0.5, 0.4, 0.3], all_off([0.5, 0.4, 0.3]))
    assert not is_feasible(state)


def test_all_off_zero_demand_power():
    stations = scenario_b(4)
    d = np.zeros(5)
    expected = 130.0 + sum(st.profile.p_sleep for st in stations[1:])
    assert power_of(all_off(d), d, stations) == pytest.approx(expected)


def test_sorting_hand_trace():
    np.testing.assert_array_equal(sorting([0.5, 0.3, 0.1, 0.4]), [1, 0, 0, 1])


def test_sorting_edge_cases():
    np.testing.assert_array_equal(sorting(np.zeros(4)), [1, 0, 0, 0])
    np.testing.assert_array_equal(sorting([1.0, 0.2, 0.3]), [1, 1, 1])
    with pytest.raises(ValueError):
        sorting([1.2, 0.0])


def test_sorting_skips_and_continues():
    # 0.3 does not fit after 0.2, but the zero-load cell after it still does
    np.testing.assert_array_equal(sorting([0.6, 0.2, 0.3, 0.0]), [1, 0, 1, 0])


def test_sorting_ties_by_index():
    np.testing.assert_array_equal(sorting([0.8, 0.2, 0.2]), [1, 0, 1])


@given(demands)
def test_sorting_feasible(d):
    assert is_feasible(apply_policy(d, sorting(d)))


def test_status_matrix_msb_first():
    m = status_matrix(3)
    np.testing.assert_array_equal(m[1], [0, 0, 1])
    np.testing.assert_array_equal(m[6], [1, 1, 0])
    assert status_matrix(0).shape == (1, 0)


def test_exhaustive_threshold_examples():
    stations = build_stations([BsType.MICRO])
    assert profitability_threshold(stations[1], stations[0]) == pytest.approx(0.2190, abs=1e-4)
    np.testing.assert_array_equal(exhaustive([0.2, 0.1], stations), [1, 0])
    np.testing.assert_array_equal(exhaustive([0.2, 0.5], stations), [1, 1])


def test_exhaustive_zero_demand_scenario_a():
    stations = scenario_a(5)
    d = np.zeros(6)
    policy = exhaustive(d, stations)
    np.testing.assert_array_equal(policy, [1, 0, 0, 0, 0, 0])
    assert power_of(policy, d, stations) == 130.0


def test_exhaustive_cap():
    with pytest.raises(SearchTooLargeError, match="15"):
        exhaustive(np.zeros(17), scenario_a(16))


def test_exhaustive_overloaded_macro_returns_all_on():
    np.testing.assert_array_equal(exhaustive([1.05, 0.0], scenario_a(1)), [1, 1])


@settings(max_examples=60, deadline=None)
@given(demands, st.sampled_from(["A", "B"]))
def test_exhaustive_matches_brute_force(d, scenario):
    s = len(d) - 1
    stations = scenario_a(s) if scenario == "A" else scenario_b(s)
    policy = exhaustive(d, stations)
    p, _ = brute_force(d, stations)
    assert is_feasible(apply_policy(d, policy))
    assert power_of(policy, d, stations) == pytest.approx(p, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(demands, st.sampled_from(["A", "B"]))
def test_dominance(d, scenario):
    s = len(d) - 1
    stations = scenario_a(s) if scenario == "A" else scenario_b(s)
    ex = power_of(exhaustive(d, stations), d, stations)
    assert ex <= power_of(sorting(d), d, stations)
    assert ex <= power_of(all_on(d), d, stations)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 7).flatmap(lambda s: st.tuples(
    st.floats(0, 1), st.lists(st.floats(0, 0.72), min_size=s, max_size=s))))
def test_sorting_optimal_below_threshold_scenario_a(case):
    # with every small-cell load below the zero-sleep micro threshold
    # (56 / 77.62 = 0.7215), greedy offloading matches the optimum
    macro, sc = case
    d = [macro] + sc
    stations = scenario_a(len(sc))
    assert power_of(sorting(d), d, stations) <= power_of(all_on(d), d, stations)
    assert power_of(sorting(d), d, stations) == pytest.approx(
        power_of(exhaustive(d, stations), d, stations), rel=1e-9)
