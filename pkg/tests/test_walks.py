import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamplighter.groups import Wreath, C2, Z
from lamplighter.harmonic import BaseCoordinate, Constant, LampSignTimesKernel
from lamplighter.kernel import build_kernel_table
from lamplighter.measures import uniform_measure
from lamplighter.walks import (Trajectory, WalkError, coupled_gluing_experiment,
                               coupled_pair_path, coupling_escape_exact, excursion_heights,
                               excursion_swap_check, exit_time_tail, hitting_probability,
                               lamp_law_at_return, lazy_lamp_law, predicted_hitting_probability,
                               return_times, sample_trajectory, step_frequencies,
                               stopped_value_expectation, stopping_times)

G = Wreath(C2, Z)


def test_empty_trajectory():
    t = sample_trajectory(G, None, None, 0, seed=1)
    assert t.states == (G.identity(),) and t.steps == ()


def test_trajectory_determinism_and_consistency():
    a = sample_trajectory(G, None, None, 200, seed=5)
    b = sample_trajectory(G, None, None, 200, seed=5)
    assert a == b
    mu = uniform_measure(G)
    step = dict(zip(mu.labels(), [g for g, _ in mu.support()]))
    for x, s, y in zip(a.states, a.steps, a.states[1:]):
        assert G.multiply(x, step[s]) == y


def test_step_frequencies_within_three_standard_errors():
    mu = uniform_measure(G)
    n = 10 ** 6
    f = step_frequencies(mu, n, seed=11)
    p = mu.probabilities()
    se = np.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(f - p) <= 3 * se)


def _path(positions):
    states = tuple(G.element({}, x) for x in positions)
    return Trajectory(G, states, ("?",) * (len(positions) - 1), 0)


def test_stopping_time_examples():
    rec = stopping_times(_path([0, 1, 0, -1]), 3, [0, 1])
    assert rec.T == [0, 2, None]
    assert rec.E[0] == 1
    assert rec.E[1] is None
    assert rec.check()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_stopping_record_monotone(seed):
    t = sample_trajectory(G, None, None, 80, seed=seed)
    rec = stopping_times(t, 6, [0, 1, 2, 3, 5])
    assert rec.check()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_excursions_partition_time(seed):
    t = sample_trajectory(G, None, None, 120, seed=seed)
    d = [abs(p) for p in t.base_path()]
    times = [0] + return_times(d, 5)
    heights = excursion_heights(d, times)
    assert len(heights) == len(times) - 1
    for (a, b), h in zip(zip(times[:-1], times[1:]), heights):
        assert d[a] == 0 and d[b] == 0
        assert h == max(d[a:b + 1])
        assert all(x > 0 for x in d[a + 1:b])


def test_coupling_exact_values():
    assert coupling_escape_exact(1) == 0.5
    assert abs(coupling_escape_exact(2) - 1 / 3) < 1e-15
    # closed form 1/(r+1)
    for r in (3, 8, 50):
        assert abs(coupling_escape_exact(r) - 1 / (r + 1)) < 1e-12


@pytest.mark.parametrize("r", [1, 2])
def test_coupling_mc_matches_chain(r):
    est = coupled_gluing_experiment(r, 40000, seed=r)
    assert est.within(coupling_escape_exact(r))


def test_coupling_deterministic_and_errors():
    assert coupled_gluing_experiment(5, 1000, 3) == coupled_gluing_experiment(5, 1000, 3)
    with pytest.raises(WalkError):
        coupled_gluing_experiment(5, 0, 3)


@pytest.mark.parametrize("seed", range(5))
def test_glued_walkers_stay_equal(seed):
    path = coupled_pair_path(300, seed=seed)
    glued = False
    for x, y in path:
        if glued:
            assert x == y
        glued = glued or x == y
        # unglued walkers differ only in the lamp at 0 and share a position
        assert x.position == y.position


def test_hitting_probability_vs_kernel():
    est = hitting_probability((1, 0), 16, 20000, seed=2)
    pred = predicted_hitting_probability((1, 0), 16)
    assert abs(est.mean / pred - 1) < 0.2
    with pytest.raises(WalkError):
        hitting_probability((3, 4), 7, 10)
    with pytest.raises(WalkError):
        hitting_probability((0, 0), 7, 10)


def test_exit_time_tail_shape():
    r = 10
    res = exit_time_tail(r, [0] + [int(c * r * r) for c in (0.5, 1, 1.5, 2, 2.5, 3)], 20000, 4)
    assert res.tail[0] == 1.0
    assert np.all(np.diff(res.tail) <= 0)
    assert res.slope < 0 and res.r2 >= 0.9


def test_lazy_lamp_laws():
    assert lazy_lamp_law(C2, 0) == {0: 1.0}
    for k in (1, 2, 5):
        assert lazy_lamp_law(C2, k) == pytest.approx({0: 0.5, 1: 0.5})
    assert lazy_lamp_law(Z, 1) == pytest.approx({-1: 0.25, 0: 0.5, 1: 0.25})


def test_lamp_law_k0_is_identity():
    rep = lamp_law_at_return("C2 wr Z", 0, 5, 1000, 1)
    assert rep.law == {0: 1.0}


@pytest.mark.parametrize("spec,k", [("C2 wr Z", 1), ("C2 wr Z", 2), ("Z wr Z", 2), ("Z wr Z", 5)])
def test_unconditional_lamp_law_is_lazy_walk(spec, k):
    rep = lamp_law_at_return(spec, k, 6, 20000, 3)
    assert rep.unconditional_pvalue > 1e-3


def test_conditioned_lamp_law_on_line():
    # first return before exit: the lamp is lit with probability (r+1)/(2r+1)
    r = 6
    rep = lamp_law_at_return("C2 wr Z", 1, r, 40000, 9)
    p = (r + 1) / (2 * r + 1)
    se = math.sqrt(p * (1 - p) / rep.accepted)
    assert abs(rep.law[1] - p) <= 3 * se
    assert rep.conditional_on["rejected"] == {0: 1.0}


def test_lamp_law_needs_accepted_trials():
    with pytest.raises(WalkError):
        lamp_law_at_return("C2 wr Z", 3, 0, 50, 1)


def test_swap_exhaustive_zero_tv():
    for group in ("C2 wr Z", "(C2 wr Z) wr Z", "Z wr Z"):
        rep = excursion_swap_check(2, 6, group=group)
        assert rep.tv == 0 and rep.mass > 0


def test_swap_k1_is_trivial():
    rep = excursion_swap_check(1, 6)
    law_x, law_wv = rep.laws
    assert law_x == law_wv


def test_swap_mc_and_caps():
    rep = excursion_swap_check(3, 40, mode="mc", trials=3000, r=3, seed=2)
    assert rep.tv <= 0.02
    with pytest.raises(WalkError):
        excursion_swap_check(3, 6)
    with pytest.raises(WalkError):
        excursion_swap_check(2, 8, group="(C2 wr Z) wr Z", path_cap=1000)


def test_stopped_constant_is_exact():
    est = stopped_value_expectation(Constant("C2 wr Z2", 2.5), None, 1, 5, 500, 7)
    assert est.mean == 2.5 and est.stderr == 0


def test_stopped_base_coordinate():
    b = BaseCoordinate("C2 wr Z")
    x = b.spec.element({}, 3)
    for k, r in ((1, 6), (3, 10)):
        assert stopped_value_expectation(b, x, k, r, 20000, seed=k).within(3.0)


def test_stopped_log_harmonic():
    h = LampSignTimesKernel(build_kernel_table(24, normalization="shifted"))
    est = stopped_value_expectation(h, None, 1, 20, 20000, seed=6)
    assert est.within(0.5)


def test_stopped_generic_path_agrees_with_vectorized():
    b = BaseCoordinate("C2 wr Z")
    x = b.spec.element({}, 2)
    from lamplighter.walks import _stopped_generic
    a = stopped_value_expectation(b, x, 1, 4, 300, seed=8)
    g = _stopped_generic(b, b.spec, b.measure, x, 1, 4, 300, 8, None, 10 ** 6)
    assert a.mean == g.mean
