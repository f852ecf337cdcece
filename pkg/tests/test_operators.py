import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lamplighter.operators import (BinomialTable, FiniteMarkovOperator, OperatorError,
                                   derivative_bound, exact_drift, finite_difference,
                                   laplacian_drift_estimate, lazy_power_expansion_check,
                                   majorant_decay_scan, verify_derivative_bound)


def test_first_difference_by_hand():
    ks, d = finite_difference(BinomialTable(2, 0.5), 1)
    assert list(ks) == [-1, 0, 1, 2]
    assert np.allclose(d, [-0.25, -0.25, 0.25, 0.25])


def test_second_difference_by_hand():
    ks, d = finite_difference(BinomialTable(2, 0.5), 2)
    assert np.allclose(d, [0.25, 0, -0.5, 0, 0.25], atol=1e-15)
    assert abs(np.max(np.abs(d)) - 0.5) < 1e-15
    assert derivative_bound(2, 2, 0.5) == 4


def test_zeroth_difference_is_identity():
    b = BinomialTable(7, 0.3)
    assert np.array_equal(finite_difference(b, 0)[1], b.masses)


@settings(max_examples=100)
@given(st.integers(1, 60), st.floats(0.05, 0.95), st.integers(1, 8))
def test_telescoping(n, p, m):
    assert abs(finite_difference(BinomialTable(n, p), m)[1].sum()) < 1e-12


def test_binomial_table():
    b = BinomialTable(10, 0.5)
    assert abs(b.masses.sum() - 1) < 1e-14
    assert np.allclose(b.masses, b.masses[::-1])
    assert not np.allclose(BinomialTable(10, 0.3).masses, BinomialTable(10, 0.3).masses[::-1])
    assert b(-1) == 0 and b(11) == 0


def test_derivative_bound_small_cases():
    rep = verify_derivative_bound([1], [1], [0.5])
    assert rep["violations"] == 0
    assert abs(rep["max_ratio"] - 0.25) < 1e-15  # max |del b| = 1/2, bound 2


def test_derivative_bound_exhaustive():
    rep = verify_derivative_bound(range(1, 201), range(1, 11), [i / 10 for i in range(1, 10)])
    assert rep["violations"] == 0 and rep["checked"] == 200 * 10 * 9
    assert rep["max_ratio"] < 1


def test_expansion_identities_on_cycle():
    P = FiniteMarkovOperator.cycle(64)
    assert lazy_power_expansion_check(P, 0.5, 0, 0)["expansion"] == 0
    r = lazy_power_expansion_check(P, 0.5, 40, 3)
    assert r["expansion"] <= 1e-12 and r["difference"] <= 1e-12
    assert r["sup_coefficient"] <= r["coefficient_bound"]


def test_expansion_on_random_operator(rng):
    A = rng.random((12, 12))
    A /= A.sum(axis=1, keepdims=True)
    for alpha in (0.25, 0.75):
        r = lazy_power_expansion_check(A, alpha, 15, 4)
        assert r["expansion"] <= 1e-12 and r["difference"] <= 1e-11


def test_operator_validation():
    with pytest.raises(OperatorError):
        FiniteMarkovOperator(np.eye(300))
    with pytest.raises(OperatorError):
        FiniteMarkovOperator(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(OperatorError):
        lazy_power_expansion_check(FiniteMarkovOperator.cycle(4), 1.0, 2)


def test_majorant_decay():
    assert majorant_decay_scan(5, 0.5)
    assert majorant_decay_scan(6, 0.25, g=10)
    assert not majorant_decay_scan(3, 0.5)


def test_drift_of_linear_function_vanishes():
    est, se = laplacian_drift_estimate(lambda x: x, 100, 20000, seed=1)
    assert abs(est) <= 3 * se
    assert exact_drift(lambda x: x, 100) == pytest.approx(0, abs=1e-12)


def test_drift_of_abs_decreases_like_inverse_sqrt():
    vals = [laplacian_drift_estimate(np.abs, t, 20000, seed=2)[0] for t in (100, 400, 1600)]
    assert vals[0] > vals[1] > vals[2]
    for t, v in zip((100, 400, 1600), vals):
        assert abs(v - math.sqrt(2 / (math.pi * t))) < 0.1 * v


def test_drift_of_square_is_variance():
    assert exact_drift(lambda x: x * x, 50) == pytest.approx(1.0)
    est, se = laplacian_drift_estimate(lambda x: x * x, 400, 20000, seed=3)
    assert abs(est - 1) <= 3 * se


def test_tabulated_psi():
    t = 10
    table = np.abs(np.arange(-t, t + 1))
    assert laplacian_drift_estimate(table, t, 500, 4) == laplacian_drift_estimate(np.abs, t, 500, 4)
    with pytest.raises(OperatorError):
        laplacian_drift_estimate(table[:-1], t, 10)
