import pytest
from hypothesis import given, strategies as st

from lamplighter.groups import C2, Z, Z2, Wreath
from lamplighter.measures import MeasureError, StepMeasure, move_or_switch, uniform_measure


def test_move_or_switch_on_lamplighter():
    mu = move_or_switch(uniform_measure(C2), uniform_measure(Z))
    G = Wreath(C2, Z)
    assert mu.mass(G.element({0: 1}, 0)) == 0.5
    assert mu.mass(G.element({}, 1)) == 0.25
    assert mu.mass(G.element({}, -1)) == 0.25
    assert mu.total() == 1.0
    assert mu.is_symmetric()


def test_uniform_measure_is_recursive():
    mu = uniform_measure("(C2 wr Z) wr Z2")
    assert len(mu.atoms) == 3 + 4
    assert abs(mu.total() - 1) < 1e-15


def test_asymmetric_measure_rejected():
    with pytest.raises(MeasureError):
        StepMeasure(Z, (("+1", 1, 0.7), ("-1", -1, 0.3)))


def test_bad_masses_rejected():
    with pytest.raises(MeasureError):
        StepMeasure(Z, (("+1", 1, 0.5), ("-1", -1, 0.4)))
    with pytest.raises(MeasureError):
        StepMeasure(Z, (("0", 0, 0.5), ("+1", 1, 0.25), ("-1", -1, 0.25)))


@given(st.floats(0.0, 0.95))
def test_lazy_keeps_total_and_symmetry(alpha):
    mu = uniform_measure(Wreath(C2, Z2)).lazy(alpha)
    assert abs(mu.total() - 1) <= 1e-12
    assert mu.is_symmetric()
    assert abs(mu.laziness - alpha) <= 1e-12


@given(st.floats(0.0, 0.9), st.floats(0.0, 0.9))
def test_move_or_switch_total_and_symmetry(a, b):
    out = move_or_switch(uniform_measure(C2).lazy(a), uniform_measure(Z2).lazy(b))
    assert abs(out.total() - 1) <= 1e-12
    assert out.is_symmetric()
