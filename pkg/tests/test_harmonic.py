import math

import numpy as np
import pytest

from lamplighter.groups import Wreath, C2, Z
from lamplighter.harmonic import (BaseCoordinate, Constant, LampSignTimesKernel, Tabulated,
                                  extend_line_harmonic, growth_profile, harmonic_from_json,
                                  harmonicity_residual, lamp_override, line_differences,
                                  residual_scan)
from lamplighter.kernel import LOG_SLOPE, build_kernel_table


@pytest.fixture(scope="module")
def log_h():
    return LampSignTimesKernel(build_kernel_table(101, normalization="shifted"))


def test_lamp_sign_kernel_is_harmonic(log_h, rng):
    assert residual_scan(log_h, 20, rng, extra_lamps=3) < 1e-12


def test_wrong_normalization_rejected():
    with pytest.raises(ValueError):
        LampSignTimesKernel(build_kernel_table(5))


def test_value_at_identity_and_sign(log_h):
    G = log_h.spec
    assert log_h(G.identity()) == 0.5
    assert log_h(G.element({(0, 0): 1}, (0, 0))) == -0.5
    assert log_h(G.element({(1, 0): 1}, (1, 0))) == 1.5


def test_vectorized_values_match(log_h, rng):
    G = log_h.spec
    pos = rng.integers(-10, 11, size=(50, 2))
    lamp = rng.integers(0, 2, size=50)
    v = log_h.values(pos, lamp)
    for p, l, x in zip(pos, lamp, v):
        g = G.element({(0, 0): int(l)}, (int(p[0]), int(p[1])))
        assert log_h(g) == x


def test_base_coordinate_and_constant_harmonic():
    b = BaseCoordinate("C2 wr Z")
    G = b.spec
    for x in range(-5, 6):
        g = G.element({0: 1, 3: 1}, x)
        assert harmonicity_residual(b, b.measure, g) < 1e-15
    c = Constant("C2 wr Z2", 3.0)
    assert harmonicity_residual(c, c.measure, c.spec.identity()) == 0


def test_growth_of_base_coordinate_is_exactly_r():
    b = BaseCoordinate("C2 wr Z")
    for pt in growth_profile(b, range(0, 12)):
        assert pt.lower == pt.upper == pt.r
    # exact mode agrees on small balls
    for pt in growth_profile(b, range(0, 6), mode="exact"):
        assert pt.lower == pt.r


def test_certified_growth_matches_exact_on_small_balls(log_h):
    cert = growth_profile(log_h, range(0, 5))
    exact = growth_profile(log_h, range(0, 5), mode="exact")
    for c, e in zip(cert, exact):
        assert abs(c.lower - e.lower) < 1e-12
        assert c.exact


def test_log_growth_slope(log_h):
    pts = {p.r: p.lower for p in growth_profile(log_h, [30, 100])}
    slope = (pts[100] - pts[30]) / (math.log(100) - math.log(30))
    assert abs(slope / LOG_SLOPE - 1) < 0.15


def test_exact_mode_cap(log_h):
    with pytest.raises(ValueError):
        growth_profile(log_h, [20], mode="exact")


def test_tabulated_rejects_non_harmonic():
    G = Wreath(C2, Z)
    vals = {G.element({}, x): float(x) for x in range(-3, 4)}
    vals.update({G.element({0: 1}, x): float(x) for x in range(-3, 4)})
    h = Tabulated(G, vals)
    assert h.max_residual < 1e-12
    vals[G.element({}, 0)] = 5.0
    with pytest.raises(ValueError):
        Tabulated(G, vals)


def test_line_harmonic_functions_are_linear():
    vals = extend_line_harmonic(2.0, 3.5, 20)
    assert np.allclose(line_differences(vals), 1.5)


def test_lamp_override():
    G = Wreath(C2, Z)
    x = G.element({0: 1, 2: 1}, 5)
    assert lamp_override(G, x, 0) == G.element({2: 1}, 5)
    assert lamp_override(G, G.identity(), 1) == G.element({0: 1}, 0)


def test_json_round_trip():
    b = BaseCoordinate("C2 wr Z")
    assert harmonic_from_json(b.to_json()).spec == b.spec
