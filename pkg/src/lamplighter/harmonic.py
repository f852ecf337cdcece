"""Explicit harmonic functions on lamplighter groups and their growth.

The log-growth example lives on ``C2 wr Z2``::

    h(sigma, z) = (-1)**sigma(0) * a(z)

with ``a`` the potential kernel normalized by ``a(0) = 1/2``; it is harmonic
for the walk that flips the current lamp with probability 1/2 and moves to
each grid neighbour with probability 1/8.
"""
from dataclasses import dataclass, field

import numpy as np

from .groups import (C2, Z2, ElementError, Wreath, WreathElement,
                     _as_spec, ball, word_length)
from .kernel import KernelError, KernelTable, build_kernel_table
from .measures import StepMeasure, uniform_measure

__all__ = [
    "HarmonicFunction", "Constant", "BaseCoordinate", "LampSignTimesKernel",
    "Tabulated", "evaluate", "harmonicity_residual", "residual_scan",
    "growth_profile", "GrowthPoint", "lamp_override", "harmonic_from_json",
    "line_differences", "extend_line_harmonic",
]


class HarmonicFunction:
    """Common interface.  ``depends`` says what of an element the value reads:
    ``"position"``, ``"origin-lamp"`` (position and lamp at the base origin)
    or ``"all"``."""

    kind = "abstract"
    depends = "all"
    spec = None
    measure = None

    def __call__(self, x):
        raise NotImplementedError

    def values(self, positions, origin_lamps):
        """Vectorized evaluation for ``depends != "all"``.

        ``positions`` has shape ``(n,)`` on a line base or ``(n, 2)`` on a grid.
        """
        raise NotImplementedError

    def params(self):
        return {}

    def to_json(self):
        return {"kind": self.kind, "group": str(self.spec), "params": self.params(),
                "measure": self.measure.to_json()}


@dataclass(frozen=True)
class Constant(HarmonicFunction):
    spec: object
    c: float = 0.0
    measure: StepMeasure = None
    kind = "constant"
    depends = "position"

    def __post_init__(self):
        object.__setattr__(self, "spec", _as_spec(self.spec))
        if self.measure is None:
            object.__setattr__(self, "measure", uniform_measure(self.spec))

    def __call__(self, x):
        self.spec.check(x)
        return float(self.c)

    def values(self, positions, origin_lamps):
        return np.full(len(positions), float(self.c))

    def params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class BaseCoordinate(HarmonicFunction):
    """A coordinate of the lamplighter position; linear growth."""

    spec: object
    axis: int = 0
    measure: StepMeasure = None
    kind = "base-coordinate"
    depends = "position"

    def __post_init__(self):
        spec = _as_spec(self.spec)
        object.__setattr__(self, "spec", spec)
        base = spec.base if isinstance(spec, Wreath) else spec
        if not base.is_lattice or self.axis >= base.rank:
            raise ValueError(f"no axis {self.axis} on base of {spec}")
        if self.measure is None:
            object.__setattr__(self, "measure", uniform_measure(spec))

    def _coord(self, pos):
        return pos if isinstance(pos, int) else pos[self.axis]

    def __call__(self, x):
        self.spec.check(x)
        pos = x.position if isinstance(x, WreathElement) else x
        return float(self._coord(pos))

    def values(self, positions, origin_lamps):
        positions = np.asarray(positions)
        return (positions if positions.ndim == 1 else positions[:, self.axis]).astype(float)

    def params(self):
        return {"axis": self.axis}


@dataclass(frozen=True)
class LampSignTimesKernel(HarmonicFunction):
    """``(-1)**sigma(0) * a(z)`` on ``C2 wr Z2`` with ``a(0) = 1/2``."""

    table: KernelTable = field(repr=False)
    spec = Wreath(C2, Z2)
    kind = "lamp-sign-kernel"
    depends = "origin-lamp"

    def __post_init__(self):
        if self.table.normalization != "shifted":
            raise ValueError("lamp-sign kernel function needs a table normalized by a(0) = 1/2")

    @property
    def measure(self):
        return uniform_measure(self.spec)

    def __call__(self, x):
        self.spec.check(x)
        sign = -1.0 if x.lamp((0, 0)) else 1.0
        return sign * self.table(x.position)

    def values(self, positions, origin_lamps):
        positions = np.asarray(positions)
        r = self.table.radius
        if np.any(np.abs(positions) > r):
            raise KernelError("position outside kernel table")
        a = self.table.values[positions[:, 0] + r, positions[:, 1] + r]
        return np.where(np.asarray(origin_lamps) % 2 == 1, -a, a)

    def params(self):
        return {"radius": self.table.radius, "accuracy": self.table.accuracy}


class Tabulated(HarmonicFunction):
    """Finitely many values; harmonicity is checked wherever a full neighbourhood is known.

    Raises ``ValueError`` at construction when a checkable residual exceeds ``tol``.
    """

    kind = "tabulated"
    depends = "all"

    def __init__(self, spec, values, measure=None, tol=1e-9):
        self.spec = _as_spec(spec)
        self.measure = measure if measure is not None else uniform_measure(self.spec)
        self.table = {self.spec.check(x): float(v) for x, v in dict(values).items()}
        self.tol = tol
        worst = 0.0
        for x in self.table:
            try:
                worst = max(worst, harmonicity_residual(self, self.measure, x))
            except KeyError:
                continue
        if worst > tol:
            raise ValueError(f"tabulated function is not harmonic (residual {worst:.3g})")
        self.max_residual = worst

    def __call__(self, x):
        if x not in self.table:
            raise KeyError(f"no value for {x!r}")
        return self.table[x]

    def params(self):
        return {"entries": [[self.spec.to_json(x), v] for x, v in self.table.items()]}


def evaluate(h, x):
    return h(x)


def harmonicity_residual(h, measure, x):
    """``|sum_s mu(s) h(x s) - h(x)|``."""
    spec = measure.spec
    total = sum(p * h(spec.multiply(x, s)) for s, p in measure.support())
    return abs(total - h(x))


def residual_scan(h, radius, rng=None, extra_lamps=0):
    """Largest residual of a lamp-sign kernel function over the L1 grid ball.

    Both states of the lamp at the origin are visited; ``extra_lamps`` random
    lamps elsewhere check that the value ignores them.
    """
    spec = h.spec
    worst = 0.0
    for x in range(-radius, radius + 1):
        span = radius - abs(x)
        for y in range(-span, span + 1):
            for on in (0, 1):
                cfg = {(0, 0): on} if on else {}
                if extra_lamps and rng is not None:
                    for _ in range(extra_lamps):
                        p = (int(rng.integers(-radius, radius + 1)),
                             int(rng.integers(-radius, radius + 1)))
                        if p != (0, 0):
                            cfg[p] = 1
                g = spec.element(cfg, (x, y))
                worst = max(worst, harmonicity_residual(h, h.measure, g))
    return worst


def lamp_override(spec, x, lamp):
    """Set the lamp at the base origin to ``lamp``, leaving every other lamp alone."""
    spec = _as_spec(spec)
    if not isinstance(spec, Wreath):
        raise ElementError(f"{spec} has no lamps")
    spec.check(x)
    spec.lamp.check(lamp)
    cfg = dict(x.lamps)
    cfg[spec.base.identity()] = lamp
    return spec._canon(cfg, x.position)


@dataclass(frozen=True)
class GrowthPoint:
    r: int
    lower: float
    upper: float
    witness: object = None

    @property
    def exact(self):
        return self.lower == self.upper


def _l1_sphere_argmax(table, rho):
    """Point of largest ``a`` with ``|z|_1 <= rho`` (ties broken by smallest index)."""
    r = table.radius
    xs = np.arange(-r, r + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    mask = np.abs(X) + np.abs(Y) <= rho
    vals = np.where(mask, table.values, -np.inf)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return (int(xs[i]), int(xs[j])), float(vals[i, j])


def growth_profile(h, radii, mode="certified", ball_cap=10):
    """``M_h(r) = max{|h(y) - h(1)| : |y| <= r}`` for each radius.

    ``exact`` enumerates the word-metric ball (radius at most ``ball_cap``).
    ``certified`` returns a lower bound realized by an explicit witness
    element (its word length is verified) and an analytic upper bound.
    """
    spec = h.spec
    e = spec.identity()
    h0 = h(e)
    out = []
    for r in radii:
        if mode == "exact":
            if r > ball_cap:
                raise ValueError(f"radius {r} beyond exact capability {ball_cap}")
            m = max(abs(h(y) - h0) for y in ball(spec, r))
            out.append(GrowthPoint(r, m, m))
            continue
        if mode != "certified":
            raise ValueError(f"unknown mode {mode!r}")
        if isinstance(h, Constant):
            out.append(GrowthPoint(r, 0.0, 0.0, e))
        elif isinstance(h, BaseCoordinate):
            base = spec.base if isinstance(spec, Wreath) else spec
            unit = base.generators()[2 * h.axis][1]
            pos = r * unit if isinstance(unit, int) else tuple(r * c for c in unit)
            w = spec.element({}, pos) if isinstance(spec, Wreath) else pos
            assert _length(spec, w) <= r
            out.append(GrowthPoint(r, abs(h(w) - h0), float(r), w))
        elif isinstance(h, LampSignTimesKernel):
            table = h.table
            if r == 0:
                out.append(GrowthPoint(0, 0.0, 0.0, e))
                continue
            if r > table.radius:
                raise ValueError(f"radius {r} beyond kernel table radius {table.radius}")
            # lamp at origin lit: |y| >= 1 + |z|_1 ; value a(z) + 1/2
            z_on, a_on = _l1_sphere_argmax(table, r - 1)
            # lamp at origin dark: |y| >= |z|_1 ; value |a(z) - 1/2|
            z_off, a_off = _l1_sphere_argmax(table, r)
            w_on = spec.element({(0, 0): 1}, z_on)
            w_off = spec.element({}, z_off)
            assert _length(spec, w_on) <= r and _length(spec, w_off) <= r
            cands = [(abs(h(w_on) - h0), w_on), (abs(h(w_off) - h0), w_off)]
            lower, witness = max(cands, key=lambda c: c[0])
            upper = max(a_on + h0, abs(a_off - h0))
            out.append(GrowthPoint(r, lower, upper, witness))
        else:
            raise ValueError(f"no certified bounds for {h.kind}")
    return out


def _length(spec, w):
    if isinstance(spec, Wreath):
        return word_length(spec, w, mode="exact-tour")
    return spec.norm(w)


def harmonic_from_json(obj):
    kind = obj["kind"]
    params = obj.get("params", {})
    group = obj.get("group")
    if kind == "constant":
        return Constant(group, params.get("c", 0.0))
    if kind == "base-coordinate":
        return BaseCoordinate(group, params.get("axis", 0))
    if kind == "lamp-sign-kernel":
        return LampSignTimesKernel(build_kernel_table(params.get("radius", 30),
                                                      normalization="shifted"))
    if kind == "tabulated":
        spec = _as_spec(group)
        vals = {spec.from_json(x): v for x, v in params["entries"]}
        return Tabulated(spec, vals)
    raise ValueError(f"unknown harmonic function kind {kind!r}")


def extend_line_harmonic(h0, h1, n):
    """Values on ``0..n`` forced by harmonicity for the +-1 walk from ``h(0), h(1)``."""
    vals = [float(h0), float(h1)]
    while len(vals) < n + 1:
        vals.append(2 * vals[-1] - vals[-2])
    return vals[: n + 1]


def line_differences(values):
    """Successive differences; constant exactly when the function is linear."""
    v = np.asarray(values, dtype=float)
    return np.diff(v)
