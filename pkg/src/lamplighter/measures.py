"""Finite symmetric step measures and the move-or-switch construction."""
from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec, Wreath, _as_spec

__all__ = ["StepMeasure", "MeasureError", "move_or_switch", "uniform_measure"]

TOL = 1e-12


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class StepMeasure:
    """Probability measure on a symmetric generating set, plus optional laziness.

    ``atoms`` holds ``(label, element, probability)`` for non-identity steps;
    ``laziness`` is the mass on the identity.
    """

    spec: GroupSpec
    atoms: tuple
    laziness: float = 0.0

    def __post_init__(self):
        probs = [p for _, _, p in self.atoms]
        if any(p <= 0 for p in probs) or self.laziness < 0:
            raise MeasureError("probabilities must be positive")
        if abs(sum(probs) + self.laziness - 1.0) > TOL:
            raise MeasureError(f"masses sum to {sum(probs) + self.laziness}, not 1")
        mass = {}
        for _, g, p in self.atoms:
            self.spec.check(g)
            if g == self.spec.identity():
                raise MeasureError("identity mass belongs in `laziness`")
            mass[g] = mass.get(g, 0.0) + p
        for g, p in mass.items():
            if abs(mass.get(self.spec.inverse(g), 0.0) - p) > TOL:
                raise MeasureError(f"measure is not symmetric at {g!r}")

    def support(self):
        """``[(element, prob)]`` including the identity when lazy."""
        out = [(g, p) for _, g, p in self.atoms]
        if self.laziness > 0:
            out.append((self.spec.identity(), self.laziness))
        return out

    def labels(self):
        out = [lab for lab, _, _ in self.atoms]
        if self.laziness > 0:
            out.append("hold")
        return out

    def probabilities(self):
        return np.array([p for _, p in self.support()])

    def mass(self, g):
        if g == self.spec.identity():
            return self.laziness
        return sum(p for _, h, p in self.atoms if h == g)

    def total(self):
        return sum(p for _, _, p in self.atoms) + self.laziness

    def is_symmetric(self):
        return all(abs(self.mass(self.spec.inverse(g)) - p) <= TOL for g, p in self.support())

    def lazy(self, alpha):
        """``alpha * delta_identity + (1 - alpha) * self``."""
        if not 0 <= alpha < 1:
            raise MeasureError("laziness must lie in [0, 1)")
        atoms = tuple((lab, g, (1 - alpha) * p) for lab, g, p in self.atoms)
        return StepMeasure(self.spec, atoms, alpha + (1 - alpha) * self.laziness)

    def to_json(self):
        return {"group": str(self.spec), "laziness": self.laziness,
                "atoms": [{"label": lab, "element": self.spec.to_json(g), "p": p}
                          for lab, g, p in self.atoms]}


def uniform_measure(spec):
    """Uniform measure on generators; move-or-switch for wreath products."""
    spec = _as_spec(spec)
    if isinstance(spec, Wreath):
        return move_or_switch(uniform_measure(spec.lamp), uniform_measure(spec.base))
    gens = spec.generators()
    return StepMeasure(spec, tuple((lab, g, 1.0 / len(gens)) for lab, g in gens))


def move_or_switch(mu, nu):
    """Measure on ``lamp wr base`` giving ``nu(u)/2`` to moves and ``mu(s)/2`` to switches."""
    for m in (mu, nu):
        if not m.is_symmetric():
            raise MeasureError("input measure is not symmetric")
    spec = Wreath(mu.spec, nu.spec)
    e = nu.spec.identity()
    atoms = [(f"switch[{lab}]", spec.element({e: s}, e), 0.5 * p) for lab, s, p in mu.atoms]
    atoms += [(f"move[{lab}]", spec.element({}, u), 0.5 * p) for lab, u, p in nu.atoms]
    return StepMeasure(spec, tuple(atoms), 0.5 * mu.laziness + 0.5 * nu.laziness)
