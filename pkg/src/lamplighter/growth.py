"""Entropy growth of walks on iterated lamplighter groups.

``G_1 = C2 wr Z2`` and ``G_k = G_{k-1} wr Z2``.  Given the base path, the lamp
at a site ``z`` performs a lazy-1/2 walk on the lamp group with one step per
time the lighter stands at ``z``.  With ``K(z) = #{t < n : z_t = z}``::

    H(X_n) >= E sum_z H(Y_{K(z)})

where ``Y_k`` is that lazy lamp walk.  For ``C2`` lamps ``H(Y_k) = ln 2`` for
every ``k >= 1``, so the depth-1 bound is ``ln 2`` times the expected number of
sites the lighter has stepped from.  Deeper levels keep only the sites with
``K(z) >= ceil(ln n)`` and recurse.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy.stats import binom

from .entropy import entropy_sequence, line_lazy_entropy
from .groups import C2, CyclicTwo, IntegerLine, Wreath, _as_spec
from .measures import uniform_measure
from .rng import draw_uniform, trial_keys

__all__ = [
    "VisitProfile", "GrowthError", "visit_count_profile", "lamp_entropy_table",
    "site_histograms", "conditional_entropy_lower_bound", "heavy_site_count",
    "iterated_growth_experiment", "iterated_log", "depth1_upper_bound",
    "direct_depth2_lower_bound", "DEPTH_CAP",
]

DEPTH_CAP = 3


class GrowthError(ValueError):
    pass


@dataclass
class VisitProfile:
    """``counts[z] = K_n(z)``, the number of times ``t <= n`` with ``z_t = z``."""

    counts: dict
    n: int

    @property
    def sites(self):
        return len(self.counts)

    def check(self):
        assert sum(self.counts.values()) == self.n + 1
        assert self.sites <= self.n + 1
        return True


def _lattice(base):
    base = _as_spec(base)
    if not getattr(base, "is_lattice", False):
        raise GrowthError(f"{base} is not a lattice")
    return base


def _base_path(keys, n, d):
    """Positions ``z_0 .. z_n`` of the lighter under move-or-switch (hold 1/2, move 1/2)."""
    u = draw_uniform(keys, np.arange(n, dtype=np.uint64))
    move = u >= 0.5
    direction = np.minimum(((u - 0.5) * 4 * d).astype(np.int64), 2 * d - 1)
    steps = np.zeros((n, d), dtype=np.int64)
    axis, sign = direction // 2, 1 - 2 * (direction % 2)
    rows = np.flatnonzero(move)
    steps[rows, axis[rows]] = sign[rows]
    return np.vstack([np.zeros((1, d), dtype=np.int64), np.cumsum(steps, axis=0)])


def _encode(path, n):
    span = 2 * n + 1
    code = np.zeros(len(path), dtype=np.int64)
    for j in range(path.shape[1]):
        code = code * span + (path[:, j] + n)
    return code


def visit_count_profile(base, n, seed=0, trial=0):
    """Visit counts ``K_n`` along one base trajectory of the move-or-switch walk."""
    base = _lattice(base)
    keys = trial_keys(seed, 1, offset=trial)
    path = _base_path(keys[0], n, base.rank)
    pts, cnt = np.unique(path, axis=0, return_counts=True)
    if base.rank == 1:
        counts = {int(p[0]): int(c) for p, c in zip(pts, cnt)}
    else:
        counts = {tuple(int(v) for v in p): int(c) for p, c in zip(pts, cnt)}
    return VisitProfile(counts, n)


@dataclass
class SiteHistograms:
    """Per trial and per ``n``: ``(values, multiplicities)`` of the step counts ``K(z) >= 1``."""

    base: str
    ns: list
    trials: int
    seed: int
    data: dict = field(repr=False)

    def functional(self, n, f):
        """Per-trial ``sum_z f(K(z))`` over sites with ``K(z) >= 1``."""
        return np.array([float(np.dot(mult, f(vals))) for vals, mult in self.data[n]])

    def distinct(self, n):
        return np.array([float(mult.sum()) for _, mult in self.data[n]])


@lru_cache(maxsize=32)
def _site_histograms(base_name, ns, trials, seed):
    base = _lattice(base_name)
    d = base.rank
    n_max = max(ns)
    keys = trial_keys(seed, trials)
    data = {n: [] for n in ns}
    for i in range(trials):
        path = _base_path(keys[i], n_max, d)
        code = _encode(path, n_max)
        for n in ns:
            _, k = np.unique(code[:n], return_counts=True)
            vals, mult = np.unique(k, return_counts=True)
            data[n].append((vals, mult))
    return SiteHistograms(base_name, list(ns), trials, seed, data)


def site_histograms(base, ns, trials, seed=0):
    return _site_histograms(str(_lattice(base)), tuple(sorted(set(int(n) for n in ns))),
                            int(trials), int(seed))


def lamp_entropy_table(lamp, k_max, clamp=False, cap=8):
    """``H(Y_0), ..., H(Y_{k_max})`` for the lazy-1/2 walk on the lamp group.

    ``C2`` and ``Z`` have closed forms; other lamp groups use exact
    convolution up to ``cap`` steps.  With ``clamp`` the table is extended
    beyond ``cap`` by the value at ``cap``, a lower bound because entropy of
    a random walk is nondecreasing in time.
    """
    lamp = _as_spec(lamp)
    k = np.arange(k_max + 1)
    if isinstance(lamp, CyclicTwo):
        return np.where(k >= 1, math.log(2), 0.0)
    if isinstance(lamp, IntegerLine):
        return np.array([line_lazy_entropy(int(j)) for j in k])
    if k_max > cap and not clamp:
        raise GrowthError(f"lamp entropy for {lamp} unavailable beyond {cap} steps")
    H = _exact_lazy_entropies(str(lamp), min(k_max, cap))
    return np.concatenate([H, np.full(max(0, k_max - cap), H[-1])])


@lru_cache(maxsize=8)
def _exact_lazy_entropies(lamp_name, k_max):
    spec = _as_spec(lamp_name)
    return entropy_sequence(spec, uniform_measure(spec).lazy(0.5), k_max).H


def conditional_entropy_lower_bound(lamp, base, n, trials, seed=0, clamp=False):
    """``E sum_z H(Y_{K(z)})``; returns ``(estimate, stderr)``.

    ``n`` may be a single time or a sequence (all computed from shared paths).
    """
    scalar = np.isscalar(n)
    ns = [int(n)] if scalar else [int(v) for v in n]
    if trials < 1:
        raise GrowthError("trials must be positive")
    if any(v < 0 for v in ns):
        raise GrowthError("n must be nonnegative")
    out = []
    pos = [v for v in ns if v > 0]
    hist = site_histograms(base, pos, trials, seed) if pos else None
    for v in ns:
        if v == 0:
            out.append((0.0, 0.0))
            continue
        table = lamp_entropy_table(lamp, v, clamp=clamp)
        vals = hist.functional(v, lambda k: table[k])
        out.append((float(vals.mean()), _se(vals)))
    return out[0] if scalar else out


def _se(vals):
    return float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0


def heavy_site_count(base, n, m, trials, seed=0):
    """``E #{z : K(z) >= m}``."""
    hist = site_histograms(base, [n], trials, seed)
    vals = hist.functional(n, lambda k: (k >= m).astype(float))
    return float(vals.mean()), _se(vals)


def iterated_log(n, k):
    """``log^(k) n``: the natural logarithm applied ``k`` times."""
    x = float(n)
    for _ in range(k):
        x = math.log(x)
    return x


def _threshold(n):
    return max(1, math.ceil(math.log(n)))


class _Recursion:
    """``lower_k(n) = E#{z : K(z) >= m} * E_B lower_{k-1}(B)`` with ``m = ceil(ln n)``, ``B ~ Bin(m, 1/2)``."""

    def __init__(self, trials, seed):
        self.trials = trials
        self.seed = seed
        self._cache = {}

    def depth1(self, n):
        if n == 0:
            return 0.0
        return conditional_entropy_lower_bound(C2, "Z2", n, self.trials, self.seed)[0]

    def lower(self, k, n):
        key = (k, n)
        if key not in self._cache:
            if n == 0:
                val = 0.0
            elif k == 1:
                val = self.depth1(n)
            else:
                m = _threshold(n)
                heavy = heavy_site_count("Z2", n, m, self.trials, self.seed)[0]
                w = binom.pmf(np.arange(m + 1), m, 0.5)
                val = heavy * sum(wb * self.lower(k - 1, b) for b, wb in enumerate(w) if wb > 0)
            self._cache[key] = val
        return self._cache[key]


def iterated_growth_experiment(depth, n_grid, trials, seed=0):
    """Rows ``(n, estimate, stderr, reference, ratio)`` with ``reference = n / log^(depth) n``.

    Depth 1 is simulated directly on ``C2 wr Z2``; deeper levels use the
    recursion seeded by the measured depth-1 curve (stderr reported as nan).
    """
    if not 1 <= depth <= DEPTH_CAP:
        raise GrowthError(f"depth must lie in 1..{DEPTH_CAP}")
    ns = [int(n) for n in n_grid]
    if any(n < 3 for n in ns):
        raise GrowthError("n must be at least 3")
    rows = []
    if depth == 1:
        ests = conditional_entropy_lower_bound(C2, "Z2", ns, trials, seed)
        for n, (est, se) in zip(ns, ests):
            ref = n / iterated_log(n, 1)
            rows.append((n, est, se, ref, est / ref))
        return rows
    rec = _Recursion(trials, seed)
    for n in ns:
        est = rec.lower(depth, n)
        ref = n / iterated_log(n, depth) if iterated_log(n, depth - 1) > 1 else float("nan")
        rows.append((n, est, float("nan"), ref, est / ref))
    return rows


def direct_depth2_lower_bound(n, trials, seed=0, cap=7):
    """``E sum_z H_{G_1}^{lazy}(K(z))`` on ``G_2 = G_1 wr Z2`` with exact ``G_1`` entropies.

    Entropies beyond ``cap`` steps are clamped to the value at ``cap``.
    """
    if n > 2 ** 10:
        raise GrowthError("direct depth-2 estimate is limited to n <= 1024")
    table = lamp_entropy_table("C2 wr Z2", n, clamp=True, cap=cap)
    hist = site_histograms("Z2", [n], trials, seed)
    vals = hist.functional(n, lambda k: table[k])
    return float(vals.mean()), _se(vals)


def depth1_upper_bound(base, n, trials, seed=0):
    """Upper bound on ``H(X_n)`` for ``C2 wr base`` by counting descriptions.

    ``X_n`` is determined by the number ``R`` of sites in the range, the
    range itself, the lamps on it and the position inside it.  For the line
    the range is an interval containing 0 (at most ``R`` choices) and for the
    grid a connected set coded by a depth-first tour of a spanning tree
    (``4^(2(R-1))`` choices).  Concavity of ``ln`` moves the expectation
    inside.  The trajectory bound ``n H(step)`` is also taken into account.
    """
    base = _lattice(base)
    if n == 0:
        return 0.0
    hist = site_histograms(base, [n + 1], trials, seed)
    R = float(hist.distinct(n + 1).mean())
    if base.rank == 1:
        count = math.log(n + 1) + 2 * math.log(R) + math.log(2) * R
    else:
        count = math.log(n + 1) + 2 * math.log(4) * (R - 1) + math.log(R) + math.log(2) * R
    step = uniform_measure(Wreath(C2, base)).probabilities()
    return min(n * float(-np.sum(step * np.log(step))), count)
