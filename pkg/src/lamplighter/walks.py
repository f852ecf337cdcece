"""Seeded random walks on lamplighter groups: trajectories, stopping times,
couplings and Monte Carlo checks of return-time identities.

Time conventions.  ``stopping_times`` counts visits to the base origin
including time 0, so a walk started there has ``T_1 = 0``.  The experiment
functions below (``lamp_law_at_return``, ``excursion_swap_check``,
``stopped_value_expectation``) instead take ``k`` to be a number of *returns*:
``T_k = inf{t >= 1 : #{1 <= j <= t : g_j = origin} >= k}`` and ``T_0 = 0``.
For a walk started at the origin the two differ by a shift of one index.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy import stats

from .groups import CyclicTwo, IntegerLine, Wreath, WreathElement, _as_spec, parse_group_spec
from .kernel import KAPPA, LOG_SLOPE, potential_kernel
from .measures import move_or_switch, uniform_measure
from .rng import draw_bits, draw_uniform, stream, trial_keys

__all__ = [
    "Trajectory", "StoppingRecord", "WalkError", "Estimate", "move_or_switch",
    "sample_trajectory", "stopping_times", "return_times", "excursion_heights",
    "coupled_gluing_experiment", "coupling_escape_exact", "coupled_pair_path",
    "coupling_slope", "hitting_probability", "predicted_hitting_probability",
    "exit_time_tail", "TailResult", "lamp_law_at_return", "LampLawReport",
    "lazy_lamp_law", "excursion_swap_check", "SwapReport",
    "stopped_value_expectation", "step_frequencies",
]


class WalkError(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    truncated: int = 0

    def within(self, target, k=3.0):
        return abs(self.mean - target) <= k * self.stderr + 1e-12


def _mc(values, trials, truncated=0):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return Estimate(mean, se, trials, truncated)


# ---------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class Trajectory:
    spec: object
    states: tuple
    steps: tuple
    seed: int

    def __len__(self):
        return len(self.steps)

    def base_path(self):
        return [x.position if isinstance(x, WreathElement) else x for x in self.states]


def _spec_measure(spec, measure):
    spec = _as_spec(spec)
    measure = measure if measure is not None else uniform_measure(spec)
    if str(measure.spec) != str(spec):
        raise WalkError(f"measure lives on {measure.spec}, not {spec}")
    return spec, measure


def sample_trajectory(spec, measure=None, start=None, n=0, seed=0):
    """``n`` steps from ``start`` (identity by default); step ``t`` uses draw ``t`` of the seed's stream."""
    if n < 0:
        raise WalkError("n must be nonnegative")
    spec, measure = _spec_measure(spec, measure)
    x = spec.identity() if start is None else spec.check(start)
    support = measure.support()
    labels = measure.labels()
    cum = np.cumsum([p for _, p in support])
    idx = np.minimum(np.searchsorted(cum, stream(seed, n), side="right"), len(cum) - 1)
    states, steps = [x], []
    for i in idx:
        x = spec.multiply(x, support[i][0])
        states.append(x)
        steps.append(labels[i])
    return Trajectory(spec, tuple(states), tuple(steps), seed)


def step_frequencies(measure, n, seed=0):
    """Empirical frequencies of ``n`` sampled step indices (vectorized)."""
    cum = np.cumsum(measure.probabilities())
    idx = np.minimum(np.searchsorted(cum, stream(seed, n), side="right"), len(cum) - 1)
    return np.bincount(idx, minlength=len(cum)) / n


def _base_of(spec):
    return spec.base if isinstance(spec, Wreath) else spec


def _base_norm(spec):
    base = _base_of(spec)
    if not getattr(base, "is_lattice", False):
        raise WalkError(f"base of {spec} is not a lattice")
    return base.norm


@dataclass(frozen=True)
class StoppingRecord:
    """``T[k-1]`` holds ``T_k`` (``None`` when not reached within the horizon)."""

    T: list
    E: dict
    horizon: int

    def check(self):
        reached = [t for t in self.T if t is not None]
        assert reached == sorted(reached)
        assert all(t is None for t in self.T[len(reached):])
        last = -1
        for r in sorted(self.E):
            if self.E[r] is None:
                last = math.inf
            else:
                assert self.E[r] >= last
                last = self.E[r]
        return True


def stopping_times(traj, k_max, radii=()):
    """``T_k = min{t : #{j <= t : g_j = origin} >= k}`` and ``E(r) = min{t : |g_t| > r}``."""
    norm = _base_norm(traj.spec)
    dist = [norm(p) for p in traj.base_path()]
    T, count = [], 0
    for t, d in enumerate(dist):
        if d == 0:
            count += 1
            if count <= k_max:
                T.append(t)
        if count >= k_max:
            break
    T += [None] * (k_max - len(T))
    E = {}
    for r in radii:
        E[r] = next((t for t, d in enumerate(dist) if d > r), None)
    return StoppingRecord(T, E, len(traj))


def return_times(base_dist, k):
    """Times of the first ``k`` returns (``t >= 1``) given base distances from the origin."""
    out = [t for t in range(1, len(base_dist)) if base_dist[t] == 0][:k]
    return out


def excursion_heights(base_dist, times):
    """``Lambda_j = max |g_t|`` over ``[times[j], times[j+1]]`` for consecutive stopping times."""
    return [max(base_dist[a:b + 1]) for a, b in zip(times[:-1], times[1:])]


def _largest(heights):
    """Index of the largest height; ties go to the last."""
    best = max(heights)
    return max(j for j, h in enumerate(heights) if h == best)


# ---------------------------------------------------------------------------
# vectorized walker on lattice bases, tracking the lamp at the origin

class _Stepper:
    """Step table of a measure on ``L wr Z^d`` (or ``Z^d``) with ``L`` in {C2, Z}."""

    def __init__(self, measure):
        spec = measure.spec
        base = _base_of(spec)
        if not getattr(base, "is_lattice", False):
            raise WalkError(f"base of {spec} is not a lattice")
        self.d = base.rank
        lamp = spec.lamp if isinstance(spec, Wreath) else None
        self.modulus = 2 if isinstance(lamp, CyclicTwo) else None
        self.tracks_lamp = isinstance(lamp, (CyclicTwo, IntegerLine))
        disp, inc, probs = [], [], []
        for _, g, p in measure.atoms:
            if isinstance(g, WreathElement):
                if g.lamps:
                    (site, s), = g.lamps
                    disp.append([0] * self.d)
                    inc.append(int(s) if self.tracks_lamp else 0)
                else:
                    disp.append(_vec(g.position, self.d))
                    inc.append(0)
            else:
                disp.append(_vec(g, self.d))
                inc.append(0)
            probs.append(p)
        if measure.laziness > 0:
            disp.append([0] * self.d)
            inc.append(0)
            probs.append(measure.laziness)
        self.disp = np.array(disp, dtype=np.int64)
        self.inc = np.array(inc, dtype=np.int64)
        self.cum = np.cumsum(probs)

    def step(self, keys, t, pos, lamp0):
        u = draw_uniform(keys, t)
        idx = np.minimum(np.searchsorted(self.cum, u, side="right"), len(self.cum) - 1)
        at0 = ~np.any(pos, axis=1)
        lamp0 = lamp0 + np.where(at0, self.inc[idx], 0)
        if self.modulus:
            lamp0 %= self.modulus
        return pos + self.disp[idx], lamp0


def _vec(p, d):
    return [p] if d == 1 else list(p)


def _l1(pos):
    return np.abs(pos).sum(axis=1)


# ---------------------------------------------------------------------------
# coupling on C2 wr Z

def coupled_gluing_experiment(r, trials, seed=0, max_steps=None):
    """Fraction of trials in which the coupled walkers reach ``+-r`` before gluing.

    Walkers start at the two elements of ``C2 wr Z`` that differ only in the
    lamp at 0.  Each walker holds, switches, or moves left or right with
    probability 1/4.  Away from the origin both make the same step; at the
    origin, while unglued, exactly one of them switches with probability 1/2,
    which glues them, and otherwise both move.
    """
    if trials < 1:
        raise WalkError("trials must be positive")
    if r < 1:
        raise WalkError("r must be positive")
    keys = trial_keys(seed, trials)
    pos = np.zeros(trials, dtype=np.int64)
    escaped = np.zeros(trials, dtype=bool)
    active = np.arange(trials)
    t = 0
    while active.size:
        c = draw_bits(keys[active], t) >> np.uint64(62)
        p = pos[active]
        at0 = p == 0
        glue = at0 & (c < 2)
        move = np.where(c == 2, -1, np.where(c == 3, 1, 0))
        p = p + np.where(glue, 0, move)
        pos[active] = p
        out = np.abs(p) >= r
        escaped[active[out]] = True
        active = active[~(glue | out)]
        t += 1
        if max_steps is not None and t >= max_steps:
            break
    est = float(escaped.mean())
    se = math.sqrt(max(est * (1 - est), 1e-300) / trials)
    return Estimate(est, se, trials, int(active.size))


def coupling_escape_exact(r):
    """Absorbing-chain value of the escape probability (states ``-(r-1) .. r-1``)."""
    if r < 1:
        raise WalkError("r must be positive")
    states = list(range(-(r - 1), r))
    n = len(states)
    Q = np.zeros((n, n))
    b = np.zeros(n)
    for i, x in enumerate(states):
        if x == 0:
            targets = [(-1, 0.25), (1, 0.25)]  # remaining mass 1/2 glues
        else:
            targets = [(x - 1, 0.25), (x + 1, 0.25), (x, 0.5)]
        for y, p in targets:
            if abs(y) >= r:
                b[i] += p
            else:
                Q[i, states.index(y)] += p
    v = np.linalg.solve(np.eye(n) - Q, b)
    return float(v[states.index(0)])


def coupled_pair_path(n, seed=0, trial=0):
    """Explicit coupled pair on ``C2 wr Z`` for ``n`` steps; asserts glued walkers stay equal.

    Returns the list of ``(X, Y)`` states.
    """
    G = parse_group_spec("C2 wr Z")
    flip = G.element({0: 1}, 0)
    moves = {2: G.element({}, -1), 3: G.element({}, 1)}
    X, Y = G.identity(), flip
    glued = False
    key = trial_keys(seed, 1, offset=trial)
    out = [(X, Y)]
    for t in range(n):
        c = int(draw_bits(key, t)[0] >> np.uint64(62))
        if glued:
            step = {0: None, 1: flip, **moves}[c]
            if step is not None:
                X = G.multiply(X, step)
                Y = G.multiply(Y, step)
            assert X == Y
        elif X.position == 0:
            if c == 0:
                X = G.multiply(X, flip)
            elif c == 1:
                Y = G.multiply(Y, flip)
            else:
                X = G.multiply(X, moves[c])
                Y = G.multiply(Y, moves[c])
            glued = X == Y
        else:
            step = {0: None, 1: flip, **moves}[c]
            if step is not None:
                X = G.multiply(X, step)
                Y = G.multiply(Y, step)
        out.append((X, Y))
    return out


def coupling_slope(radii=(8, 16, 32, 64, 128), trials=20000, seed=0):
    """Least-squares slope of ``log Pr`` against ``log r``; also returns the estimates."""
    ests = [coupled_gluing_experiment(r, trials, seed + i) for i, r in enumerate(radii)]
    slope = np.polyfit(np.log(radii), np.log([e.mean for e in ests]), 1)[0]
    return float(slope), ests


# ---------------------------------------------------------------------------
# simple walk on Z^2

def _grid_stepper():
    from .groups import Z2
    return _Stepper(uniform_measure(Z2))


def predicted_hitting_probability(g, r):
    """``a(g) / ((2/pi) ln r + kappa)`` for the escape of the grid walk from ``g``."""
    return potential_kernel(g) / (LOG_SLOPE * math.log(r) + KAPPA)


def hitting_probability(g, r, trials, seed=0):
    """Probability that the grid walk from ``g`` reaches L1 distance ``r`` before the origin."""
    g = (int(g[0]), int(g[1]))
    d = abs(g[0]) + abs(g[1])
    if d == 0 or d >= r:
        raise WalkError(f"need 0 < |g| < r, got |g| = {d}, r = {r}")
    if trials < 1:
        raise WalkError("trials must be positive")
    st = _grid_stepper()
    keys = trial_keys(seed, trials)
    pos = np.tile(np.array(g, dtype=np.int64), (trials, 1))
    lamp = np.zeros(trials, dtype=np.int64)
    escaped = np.zeros(trials, dtype=bool)
    active = np.arange(trials)
    t = 0
    while active.size:
        p, _ = st.step(keys[active], t, pos[active], lamp[active])
        pos[active] = p
        n1 = _l1(p)
        out = n1 >= r
        escaped[active[out]] = True
        active = active[~(out | (n1 == 0))]
        t += 1
    return _mc(escaped, trials)


@dataclass(frozen=True)
class TailResult:
    M: np.ndarray
    tail: np.ndarray
    stderr: np.ndarray
    slope: float
    intercept: float
    r2: float


def exit_time_tail(r, M_grid, trials, seed=0):
    """``Pr(E(r) > M)`` for the grid walk from the origin, with a linear fit of the log tail."""
    if trials < 1:
        raise WalkError("trials must be positive")
    M_grid = np.asarray(sorted(int(m) for m in M_grid))
    if M_grid.size == 0 or M_grid[0] < 0:
        raise WalkError("M values must be nonnegative")
    horizon = int(M_grid[-1]) + 1
    st = _grid_stepper()
    keys = trial_keys(seed, trials)
    pos = np.zeros((trials, 2), dtype=np.int64)
    lamp = np.zeros(trials, dtype=np.int64)
    E = np.full(trials, horizon, dtype=np.int64)
    active = np.arange(trials)
    if r < 0:
        E[:] = 0
        active = active[:0]
    t = 0
    while active.size and t < horizon:
        p, _ = st.step(keys[active], t, pos[active], lamp[active])
        pos[active] = p
        t += 1
        out = _l1(p) > r
        E[active[out]] = t
        active = active[~out]
    tail = np.array([(E > m).mean() for m in M_grid])
    se = np.sqrt(tail * (1 - tail) / trials)
    ok = tail > 0
    if ok.sum() >= 2:
        x, y = M_grid[ok].astype(float), np.log(tail[ok])
        slope, intercept, rv, _, _ = stats.linregress(x, y)
        r2 = float(rv ** 2)
    else:
        slope = intercept = r2 = float("nan")
    return TailResult(M_grid, tail, se, float(slope), float(intercept), r2)


# ---------------------------------------------------------------------------
# lamp at the origin at return times

def lazy_lamp_law(lamp_spec, k):
    """Exact law of the lazy-1/2 walk on the lamp group at time ``k``."""
    from .entropy import exact_walk_distribution
    mu = uniform_measure(lamp_spec).lazy(0.5)
    return exact_walk_distribution(lamp_spec, mu, k).as_dict()


@dataclass
class LampLawReport:
    k: int
    r: int
    trials: int
    accepted: int
    truncated: int
    law: dict
    expected: dict
    chi2: float
    chi2_pvalue: float
    independence_chi2: float
    independence_pvalue: float
    unconditional_chi2: float
    unconditional_pvalue: float
    conditional_on: dict = field(default_factory=dict)


def _goodness(counts, expected):
    """Chi-square of observed counts against a law, merging sparse tail cells."""
    keys = sorted(expected)
    n = sum(counts.values())
    obs = np.array([counts.get(v, 0) for v in keys], dtype=float)
    exp = np.array([expected[v] for v in keys]) * n
    outside = n - obs.sum()
    if outside > 0:
        return math.inf, 0.0
    # merge cells with expectation below 5 into neighbours
    o, e = [], []
    acc_o = acc_e = 0.0
    for a, b in zip(obs, exp):
        acc_o += a
        acc_e += b
        if acc_e >= 5:
            o.append(acc_o)
            e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        if e:
            o[-1] += acc_o
            e[-1] += acc_e
        else:
            o.append(acc_o)
            e.append(acc_e)
    if len(e) < 2:
        return 0.0, 1.0
    res = stats.chisquare(o, e)
    return float(res.statistic), float(res.pvalue)


def lamp_law_at_return(spec, k, r, trials, seed=0, horizon=None):
    """Lamp at the origin at the ``k``-th return, conditioned on returning before exiting the ``r``-ball.

    The conditioning is applied by rejection.  Rejected trials are continued
    to their ``k``-th return (up to ``horizon`` steps) so that the lamp can be
    cross-tabulated against the event for the independence test.
    """
    spec = _as_spec(spec)
    if not isinstance(spec, Wreath):
        raise WalkError("lamp law needs a wreath product")
    measure = uniform_measure(spec)
    st = _Stepper(measure)
    if not st.tracks_lamp:
        raise WalkError(f"lamp group {spec.lamp} is not supported")
    expected = lazy_lamp_law(spec.lamp, k)
    if k == 0:
        law = {spec.lamp.identity(): 1.0}
        return LampLawReport(0, r, trials, trials, 0, law, expected, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0)
    horizon = horizon if horizon is not None else max(100 * (r + 1) ** 2, 1000)
    keys = trial_keys(seed, trials)
    pos = np.zeros((trials, st.d), dtype=np.int64)
    lamp = np.zeros(trials, dtype=np.int64)
    returns = np.zeros(trials, dtype=np.int64)
    exited = np.zeros(trials, dtype=bool)
    done = np.zeros(trials, dtype=bool)
    active = np.arange(trials)
    t = 0
    while active.size and t < horizon:
        p, l0 = st.step(keys[active], t, pos[active], lamp[active])
        pos[active] = p
        lamp[active] = l0
        t += 1
        n1 = _l1(p)
        exited[active] |= (n1 > r) & (returns[active] < k)
        hit = n1 == 0
        returns[active] += hit
        fin = returns[active] >= k
        done[active[fin]] = True
        active = active[~fin]
    truncated = int((~done).sum())
    # Complete unfinished trials exactly.  The base walk is recurrent and the
    # origin lamp cannot change while the lighter is away, so a trial away from
    # the origin owes one return with its lamp unchanged; every later return is
    # one step from the origin, changing the lamp only when it is a switch.
    determined = done | exited
    idx = np.flatnonzero(~done)
    returns[idx] += _l1(pos[idx]) > 0
    need = idx[returns[idx] < k]
    j = 0
    while need.size:
        _, l0 = st.step(keys[need], horizon + j, np.zeros((need.size, st.d), dtype=np.int64),
                        lamp[need])
        lamp[need] = l0
        returns[need] += 1
        need = need[returns[need] < k]
        j += 1
    accepted = done & ~exited
    n_acc = int(accepted.sum())
    if n_acc < 100:
        raise WalkError(f"only {n_acc} accepted trials")
    vals, cnt = np.unique(lamp[accepted], return_counts=True)
    counts = {int(v): int(c) for v, c in zip(vals, cnt)}
    law = {v: c / n_acc for v, c in counts.items()}
    chi, pv = _goodness(counts, expected)
    # unconditional law at T_k over all trials
    vals_u, cnt_u = np.unique(lamp, return_counts=True)
    chi_u, pv_u = _goodness({int(v): int(c) for v, c in zip(vals_u, cnt_u)}, expected)
    # contingency of lamp value against the event {T_k < E(r)}
    levels = sorted(set(lamp[determined].tolist()))
    table = np.array([[np.sum(accepted & (lamp == v)), np.sum(determined & exited & (lamp == v))]
                      for v in levels], dtype=float)
    table = table[table.sum(axis=1) > 0]
    if table.shape[0] >= 2 and np.all(table.sum(axis=0) > 0):
        ind = stats.chi2_contingency(table, correction=False)
        ind_chi, ind_p = float(ind.statistic), float(ind.pvalue)
    else:
        ind_chi, ind_p = 0.0, 1.0
    rejected = exited
    cond = {"accepted": law}
    if rejected.any():
        v, c = np.unique(lamp[rejected], return_counts=True)
        cond["rejected"] = {int(a): b / rejected.sum() for a, b in zip(v, c)}
    return LampLawReport(k, r, trials, n_acc, truncated, law, expected, chi, pv,
                         ind_chi, ind_p, chi_u, pv_u, cond)


# ---------------------------------------------------------------------------
# swapping the highest excursion to the end

@dataclass
class SwapReport:
    mode: str
    k: int
    horizon: int
    r: int
    group: str
    tv: float
    mass: float
    paths: int
    laws: tuple = field(repr=False, default=None)


def _swap_parts(spec, snaps, dists, times):
    heights = excursion_heights(dists, times)
    i = _largest(heights)
    inv = spec.inverse
    V = spec.multiply(inv(snaps[i]), snaps[i + 1])
    W = spec.multiply(spec.multiply(snaps[i], inv(snaps[i + 1])), snaps[-1])
    return W, V


def _tv(a, b):
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(x, 0) - b.get(x, 0)) for x in keys)


def excursion_swap_check(k, horizon, mode="exhaustive", seed=0, group="C2 wr Z", r=2,
                         trials=100000, path_cap=2_000_000):
    """Compare the laws of ``X_{T_k}`` and ``W V`` on the event ``B``.

    ``V`` is the excursion of largest height (ties to the last) and ``W`` the
    product of the others.  ``B``: the ``k``-th return happens before the walk
    leaves the ``r``-ball and at least one step moves the lighter.  Exhaustive
    mode enumerates every path of length up to ``horizon`` with exact rational
    weights; paths whose ``k``-th return is later than ``horizon`` are dropped,
    an event that depends on the base path only.
    """
    spec = _as_spec(group)
    measure = uniform_measure(spec)
    norm = _base_norm(spec)
    if k < 1:
        raise WalkError("k must be at least 1")
    if mode == "exhaustive":
        return _swap_exhaustive(spec, measure, norm, k, horizon, r, path_cap)
    if mode == "mc":
        return _swap_mc(spec, measure, norm, k, horizon, r, trials, seed)
    raise WalkError(f"unknown mode {mode!r}")


def _swap_exhaustive(spec, measure, norm, k, horizon, r, path_cap):
    if k > 2 or horizon > 8:
        raise WalkError("exhaustive mode supports k <= 2 and horizon <= 8")
    steps = [(g, Fraction(p).limit_denominator(10 ** 6)) for g, p in measure.support()]
    if len(steps) ** horizon > path_cap:
        raise WalkError(f"{len(steps)}^{horizon} paths exceed the cap {path_cap}")
    law_x, law_wv = {}, {}
    count = [0]
    e = spec.identity()

    def walk(x, w, dists, snaps, times, moved):
        t = len(dists) - 1
        d = dists[-1]
        if t > 0 and d == 0:
            snaps = snaps + [x]
            times = times + [t]
            if len(times) - 1 == k:
                if moved:
                    count[0] += 1
                    law_x[x] = law_x.get(x, 0) + w
                    W, V = _swap_parts(spec, snaps, dists, times)
                    wv = spec.multiply(W, V)
                    law_wv[wv] = law_wv.get(wv, 0) + w
                return
        if d > r or t == horizon:
            return
        for g, p in steps:
            y = spec.multiply(x, g)
            nd = norm(y.position)
            walk(y, w * p, dists + [nd], snaps, times, moved or nd != d)

    walk(e, Fraction(1), [0], [e], [0], False)
    mass = float(sum(law_x.values()))
    tv = _tv(law_x, law_wv)
    return SwapReport("exhaustive", k, horizon, r, str(spec), float(tv), mass, count[0],
                      (law_x, law_wv))


def _swap_mc(spec, measure, norm, k, horizon, r, trials, seed):
    support = measure.support()
    cum = np.cumsum([p for _, p in support])
    keys = trial_keys(seed, trials)
    U = np.stack([draw_uniform(keys, t) for t in range(horizon)], axis=1)
    IDX = np.minimum(np.searchsorted(cum, U, side="right"), len(cum) - 1)
    law_x, law_wv = {}, {}
    used = 0
    e = spec.identity()
    for row in IDX:
        x, dists, snaps, times, moved = e, [0], [e], [0], False
        for t, i in enumerate(row, start=1):
            x = spec.multiply(x, support[i][0])
            d = norm(x.position)
            moved = moved or d != dists[-1]
            dists.append(d)
            if d > r:
                break
            if d == 0:
                snaps.append(x)
                times.append(t)
                if len(times) - 1 == k:
                    break
        if len(times) - 1 < k or dists[-1] > r or not moved:
            continue
        used += 1
        W, V = _swap_parts(spec, snaps, dists, times)
        law_x[x] = law_x.get(x, 0) + 1
        wv = spec.multiply(W, V)
        law_wv[wv] = law_wv.get(wv, 0) + 1
    if used == 0:
        raise WalkError("no trial satisfied the conditioning event")
    lx = {a: c / used for a, c in law_x.items()}
    lw = {a: c / used for a, c in law_wv.items()}
    return SwapReport("mc", k, horizon, r, str(spec), _tv(lx, lw), used / trials, used, (lx, lw))


# ---------------------------------------------------------------------------
# optional stopping

def stopped_value_expectation(h, x=None, k=1, r=10, trials=10000, seed=0, override=None,
                              horizon=None):
    """Monte Carlo ``E_x[h(X_{T_k ^ E(r)})]``, optionally with the origin lamp set to ``override``.

    ``T_k`` is the ``k``-th return of the lighter to the base origin (``t >= 1``)
    and ``E(r)`` the first time its L1 distance exceeds ``r``.  Trials still
    running at ``horizon`` are evaluated where they stand and counted as
    truncated.
    """
    spec = h.spec
    measure = h.measure
    x = spec.identity() if x is None else spec.check(x)
    if trials < 1:
        raise WalkError("trials must be positive")
    horizon = horizon if horizon is not None else max(200 * (r + 1) ** 2, 1000)
    if h.depends == "all" or not isinstance(spec, Wreath):
        return _stopped_generic(h, spec, measure, x, k, r, trials, seed, override, horizon)
    st = _Stepper(measure)
    if h.depends == "origin-lamp" and not st.tracks_lamp:
        raise WalkError(f"lamp group {spec.lamp} is not supported")
    origin = spec.base.identity()
    start_pos = np.array(_vec(x.position, st.d), dtype=np.int64)
    keys = trial_keys(seed, trials)
    pos = np.tile(start_pos, (trials, 1))
    lamp = np.full(trials, int(x.lamp(origin)) if st.tracks_lamp else 0, dtype=np.int64)
    returns = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials) if _l1(pos[:1])[0] <= r else np.arange(0)
    t = 0
    while active.size and t < horizon:
        p, l0 = st.step(keys[active], t, pos[active], lamp[active])
        pos[active] = p
        lamp[active] = l0
        t += 1
        n1 = _l1(p)
        returns[active] += n1 == 0
        stop = (returns[active] >= k) | (n1 > r)
        active = active[~stop]
    if override is not None:
        spec.lamp.check(override)
        lamp[:] = int(override)
    P = pos[:, 0] if st.d == 1 else pos
    vals = h.values(P, lamp)
    return _mc(vals, trials, int(active.size))


def _stopped_generic(h, spec, measure, x, k, r, trials, seed, override, horizon):
    from .harmonic import lamp_override
    norm = _base_norm(spec)
    support = measure.support()
    cum = np.cumsum([p for _, p in support])
    keys = trial_keys(seed, trials)
    vals = np.empty(trials)
    truncated = 0
    for i in range(trials):
        y = x
        pos = y.position if isinstance(y, WreathElement) else y
        returns, t = 0, 0
        while norm(pos) <= r and returns < k and t < horizon:
            u = draw_uniform(keys[i:i + 1], t)[0]
            j = min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)
            y = spec.multiply(y, support[j][0])
            pos = y.position if isinstance(y, WreathElement) else y
            t += 1
            returns += norm(pos) == 0
        truncated += t >= horizon and returns < k and norm(pos) <= r
        if override is not None:
            y = lamp_override(spec, y, override)
        vals[i] = h(y)
    return _mc(vals, trials, truncated)
