"""Entropy functionals on finite distributions and exact walk laws.

All logarithms are natural, ``0 log 0 = 0``, and entropy carries the usual
minus sign so that it is nonnegative.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .groups import _as_spec
from .measures import uniform_measure

__all__ = [
    "FiniteDistribution", "JointDistribution", "DistributionError",
    "entropy", "kl_divergence", "mutual_information", "conditional_entropy",
    "dbtv", "exact_walk_distribution", "entropy_sequence", "EntropySequence",
    "check_inequality_suite", "harmonic_growth_lower_curve",
    "lemma_pair_sides", "corollary_sides", "harmonic_bound_sides",
    "line_lazy_entropy", "line_remark_check",
]

TOL = 1e-12


class DistributionError(ValueError):
    pass


class FiniteDistribution:
    """Probability mass over distinct hashable outcome keys."""

    def __init__(self, support, mass, validate=True):
        self.support = list(support)
        self.mass = np.asarray(mass, dtype=float)
        if validate:
            if len(self.support) != len(self.mass):
                raise DistributionError("support and mass differ in length")
            if len(set(self.support)) != len(self.support):
                raise DistributionError("outcome keys are not distinct")
            if np.any(self.mass <= 0):
                raise DistributionError("masses must be positive")
            if abs(math.fsum(self.mass) - 1.0) > TOL:
                raise DistributionError(f"masses sum to {math.fsum(self.mass)!r}")

    @classmethod
    def from_dict(cls, d, validate=True):
        items = [(k, v) for k, v in d.items() if v > 0]
        return cls([k for k, _ in items], [v for _, v in items], validate)

    @classmethod
    def from_array(cls, p):
        p = np.asarray(p, dtype=float)
        keep = np.flatnonzero(p > 0)
        return cls(list(keep), p[keep])

    def as_dict(self):
        return dict(zip(self.support, self.mass))

    def __len__(self):
        return len(self.support)

    def expect(self, f):
        return math.fsum(m * f(k) for k, m in zip(self.support, self.mass))


@dataclass
class JointDistribution:
    """Joint law of ``(X, Y)`` as a dense matrix over enumerated outcomes."""

    matrix: np.ndarray
    x_keys: list = None
    y_keys: list = None
    px: np.ndarray = field(init=False, repr=False)
    py: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        P = np.asarray(self.matrix, dtype=float)
        if P.ndim != 2 or np.any(P < 0) or abs(math.fsum(P.ravel()) - 1.0) > TOL:
            raise DistributionError("joint masses must be nonnegative and sum to 1")
        self.matrix = P
        self.px = P.sum(axis=1)
        self.py = P.sum(axis=0)
        if self.x_keys is None:
            self.x_keys = list(range(P.shape[0]))
        if self.y_keys is None:
            self.y_keys = list(range(P.shape[1]))


def _plogp(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log(p[nz])
    return out


def _h(p):
    return -math.fsum(_plogp(p).ravel())


def entropy(mu):
    """Shannon entropy in nats."""
    if isinstance(mu, FiniteDistribution):
        return _h(mu.mass)
    p = np.asarray(mu, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DistributionError("not a probability vector")
    return _h(p)


def _aligned(mu, nu):
    if isinstance(mu, FiniteDistribution) and isinstance(nu, FiniteDistribution):
        keys = list(dict.fromkeys(mu.support + nu.support))
        a, b = mu.as_dict(), nu.as_dict()
        return (np.array([a.get(k, 0.0) for k in keys]),
                np.array([b.get(k, 0.0) for k in keys]))
    p, q = np.asarray(mu, dtype=float), np.asarray(nu, dtype=float)
    if p.shape != q.shape:
        raise DistributionError("outcome spaces differ")
    return p, q


def kl_divergence(mu, nu):
    """``D(mu || nu)``; ``inf`` unless ``mu`` is absolutely continuous w.r.t. ``nu``."""
    p, q = _aligned(mu, nu)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    nz = p > 0
    return max(0.0, math.fsum(p[nz] * (np.log(p[nz]) - np.log(q[nz]))))


def dbtv(mu, nu):
    """``sum (mu - nu)^2 / (mu + nu)`` over the union of supports."""
    p, q = _aligned(mu, nu)
    s = p + q
    nz = s > 0
    return math.fsum((p[nz] - q[nz]) ** 2 / s[nz])


def mutual_information(P):
    """``I(X, Y)`` computed directly from the joint law."""
    M = P.matrix
    i, j = np.nonzero(M > 0)
    m = M[i, j]
    return max(0.0, math.fsum(m * (np.log(m) - np.log(P.px[i]) - np.log(P.py[j]))))


def conditional_entropy(P):
    """``H(X | Y) = H(X, Y) - H(Y)``."""
    return _h(P.matrix) - _h(P.py)


def exact_walk_distribution(spec, measure=None, n=0, support_cap=2_000_000, n_cap=None):
    """Exact law of ``X_n`` started at the identity, by repeated convolution."""
    spec = _as_spec(spec)
    measure = measure if measure is not None else uniform_measure(spec)
    if n_cap is not None and n > n_cap:
        raise DistributionError(f"n = {n} exceeds cap {n_cap}")
    steps = measure.support()
    law = {spec.identity(): 1.0}
    for _ in range(n):
        nxt = {}
        for x, px in law.items():
            for s, ps in steps:
                y = spec.multiply(x, s)
                nxt[y] = nxt.get(y, 0.0) + px * ps
        if len(nxt) > support_cap:
            raise DistributionError(f"support exceeds cap {support_cap}")
        law = nxt
    return FiniteDistribution.from_dict(law, validate=False)


@dataclass
class EntropySequence:
    n: np.ndarray
    H: np.ndarray
    laws: list = field(repr=False, default=None)

    @property
    def increments(self):
        return np.diff(self.H)

    def monotone_increments(self, tol=1e-12):
        inc = self.increments
        return bool(np.all(inc[1:] <= inc[:-1] + tol))

    def n_delta_bound(self, tol=1e-12):
        """``n (H(X_n) - H(X_{n-1})) <= H(X_n)`` for every ``n >= 1``."""
        inc = self.increments
        return bool(np.all(self.n[1:] * inc <= self.H[1:] + tol))


def entropy_sequence(spec, measure=None, n_max=10, keep_laws=False, **kw):
    """``H(X_0), ..., H(X_{n_max})`` from exact laws."""
    spec = _as_spec(spec)
    measure = measure if measure is not None else uniform_measure(spec)
    steps = measure.support()
    law = {spec.identity(): 1.0}
    Hs, laws = [0.0], [law]
    cap = kw.get("support_cap", 2_000_000)
    for _ in range(n_max):
        nxt = {}
        for x, px in law.items():
            for s, ps in steps:
                y = spec.multiply(x, s)
                nxt[y] = nxt.get(y, 0.0) + px * ps
        if len(nxt) > cap:
            raise DistributionError(f"support exceeds cap {cap}")
        law = nxt
        Hs.append(_h(np.fromiter(law.values(), float)))
        if keep_laws:
            laws.append(law)
    return EntropySequence(np.arange(n_max + 1), np.array(Hs), laws if keep_laws else None)


def lemma_pair_sides(p, q, f):
    """Both sides of ``(E f(X) - E f(Y))^2 <= 2 D(X||Y) (E f(X)^2 + E f(Y)^2)``."""
    lhs = (float(np.dot(p, f)) - float(np.dot(q, f))) ** 2
    rhs = 2 * kl_divergence(p, q) * (float(np.dot(p, f * f)) + float(np.dot(q, f * f)))
    return lhs, rhs


def corollary_sides(P, f):
    """Both sides of ``E|E[f(X)|Y] - E f(X)| <= 2 sqrt(I(X,Y)) sqrt(E f(X)^2)``."""
    M = P.matrix
    Ef = float(np.dot(P.px, f))
    lhs = 0.0
    for j, py in enumerate(P.py):
        if py > 0:
            lhs += py * abs(float(np.dot(M[:, j], f)) / py - Ef)
    rhs = 2 * math.sqrt(mutual_information(P)) * math.sqrt(float(np.dot(P.px, f * f)))
    return lhs, rhs


def harmonic_bound_sides(seq, h, z_value=None, spec=None):
    """Per ``n``: ``(E|h(X_1) - h(z)|)^2`` and ``4 E|h(X_n) - h(z)|^2 (H(X_n) - H(X_{n-1}))``.

    ``seq`` must carry the exact laws (``keep_laws=True``); ``z`` is the identity.
    """
    laws = seq.laws
    if z_value is None:
        z_value = h(next(iter(laws[0])))
    e1 = math.fsum(p * abs(h(x) - z_value) for x, p in laws[1].items())
    lhs = e1 ** 2
    out = []
    for n in range(1, len(laws)):
        m2 = math.fsum(p * (h(x) - z_value) ** 2 for x, p in laws[n].items())
        out.append((n, lhs, 4 * m2 * (seq.H[n] - seq.H[n - 1])))
    return out


def _random_dist(rng, m, zeros):
    p = rng.dirichlet(np.full(m, rng.choice([0.3, 1.0, 3.0])))
    if zeros:
        p[rng.random(m) < 0.25] = 0.0
        if p.sum() == 0:
            p[rng.integers(m)] = 1.0
        p /= p.sum()
    return p


def _violation(lhs, rhs):
    return lhs > rhs * (1 + 1e-9) + 1e-14


def check_inequality_suite(config):
    """Fuzz the entropy inequalities; one report dict per inequality.

    ``config`` keys: ``trials`` (default 10000), ``seed``, ``max_outcomes``
    (default 6) and optionally ``walk = {"group", "n_max", "harmonic"}`` for
    the harmonic-function bound on exact walk laws.
    """
    if not isinstance(config, dict):
        raise ValueError("config must be a mapping")
    unknown = set(config) - {"trials", "seed", "max_outcomes", "walk"}
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    trials = int(config.get("trials", 10000))
    seed = int(config.get("seed", 0))
    m_max = int(config.get("max_outcomes", 6))
    if trials < 1 or m_max < 2:
        raise ValueError("need trials >= 1 and max_outcomes >= 2")
    rng = np.random.default_rng([seed, 1])
    reports = []

    def report(name, pairs):
        ratios = [l / r for l, r in pairs if r > 0]
        reports.append({"inequality": name, "trials": len(pairs),
                        "violations": int(sum(_violation(l, r) for l, r in pairs)),
                        "max_ratio": float(max(ratios)) if ratios else 0.0, "seed": seed})

    lemma, dstep, cor = [], [], []
    for _ in range(trials):
        m = int(rng.integers(2, m_max + 1))
        p = _random_dist(rng, m, zeros=True)
        q = _random_dist(rng, m, zeros=rng.random() < 0.5)
        f = rng.normal(size=m) * rng.choice([1.0, 10.0])
        lemma.append(lemma_pair_sides(p, q, f))
        kl = kl_divergence(p, q)
        dstep.append((dbtv(p, q), 2 * kl))
        mx, my = int(rng.integers(2, m_max + 1)), int(rng.integers(2, m_max + 1))
        J = _random_dist(rng, mx * my, zeros=True).reshape(mx, my)
        fx = rng.normal(size=mx)
        cor.append(corollary_sides(JointDistribution(J), fx))
    report("lemma: (Ef(X)-Ef(Y))^2 <= 2D(X||Y)(Ef(X)^2+Ef(Y)^2)", lemma)
    report("proof step: dbtv <= 2 D", dstep)
    report("corollary: E|E[f(X)|Y]-Ef(X)| <= 2 sqrt(I) sqrt(Ef(X)^2)", cor)

    walk = config.get("walk")
    if walk:
        from .harmonic import BaseCoordinate
        group = walk.get("group", "C2 wr Z")
        if walk.get("harmonic", "base-coordinate") != "base-coordinate":
            raise ValueError("walk audit supports the base-coordinate function")
        h = BaseCoordinate(group)
        seq = entropy_sequence(group, h.measure, int(walk.get("n_max", 10)), keep_laws=True)
        rows = harmonic_bound_sides(seq, h)
        report(f"harmonic bound on {group}: (E|h(X1)-h(z)|)^2 <= 4E|h(Xn)-h(z)|^2 dH",
               [(l, r) for _, l, r in rows])
    return reports


def harmonic_growth_lower_curve(n, H):
    """``sqrt(n / H(X_n))``."""
    n = np.asarray(n, dtype=float)
    H = np.asarray(H, dtype=float)
    if np.any(H <= 0):
        raise ValueError("entropies must be positive")
    return np.sqrt(n / H)


def line_lazy_entropy(n):
    """Entropy of the lazy (1/2 hold, 1/4 each way) walk on Z at time ``n``.

    ``X_n + n`` is Binomial(2n, 1/2).
    """
    from scipy.stats import binom
    if n == 0:
        return 0.0
    return float(binom(2 * n, 0.5).entropy())


def line_remark_check(n_max=2000):
    """Rows ``(n, lhs, rhs)`` of the harmonic bound for ``h(x) = x`` on the lazy line walk.

    ``lhs = (E|X_1|)^2 = 1/4`` and ``rhs = 4 (n/2) (H(X_n) - H(X_{n-1}))``.
    """
    H = np.array([line_lazy_entropy(n) for n in range(n_max + 1)])
    n = np.arange(1, n_max + 1)
    return n, np.full(n_max, 0.25), 4 * (n / 2) * np.diff(H)
