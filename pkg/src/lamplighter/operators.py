"""Binomial difference bounds and lazy-power identities for finite Markov operators."""
from dataclasses import dataclass
import math

import numpy as np
from scipy.stats import binom

from .rng import draw_bits, trial_keys

__all__ = [
    "BinomialTable", "finite_difference", "derivative_bound", "verify_derivative_bound",
    "FiniteMarkovOperator", "lazy_power_expansion_check", "difference_coefficients",
    "majorant", "majorant_decay_scan", "laplacian_drift_estimate", "exact_drift",
    "OperatorError",
]

SIZE_CAP = 256


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class BinomialTable:
    """``b(k) = C(n, k) p^k (1 - p)^(n - k)`` on ``0..n``, zero elsewhere."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.p <= 1:
            raise OperatorError("need n >= 0 and 0 <= p <= 1")

    @property
    def masses(self):
        return binom.pmf(np.arange(self.n + 1), self.n, self.p)

    def __call__(self, k):
        return float(binom.pmf(k, self.n, self.p)) if 0 <= k <= self.n else 0.0


def finite_difference(table, m):
    """``(ks, d)`` with ``d[i] = (del^m b)(ks[i])`` for ``ks = -m .. n`` and ``del psi(k) = psi(k) - psi(k+1)``."""
    if m < 0:
        raise OperatorError("m must be nonnegative")
    v = table.masses if isinstance(table, BinomialTable) else np.asarray(table, dtype=float)
    for _ in range(m):
        v = np.concatenate(([0.0], v)) - np.concatenate((v, [0.0]))
    return np.arange(-m, len(v) - m), v


def derivative_bound(n, m, p):
    """``(m / (p (1 - p) n))^(m/2)``."""
    return (m / (p * (1 - p) * n)) ** (m / 2) if m else 1.0


def verify_derivative_bound(n_range, m_range, p_set, rel=1e-12):
    """Exhaustive audit of ``max_k |del^m b(k)| <= (m / (p (1 - p) n))^(m/2)``."""
    violations, checked = 0, 0
    worst = (0.0, None)
    for p in p_set:
        for n in n_range:
            if n < 1:
                continue
            v = BinomialTable(n, p).masses
            m_hi = max(m_range)
            for m in range(m_hi + 1):
                if m > 0:
                    v = np.concatenate(([0.0], v)) - np.concatenate((v, [0.0]))
                if m not in m_range:
                    continue
                top = float(np.max(np.abs(v)))
                bound = derivative_bound(n, m, p)
                checked += 1
                if top > bound * (1 + rel):
                    violations += 1
                if top / bound > worst[0]:
                    worst = (top / bound, {"n": n, "m": m, "p": p})
    return {"violations": violations, "checked": checked, "max_ratio": worst[0], "worst": worst[1]}


class FiniteMarkovOperator:
    """Dense row-stochastic matrix over an enumerated state space."""

    def __init__(self, matrix, states=None):
        P = np.asarray(matrix, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise OperatorError("matrix must be square")
        if P.shape[0] > SIZE_CAP:
            raise OperatorError(f"size {P.shape[0]} exceeds cap {SIZE_CAP}")
        if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1)) > 1e-12:
            raise OperatorError("matrix is not stochastic")
        self.matrix = P
        self.states = list(states) if states is not None else list(range(P.shape[0]))

    @property
    def size(self):
        return self.matrix.shape[0]

    @classmethod
    def cycle(cls, n):
        """Simple random walk on the cyclic group of order ``n``."""
        P = np.zeros((n, n))
        for i in range(n):
            P[i, (i + 1) % n] += 0.5
            P[i, (i - 1) % n] += 0.5
        return cls(P)


def difference_coefficients(b, m):
    """Coefficients of ``(1 - x)^m sum_j b_j x^j``: ``m`` passes of ``c_j <- c_j - c_{j-1}``."""
    c = np.asarray(b, dtype=float)
    for _ in range(m):
        c = np.concatenate((c, [0.0])) - np.concatenate(([0.0], c))
    return c


def lazy_power_expansion_check(P, alpha, k, m=0):
    """Discrepancies of ``Q^k = sum_j b(j) P^j`` and ``(I - P)^m Q^k = sum_j c_j P^j``.

    ``Q = alpha I + (1 - alpha) P`` and ``b`` is Binomial(k, 1 - alpha).
    """
    if not isinstance(P, FiniteMarkovOperator):
        P = FiniteMarkovOperator(P)
    if not 0 < alpha < 1:
        raise OperatorError("alpha must lie in (0, 1)")
    if k < 0 or m < 0:
        raise OperatorError("k and m must be nonnegative")
    A = P.matrix
    N = P.size
    I = np.eye(N)
    Qk = np.linalg.matrix_power(alpha * I + (1 - alpha) * A, k)
    b = BinomialTable(k, 1 - alpha).masses
    c = difference_coefficients(b, m)
    powers = [I]
    for _ in range(k + m):
        powers.append(powers[-1] @ A)
    S = sum(bj * powers[j] for j, bj in enumerate(b))
    lhs2 = np.linalg.matrix_power(I - A, m) @ Qk
    S2 = sum(cj * powers[j] for j, cj in enumerate(c))
    sup_c = float(np.max(np.abs(c)))
    bound = derivative_bound(k, m, alpha) if k > 0 else math.inf
    return {"size": N, "k": k, "m": m, "alpha": alpha,
            "expansion": float(np.max(np.abs(Qk - S))),
            "difference": float(np.max(np.abs(lhs2 - S2))),
            "sup_coefficient": sup_c, "coefficient_bound": bound}


def majorant(k, m, alpha, g=0, C=1):
    """``(m / (alpha (1 - alpha)))^(m/2) (|g| + k)^C k^(1 - m/2)``."""
    k = np.asarray(k, dtype=float)
    return (m / (alpha * (1 - alpha))) ** (m / 2) * (g + k) ** C * k ** (1 - m / 2)


def majorant_decay_scan(m, alpha, g=0, C=1, k_lo=10, k_hi=10_000):
    """True when the majorant is strictly decreasing on every integer ``k`` in range."""
    v = majorant(np.arange(k_lo, k_hi + 1), m, alpha, g, C)
    return bool(np.all(np.diff(v) < 0))


def _tabulated(psi, t):
    if callable(psi):
        return lambda x: np.asarray(psi(x), dtype=float)
    arr = np.asarray(psi, dtype=float)
    if arr.shape != (2 * t + 1,):
        raise OperatorError(f"table must cover [-{t}, {t}]")
    return lambda x: arr[np.asarray(x) + t]


def exact_drift(psi, t):
    """``(E psi(X_t) - psi(0)) / t`` for the +-1 walk, from the binomial law of ``X_t``."""
    f = _tabulated(psi, t)
    j = np.arange(t + 1)
    w = binom.pmf(j, t, 0.5)
    return float((np.dot(w, f(2 * j - t)) - f(np.array([0]))[0]) / t)


def laplacian_drift_estimate(psi, t, trials, seed=0):
    """Monte Carlo ``(E psi(X_t) - psi(0)) / t`` for the simple walk on the line.

    ``psi`` is a vectorized callable or a table of values on ``[-t, t]``.
    Returns ``(estimate, stderr)``.
    """
    if t < 1 or trials < 1:
        raise OperatorError("t and trials must be positive")
    f = _tabulated(psi, t)
    keys = trial_keys(seed, trials)
    ups = np.zeros(trials, dtype=np.int64)
    # one bit per step: 64 steps per draw
    for d in range((t + 63) // 64):
        bits = draw_bits(keys, d)
        used = min(64, t - d * 64)
        if used < 64:
            bits = bits & np.uint64((1 << used) - 1)
        ups += np.bitwise_count(bits).astype(np.int64)
    x = 2 * ups - t
    vals = (f(x) - f(np.array([0]))[0]) / t
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
