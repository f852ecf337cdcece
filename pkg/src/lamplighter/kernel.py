"""Potential kernel of the simple random walk on the square lattice.

``a`` is harmonic off the origin, ``a(0) = 0`` and ``(1/4) sum_{w~0} a(w) = 1``.
Every value has the exact form ``p + q/pi`` with ``p`` an integer and ``q`` a
rational whose denominator divides ``lcm(1, 3, ..., 2N - 1)``.  Starting from
the diagonal ``a(n, n) = (4/pi) (1 + 1/3 + ... + 1/(2n-1))`` and ``a(1, 0) = 1``
the harmonicity equations determine the octant ``0 <= y <= x`` diagonal by
diagonal.  The recurrence is numerically explosive, so it is run in exact
integer arithmetic and only the final ``p + q/pi`` is rounded, at a working
precision chosen from the size of ``p`` and ``q``.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import json
import math

import mpmath
import numpy as np
from scipy.special import gammaln

__all__ = [
    "KernelTable", "KernelError", "build_kernel_table", "potential_kernel",
    "series_potential_kernel", "asymptotic_deviation", "KAPPA", "LOG_SLOPE",
    "RADIUS_CAP",
]

RADIUS_CAP = 200
LOG_SLOPE = 2 / math.pi
# a(z) = (2/pi) ln|z| + KAPPA + O(|z|^-2)
KAPPA = (2 * 0.57721566490153286061 + math.log(8)) / math.pi


class KernelError(ValueError):
    pass


@lru_cache(maxsize=8)
def _exact_octant(radius):
    """``{(x, y): (p, Q)}`` for ``0 <= y <= x <= radius``; value ``p + Q / (D pi)``."""
    D = 1
    for j in range(1, 2 * radius + 2, 2):
        D = D * j // math.gcd(D, j)
    diag = [(0, 0)]
    acc = 0
    for n in range(1, radius + 1):
        acc += 4 * (D // (2 * n - 1))
        diag.append((0, acc))
    # vals[d][y] = a(y + d, y)
    vals = [diag]
    if radius >= 1:
        d1 = [(1, 0)]
        for n in range(1, radius):
            p0, q0 = diag[n]
            p1, q1 = d1[n - 1]
            d1.append((2 * p0 - p1, 2 * q0 - q1))
        vals.append(d1)
    for d in range(2, radius + 1):
        prev, prev2 = vals[d - 1], vals[d - 2]
        # harmonic at (d-1, 0), using a(d-1, -1) = a(d-1, 1)
        cur = [(4 * prev[0][0] - prev2[0][0] - 2 * prev2[1][0],
                4 * prev[0][1] - prev2[0][1] - 2 * prev2[1][1])]
        for y in range(1, radius - d + 1):
            # harmonic at (y+d-1, y)
            c, l, u, b = prev[y], prev2[y], prev2[y + 1], cur[y - 1]
            cur.append((4 * c[0] - l[0] - u[0] - b[0], 4 * c[1] - l[1] - u[1] - b[1]))
        vals.append(cur)
    out = {}
    for d, row in enumerate(vals):
        for y, pq in enumerate(row):
            out[(y + d, y)] = pq
    return D, out


def _evaluate(p, Q, D):
    bits = max(abs(p).bit_length(), abs(Q).bit_length() - D.bit_length() + 1, 1) + 80
    with mpmath.workprec(bits):
        return float(mpmath.mpf(p) + mpmath.mpf(Q) / (mpmath.mpf(D) * mpmath.pi))


@dataclass(frozen=True)
class KernelTable:
    """Dense table of ``a(z)`` for ``max(|x|, |y|) <= radius``.

    ``values[x + radius, y + radius]`` holds the standard kernel plus
    ``offset`` (0 for the standard normalization, 1/2 for ``a(0) = 1/2``).
    ``accuracy`` bounds the absolute error of every entry.
    """

    radius: int
    values: np.ndarray = field(repr=False)
    offset: float
    accuracy: float

    @property
    def normalization(self):
        return "shifted" if self.offset == 0.5 else "standard"

    def __call__(self, z):
        x, y = z
        r = self.radius
        if abs(x) > r or abs(y) > r:
            raise KernelError(f"point {z} outside table radius {r}")
        return float(self.values[x + r, y + r])

    def laplacian_defect(self):
        """``(1/4) sum_{w~z} a(w) - a(z)`` on the interior ``max(|x|,|y|) < radius``."""
        v = self.values
        avg = 0.25 * (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2])
        return avg - v[1:-1, 1:-1]

    def harmonicity_residual(self):
        """Largest ``|(1/4) sum a(w) - a(z)|`` over interior ``z != 0``."""
        defect = self.laplacian_defect()
        c = self.radius - 1
        defect[c, c] = 0.0
        return float(np.max(np.abs(defect)))

    def origin_defect(self):
        return float(self.laplacian_defect()[self.radius - 1, self.radius - 1])

    def rows(self):
        r = self.radius
        for x in range(-r, r + 1):
            for y in range(-r, r + 1):
                yield (x, y, float(self.values[x + r, y + r]))

    def header(self):
        return {"radius": self.radius, "normalization": self.normalization,
                "offset": self.offset, "accuracy": self.accuracy}

    def to_json(self):
        return json.dumps({"header": self.header(),
                           "grid": [[float(f"{v:.17g}") for v in row] for row in self.values]})


_NORMALIZATION_ALIASES = {"paper": "shifted"}


def build_kernel_table(radius, tol=1e-10, normalization="standard", cap=RADIUS_CAP):
    """Potential kernel on the square ``[-radius, radius]^2``.

    ``normalization`` is ``"standard"`` (``a(0) = 0``) or ``"shifted"``
    (``a(0) = 1/2``, every value raised by 1/2); ``"paper"`` is accepted as
    another name for ``"shifted"``.
    """
    normalization = _NORMALIZATION_ALIASES.get(normalization, normalization)
    if radius < 1:
        raise KernelError("radius must be at least 1")
    if radius > cap:
        raise KernelError(f"radius {radius} exceeds cap {cap}")
    if normalization not in ("standard", "shifted"):
        raise KernelError(f"unknown normalization {normalization!r}")
    D, octant = _exact_octant(radius)
    r = radius
    vals = np.empty((2 * r + 1, 2 * r + 1))
    for (x, y), (p, Q) in octant.items():
        v = _evaluate(p, Q, D)
        for sx in (x, -x):
            for sy in (y, -y):
                vals[sx + r, sy + r] = v
                vals[sy + r, sx + r] = v
    # each entry is a correctly rounded double of an exactly known real
    accuracy = float(np.max(np.abs(vals))) * 2.0 ** -52
    if tol < accuracy:
        raise KernelError(f"tolerance {tol} below achievable accuracy {accuracy:.3g}")
    offset = 0.5 if normalization == "shifted" else 0.0
    return KernelTable(radius, vals + offset, offset, accuracy)


def potential_kernel(z, tol=1e-12):
    """``a(z)`` in the standard normalization, accurate to ``tol``."""
    if tol < 1e-12:
        raise KernelError("tolerance below 1e-12 is not supported")
    x, y = int(z[0]), int(z[1])
    radius = max(abs(x), abs(y), 1)
    radius = max(8, 1 << (radius - 1).bit_length())
    table = build_kernel_table(radius, tol)
    return table((x, y))


def _log_pmf_walk(n, m):
    """log P(S_n = m) for a +-1 walk, ``-inf`` on the wrong parity."""
    n = np.asarray(n, dtype=float)
    k = (n + m) / 2
    ok = (k == np.floor(k)) & (k >= 0) & (k <= n)
    out = np.full(n.shape, -np.inf)
    kk, nn = k[ok], n[ok]
    out[ok] = gammaln(nn + 1) - gammaln(kk + 1) - gammaln(nn - kk + 1) - nn * math.log(2)
    return out


def _heat_kernel(n, z):
    """P(X_n = z) for the simple walk on Z^2 (rotated coordinates)."""
    x, y = z
    return np.exp(_log_pmf_walk(n, x + y) + _log_pmf_walk(n, x - y))


def series_potential_kernel(z, levels=8, base=2048):
    """Independent oracle: ``sum_n (p_n(0) - p_n(z))`` with Richardson extrapolation.

    Partial sums are taken at ``N = base * 2^j`` (``j < levels``) over whole
    pairs of steps, whose tails expand in powers of ``1/N``.  Returns
    ``(value, error_estimate)``.
    """
    z = (int(z[0]), int(z[1]))
    if z == (0, 0):
        return 0.0, 0.0
    cuts = [base * 2 ** j for j in range(levels)]
    partial = []
    running = []
    lo = 0
    for N in cuts:
        n = np.arange(lo, N, dtype=float)
        terms = _heat_kernel(n, (0, 0)) - _heat_kernel(n, z)
        running.append(math.fsum(terms))
        partial.append(math.fsum(running))
        lo = N
    table = [partial]
    for m in range(1, levels):
        prev = table[-1]
        f = 2.0 ** m
        table.append([(f * prev[j + 1] - prev[j]) / (f - 1) for j in range(len(prev) - 1)])
    best = table[-1][-1]
    err = abs(table[-1][-1] - table[-2][-1])
    return best, err


def asymptotic_deviation(table, inner=20, constant=None):
    """``max |a(z) - ((2/pi) ln|z| + kappa)|`` over ``inner <= |z| <= radius``.

    ``|z|`` is the Euclidean norm; the table's normalization offset is removed.
    """
    if table.radius < 25:
        raise KernelError("radius must be at least 25")
    kappa = KAPPA if constant is None else constant
    r = table.radius
    xs = np.arange(-r, r + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    norm = np.hypot(X, Y)
    mask = (norm >= inner) & (norm <= r)
    a = table.values[mask] - table.offset
    return float(np.max(np.abs(a - (LOG_SLOPE * np.log(norm[mask]) + kappa))))
