"""Iterated wreath products of lattices and the two-element group.

Elements are plain hashable values:

* ``CyclicTwo``   -> ``0`` or ``1``
* ``IntegerLine`` -> ``int``
* ``IntegerGrid`` -> ``(x, y)``
* ``Wreath``      -> :class:`WreathElement`

A :class:`WreathElement` stores only the non-identity lamps, sorted by the
base group's ordering, so equality and hashing are structural.  The product
is ``(w, g)(x, k) = (w(.) x(g^-1 .), gk)``.
"""
from collections import deque
from dataclasses import dataclass
from itertools import permutations
import re

__all__ = [
    "GroupSpec", "CyclicTwo", "IntegerLine", "IntegerGrid", "Wreath",
    "WreathElement", "GroupSyntaxError", "ElementError", "BFSCapExceeded",
    "parse_group_spec", "multiply", "inverse", "identity", "generators",
    "word_length", "ball", "element_to_json", "element_from_json",
    "random_element", "C2", "Z", "Z2",
]


class GroupSyntaxError(ValueError):
    """Malformed group expression; ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ElementError(ValueError):
    """An element does not belong to the group it is used with."""


class BFSCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class WreathElement:
    lamps: tuple = ()
    position: object = 0

    @property
    def config(self):
        return dict(self.lamps)

    @property
    def support(self):
        return [p for p, _ in self.lamps]

    def lamp(self, point, default=0):
        for p, v in self.lamps:
            if p == point:
                return v
        return default


class GroupSpec:
    """Base class; concrete specs are frozen dataclasses."""

    is_lattice = False

    def identity(self):
        raise NotImplementedError

    def multiply(self, a, b):
        raise NotImplementedError

    def inverse(self, a):
        raise NotImplementedError

    def contains(self, a):
        raise NotImplementedError

    def generators(self):
        """Symmetric generating set as a list of ``(label, element)``."""
        raise NotImplementedError

    def sort_key(self, a):
        raise NotImplementedError

    def to_json(self, a):
        raise NotImplementedError

    def from_json(self, obj):
        raise NotImplementedError

    def check(self, a):
        if not self.contains(a):
            raise ElementError(f"{a!r} is not an element of {self}")
        return a

    def depth(self):
        return 0


@dataclass(frozen=True)
class CyclicTwo(GroupSpec):

    def identity(self):
        return 0

    def multiply(self, a, b):
        return a ^ b

    def inverse(self, a):
        return a

    def contains(self, a):
        return type(a) is int and a in (0, 1)

    def generators(self):
        return [("flip", 1)]

    def sort_key(self, a):
        return (a,)

    def to_json(self, a):
        return a

    def from_json(self, obj):
        return self.check(int(obj))

    def __str__(self):
        return "C2"


@dataclass(frozen=True)
class IntegerLine(GroupSpec):
    is_lattice = True
    rank = 1

    def identity(self):
        return 0

    def multiply(self, a, b):
        return a + b

    def inverse(self, a):
        return -a

    def contains(self, a):
        return type(a) is int

    def generators(self):
        return [("+1", 1), ("-1", -1)]

    def norm(self, a):
        return abs(a)

    def dist(self, a, b):
        return abs(a - b)

    def sort_key(self, a):
        return (a,)

    def to_json(self, a):
        return a

    def from_json(self, obj):
        return self.check(int(obj))

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class IntegerGrid(GroupSpec):
    is_lattice = True
    rank = 2

    def identity(self):
        return (0, 0)

    def multiply(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def inverse(self, a):
        return (-a[0], -a[1])

    def contains(self, a):
        return (type(a) is tuple and len(a) == 2
                and all(type(c) is int for c in a))

    def generators(self):
        return [("+x", (1, 0)), ("-x", (-1, 0)), ("+y", (0, 1)), ("-y", (0, -1))]

    def norm(self, a):
        return abs(a[0]) + abs(a[1])

    def dist(self, a, b):
        return abs(a[0] - b[0]) + abs(a[1] - b[1])

    def sort_key(self, a):
        return a

    def to_json(self, a):
        return [a[0], a[1]]

    def from_json(self, obj):
        return self.check(tuple(int(c) for c in obj))

    def __str__(self):
        return "Z2"


@dataclass(frozen=True)
class Wreath(GroupSpec):
    lamp: GroupSpec
    base: GroupSpec

    def identity(self):
        return WreathElement((), self.base.identity())

    def _canon(self, cfg, position):
        lamp_id = self.lamp.identity()
        key = self.base.sort_key
        items = sorted(((p, v) for p, v in cfg.items() if v != lamp_id),
                       key=lambda pv: key(pv[0]))
        return WreathElement(tuple(items), position)

    def element(self, lamps, position):
        """Build a canonical element from a mapping (or pairs) point -> lamp."""
        cfg = dict(lamps)
        for p, v in cfg.items():
            self.base.check(p)
            self.lamp.check(v)
        return self._canon(cfg, self.base.check(position))

    def multiply(self, a, b):
        base, lamp = self.base, self.lamp
        g = a.position
        cfg = dict(a.lamps)
        lamp_id = lamp.identity()
        for q, v in b.lamps:
            p = base.multiply(g, q)
            cfg[p] = lamp.multiply(cfg.get(p, lamp_id), v)
        return self._canon(cfg, base.multiply(g, b.position))

    def inverse(self, a):
        base, lamp = self.base, self.lamp
        ginv = base.inverse(a.position)
        cfg = {base.multiply(ginv, p): lamp.inverse(v) for p, v in a.lamps}
        return self._canon(cfg, ginv)

    def contains(self, a):
        if not isinstance(a, WreathElement) or not self.base.contains(a.position):
            return False
        lamp_id = self.lamp.identity()
        keys = []
        for p, v in a.lamps:
            if not self.base.contains(p) or not self.lamp.contains(v) or v == lamp_id:
                return False
            keys.append(self.base.sort_key(p))
        return keys == sorted(keys) and len(set(keys)) == len(keys)

    def generators(self):
        e = self.base.identity()
        gens = [(f"switch[{s}]", WreathElement(((e, v),), e))
                for s, v in self.lamp.generators()]
        gens += [(f"move[{u}]", WreathElement((), v)) for u, v in self.base.generators()]
        return gens

    def sort_key(self, a):
        return (self.base.sort_key(a.position),
                tuple((self.base.sort_key(p), self.lamp.sort_key(v)) for p, v in a.lamps))

    def to_json(self, a):
        return {"position": self.base.to_json(a.position),
                "lamps": [[self.base.to_json(p), self.lamp.to_json(v)] for p, v in a.lamps]}

    def from_json(self, obj):
        lamps = {}
        for p, v in obj["lamps"]:
            p = self.base.from_json(p)
            if p in lamps:
                raise ElementError(f"duplicate lamp point {p!r}")
            lamps[p] = self.lamp.from_json(v)
        return self.element(lamps, self.base.from_json(obj["position"]))

    def depth(self):
        return 1 + max(self.lamp.depth(), self.base.depth())

    def __str__(self):
        lamp = str(self.lamp)
        base = str(self.base)
        if isinstance(self.base, Wreath):
            base = f"({base})"
        if isinstance(self.lamp, Wreath):
            lamp = f"({lamp})"
        return f"{lamp} wr {base}"


C2 = CyclicTwo()
Z = IntegerLine()
Z2 = IntegerGrid()

_ATOMS = {"C2": C2, "Z": Z, "Z2": Z2}
_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z0-9_]+))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise GroupSyntaxError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


def parse_group_spec(text):
    """Parse a group expression such as ``"(C2 wr Z2) wr Z2"``.

    Grammar (``wr`` is left associative)::

        expr := term ("wr" term)*
        term := "C2" | "Z" | "Z2" | "(" expr ")"
    """
    if not text or not text.strip():
        raise GroupSyntaxError("empty group expression", 0)
    try:
        text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise GroupSyntaxError("non-ASCII input", exc.start) from None
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def term():
        tok, off = take()
        if tok is None:
            raise GroupSyntaxError("unexpected end of input", off)
        if tok == "(":
            inner = expr()
            close, off2 = take()
            if close != ")":
                raise GroupSyntaxError("expected ')'", off2)
            return inner
        if tok == ")" or tok == "wr":
            raise GroupSyntaxError(f"unexpected {tok!r}", off)
        if tok not in _ATOMS:
            raise GroupSyntaxError(f"unknown group atom {tok!r}", off)
        return _ATOMS[tok]

    def expr():
        left = term()
        while peek()[0] == "wr":
            take()
            left = Wreath(left, term())
        return left

    result = expr()
    tok, off = peek()
    if tok is not None:
        raise GroupSyntaxError(f"unexpected {tok!r}", off)
    return result


def _as_spec(spec):
    return parse_group_spec(spec) if isinstance(spec, str) else spec


def identity(spec):
    return _as_spec(spec).identity()


def generators(spec):
    return _as_spec(spec).generators()


def multiply(spec, a, b):
    """Group product ``a * b`` with membership checks."""
    spec = _as_spec(spec)
    return spec.multiply(spec.check(a), spec.check(b))


def inverse(spec, a):
    spec = _as_spec(spec)
    return spec.inverse(spec.check(a))


def element_to_json(spec, a):
    return _as_spec(spec).to_json(a)


def element_from_json(spec, obj):
    return _as_spec(spec).from_json(obj)


def ball(spec, radius, limit=2_000_000):
    """All elements within word distance ``radius`` of the identity, with distances."""
    spec = _as_spec(spec)
    gens = [g for _, g in spec.generators()]
    start = spec.identity()
    dist = {start: 0}
    frontier = [start]
    for d in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in gens:
                y = spec.multiply(x, s)
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        if len(dist) > limit:
            raise BFSCapExceeded(f"ball of radius {radius} exceeds {limit} elements")
        frontier = nxt
    return dist


def _bfs_distance(spec, a, cap):
    gens = [g for _, g in spec.generators()]
    start = spec.identity()
    if a == start:
        return 0
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        x, d = queue.popleft()
        if d >= cap:
            break
        for s in gens:
            y = spec.multiply(x, s)
            if y == a:
                return d + 1
            if y not in seen:
                seen.add(y)
                queue.append((y, d + 1))
    raise BFSCapExceeded(f"distance exceeds cap {cap}")


def _lamp_length(lamp, v, mode):
    """(lower, upper) word length of a lamp value."""
    if isinstance(lamp, CyclicTwo):
        return (v, v)
    if lamp.is_lattice:
        n = lamp.norm(v)
        return (n, n)
    lo, hi = word_length(lamp, v, mode="bounds")
    if mode == "exact" and lo != hi:
        raise ValueError("exact tour needs exact lamp lengths")
    return (lo, hi)


def _tour_exact(base, points, end):
    best = None
    origin = base.identity()
    for order in permutations(points):
        cur, cost = origin, 0
        for p in order:
            cost += base.dist(cur, p)
            cur = p
        cost += base.dist(cur, end)
        if best is None or cost < best:
            best = cost
    return best if best is not None else base.dist(origin, end)


def _tour_greedy(base, points, end):
    remaining = list(points)
    cur = base.identity()
    cost = 0
    while remaining:
        i = min(range(len(remaining)), key=lambda j: (base.dist(cur, remaining[j]), j))
        p = remaining.pop(i)
        cost += base.dist(cur, p)
        cur = p
    return cost + base.dist(cur, end)


def word_length(spec, a, mode="bfs", cap=12, max_exact_lamps=8):
    """Word length of ``a`` with respect to the recursive move/switch generators.

    Modes
    -----
    ``exact-line``
        Closed form on ``C2 wr Z``: ``|supp| + 2A + 2B - |n|`` where
        ``-A = min(supp + {0, n})`` and ``B = max(supp + {0, n})``.
    ``exact-tour``
        Lattice base with at most ``max_exact_lamps`` lamps: lamp lengths plus
        the shortest base tour from the origin through the support to the
        position (brute force over orders).
    ``bounds``
        ``(lower, upper)`` sandwich valid on any lattice base.
    ``bfs``
        Breadth-first search in the Cayley graph, up to ``cap`` steps.
    """
    spec = _as_spec(spec)
    spec.check(a)
    if mode == "bfs":
        return _bfs_distance(spec, a, cap)
    if isinstance(spec, (CyclicTwo,)):
        return a
    if spec.is_lattice:
        return spec.norm(a) if mode != "bounds" else (spec.norm(a), spec.norm(a))
    if mode == "exact-line":
        if spec != Wreath(C2, Z):
            raise ValueError(f"mode exact-line requires C2 wr Z, got {spec}")
        n = a.position
        pts = [p for p, _ in a.lamps] + [0, n]
        A, B = -min(pts), max(pts)
        return len(a.lamps) + 2 * A + 2 * B - abs(n)
    if not isinstance(spec, Wreath) or not spec.base.is_lattice:
        raise ValueError(f"mode {mode!r} needs a wreath product over a lattice, got {spec}")
    base = spec.base
    points = [p for p, _ in a.lamps]
    if mode == "exact-tour":
        if len(points) > max_exact_lamps:
            raise ValueError(f"{len(points)} lamps exceed exact-tour limit {max_exact_lamps}")
        lamps = sum(_lamp_length(spec.lamp, v, "exact")[0] for _, v in a.lamps)
        return lamps + _tour_exact(base, points, a.position)
    if mode == "bounds":
        lens = [_lamp_length(spec.lamp, v, "bounds") for _, v in a.lamps]
        origin = base.identity()
        reach = max([base.dist(origin, p) + base.dist(p, a.position) for p in points]
                    + [base.dist(origin, a.position)])
        lower = sum(lo for lo, _ in lens) + reach
        upper = sum(hi for _, hi in lens) + _tour_greedy(base, points, a.position)
        return (lower, upper)
    raise ValueError(f"unknown mode {mode!r}")


def random_element(spec, rng, lamps=4, span=5):
    """A random element with up to ``lamps`` lamps on base points within ``span``."""
    spec = _as_spec(spec)
    if isinstance(spec, CyclicTwo):
        return int(rng.integers(0, 2))
    if isinstance(spec, IntegerLine):
        return int(rng.integers(-span, span + 1))
    if isinstance(spec, IntegerGrid):
        return (int(rng.integers(-span, span + 1)), int(rng.integers(-span, span + 1)))
    cfg = {}
    for _ in range(int(rng.integers(0, lamps + 1))):
        p = random_element(spec.base, rng, max(1, lamps // 2), span)
        cfg[p] = random_element(spec.lamp, rng, max(1, lamps // 2), span)
    return spec.element(cfg, random_element(spec.base, rng, max(1, lamps // 2), span))
