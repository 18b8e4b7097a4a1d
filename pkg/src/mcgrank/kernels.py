"""Exact base-case models: slopes on complexity-one surfaces and annuli.

Curves on the one-holed torus S_{1,1} and the four-holed sphere S_{0,4}
are reduced fractions p/q (1/0 is the slope at infinity).  Both curve
graphs are the Farey graph; they differ only in the intersection number
realised by adjacent curves (1 on S_{1,1}, 2 on S_{0,4}).

Markings on S_{1,1} are (base, transversal) pairs of Farey neighbours, and
the annular curve graph is modelled by integer twist coordinates.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import KernelError

__all__ = [
    "Slope",
    "SurfaceKind",
    "Marking11",
    "AnnulusCoord",
    "INFINITY",
    "slope_intersection",
    "adjacent",
    "dehn_twist",
    "transport_from_infinity",
    "twist_coordinate",
    "annulus_distance",
    "marking_moves",
    "farey_neighbors",
    "farey_universe",
    "farey_distance",
    "marking_distance",
]


@dataclass(frozen=True, order=True)
class Slope:
    """A reduced slope p/q with q >= 0; infinity is stored as 1/0."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 0:
            raise KernelError(f"slope denominator must be >= 0, got {self.p}/{self.q}")
        if self.q == 0 and self.p != 1:
            raise KernelError(f"infinite slope must be 1/0, got {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise KernelError(f"slope {self.p}/{self.q} is not reduced")

    @classmethod
    def of(cls, p: int, q: int) -> Slope:
        """Normalise an arbitrary nonzero integer vector to a slope."""
        if p == 0 and q == 0:
            raise KernelError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> Slope:
        text = text.strip()
        if text in ("inf", "oo", "∞"):
            return INFINITY
        num, sep, den = text.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError:
            raise KernelError(f"cannot parse slope {text!r}") from None
        return cls.of(p, q)

    @property
    def height(self) -> int:
        return max(abs(self.p), self.q)

    def vec(self) -> tuple[int, int]:
        return (self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


INFINITY = Slope(1, 0)


class SurfaceKind(enum.Enum):
    TORUS1 = "TORUS1"
    SPHERE4 = "SPHERE4"

    @property
    def unit_intersection(self) -> int:
        return 1 if self is SurfaceKind.TORUS1 else 2


def _det(a: Slope, b: Slope) -> int:
    return a.p * b.q - a.q * b.p


def slope_intersection(kind: SurfaceKind, a: Slope, b: Slope) -> int:
    return kind.unit_intersection * abs(_det(a, b))


def adjacent(kind: SurfaceKind, a: Slope, b: Slope) -> bool:
    return a != b and slope_intersection(kind, a, b) == kind.unit_intersection


# -- unimodular normalisation ------------------------------------------------


@lru_cache(maxsize=65536)
def _normalizer(axis: Slope) -> tuple[int, int, int, int, int]:
    """Matrix (a, b, c, d, det) with columns (axis, s) sending 1/0 to axis.

    ``s`` is the penultimate continued-fraction convergent of the axis (the
    convergent preceding p/q in the Euclidean expansion; 1/0 for integers,
    0/1 for the axis 1/0).
    """
    if axis.q == 0:
        s = (0, 1)
    else:
        p, q = axis.p, axis.q
        h_prev, k_prev, h, k = 0, 1, 1, 0
        while q:
            a, r = divmod(p, q)
            h_prev, k_prev, h, k = h, k, a * h + h_prev, a * k + k_prev
            p, q = q, r
        s = (h_prev, k_prev)
    det = axis.p * s[1] - s[0] * axis.q
    assert det in (1, -1)
    return axis.p, s[0], axis.q, s[1], det


def _to_standard(axis: Slope, v: tuple[int, int]) -> tuple[int, int]:
    a, b, c, d, det = _normalizer(axis)
    x, y = v
    return det * (d * x - b * y), det * (-c * x + a * y)


def _from_standard(axis: Slope, v: tuple[int, int]) -> tuple[int, int]:
    a, b, c, d, _ = _normalizer(axis)
    x, y = v
    return a * x + b * y, c * x + d * y


def transport_from_infinity(axis: Slope, x: Slope) -> Slope:
    """Image of ``x`` under the fixed unimodular map sending 1/0 to ``axis``."""
    return Slope.of(*_from_standard(axis, x.vec()))


def dehn_twist(axis: Slope, power: int, x: Slope) -> Slope:
    """Apply the ``power``-th transvection fixing ``axis`` to ``x``.

    In the frame where the axis is 1/0 the twist is p/q -> (p + power*q)/q.
    """
    if power == 0:
        return x
    u, v = _to_standard(axis, x.vec())
    return Slope.of(*_from_standard(axis, (u + power * v, v)))


def twist_coordinate(axis: Slope, x: Slope) -> int:
    """Integer twisting of ``x`` about ``axis`` (the annular projection).

    Shifting ``x`` by ``dehn_twist(axis, n, .)`` shifts the result by ``n``.
    """
    u, v = _to_standard(axis, x.vec())
    if v == 0:
        raise KernelError(f"empty annular projection: {x} is the core curve {axis}")
    if v < 0:
        u, v = -u, -v
    return u // v


# -- annuli --------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class AnnulusCoord:
    twist: int

    def __str__(self) -> str:
        return str(self.twist)


def annulus_distance(a: AnnulusCoord, b: AnnulusCoord) -> int:
    if a == b:
        return 0
    return 1 + abs(a.twist - b.twist)


# -- markings on S_{1,1} ---------------------------------------------------------


@dataclass(frozen=True, order=True)
class Marking11:
    base: Slope
    transversal: Slope

    def __post_init__(self):
        if abs(_det(self.base, self.transversal)) != 1:
            raise KernelError(f"transversal {self.transversal} does not meet base {self.base} once")

    @classmethod
    def parse(cls, text: str) -> Marking11:
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        parts = body.split(";") if ";" in body else body.split(",")
        if len(parts) != 2:
            raise KernelError(f"cannot parse marking {text!r}")
        return cls(Slope.parse(parts[0]), Slope.parse(parts[1]))

    def __str__(self) -> str:
        return f"({self.base}; {self.transversal})"


def marking_moves(m: Marking11) -> list[Marking11]:
    """Twist +1, twist -1 and flip neighbours of a marking, in that order."""
    return [
        Marking11(m.base, dehn_twist(m.base, 1, m.transversal)),
        Marking11(m.base, dehn_twist(m.base, -1, m.transversal)),
        Marking11(m.transversal, m.base),
    ]


# -- Farey graph ---------------------------------------------------------------


def _int_range(c: int, d: int, bound: int) -> tuple[int, int] | None:
    """Integers n with |c + n*d| <= bound, as a closed interval."""
    if d == 0:
        return (-(10**18), 10**18) if abs(c) <= bound else None
    if d < 0:
        c, d = -c, -d
    lo = -((bound + c) // d)
    hi = (bound - c) // d
    return (lo, hi) if lo <= hi else None


def farey_neighbors(x: Slope, height: int) -> list[Slope]:
    """Farey neighbours of ``x`` of height at most ``height``, sorted."""
    p, q = x.vec()
    if x.q == 0:
        s = (0, 1)
    else:
        a, b, c, d, det = _normalizer(x)
        s = (b * det, d * det)  # det(x, s) == 1
    r1 = _int_range(s[0], p, height)
    r2 = _int_range(s[1], q, height)
    if r1 is None or r2 is None:
        return []
    lo, hi = max(r1[0], r2[0]), min(r1[1], r2[1])
    out = {Slope.of(s[0] + n * p, s[1] + n * q) for n in range(lo, hi + 1)}
    return sorted(out)


def farey_universe(height: int) -> list[Slope]:
    """All slopes of height at most ``height``."""
    out = [INFINITY]
    for q in range(1, height + 1):
        out.extend(Slope(p, q) for p in range(-height, height + 1) if math.gcd(p, q) == 1)
    return sorted(out)


def _stern_brocot_ladder(z: tuple[int, int]) -> list[tuple[int, int]]:
    """Vertices of the Farey triangles crossed going from 1/0 to z (q >= 1)."""
    p, q = z
    n = p // q
    lo, hi = (n, 1), (n + 1, 1)
    out = [(1, 0), lo, hi]
    while True:
        med = (lo[0] + hi[0], lo[1] + hi[1])
        out.append(med)
        if med == z:
            return out
        if z[0] * med[1] < med[0] * z[1]:
            hi = med
        else:
            lo = med


@lru_cache(maxsize=1 << 20)
def farey_distance(x: Slope, y: Slope) -> int:
    """Exact distance in the (unbounded) Farey graph.

    Moves x to 1/0 by a unimodular map and runs BFS on the ladder of
    triangles separating 1/0 from the image of y; every geodesic lives there.
    """
    if x == y:
        return 0
    u, v = _to_standard(x, y.vec())
    if v < 0:
        u, v = -u, -v
    if v == 1:
        return 1
    g = math.gcd(u, v)
    z = (u // g, v // g)
    ladder = _stern_brocot_ladder(z)
    dist = {ladder[0]: 0}
    queue = deque([ladder[0]])
    while queue:
        a = queue.popleft()
        for b in ladder:
            if b not in dist and abs(a[0] * b[1] - a[1] * b[0]) == 1:
                dist[b] = dist[a] + 1
                if b == z:
                    return dist[b]
                queue.append(b)
    raise AssertionError("ladder is connected")


@lru_cache(maxsize=1 << 20)
def marking_distance(a: Marking11, b: Marking11, max_radius: int = 64) -> int:
    """Exact distance in the S_{1,1} marking graph by bidirectional BFS."""
    if a == b:
        return 0
    seen = ({a: 0}, {b: 0})
    frontier = ([a], [b])
    for _ in range(2 * max_radius):
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        here, there = seen[side], seen[1 - side]
        nxt = []
        best = None
        for m in frontier[side]:
            for n in marking_moves(m):
                if n in here:
                    continue
                here[n] = here[m] + 1
                if n in there:
                    cand = here[n] + there[n]
                    best = cand if best is None else min(best, cand)
                nxt.append(n)
        if best is not None:
            return best
        frontier = (nxt, frontier[1]) if side == 0 else (frontier[0], nxt)
    raise KernelError(f"marking distance exceeds {2 * max_radius}")
