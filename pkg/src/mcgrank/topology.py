"""Surface types, multicurve decompositions and the rank invariant r_xi.

A decomposition of S_{g,n} along a multicurve is recorded only up to
topological type: the complementary pieces, each a triple
``(genus, boundary, punctures)``, and the dual multigraph whose vertices are
pieces and whose edges are the cut curves.  Decompositions are enumerated by
repeatedly cutting pieces along essential curves, starting from the trivial
decomposition, and deduplicated by a canonical labelling of the dual graph.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .errors import BudgetError, TopologyError

DEFAULT_COMPLEXITY_CAP = 9

Piece = tuple[int, int, int]
Edge = tuple[int, int]


@dataclass(frozen=True, order=True)
class Surface:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise TopologyError(f"negative genus or puncture count: {self.genus}, {self.punctures}")
        if self.complexity < -2:
            raise TopologyError(f"S_{{{self.genus},{self.punctures}}} has complexity < -2")

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    def __str__(self) -> str:
        return f"S_{self.genus},{self.punctures}"


def complexity(s: Surface) -> int:
    return s.complexity


def piece_complexity(piece: Piece) -> int:
    g, b, p = piece
    return 3 * g - 3 + b + p


@dataclass(frozen=True)
class DecompositionGraph:
    """Dual multigraph of a decomposition.

    ``pieces[i]`` is ``(genus, boundary, punctures)``; ``curves`` lists one
    ``(i, j)`` pair (``i <= j``) per cut curve, loops allowed.  Instances
    produced by :func:`enumerate_decompositions` are in canonical form.
    """

    pieces: tuple[Piece, ...]
    curves: tuple[Edge, ...]

    @property
    def num_curves(self) -> int:
        return len(self.curves)

    def piece_complexities(self) -> list[int]:
        return [piece_complexity(pc) for pc in self.pieces]

    def degrees(self) -> list[int]:
        deg = [0] * len(self.pieces)
        for i, j in self.curves:
            deg[i] += 1
            deg[j] += 1
        return deg

    def betti_number(self) -> int:
        return len(self.curves) - len(self.pieces) + 1

    def surface(self) -> Surface:
        g = sum(pc[0] for pc in self.pieces) + self.betti_number()
        return Surface(g, sum(pc[2] for pc in self.pieces))

    def is_connected(self) -> bool:
        n = len(self.pieces)
        adj = {i: set() for i in range(n)}
        for i, j in self.curves:
            adj[i].add(j)
            adj[j].add(i)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n

    def violations(self, s: Surface) -> list[str]:
        """Every invariant this decomposition breaks as a decomposition of ``s``."""
        out = []
        m = len(self.curves)
        if not self.pieces:
            return ["no pieces"]
        if any(not (0 <= i <= j < len(self.pieces)) for i, j in self.curves):
            out.append("edge endpoint out of range")
            return out
        if sum(pc[1] for pc in self.pieces) != 2 * m:
            out.append("boundary count != 2 * curves")
        if self.degrees() != [pc[1] for pc in self.pieces]:
            out.append("piece boundary does not match dual-graph degree")
        if sum(pc[2] for pc in self.pieces) != s.punctures:
            out.append("puncture count mismatch")
        chi = sum(2 - 2 * g - b - p for g, b, p in self.pieces)
        if chi != s.euler_characteristic:
            out.append("Euler characteristic mismatch")
        if sum(pc[0] for pc in self.pieces) + self.betti_number() != s.genus:
            out.append("genus recovery failed")
        if sum(self.piece_complexities()) != s.complexity - m:
            out.append("complexity identity failed")
        if any(c < 0 for c in self.piece_complexities()):
            out.append("disk or annulus piece")
        if not self.is_connected():
            out.append("dual graph disconnected")
        return out

    def to_json(self) -> dict:
        return {"pieces": [list(pc) for pc in self.pieces], "curves": [list(e) for e in self.curves]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


# -- canonical labelling -------------------------------------------------------


def _adjacency(n: int, curves) -> list[list[int]]:
    adj = [[0] * n for _ in range(n)]
    for i, j in curves:
        adj[i][j] += 1
        if i != j:
            adj[j][i] += 1
    return adj


def _refine(cells: list[list[int]], adj: list[list[int]]) -> list[list[int]]:
    """Equitable refinement of an ordered partition (label-independent)."""
    while True:
        where = {v: k for k, cell in enumerate(cells) for v in cell}
        new = []
        for k, cell in enumerate(cells):
            sig = {}
            for v in cell:
                row = adj[v]
                s = tuple(sorted((where[u], row[u]) for u in range(len(row)) if row[u]))
                sig.setdefault(s, []).append(v)
            new.extend(sig[s] for s in sorted(sig))
        if len(new) == len(cells):
            return new
        cells = new


def canonical_form(pieces, curves) -> DecompositionGraph:
    """Relabel pieces canonically; isomorphic inputs give identical output."""
    n = len(pieces)
    adj = _adjacency(n, curves)
    by_color = {}
    for v in range(n):
        by_color.setdefault(tuple(pieces[v]), []).append(v)
    cells = [by_color[c] for c in sorted(by_color)]

    best = None

    def encode(order):
        return tuple(adj[order[i]][order[j]] for i in range(n) for j in range(i, n))

    def search(cells):
        nonlocal best
        cells = _refine(cells, adj)
        k = next((k for k, c in enumerate(cells) if len(c) > 1), None)
        if k is None:
            order = [c[0] for c in cells]
            code = encode(order)
            if best is None or code < best[0]:
                best = (code, order)
            return
        for v in cells[k]:
            rest = [u for u in cells[k] if u != v]
            search(cells[:k] + [[v], rest] + cells[k + 1 :])

    search(cells)
    order = best[1]
    pos = {v: i for i, v in enumerate(order)}
    new_pieces = tuple(tuple(pieces[v]) for v in order)
    new_curves = tuple(sorted(tuple(sorted((pos[i], pos[j]))) for i, j in curves))
    return DecompositionGraph(new_pieces, new_curves)


# -- enumeration ---------------------------------------------------------------


def _cuts(d: DecompositionGraph):
    """All decompositions obtained from ``d`` by cutting one more curve."""
    n = len(d.pieces)
    for i, (g, b, p) in enumerate(d.pieces):
        if piece_complexity((g, b, p)) < 1:
            continue
        # edge-ends incident to piece i, as (curve index, which end)
        ends = [(e, side) for e, c in enumerate(d.curves) for side in (0, 1) if c[side] == i]
        if g >= 1:
            pieces = list(d.pieces)
            pieces[i] = (g - 1, b + 2, p)
            yield pieces, list(d.curves) + [(i, i)]
        new = n
        for g1 in range(g + 1):
            for p1 in range(p + 1):
                for mask in range(1 << b):
                    side1 = [ends[k] for k in range(b) if mask >> k & 1]
                    b1 = len(side1)
                    one = (g1, b1 + 1, p1)
                    two = (g - g1, b - b1 + 1, p - p1)
                    if piece_complexity(one) < 0 or piece_complexity(two) < 0:
                        continue
                    pieces = list(d.pieces)
                    pieces[i] = one
                    pieces.append(two)
                    curves = [list(c) for c in d.curves]
                    in_one = set(side1)
                    for e, side in ends:
                        if (e, side) not in in_one:
                            curves[e][side] = new
                    curves.append([i, new])
                    yield pieces, [tuple(c) for c in curves]


@lru_cache(maxsize=None)
def _enumerate(s: Surface) -> tuple[DecompositionGraph, ...]:
    trivial = DecompositionGraph(((s.genus, 0, s.punctures),), ())
    found = {trivial}
    layer = [trivial]
    while layer:
        nxt = []
        for d in layer:
            for pieces, curves in _cuts(d):
                c = canonical_form(pieces, curves)
                if c not in found:
                    found.add(c)
                    nxt.append(c)
        layer = nxt
    return tuple(sorted(found, key=lambda d: (len(d.curves), d.pieces, d.curves)))


def enumerate_decompositions(s: Surface, cap: int = DEFAULT_COMPLEXITY_CAP) -> list[DecompositionGraph]:
    """All decomposition types of ``s``, sorted by (curve count, pieces, curves).

    Includes the trivial decomposition.  Raises :class:`BudgetError` when the
    complexity of ``s`` exceeds ``cap``.
    """
    if s.complexity < 0:
        raise TopologyError(f"{s} has complexity {s.complexity} < 0")
    if s.complexity > cap:
        raise BudgetError("topology", f"complexity {s.complexity} of {s} exceeds cap {cap}")
    return list(_enumerate(s))


# -- rank ----------------------------------------------------------------------


def _pants_decomposition(s: Surface, decomps) -> DecompositionGraph:
    return next(d for d in decomps if len(d.curves) == s.complexity)


def r_xi(s: Surface, xi: int, cap: int = DEFAULT_COMPLEXITY_CAP) -> tuple[int, DecompositionGraph]:
    """Maximal number of disjoint complexity-(xi+1) pieces, with a witness.

    The leftover pieces must each have complexity <= xi.  At ``xi == -2`` the
    count is the number of curves in a pants decomposition (annuli around
    each curve).  At ``xi == -1`` complexity-0 pieces (pants) carry no curve
    graph, so the count is taken from complexity-1 pieces, i.e. r_0.
    """
    if s.complexity < 1:
        raise TopologyError(f"r_xi needs complexity >= 1, {s} has {s.complexity}")
    if not -2 <= xi <= s.complexity - 1:
        raise TopologyError(f"xi={xi} outside [-2, {s.complexity - 1}] for {s}")
    decomps = enumerate_decompositions(s, cap)
    if xi == -2:
        return s.complexity, _pants_decomposition(s, decomps)
    target = max(xi, 0) + 1
    best = None
    for d in decomps:
        cs = d.piece_complexities()
        if any(c != target and c > target - 1 for c in cs):
            continue
        k = cs.count(target)
        if best is None or k > best[0]:
            best = (k, d)
    assert best is not None
    return best


def r_xi_greater(s: Surface, xi: int, cap: int = DEFAULT_COMPLEXITY_CAP) -> int:
    """Maximal number of disjoint pieces of complexity > xi (no leftover rule)."""
    decomps = enumerate_decompositions(s, cap)
    return max(sum(1 for c in d.piece_complexities() if c > xi) for d in decomps)


def piece_histogram(d: DecompositionGraph) -> Counter:
    return Counter(d.piece_complexities())


def all_surfaces(max_genus: int, max_punctures: int, lo: int = 1, hi: int = DEFAULT_COMPLEXITY_CAP):
    for g, n in itertools.product(range(max_genus + 1), range(max_punctures + 1)):
        if g == 0 and n < 1:
            continue
        try:
            s = Surface(g, n)
        except TopologyError:
            continue
        if lo <= s.complexity <= hi:
            yield s
