"""Finite weighted graphs with exact integer distances.

All weights are doubled: an ordinary edge has weight :data:`UNIT` (2) and a
cone edge has weight 1, so half-length cone edges stay integral.  Vertex keys
are opaque strings supplied by the caller.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import BudgetError, GraphError

UNIT = 2
DEFAULT_FRONTIER_CAP = 10**6


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, int], ...]
    _adj: dict = field(default=None, repr=False, compare=False, hash=False)
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {v: i for i, v in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise GraphError("duplicate vertex keys")
        adj = {v: {} for v in self.vertices}
        for u, v, w in self.edges:
            if u not in index or v not in index:
                raise GraphError(f"edge ({u}, {v}) references an unknown vertex")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not isinstance(w, int) or w < 1:
                raise GraphError(f"edge weight must be a positive integer, got {w!r}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u][v] = w
            adj[v][u] = w
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str, int]]) -> MetricGraph:
        """Canonicalise: sorted vertices, each undirected edge once as (min, max, w)."""
        canon = {}
        for u, v, w in edges:
            key = (u, v) if u <= v else (v, u)
            if key in canon and canon[key] != w:
                raise GraphError(f"conflicting weights on edge {key}")
            canon[key] = w
        return cls(tuple(sorted(set(vertices))), tuple(sorted((u, v, w) for (u, v), w in canon.items())))

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def neighbors(self, v: str) -> dict[str, int]:
        return self._adj[v]

    def index(self, v: str) -> int:
        return self._index[v]

    # -- export ----------------------------------------------------------------

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [[u, v, w] for u, v, w in self.edges]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> MetricGraph:
        try:
            return cls.build(data["vertices"], [(u, v, int(w)) for u, v, w in data["edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from None

    def to_dot(self) -> str:
        lines = ["graph G {"]
        lines += [f"  {json.dumps(v)};" for v in self.vertices]
        lines += [f"  {json.dumps(u)} -- {json.dumps(v)} [weight={w}];" for u, v, w in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


# -- distances -----------------------------------------------------------------


def distances_from(g: MetricGraph, source: str) -> dict[str, int]:
    if source not in g:
        raise GraphError(f"vertex {source!r} not in graph")
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in g.neighbors(u).items():
            nd = d + w
            if nd < dist.get(v, nd + 1):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def distance(g: MetricGraph, x: str, y: str) -> int:
    """Exact weighted shortest-path length (doubled units)."""
    if y not in g:
        raise GraphError(f"vertex {y!r} not in graph")
    d = distances_from(g, x)
    if y not in d:
        raise GraphError(f"{x!r} and {y!r} are in different components")
    return d[y]


def all_pairs(g: MetricGraph, sources: Iterable[str] | None = None) -> np.ndarray:
    """Distance matrix (rows: ``sources`` or all vertices; columns: all vertices).

    Unreachable entries are -1.
    """
    n = len(g)
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    rows = [g.index(u) for u, _, _ in g.edges] + [g.index(v) for _, v, _ in g.edges]
    cols = [g.index(v) for _, v, _ in g.edges] + [g.index(u) for u, _, _ in g.edges]
    data = [w for *_, w in g.edges] * 2
    mat = csr_matrix((data, (rows, cols)), shape=(n, n))
    idx = None if sources is None else [g.index(s) for s in sources]
    out = shortest_path(mat, method="D", directed=False, indices=idx)
    out = np.atleast_2d(out)
    finite = np.isfinite(out)
    res = np.full(out.shape, -1, dtype=np.int64)
    res[finite] = np.rint(out[finite]).astype(np.int64)
    return res


# -- balls ---------------------------------------------------------------------


def ball(
    neighbor_fn: Callable[[Hashable], Iterable[Hashable]],
    center: Hashable,
    radius: int,
    key: Callable[[Hashable], str] = str,
    frontier_cap: int = DEFAULT_FRONTIER_CAP,
) -> MetricGraph:
    """Induced subgraph on everything within ``radius`` unit steps of ``center``."""
    depth = ball_members(neighbor_fn, center, radius, frontier_cap)
    keys = {v: key(v) for v in depth}
    edges = []
    for v in depth:
        for u in neighbor_fn(v):
            if u in depth and u != v:
                edges.append((keys[v], keys[u], UNIT))
    return MetricGraph.build(keys.values(), edges)


def ball_members(
    neighbor_fn: Callable[[Hashable], Iterable[Hashable]],
    center: Hashable,
    radius: int,
    frontier_cap: int = DEFAULT_FRONTIER_CAP,
) -> dict:
    """``{vertex: unit depth}`` for the same BFS as :func:`ball`, keeping domain objects."""
    if radius < 0:
        raise GraphError("radius must be >= 0")
    depth = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if depth[v] == radius:
            continue
        for u in neighbor_fn(v):
            if u not in depth:
                depth[u] = depth[v] + 1
                queue.append(u)
                if len(depth) > frontier_cap:
                    raise BudgetError("graphcore", f"ball exceeds {frontier_cap} vertices")
    return depth


# -- coning --------------------------------------------------------------------


def cone(g: MetricGraph, subsets: list[Iterable[str]], prefix: str = "cone:") -> MetricGraph:
    """Add one apex per subset, joined to each member by a half-length edge."""
    edges = list(g.edges)
    apexes = []
    for k, subset in enumerate(subsets):
        members = sorted(set(subset))
        if not members:
            raise GraphError(f"subset {k} is empty")
        for v in members:
            if v not in g:
                raise GraphError(f"subset {k} contains unknown vertex {v!r}")
        apex = f"{prefix}{k}"
        if apex in g:
            raise GraphError(f"apex key {apex!r} collides with an existing vertex")
        apexes.append(apex)
        edges.extend((apex, v, 1) for v in members)
    return MetricGraph.build(list(g.vertices) + apexes, edges)
