"""Thresholded distance formula, QI-constant fitting, quasi-flats and delta.

The distance formula approximates the interpolating-graph distance by a sum
of thresholded projection distances, one per subsurface of complexity
greater than ``xi``.  Inside a product region the available subsurfaces are
the blocks themselves and, at the marking level, the annuli around base
curves.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import graphcore
from .errors import FormulaError, GraphError, KernelError
from .kernels import (
    AnnulusCoord,
    Marking11,
    Slope,
    annulus_distance,
    farey_distance,
    transport_from_infinity,
    twist_coordinate,
)
from .regions import (
    BlockKind,
    ProductRegion,
    RegionPoint,
    block_distance,
    check_point,
    region_distance_closed_form,
)

# -- selectors -----------------------------------------------------------------


@dataclass(frozen=True)
class BlockSelector:
    """The subsurface underlying one block."""

    index: int


@dataclass(frozen=True)
class AnnularSelector:
    """The annulus around ``axis`` inside a marking block."""

    index: int
    axis: Slope


@dataclass(frozen=True)
class CurveGraphSelector:
    """The curve graph of a marking block's surface (ignoring twisting)."""

    index: int


Selector = Union[BlockSelector, AnnularSelector, CurveGraphSelector]


@dataclass(frozen=True)
class ThresholdParams:
    K: int

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 1:
            raise FormulaError(f"threshold K must be a positive integer, got {self.K!r}")

    def apply(self, n: int) -> int:
        return n if n > self.K else 0


def _require_marking(r: ProductRegion, i: int) -> None:
    if not 0 <= i < len(r.blocks):
        raise FormulaError(f"block index {i} out of range")
    if not r.is_marking(i):
        raise FormulaError(f"block {i} is not a marking block at xi={r.xi}")


def _relevant_slope(m: Marking11, axis: Slope) -> Slope:
    return m.base if m.base != axis else m.transversal


def projection_distance(r: ProductRegion, w: Selector, x: RegionPoint, y: RegionPoint) -> int:
    check_point(r, x)
    check_point(r, y)
    i = w.index
    if isinstance(w, BlockSelector):
        if not 0 <= i < len(r.blocks):
            raise FormulaError(f"block index {i} out of range")
        if r.blocks[i] is BlockKind.ANNULUS:
            return annulus_distance(x[i], y[i])
        return block_distance(r, i, x[i], y[i])
    _require_marking(r, i)
    a, b = x[i], y[i]
    if isinstance(w, AnnularSelector):
        try:
            return abs(
                twist_coordinate(w.axis, _relevant_slope(a, w.axis))
                - twist_coordinate(w.axis, _relevant_slope(b, w.axis))
            )
        except KernelError as exc:
            raise FormulaError(f"empty annular projection: {exc}") from None
    if isinstance(w, CurveGraphSelector):
        if a.base != b.base:
            return farey_distance(a.base, b.base)
        return farey_distance(a.transversal, b.transversal)
    raise FormulaError(f"unknown selector {w!r}")


def subsurface_family(r: ProductRegion, x: RegionPoint, y: RegionPoint) -> list[Selector]:
    """Subsurfaces of complexity > xi seen by the pair (x, y)."""
    out: list[Selector] = []
    for i, kind in enumerate(r.blocks):
        if kind.complexity <= r.xi or kind is BlockKind.PANTS:
            continue
        if r.is_marking(i):
            out.append(CurveGraphSelector(i))
            out.extend(AnnularSelector(i, a) for a in sorted({x[i].base, y[i].base}))
        else:
            out.append(BlockSelector(i))
    return out


def distance_formula(r: ProductRegion, K: ThresholdParams | int, x: RegionPoint, y: RegionPoint) -> int:
    if isinstance(K, int):
        K = ThresholdParams(K)
    return sum(K.apply(projection_distance(r, w, x, y)) for w in subsurface_family(r, x, y))


# -- QI fitting ----------------------------------------------------------------


@dataclass(frozen=True)
class QIFit:
    a: Fraction
    b: int

    def holds(self, d1: int, d2: int) -> bool:
        return d1 <= self.a * d2 + self.b and d2 <= self.a * d1 + self.b

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": self.b}


def _b_needed(samples, a: Fraction) -> int:
    need = 0
    for d1, d2 in samples:
        need = max(need, math.ceil(d1 - a * d2), math.ceil(d2 - a * d1))
    return need


def fit_qi_constants(
    samples: Sequence[tuple[int, int]],
    max_b: int | None = None,
    a_step: Fraction = Fraction(1, 4),
) -> QIFit:
    """Lexicographically least (a, b), a first, on the grid a in 1 + a_step*N, b in N.

    Without ``max_b`` this is always ``a = 1``.  With ``max_b`` the search
    returns the least ``a`` whose required ``b`` fits under the cap, and
    raises :class:`FormulaError` when no ``a`` does.
    """
    samples = list(samples)
    if not samples:
        raise FormulaError("no samples to fit")
    if any(d1 < 0 or d2 < 0 for d1, d2 in samples):
        raise FormulaError("sample distances must be nonnegative")
    a = Fraction(1)
    if max_b is None:
        return QIFit(a, _b_needed(samples, a))
    ratios = [Fraction(d1, d2) for d1, d2 in samples if d2] + [Fraction(d2, d1) for d1, d2 in samples if d1]
    a_stop = max(ratios, default=Fraction(1))
    while True:
        b = _b_needed(samples, a)
        if b <= max_b:
            return QIFit(a, b)
        if a >= a_stop:
            raise FormulaError(f"no (a, b) with b <= {max_b}: zero-formula samples force b >= {b}")
        a += a_step


def samples_csv(rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "l", "d_graph", "d_formula"])
    w.writerows(rows)
    return buf.getvalue()


# -- quasi-flats ---------------------------------------------------------------


_PELL = ((2, 1), (1, 0))
_PELL_INV = ((0, 1), (1, -2))


def farey_geodesic(center: Slope, n: int) -> dict[int, Slope]:
    """A Farey geodesic g on [-n, n] with g(0) = center.

    The orbit of 1/0 under a hyperbolic unimodular matrix with all
    continued-fraction digits 2, transported so that 1/0 lands on ``center``.
    """
    out = {0: (1, 0)}
    for k in range(1, n + 1):
        for sign, (r0, r1) in ((1, _PELL), (-1, _PELL_INV)):
            p, q = out[sign * (k - 1)]
            out[sign * k] = (r0[0] * p + r0[1] * q, r1[0] * p + r1[1] * q)
    return {k: transport_from_infinity(center, Slope.of(*v)) for k, v in out.items()}


def annulus_geodesic(center: AnnulusCoord, n: int) -> dict[int, AnnulusCoord]:
    return {k: AnnulusCoord(center.twist + k) for k in range(-n, n + 1)}


@dataclass(frozen=True)
class QuasiFlatSpec:
    """Basepoint plus one indexed geodesic per flat block (``geodesics[i][k]``)."""

    region: ProductRegion
    basepoint: RegionPoint
    geodesics: dict = field(hash=False)

    def __post_init__(self):
        check_point(self.region, self.basepoint)
        for i, g in self.geodesics.items():
            if not 0 <= i < len(self.region.blocks):
                raise FormulaError(f"geodesic for missing block {i}")
            if g.get(0) != self.basepoint[i]:
                raise FormulaError(f"geodesic {i} does not pass through the basepoint at index 0")
            ks = sorted(g)
            if ks != list(range(ks[0], ks[-1] + 1)):
                raise FormulaError(f"geodesic {i} has gaps in its index range")
            if len(set(g.values())) != len(g):
                raise FormulaError(f"geodesic {i} repeats a vertex")
            for k in ks[:-1]:
                if block_distance(self.region, i, g[k], g[k + 1]) != 1:
                    raise FormulaError(f"geodesic {i}: entries {k} and {k + 1} are not adjacent")

    @property
    def blocks(self) -> list[int]:
        return sorted(self.geodesics)

    def index_range(self) -> tuple[int, int]:
        lo = max(min(g) for g in self.geodesics.values())
        hi = min(max(g) for g in self.geodesics.values())
        return lo, hi


def default_quasiflat(region: ProductRegion, basepoint: RegionPoint, n: int, blocks=None) -> QuasiFlatSpec:
    """Standard geodesics through the basepoint in every flat block.

    ``blocks`` overrides the choice, e.g. to keep the directions of a lower
    level when checking what coning does to them.
    """
    geos = {}
    for i in region.flat_blocks() if blocks is None else blocks:
        c = basepoint[i]
        if isinstance(c, AnnulusCoord):
            geos[i] = annulus_geodesic(c, n)
        elif isinstance(c, Slope):
            geos[i] = farey_geodesic(c, n)
    if not geos:
        raise FormulaError(f"region has no flat blocks of complexity {region.flat_complexity}")
    return QuasiFlatSpec(region, basepoint, geos)


def quasiflat_point(q: QuasiFlatSpec, k: Sequence[int]) -> RegionPoint:
    blocks = q.blocks
    if len(k) != len(blocks):
        raise FormulaError(f"index vector has length {len(k)}, quasi-flat has rank {len(blocks)}")
    pt = list(q.basepoint)
    for i, kj in zip(blocks, k):
        if kj not in q.geodesics[i]:
            raise FormulaError(f"index {kj} outside the sampled range of geodesic {i}")
        pt[i] = q.geodesics[i][kj]
    return tuple(pt)


@dataclass
class QuasiFlatReport:
    rank: int
    N: int
    pairs: int
    violations: int
    witness: tuple | None
    upper_equality: bool
    lower_attained: bool
    max_distance: int
    degenerate_blocks: list[int]

    @property
    def collapsed(self) -> bool:
        return bool(self.degenerate_blocks) or (self.N > 0 and self.max_distance <= self.rank)

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.upper_equality and not self.collapsed

    def summary(self) -> str:
        if self.ok:
            return "OK: 0 violations, bounds tight"
        parts = [f"{self.violations} violations"]
        if self.collapsed:
            parts.append(f"collapsed: all distances <= {self.max_distance} (coned blocks {self.degenerate_blocks})")
        if not self.upper_equality:
            parts.append("upper bound not tight")
        if self.witness is not None:
            parts.append(f"witness k={list(self.witness[0])} l={list(self.witness[1])}")
        return "FAIL: " + "; ".join(parts)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "N": self.N,
            "pairs": self.pairs,
            "violations": self.violations,
            "witness": None if self.witness is None else [list(self.witness[0]), list(self.witness[1])],
            "upper_equality": self.upper_equality,
            "lower_attained": self.lower_attained,
            "max_distance": self.max_distance,
            "degenerate_blocks": self.degenerate_blocks,
            "collapsed": self.collapsed,
        }


def verify_quasiflat(q: QuasiFlatSpec, N: int, spot_checks: int = 200) -> QuasiFlatReport:
    """Check max|k-l| <= d(Q(k), Q(l)) <= sum|k-l| on the whole grid [-N, N]^r.

    The region distance is a sum of block distances, so it is tabulated per
    block and broadcast; a deterministic sample of pairs is re-checked against
    :func:`region_distance_closed_form` directly.
    """
    lo, hi = q.index_range()
    if not (lo <= -N and N <= hi):
        raise FormulaError(f"grid [-{N}, {N}] exceeds the sampled geodesic range [{lo}, {hi}]")
    blocks = q.blocks
    r = len(blocks)
    degenerate = [i for i in blocks if q.region.is_coned(i) or q.region.blocks[i].complexity != q.region.flat_complexity]
    idx = np.arange(-N, N + 1)
    side = len(idx)
    total = np.zeros((side,) * (2 * r), dtype=np.int64)
    upper = np.zeros_like(total)
    lower = np.zeros_like(total)
    for j, i in enumerate(blocks):
        g = q.geodesics[i]
        table = np.array([[block_distance(q.region, i, g[a], g[b]) for b in idx] for a in idx], dtype=np.int64)
        gap = np.abs(idx[:, None] - idx[None, :])
        shape = [1] * (2 * r)
        shape[j], shape[r + j] = side, side
        total = total + table.reshape(shape)
        upper = upper + gap.reshape(shape)
        lower = np.maximum(lower, gap.reshape(shape))

    grid = list(itertools.product(range(side), repeat=r))
    for a, b in itertools.product(grid[:: max(1, len(grid) // spot_checks)], grid[:1] + grid[-1:]):
        x = quasiflat_point(q, [int(idx[t]) for t in a])
        y = quasiflat_point(q, [int(idx[t]) for t in b])
        if region_distance_closed_form(q.region, x, y) != total[a + b]:
            raise AssertionError("tabulated distance disagrees with the closed form")

    bad = (total < lower) | (total > upper)
    nz = upper > 0
    witness = None
    if bad.any():
        flat = np.argwhere(bad)[0]
        witness = (tuple(int(idx[t]) for t in flat[:r]), tuple(int(idx[t]) for t in flat[r:]))
    return QuasiFlatReport(
        rank=r,
        N=N,
        pairs=int(total.size),
        violations=int(bad.sum()),
        witness=witness,
        upper_equality=bool((total == upper).all()),
        lower_attained=bool(((total == lower) & nz).any()),
        max_distance=int(total.max()),
        degenerate_blocks=degenerate,
    )


# -- hyperbolicity -------------------------------------------------------------


def estimate_delta(g: graphcore.MetricGraph, chunk: int = 1 << 22) -> Fraction:
    """Four-point-condition delta, maximised over all 4-tuples, in unit lengths."""
    n = len(g)
    if n == 0:
        raise GraphError("empty graph")
    D = graphcore.all_pairs(g)
    if (D < 0).any():
        raise GraphError("graph is disconnected")
    D = D.astype(np.int64)
    best = 0
    step = max(1, chunk // (n * n))
    for w in range(n):
        for x0 in range(w, n, step):
            xs = np.arange(x0, min(n, x0 + step))
            s1 = D[w, xs][:, None, None] + D[None, :, :]
            s2 = D[w, :][None, :, None] + D[xs, :][:, None, :]
            s3 = D[w, :][None, None, :] + D[xs, :][:, :, None]
            best = max(best, int((s1 - np.maximum(s2, s3)).max()))
    return Fraction(best, 2 * graphcore.UNIT)
