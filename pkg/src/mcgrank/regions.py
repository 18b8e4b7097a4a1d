"""Product regions: the pants decompositions containing a fixed multicurve.

Such a region is modelled as a product of blocks, one per complementary
piece of the multicurve.  A point records one coordinate per block and an
edge of the interpolating graph changes exactly one coordinate.  Blocks of
complexity at most ``xi`` are coned: all their coordinates are mutually
adjacent.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from . import graphcore
from .errors import KernelError, RegionError
from .kernels import (
    AnnulusCoord,
    Marking11,
    Slope,
    farey_distance,
    farey_neighbors,
    farey_universe,
    marking_distance,
    marking_moves,
)

DEFAULT_HEIGHT = 6


class BlockKind(enum.Enum):
    TORUS1 = "TORUS1"
    SPHERE4 = "SPHERE4"
    ANNULUS = "ANNULUS"
    PANTS = "PANTS"

    @property
    def complexity(self) -> int:
        return _COMPLEXITY[self]


_COMPLEXITY = {BlockKind.TORUS1: 1, BlockKind.SPHERE4: 1, BlockKind.ANNULUS: -1, BlockKind.PANTS: 0}


class Unit:
    """The single state of a pants block."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unit()"

    def __str__(self) -> str:
        return "*"

    def __lt__(self, other) -> bool:
        return False

    def __reduce__(self):
        return (Unit, ())


UNIT = Unit()

Coord = Union[Slope, Marking11, AnnulusCoord, Unit]


@dataclass(frozen=True)
class ProductRegion:
    """Block structure of a product region.

    ``height`` bounds the slopes used for Farey moves and for the candidate
    values of coned blocks, keeping every ball finite.
    """

    blocks: tuple[BlockKind, ...]
    xi: int
    height: int = DEFAULT_HEIGHT

    def block_complexity(self, i: int) -> int:
        return self.blocks[i].complexity

    def is_coned(self, i: int) -> bool:
        return self.blocks[i].complexity <= self.xi

    def is_marking(self, i: int) -> bool:
        return self.xi == -2 and self.blocks[i] in (BlockKind.TORUS1, BlockKind.SPHERE4)

    @property
    def flat_complexity(self) -> int:
        """Complexity of the blocks that carry quasi-flat directions.

        Pants blocks have a single state, so at xi = -1 the flat directions
        come from complexity-one blocks, as at xi = 0.
        """
        return -1 if self.xi == -2 else max(self.xi + 1, 1)

    def flat_blocks(self) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if b.complexity == self.flat_complexity]

    def to_json(self) -> dict:
        out = {"blocks": [b.value for b in self.blocks], "xi": self.xi}
        if self.height != DEFAULT_HEIGHT:
            out["height"] = self.height
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict, xi: int | None = None) -> ProductRegion:
        try:
            blocks = [BlockKind(b) for b in data["blocks"]]
            level = int(data["xi"]) if xi is None else xi
            height = int(data.get("height", DEFAULT_HEIGHT))
        except (KeyError, TypeError, ValueError) as exc:
            raise RegionError(f"malformed region JSON: {exc}") from None
        return make_region(blocks, level, height)


RegionPoint = tuple  # one coordinate per block


def make_region(blocks: Sequence[BlockKind | str], xi: int, height: int = DEFAULT_HEIGHT) -> ProductRegion:
    blocks = tuple(BlockKind(b) if isinstance(b, str) else b for b in blocks)
    if not blocks:
        raise RegionError("a region needs at least one block")
    if xi < -2:
        raise RegionError(f"xi must be >= -2, got {xi}")
    if height < 1:
        raise RegionError("height must be >= 1")
    if BlockKind.ANNULUS in blocks and xi != -2:
        raise RegionError(f"ANNULUS blocks only exist at the marking level xi=-2, not xi={xi}")
    if xi >= max(b.complexity for b in blocks):
        warnings.warn(f"every block is coned at xi={xi}; the region has finite diameter", stacklevel=2)
    return ProductRegion(blocks, xi, height)


# -- points --------------------------------------------------------------------


def _coord_ok(region: ProductRegion, i: int, c) -> bool:
    kind = region.blocks[i]
    if kind is BlockKind.PANTS:
        return c is UNIT
    if kind is BlockKind.ANNULUS:
        return isinstance(c, AnnulusCoord)
    if region.is_marking(i):
        return isinstance(c, Marking11)
    return isinstance(c, Slope)


def check_point(region: ProductRegion, pt: RegionPoint) -> None:
    if not isinstance(pt, tuple) or len(pt) != len(region.blocks):
        raise RegionError(f"point has arity {len(pt) if isinstance(pt, tuple) else '?'}, region has {len(region.blocks)} blocks")
    for i, c in enumerate(pt):
        if not _coord_ok(region, i, c):
            raise RegionError(f"coordinate {c!r} does not fit block {i} ({region.blocks[i].value}, xi={region.xi})")


def restrict(pt: RegionPoint, block_index: int) -> Coord:
    if not 0 <= block_index < len(pt):
        raise RegionError(f"block index {block_index} out of range for a {len(pt)}-block point")
    return pt[block_index]


def parse_coord(region: ProductRegion, i: int, text: str) -> Coord:
    kind = region.blocks[i]
    try:
        if kind is BlockKind.PANTS:
            if text.strip() not in ("*", "", "unit"):
                raise RegionError(f"PANTS block {i} takes '*', got {text!r}")
            return UNIT
        if kind is BlockKind.ANNULUS:
            return AnnulusCoord(int(text))
        if region.is_marking(i):
            return Marking11.parse(text)
        return Slope.parse(text)
    except (KernelError, ValueError) as exc:
        raise RegionError(f"block {i}: {exc}") from None


def parse_point(region: ProductRegion, text) -> RegionPoint:
    """Parse ``"0/1|(1/0; 0/1)|3"`` or a JSON list of coordinate strings."""
    parts = [str(t) for t in text] if isinstance(text, (list, tuple)) else text.split("|")
    if len(parts) != len(region.blocks):
        raise RegionError(f"expected {len(region.blocks)} coordinates, got {len(parts)}")
    return tuple(parse_coord(region, i, t) for i, t in enumerate(parts))


def format_point(pt: RegionPoint) -> str:
    return "|".join(str(c) for c in pt)


def default_point(region: ProductRegion) -> RegionPoint:
    out = []
    for i, kind in enumerate(region.blocks):
        if kind is BlockKind.PANTS:
            out.append(UNIT)
        elif kind is BlockKind.ANNULUS:
            out.append(AnnulusCoord(0))
        elif region.is_marking(i):
            out.append(Marking11(Slope(0, 1), Slope(1, 0)))
        else:
            out.append(Slope(0, 1))
    return tuple(out)


# -- edges ---------------------------------------------------------------------


@lru_cache(maxsize=64)
def _universe(height: int) -> tuple[Slope, ...]:
    return tuple(farey_universe(height))


def block_candidates(region: ProductRegion, i: int) -> tuple:
    """Default candidate universe for a coned block."""
    kind = region.blocks[i]
    if kind is BlockKind.PANTS:
        return (UNIT,)
    if kind is BlockKind.ANNULUS or region.is_marking(i):
        raise RegionError(f"block {i} ({kind.value}) is never coned at xi={region.xi}")
    return _universe(region.height)


def block_moves(region: ProductRegion, i: int, c: Coord, candidates=None) -> list:
    kind = region.blocks[i]
    if kind is BlockKind.PANTS:
        return []
    if region.is_coned(i):
        pool = block_candidates(region, i) if candidates is None else candidates
        return [v for v in pool if v != c]
    if kind is BlockKind.ANNULUS:
        return [AnnulusCoord(c.twist + 1), AnnulusCoord(c.twist - 1)]
    if region.is_marking(i):
        return marking_moves(c)
    return farey_neighbors(c, region.height)


def region_neighbors(region: ProductRegion, pt: RegionPoint, candidates: dict | None = None) -> list[RegionPoint]:
    """All points one interpolating-graph edge away from ``pt``.

    ``candidates`` optionally maps a coned block index to the finite set of
    coordinate values it may jump to; otherwise the region's height-bounded
    universe is used.
    """
    check_point(region, pt)
    out = []
    for i in range(len(region.blocks)):
        pool = None if candidates is None else candidates.get(i)
        for c in block_moves(region, i, pt[i], pool):
            out.append(pt[:i] + (c,) + pt[i + 1 :])
    return out


def neighbor_fn(region: ProductRegion, candidates: dict | None = None):
    return lambda pt: region_neighbors(region, pt, candidates)


# -- closed-form distance ------------------------------------------------------


def block_distance(region: ProductRegion, i: int, a: Coord, b: Coord) -> int:
    """Distance in the i-th factor graph."""
    if a == b:
        return 0
    kind = region.blocks[i]
    if kind is BlockKind.PANTS:
        return 0
    if region.is_coned(i):
        return 1
    if kind is BlockKind.ANNULUS:
        return abs(a.twist - b.twist)
    if region.is_marking(i):
        return marking_distance(a, b)
    return farey_distance(a, b)


def region_distance_closed_form(region: ProductRegion, x: RegionPoint, y: RegionPoint) -> int:
    check_point(region, x)
    check_point(region, y)
    return sum(block_distance(region, i, x[i], y[i]) for i in range(len(region.blocks)))


def ball_distance_table(region: ProductRegion, center: RegionPoint, radius: int, candidates: dict | None = None):
    """Exact graph distances between all points of the radius-``radius`` ball.

    Geodesics between two such points stay within ``2 * radius`` of the
    center, so BFS runs inside that larger ball.  Returns ``(points, D)`` with
    ``D`` in unit (not doubled) lengths.
    """
    fn = neighbor_fn(region, candidates)
    inner = graphcore.ball_members(fn, center, radius)
    outer = graphcore.ball(fn, center, 2 * radius, key=format_point)
    points = sorted(inner, key=format_point)
    keys = [format_point(p) for p in points]
    full = graphcore.all_pairs(outer, keys)
    cols = [outer.index(k) for k in keys]
    return points, full[:, cols] // graphcore.UNIT
