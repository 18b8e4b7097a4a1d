import warnings

import pytest

from mcgrank.errors import RegionError
from mcgrank.kernels import AnnulusCoord, Marking11, Slope
from mcgrank.regions import (
    UNIT,
    BlockKind,
    ProductRegion,
    ball_distance_table,
    block_distance,
    check_point,
    default_point,
    format_point,
    make_region,
    parse_point,
    region_distance_closed_form,
    region_neighbors,
    restrict,
)

S = Slope.parse


def test_make_region_validation():
    with pytest.raises(RegionError):
        make_region([], 0)
    with pytest.raises(RegionError):
        make_region(["TORUS1"], -3)
    with pytest.raises(RegionError):
        make_region(["TORUS1", "ANNULUS"], 0)
    with pytest.raises(ValueError):
        make_region(["KLEIN"], 0)
    with pytest.warns(UserWarning):
        make_region(["TORUS1", "PANTS"], 1)


def test_flat_blocks():
    assert make_region(["TORUS1", "PANTS", "SPHERE4"], 0).flat_blocks() == [0, 2]
    assert make_region(["TORUS1", "PANTS", "SPHERE4"], -1).flat_blocks() == [0, 2]
    assert make_region(["TORUS1", "ANNULUS"], -2).flat_blocks() == [1]


def test_point_round_trip():
    r = make_region(["TORUS1", "ANNULUS", "PANTS", "SPHERE4"], -2)
    pt = parse_point(r, "(0/1; 1/0)|3|*|(1/2; 1/1)")
    assert pt == (Marking11(S("0/1"), S("1/0")), AnnulusCoord(3), UNIT, Marking11(S("1/2"), S("1/1")))
    assert parse_point(r, format_point(pt)) == pt
    assert restrict(pt, 1) == AnnulusCoord(3)
    with pytest.raises(RegionError):
        restrict(pt, 4)
    with pytest.raises(RegionError):
        parse_point(r, "0/1|3|*|(1/2; 1/1)")
    with pytest.raises(RegionError):
        parse_point(r, "(0/1; 1/0)|3|*")
    with pytest.raises(RegionError):
        check_point(r, (S("0/1"),) * 4)


def test_json_round_trip():
    r = make_region(["TORUS1", "ANNULUS"], -2)
    assert r.dumps() == '{"blocks":["TORUS1","ANNULUS"],"xi":-2}'
    assert ProductRegion.from_json(r.to_json()) == r
    assert ProductRegion.from_json({"blocks": ["TORUS1"], "xi": 0}, xi=-1).xi == -1
    with pytest.raises(RegionError):
        ProductRegion.from_json({"blocks": ["TORUS1"]})


def test_block_distance_rules():
    r = make_region(["TORUS1", "ANNULUS", "PANTS"], -2)
    assert block_distance(r, 1, AnnulusCoord(0), AnnulusCoord(4)) == 4
    assert block_distance(r, 2, UNIT, UNIT) == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        coned = make_region(["TORUS1", "TORUS1"], 1)
    assert block_distance(coned, 0, S("0/1"), S("7/3")) == 1
    assert block_distance(coned, 0, S("7/3"), S("7/3")) == 0


def test_closed_form_is_sum_of_blocks():
    r = make_region(["TORUS1", "SPHERE4", "PANTS"], -1)
    x = (S("0/1"), S("1/0"), UNIT)
    y = (S("3/5"), S("2/1"), UNIT)
    assert region_distance_closed_form(r, x, y) == 2 + 1


def test_neighbors_move_one_block():
    r = make_region(["TORUS1", "ANNULUS"], -2)
    pt = default_point(r)
    nb = region_neighbors(r, pt)
    assert len(nb) == 3 + 2
    for q in nb:
        assert sum(a != b for a, b in zip(pt, q)) == 1
        assert region_distance_closed_form(r, pt, q) == 1


def test_coned_block_candidates():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = make_region(["TORUS1", "TORUS1"], 1)
    pt = default_point(r)
    nb = region_neighbors(r, pt, candidates={0: [S("0/1"), S("5/1")], 1: [S("2/7")]})
    assert nb == [(S("5/1"), S("0/1")), (S("0/1"), S("2/7"))]
    assert default_point(make_region(["TORUS1", "PANTS"], 0)) == (S("0/1"), UNIT)


def test_ball_table_matches_closed_form_small():
    r = make_region(["TORUS1", "ANNULUS"], -2)
    points, D = ball_distance_table(r, default_point(r), 2)
    bad = [(i, j) for i, x in enumerate(points) for j, y in enumerate(points) if D[i, j] != region_distance_closed_form(r, x, y)]
    assert bad == []


def test_marking_ball_is_not_convex():
    # distances measured inside a radius-4 marking ball alone can be too long,
    # which is why the table runs BFS in the doubled ball
    from mcgrank import graphcore as gc

    r = make_region(["TORUS1"], -2)
    g = gc.ball(lambda pt: region_neighbors(r, pt), default_point(r), 4, key=format_point)
    D = gc.all_pairs(g) // gc.UNIT
    pts = {v: parse_point(r, v) for v in g.vertices}
    worse = sum(
        int(D[g.index(a), g.index(b)]) > region_distance_closed_form(r, pts[a], pts[b]) for a in g.vertices for b in g.vertices
    )
    assert worse > 0
