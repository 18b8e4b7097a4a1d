"""Command-line front end.

Every command validates its flags before computing.  Exit codes: 0 on
success, 2 on a validation error, 1 on a runtime failure (budget exceeded,
disconnected graph, ...).  Diagnostics are a single line on stderr of the
form ``module: message``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings
from pathlib import Path

from . import formula, graphcore, regions, topology
from .errors import MCGError
from .kernels import (
    Marking11,
    Slope,
    farey_distance,
    farey_neighbors,
    marking_distance,
    marking_moves,
)


class CLIError(MCGError, ValueError):
    module = "cli"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def _load_region(path, xi=None):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise CLIError(f"{path}: region file must be a JSON object")
    return regions.ProductRegion.from_json(data, xi)


def _load_graph(path):
    data = _read_json(path)
    if not isinstance(data, dict):
        raise CLIError(f"{path}: graph file must be a JSON object")
    return graphcore.MetricGraph.from_json(data)


def _dump(obj):
    return json.dumps(obj, separators=(",", ":"))


# -- models for ball / dist ----------------------------------------------------


class _Model:
    """Parse, neighbours, key and exact distance for one vertex model."""

    def __init__(self, args):
        self.kind = args.model
        self.height = args.height
        if self.kind == "region":
            if not args.region:
                raise CLIError("--model region needs --region FILE")
            self.region = _load_region(args.region)
        elif args.region:
            raise CLIError(f"--region only applies to --model region, not {self.kind}")

    def parse(self, text):
        if self.kind in ("farey", "farey4"):
            return Slope.parse(text)
        if self.kind == "marking":
            return Marking11.parse(text)
        return regions.parse_point(self.region, text)

    def key(self, v):
        return regions.format_point(v) if self.kind == "region" else str(v)

    def neighbor_fn(self):
        if self.kind in ("farey", "farey4"):
            return lambda x: farey_neighbors(x, self.height)
        if self.kind == "marking":
            return marking_moves
        return regions.neighbor_fn(self.region)

    def distance(self, a, b):
        if self.kind in ("farey", "farey4"):
            # S_{0,4} slopes differ only in intersection numbers; the graph is the same
            return farey_distance(a, b)
        if self.kind == "marking":
            return marking_distance(a, b)
        regions.check_point(self.region, a)
        regions.check_point(self.region, b)
        return regions.region_distance_closed_form(self.region, a, b)


# -- commands --------------------------------------------------------------------


def cmd_rank(args, out):
    s = topology.Surface(args.genus, args.punctures)
    count, witness = topology.r_xi(s, args.xi, cap=args.cap)
    out.write(f"{count}\n")
    if args.witness:
        out.write(witness.dumps() + "\n")


def cmd_decomps(args, out):
    s = topology.Surface(args.genus, args.punctures)
    for d in topology.enumerate_decompositions(s, cap=args.cap):
        out.write(d.dumps() + "\n")


def cmd_ball(args, out):
    if args.radius < 0:
        raise CLIError("--radius must be >= 0")
    model = _Model(args)
    center = model.parse(args.center)
    g = graphcore.ball(model.neighbor_fn(), center, args.radius, key=model.key, frontier_cap=args.max_vertices)
    out.write((g.to_dot() if args.out == "dot" else g.dumps()) + "\n")


def cmd_dist(args, out):
    model = _Model(args)
    a, b = model.parse(getattr(args, "from")), model.parse(args.to)
    out.write(f"{model.distance(a, b)}\n")


def _sample_rows(region, K, center, radius, count, seed):
    members = sorted(graphcore.ball_members(regions.neighbor_fn(region), center, radius), key=regions.format_point)
    rng = random.Random(seed)
    rows = []
    for _ in range(count):
        x, y = rng.choice(members), rng.choice(members)
        rows.append(
            (
                regions.format_point(x),
                regions.format_point(y),
                regions.region_distance_closed_form(region, x, y),
                formula.distance_formula(region, K, x, y),
            )
        )
    return rows


def cmd_formula(args, out):
    if args.K < 1:
        raise CLIError("-K must be >= 1")
    region = _load_region(args.region, args.xi)
    src = getattr(args, "from")
    if args.samples is None:
        if src is None or args.to is None:
            raise CLIError("formula needs --from and --to, or --samples M")
        x, y = regions.parse_point(region, src), regions.parse_point(region, args.to)
        regions.check_point(region, x)
        regions.check_point(region, y)
        out.write(f"{formula.distance_formula(region, args.K, x, y)}\n")
        return
    if args.samples < 1:
        raise CLIError("--samples must be >= 1")
    center = regions.parse_point(region, src) if src else regions.default_point(region)
    rows = _sample_rows(region, args.K, center, args.radius, args.samples, args.seed)
    csv_text = formula.samples_csv(rows)
    if args.csv:
        Path(args.csv).write_text(csv_text)
    else:
        out.write(csv_text)
    if args.fit:
        pairs = [(r[2], r[3]) for r in rows]
        fit = formula.fit_qi_constants(pairs, max_b=args.max_b)
        bad = sum(not fit.holds(d1, d2) for d1, d2 in pairs)
        summary = {"a": str(fit.a), "b": fit.b, "K": args.K, "samples": len(rows), "seed": args.seed, "violations": bad}
        out.write(_dump(summary) + "\n")


def _load_geodesics(region, path):
    data = _read_json(path)
    try:
        entries = data["geodesics"]
        geos = {}
        for e in entries:
            i, start = int(e["block"]), int(e["start"])
            if not 0 <= i < len(region.blocks):
                raise CLIError(f"{path}: block {i} out of range")
            if i in geos:
                raise CLIError(f"{path}: block {i} listed twice")
            geos[i] = {start + j: regions.parse_coord(region, i, str(t)) for j, t in enumerate(e["slopes"])}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MCGError):
            raise
        raise CLIError(f"{path}: malformed geodesic file ({exc!r})") from None
    base = list(regions.default_point(region))
    for i, g in geos.items():
        if 0 not in g:
            raise CLIError(f"{path}: geodesic for block {i} has no index 0")
        base[i] = g[0]
    return formula.QuasiFlatSpec(region, tuple(base), geos)


def cmd_quasiflat(args, out):
    if args.grid < 0:
        raise CLIError("--grid must be >= 0")
    region = _load_region(args.region, args.xi)
    if args.geodesic_file:
        q = _load_geodesics(region, args.geodesic_file)
        lo, hi = q.index_range()
        if lo > -args.grid or hi < args.grid:
            raise CLIError(f"geodesics cover [{lo}, {hi}], grid needs [{-args.grid}, {args.grid}]")
    else:
        # directions come from the file's own level so --xi can show them collapse
        flat = _load_region(args.region).flat_blocks() if args.xi is not None else None
        q = formula.default_quasiflat(region, regions.default_point(region), args.grid, blocks=flat)
    report = formula.verify_quasiflat(q, args.grid, spot_checks=args.spot_checks)
    out.write(report.summary() + "\n")
    if args.json:
        out.write(_dump(report.to_json()) + "\n")


def cmd_cone(args, out):
    g = _load_graph(args.graph)
    subsets = _read_json(args.subsets)
    if not isinstance(subsets, list) or not all(isinstance(s, list) for s in subsets):
        raise CLIError(f"{args.subsets}: subsets file must be a JSON list of vertex lists")
    coned = graphcore.cone(g, [[str(v) for v in s] for s in subsets])
    out.write((coned.to_dot() if args.out == "dot" else coned.dumps()) + "\n")


def cmd_delta(args, out):
    g = _load_graph(args.graph)
    out.write(f"{formula.estimate_delta(g)}\n")


# -- parser ----------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="mcgrank", description="Interpolating graphs of surfaces: ranks, models, distance formula.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("rank", help="r_xi(S) and a witness decomposition")
    r.add_argument("--genus", type=int, required=True)
    r.add_argument("--punctures", type=int, required=True)
    r.add_argument("--xi", type=int, required=True)
    r.add_argument("--witness", action="store_true")
    r.add_argument("--cap", type=int, default=9, help="largest complexity to enumerate")
    r.set_defaults(func=cmd_rank)

    d = sub.add_parser("decomps", help="decomposition classes as JSON lines")
    d.add_argument("--genus", type=int, required=True)
    d.add_argument("--punctures", type=int, required=True)
    d.add_argument("--cap", type=int, default=9)
    d.set_defaults(func=cmd_decomps)

    for name, func in (("ball", cmd_ball), ("dist", cmd_dist)):
        m = sub.add_parser(name)
        m.add_argument("--model", choices=["farey", "farey4", "marking", "region"], required=True)
        m.add_argument("--region")
        m.add_argument("--height", type=int, default=regions.DEFAULT_HEIGHT, help="slope height bound for Farey balls")
        if name == "ball":
            m.add_argument("--center", required=True)
            m.add_argument("--radius", type=int, required=True)
            m.add_argument("--out", choices=["dot", "json"], default="json")
            m.add_argument("--max-vertices", type=int, default=graphcore.DEFAULT_FRONTIER_CAP)
        else:
            m.add_argument("--from", required=True)
            m.add_argument("--to", required=True)
        m.set_defaults(func=func)

    f = sub.add_parser("formula", help="thresholded distance formula and QI fit")
    f.add_argument("--region", required=True)
    f.add_argument("--xi", type=int)
    f.add_argument("-K", type=int, default=4)
    f.add_argument("--from")
    f.add_argument("--to")
    f.add_argument("--samples", type=int)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--radius", type=int, default=8, help="sample inside this ball around --from")
    f.add_argument("--fit", action="store_true")
    f.add_argument("--max-b", type=int)
    f.add_argument("--csv", help="write samples here instead of stdout")
    f.set_defaults(func=cmd_formula)

    q = sub.add_parser("quasiflat", help="verify a product of geodesics on a grid")
    q.add_argument("--region", required=True)
    q.add_argument("--xi", type=int)
    q.add_argument("--grid", type=int, required=True)
    q.add_argument("--geodesic-file")
    q.add_argument("--spot-checks", type=int, default=200)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_quasiflat)

    c = sub.add_parser("cone", help="cone off vertex subsets")
    c.add_argument("--graph", required=True)
    c.add_argument("--subsets", required=True)
    c.add_argument("--out", choices=["dot", "json"], default="json")
    c.set_defaults(func=cmd_cone)

    t = sub.add_parser("delta", help="four-point delta of a graph")
    t.add_argument("--graph", required=True)
    t.set_defaults(func=cmd_delta)
    return p


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            args = build_parser().parse_args(argv)
            args.func(args, out)
        for w in caught:
            err.write(f"warning: {w.message}\n")
    except MCGError as exc:
        err.write(" ".join(str(exc).split()) + "\n")
        return 2 if isinstance(exc, ValueError) else 1
    except RecursionError:
        err.write("cli: recursion limit exceeded\n")
        return 1
    except OSError as exc:
        err.write(f"cli: {exc.strerror or exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
