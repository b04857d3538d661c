"""Command-line front end.

Every subcommand writes a flat key = value report whose first line carries
the report schema version; identical configuration and seed produce
byte-identical report files (wall time goes to stderr, never into the
report). Exit codes: 0 success / check passed, 1 a mathematical check
failed (the report carries the witness), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .bipotentials import (GraphSet, check_bbgraph, check_bipotential,
                           check_cyclically_monotone, check_sync)
from .blur import (BlurSpec, blur_law, check_admits_blurring, check_newc,
                   inf_convolve_blur)
from .convexity import is_convex
from .covers import (build_cover, check_implicitly_convex,
                     check_maithm_equivalence, infimum_bipotential)
from .errors import BipotError, InvalidInputError
from .extreal import INF
from .fixtures import (cone_fixture, cone_fixture_params, elasticity_closed_form_ca,
                       elasticity_fixture, elasticity_phi, elasticity_sync,
                       load_default_params, two_point_fixture)
from .grids import Grid, SampledBivariate, SampledFunction
from .legendre import conjugate, default_dual_grid
from .report import CheckReport
from .sampling import random_convex_1d
from .windows import radius_nodes

SCHEMA_VERSION = "1.0.0"


def report_schema_version() -> str:
    """Constant per release; embedded as the first line of every report."""
    return SCHEMA_VERSION


@dataclass
class RunConfig:
    """Everything one invocation needs, resolved from flags."""

    subcommand: str
    args: argparse.Namespace
    report_lines: list[str] = field(default_factory=list)

    def add(self, key, value) -> None:
        self.report_lines.append(f"{key} = {value}")

    def add_report(self, rep: CheckReport) -> None:
        self.report_lines.extend(rep.to_lines())

    def write(self) -> None:
        text = "\n".join([f"schema_version = {SCHEMA_VERSION}",
                          f"command = {self.subcommand}",
                          *self.report_lines]) + "\n"
        path = getattr(self.args, "report", None)
        if path:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise InvalidInputError(f"expected comma-separated reals, got {text!r}")


def _ygrid_from_flags(args, phi: SampledFunction) -> Grid | None:
    box = getattr(args, "ybox", None)
    if box is None:
        return None
    lohi = _parse_floats(box)
    if len(lohi) != 2:
        raise InvalidInputError("--ybox expects 'lo,hi'")
    n = getattr(args, "yn", None) or phi.grid.n[0]
    if phi.grid.dim == 1:
        return Grid.line(lohi[0], lohi[1], n)
    return Grid.box(lohi[0], lohi[1], n)


def _out_path(args, name: str) -> str:
    out_dir = getattr(args, "out_dir", None)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        return os.path.join(out_dir, name)
    return name


# --- subcommand bodies ------------------------------------------------------


def _cmd_conjugate(cfg: RunConfig) -> int:
    a = cfg.args
    phi = SampledFunction.read_csv(a.input)
    ygrid = _ygrid_from_flags(a, phi) or default_dual_grid(phi)
    star = conjugate(phi, ygrid, cap=a.cap)
    star.to_csv(a.out)
    cfg.add("input", a.input)
    cfg.add("out", a.out)
    cfg.add("ygrid", ygrid)
    cfg.add("cap", a.cap)
    rep = is_convex(star, 1e-9 * (1.0 + abs(star.finite_max)))
    cfg.add("output_convex", rep.verdict)
    cfg.write()
    return 0 if rep.ok else 1


def _cmd_blur(cfg: RunConfig) -> int:
    a = cfg.args
    phi = SampledFunction.read_csv(a.phi)
    spec = BlurSpec(a.eps, a.kind, a.p)
    ygrid = _ygrid_from_flags(a, phi)
    cfg.add("phi", a.phi)
    cfg.add("eps", a.eps)
    cfg.add("kind", a.kind)
    if spec.kind == "yball":
        law = blur_law(phi, spec, ygrid, a.tol)
        pieces = [(a.out_ca, law.cA), (a.out_ba, law.bA)]
        for path, sb in pieces:
            if path:
                sb.to_csv(path)
                cfg.add("wrote", path)
        if a.out_graph:
            law.MplusA.to_csv(a.out_graph)
            cfg.add("wrote", a.out_graph)
        cfg.add("graph_pairs", law.MplusA.count)
    else:
        if a.out_ba or a.out_graph:
            raise InvalidInputError(
                "--out-ba/--out-graph are y-ball outputs; product blurs emit c_A only")
        from .bipotentials import sync_from_bipotential, separable
        c = sync_from_bipotential(separable(phi, ygrid))
        ca = inf_convolve_blur(c, spec)
        if a.out_ca:
            ca.to_csv(a.out_ca)
            cfg.add("wrote", a.out_ca)
    cfg.write()
    return 0


def _finish_check(cfg: RunConfig, rep: CheckReport) -> int:
    cfg.add_report(rep)
    cfg.write()
    return 0 if rep.ok else 1


def _cmd_check(cfg: RunConfig) -> int:
    a = cfg.args
    which = a.checker

    if which == "convex":
        f = SampledFunction.read_csv(a.input)
        tol = a.tol if a.tol is not None else 1e-9 * (1.0 + abs(f.finite_max))
        cfg.add("input", a.input)
        cfg.add("tol", tol)
        return _finish_check(cfg, is_convex(f, tol))

    if which == "bbgraph":
        M = GraphSet.read_csv(a.graph)
        cfg.add("graph", a.graph)
        return _finish_check(cfg, check_bbgraph(M))

    if which == "sync":
        c = SampledBivariate.read_csv(a.input)
        cfg.add("input", a.input)
        return _finish_check(cfg, check_sync(c, a.tol))

    if which == "bipotential":
        b = SampledBivariate.read_csv(a.input)
        cfg.add("input", a.input)
        return _finish_check(cfg, check_bipotential(b, a.tol))

    if which == "newc":
        phi = SampledFunction.read_csv(a.phi)
        ygrid = _ygrid_from_flags(a, phi) or phi.grid
        y_idx = ygrid.snap(_parse_floats(a.y))
        cfg.add("phi", a.phi)
        cfg.add("eps", a.eps)
        cfg.add("y", a.y)
        return _finish_check(cfg, check_newc(phi, a.eps, y_idx, a.tol, ygrid))

    if which == "blurring":
        spec = BlurSpec(a.eps, a.kind, a.p)
        cfg.add("eps", a.eps)
        cfg.add("kind", a.kind)
        if a.graph:
            target = GraphSet.read_csv(a.graph)
            cfg.add("graph", a.graph)
        else:
            target = SampledBivariate.read_csv(a.sync)
            cfg.add("sync", a.sync)
        return _finish_check(cfg, check_admits_blurring(target, spec, a.tol))

    if which == "implicit":
        phi = SampledFunction.read_csv(a.phi)
        ygrid = _ygrid_from_flags(a, phi) or phi.grid
        fam = build_cover(phi, a.eps, ygrid)
        y_idx = ygrid.snap(_parse_floats(a.y))
        values = _family_values_at(fam, y_idx)
        alphas = _parse_floats(a.alphas)
        cfg.add("phi", a.phi)
        cfg.add("eps", a.eps)
        cfg.add("y", a.y)
        cfg.add("alphas", a.alphas)
        rep = check_implicitly_convex(values, alphas, a.tol,
                                      pair_cap=a.cap, seed=a.seed)
        return _finish_check(cfg, rep)

    if which == "maithm":
        phi = SampledFunction.read_csv(a.phi)
        ygrid = _ygrid_from_flags(a, phi) or phi.grid
        cfg.add("phi", a.phi)
        cfg.add("eps", a.eps)
        rep = check_maithm_equivalence(phi, a.eps, a.tol, ygrid,
                                       pair_cap=a.cap, seed=a.seed)
        return _finish_check(cfg, rep)

    if which == "cyclic":
        pts = _read_points_csv(a.points)
        cfg.add("points", a.points)
        cfg.add("n_max", a.n_max)
        return _finish_check(cfg, check_cyclically_monotone(pts, a.n_max, a.tol))

    raise InvalidInputError(f"unknown checker {which!r}")


def _family_values_at(fam, y_idx) -> np.ndarray:
    """f(a, x) = b_a(x, y) at a fixed y-node, stacked over the offsets."""
    rows = []
    ygrid = fam.ygrid
    for off in fam.offsets:
        off_t = (off,) if ygrid.dim == 1 else off
        at = (y_idx,) if ygrid.dim == 1 else tuple(y_idx)
        src = tuple(at[k] - off_t[k] for k in range(ygrid.dim))
        if any(i < 0 or i >= ygrid.n[k] for k, i in enumerate(src)):
            rows.append(np.full(fam.xgrid.shape, INF))
            continue
        sval = fam.phistar.vals[src[0]] if ygrid.dim == 1 else \
            fam.phistar.vals[src[0], src[1]]
        if not np.isfinite(sval):
            rows.append(np.full(fam.xgrid.shape, INF))
            continue
        acoord = fam.offset_coords(off)
        if fam.xgrid.dim == 1:
            xa = fam.xgrid.axis(0) * acoord[0]
        else:
            g1, g2 = fam.xgrid.meshgrid()
            xa = g1 * acoord[0] + g2 * acoord[1]
        rows.append(fam.phi.vals + xa + sval)
    return np.stack(rows)


def _read_points_csv(path):
    """(x, y) rows: columns x,y (1-D) or x1,x2,y1,y2 (2-D)."""
    from .errors import FormatError

    pts = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header == ["x", "y"]:
            d = 1
        elif header == ["x1", "x2", "y1", "y2"]:
            d = 2
        else:
            raise FormatError("expected header 'x,y' or 'x1,x2,y1,y2'", line=1)
        for lineno, raw in enumerate(fh, start=2):
            raw = raw.strip()
            if not raw:
                continue
            toks = raw.split(",")
            if len(toks) != 2 * d:
                raise FormatError(f"expected {2 * d} fields", line=lineno)
            try:
                vals = [float(t) for t in toks]
            except ValueError:
                raise FormatError("non-numeric field", line=lineno) from None
            if d == 1:
                pts.append((vals[0], vals[1]))
            else:
                pts.append(((vals[0], vals[1]), (vals[2], vals[3])))
    return pts


def _cmd_cover(cfg: RunConfig) -> int:
    a = cfg.args
    phi = SampledFunction.read_csv(a.phi)
    ygrid = _ygrid_from_flags(a, phi) or phi.grid
    fam = build_cover(phi, a.eps, ygrid)
    inf_b = infimum_bipotential(fam)
    out = _out_path(a, "infimum_bipotential.csv")
    inf_b.to_csv(out)
    offs = _out_path(a, "offsets.csv")
    with open(offs, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("offset\n")
        for off in fam.offsets:
            fh.write(f"{off}\n".replace(" ", ""))
    cfg.add("phi", a.phi)
    cfg.add("eps", a.eps)
    cfg.add("members", len(fam.offsets))
    cfg.add("wrote", out)
    cfg.add("wrote", offs)
    cfg.write()
    return 0


def _cmd_example(cfg: RunConfig) -> int:
    a = cfg.args
    defaults = load_default_params()
    which = a.example

    if which == "elasticity":
        k = a.k if a.k is not None else defaults["elasticity.k"]
        eps = a.eps if a.eps is not None else defaults["elasticity.eps"]
        n = a.grid or int(defaults["elasticity.n"])
        lo, hi = _box_or(a, defaults, "elasticity")
        fix = elasticity_fixture(k, eps, lo, hi, n, a.dim)
        phi = elasticity_phi(fix)
        c = elasticity_sync(fix)
        ca = inf_convolve_blur(c, fix.spec)
        oracle = elasticity_closed_form_ca(fix)
        band = radius_nodes(eps, max(fix.ygrid.h))
        sl = (slice(None),) * fix.xgrid.dim + \
            tuple(slice(band, m - band) for m in fix.ygrid.shape)
        gap = float(np.abs(ca.vals[sl] - oracle.vals[sl]).max())
        phi.to_csv(_out_path(a, "phi.csv"))
        c.to_csv(_out_path(a, "sync.csv"))
        ca.to_csv(_out_path(a, "ca.csv"))
        oracle.to_csv(_out_path(a, "ca_closed_form.csv"))
        cfg.add("k", k)
        cfg.add("eps", eps)
        cfg.add("grid", n)
        cfg.add("max_oracle_gap_interior", repr(gap))
        cfg.add("gap_allowance_2h", repr(2.0 * max(fix.ygrid.h)))
        cfg.write()
        return 0 if gap <= 2.0 * max(fix.ygrid.h) else 1

    if which == "two-point":
        eps = a.eps if a.eps is not None else defaults["two_point.eps"]
        n = a.grid or int(defaults["two_point.n"])
        lo, hi = _box_or(a, defaults, "two_point")
        g = Grid.line(lo, hi, n)
        x1 = a.x1 if a.x1 is not None else defaults["two_point.x1"]
        y1 = a.y1 if a.y1 is not None else defaults["two_point.y1"]
        x2 = a.x2 if a.x2 is not None else defaults["two_point.x2"]
        y2 = a.y2 if a.y2 is not None else defaults["two_point.y2"]
        M, spec = two_point_fixture(x1, y1, x2, y2, eps, g, g)
        from .blur import minkowski_blur
        MA, clipped = minkowski_blur(M, spec)
        M.to_csv(_out_path(a, "twopoint.csv"))
        MA.to_csv(_out_path(a, "twopoint_blurred.csv"))
        rep = check_admits_blurring(M, spec)
        cfg.add("points", f"({x1},{y1}) ({x2},{y2})")
        cfg.add("eps", eps)
        cfg.add("threshold_2eps", 2 * eps)
        cfg.add("y_gap", abs(y2 - y1))
        cfg.add("clipped", clipped)
        cfg.add_report(rep)
        cfg.write()
        return 0 if rep.ok else 1

    if which == "cone":
        alpha = a.alpha if a.alpha is not None else defaults["cone.alpha"]
        y1 = a.y1 if a.y1 is not None else defaults["cone.y1"]
        eps = a.eps if a.eps is not None else defaults["cone.eps"]
        n = a.grid or int(defaults["cone.n"])
        lo, hi = _box_or(a, defaults, "cone")
        fix = cone_fixture_params(alpha, y1, eps, lo, hi, n)
        law = cone_fixture(fix)
        law.phistar.to_csv(_out_path(a, "phistar.csv"))
        law.phi.to_csv(_out_path(a, "phi.csv"))
        rep = check_newc(law.phi, eps, law.y_star_index, ygrid=fix.ygrid)
        cfg.add("alpha", alpha)
        cfg.add("y_star", fix.y_star)
        cfg.add("eps", eps)
        cfg.add("window", fix.window)
        cfg.add_report(rep)
        cfg.write()
        return 0 if rep.ok else 1

    raise InvalidInputError(f"unknown example {which!r}")


def _box_or(a, defaults, key):
    if a.box:
        lo, hi = _parse_floats(a.box)
        return lo, hi
    return defaults[f"{key}.lo"], defaults[f"{key}.hi"]


def _cmd_explore(cfg: RunConfig) -> int:
    a = cfg.args
    rng = np.random.default_rng(a.seed)
    g = Grid.line(-2.0, 2.0, a.grid)
    failures = []
    for s in range(a.samples):
        phi = random_convex_1d(g, rng, truncate=bool(s % 2))
        for iy in range(g.n[0]):
            rep = check_newc(phi, a.eps, iy, ygrid=g)
            if not rep.ok:
                failures.append((s, iy, rep.axiom))
    cfg.add("samples", a.samples)
    cfg.add("grid", a.grid)
    cfg.add("eps", a.eps)
    cfg.add("seed", a.seed)
    cfg.add("violations", len(failures))
    for s, iy, ax in failures[:20]:
        cfg.add("violation", f"sample={s} y_node={iy} axiom={ax}")
    cfg.write()
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bipot",
        description="Convex conjugates, syncs, bipotentials and blurred "
                    "monotone laws on grids")
    p.add_argument("--version", action="version",
                   version=f"bipot {__version__} "
                           f"(report schema {SCHEMA_VERSION}, backend {BACKEND})")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add_report(sp):
        sp.add_argument("--report", help="report file (default: stdout)")

    sp = sub.add_parser("conjugate", help="Fenchel conjugate of a sampled function")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out", default="conjugate.csv")
    sp.add_argument("--ybox", help="dual box 'lo,hi' (default: slope range)")
    sp.add_argument("--yn", type=int, help="dual nodes per axis")
    sp.add_argument("--cap", type=float, default=1e12)
    add_report(sp)

    sp = sub.add_parser("blur", help="c_A, b_A and M+A of a blurred law")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--kind", choices=["yball", "product"], default="yball")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--ybox")
    sp.add_argument("--yn", type=int)
    sp.add_argument("--out-ca", dest="out_ca", default="ca.csv")
    sp.add_argument("--out-ba", dest="out_ba", default="ba.csv")
    sp.add_argument("--out-graph", dest="out_graph", default="mg.csv")
    add_report(sp)

    sp = sub.add_parser("check", help="run one predicate checker")
    csub = sp.add_subparsers(dest="checker", required=True)

    def checker(name, **flags):
        c = csub.add_parser(name)
        for flag, kw in flags.items():
            c.add_argument(f"--{flag.replace('_', '-')}", **kw)
        add_report(c)
        return c

    checker("convex", input=dict(required=True), tol=dict(type=float))
    checker("bbgraph", graph=dict(required=True))
    checker("sync", input=dict(required=True), tol=dict(type=float))
    checker("bipotential", input=dict(required=True), tol=dict(type=float))
    checker("newc", phi=dict(required=True), eps=dict(type=float, required=True),
            y=dict(required=True), tol=dict(type=float),
            ybox=dict(), yn=dict(type=int))
    checker("blurring", graph=dict(), sync=dict(),
            eps=dict(type=float, required=True),
            kind=dict(choices=["yball", "product"], default="yball"),
            p=dict(type=float, default=2.0), tol=dict(type=float))
    checker("implicit", phi=dict(required=True),
            eps=dict(type=float, required=True), y=dict(required=True),
            alphas=dict(default="0.5"), tol=dict(type=float),
            cap=dict(type=int, default=200000), seed=dict(type=int, default=0),
            ybox=dict(), yn=dict(type=int))
    checker("maithm", phi=dict(required=True),
            eps=dict(type=float, required=True), tol=dict(type=float),
            cap=dict(type=int, default=200000), seed=dict(type=int, default=0),
            ybox=dict(), yn=dict(type=int))
    checker("cyclic", points=dict(required=True),
            n_max=dict(type=int, required=True), tol=dict(type=float))

    sp = sub.add_parser("cover", help="bipotential convex covers")
    cov = sp.add_subparsers(dest="covercmd", required=True)
    cb = cov.add_parser("build")
    cb.add_argument("--phi", required=True)
    cb.add_argument("--eps", type=float, required=True)
    cb.add_argument("--out-dir", dest="out_dir", required=True)
    cb.add_argument("--ybox")
    cb.add_argument("--yn", type=int)
    add_report(cb)

    sp = sub.add_parser("example", help="reproduce a worked example")
    ex = sp.add_subparsers(dest="example", required=True)
    for name in ("elasticity", "two-point", "cone"):
        e = ex.add_parser(name)
        e.add_argument("--out-dir", dest="out_dir", required=True)
        e.add_argument("--grid", type=int)
        e.add_argument("--box")
        e.add_argument("--eps", type=float)
        if name == "elasticity":
            e.add_argument("--k", type=float)
            e.add_argument("--dim", type=int, default=1)
        if name == "two-point":
            for f in ("x1", "y1", "x2", "y2"):
                e.add_argument(f"--{f}", type=float)
        if name == "cone":
            e.add_argument("--alpha", type=float)
            e.add_argument("--y1", type=float)
        add_report(e)

    sp = sub.add_parser("explore", help="exploration harnesses")
    xp = sp.add_subparsers(dest="explorecmd", required=True)
    dx = xp.add_parser("darboux",
                       help="randomized 1-D search for convexity failures "
                            "of the subdifferential-union condition")
    dx.add_argument("--samples", type=int, default=20)
    dx.add_argument("--seed", type=int, default=0)
    dx.add_argument("--grid", type=int, default=101)
    dx.add_argument("--eps", type=float, default=0.5)
    add_report(dx)

    return p


_DISPATCH = {
    "conjugate": _cmd_conjugate,
    "blur": _cmd_blur,
    "check": _cmd_check,
    "cover": _cmd_cover,
    "example": _cmd_example,
    "explore": _cmd_explore,
}


def run(config: RunConfig) -> int:
    return _DISPATCH[config.subcommand](config)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.subcommand, args)
    t0 = time.perf_counter()
    try:
        code = run(cfg)
    except BipotError as exc:
        print(f"bipot: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"bipot: error: {exc}", file=sys.stderr)
        return 2
    finally:
        print(f"bipot: elapsed {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
