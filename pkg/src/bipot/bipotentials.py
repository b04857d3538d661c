"""Syncs, bipotentials, their graphs, axioms, and cyclic monotonicity.

A bipotential b(x, y) is separately convex and lsc, dominates the duality
product, and satisfies the three-way equivalence between the two
subdifferential inclusions and equality b = <x, y>; its graph M(b) is the
equality set. b is a bipotential iff c = b - <x, y> is a sync (nonnegative,
separately convex, attained slice minima equal to 0), and the two standard
constructions are the separable one, phi(x) + phi*(y), and the degenerate
one, <x, y> + indicator of a BB-graph.

On finite grids every section is closed, so the bi-closed half of the
BB-graph definition holds vacuously; the checkers note this instead of
testing it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .convexity import batch_is_convex, is_convex, is_set_convex
from .errors import InvalidInputError
from .extreal import INF
from .grids import Grid, SampledBivariate, SampledFunction, pairing
from .legendre import conjugate
from .report import CheckReport, failing, passing
from .windows import chebyshev_dilate

CLOSEDNESS_NOTE = "bi-closed: vacuously true on a finite grid"

# residuals between tol and BAND*tol are treated as borderline rather than
# as decisive (non-)membership, so the three-way equivalence is not failed
# by knife-edge rounding at the tolerance boundary
_BAND = 3.0


@dataclass(frozen=True)
class GraphSet:
    """A set of (x-node, y-node) pairs, stored as a boolean mask."""

    xgrid: Grid
    ygrid: Grid
    mask: np.ndarray

    def __post_init__(self):
        if self.xgrid.dim != self.ygrid.dim:
            raise InvalidInputError("x-grid and y-grid must have the same dimension")
        m = np.asarray(self.mask)
        if m.dtype != bool or m.shape != self.xgrid.shape + self.ygrid.shape:
            raise InvalidInputError("mask must be boolean with shape x-shape + y-shape")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_pairs(cls, xgrid: Grid, ygrid: Grid, pairs) -> "GraphSet":
        mask = np.zeros(xgrid.shape + ygrid.shape, dtype=bool)
        for xi, yi in pairs:
            xi = (xi,) if np.isscalar(xi) else tuple(xi)
            yi = (yi,) if np.isscalar(yi) else tuple(yi)
            mask[xi + yi] = True
        return cls(xgrid, ygrid, mask)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    def pairs(self):
        """(x-index, y-index) pairs in row-major order."""
        xd = self.xgrid.dim
        for idx in np.argwhere(self.mask):
            xi = int(idx[0]) if xd == 1 else (int(idx[0]), int(idx[1]))
            yi = int(idx[xd]) if xd == 1 else (int(idx[2]), int(idx[3]))
            yield (xi, yi)

    def y_section(self, iy) -> np.ndarray:
        """Mask over the x-grid of M*(y) = {x : (x, y) in M}."""
        if self.ygrid.dim == 1:
            return self.mask[..., iy]
        return self.mask[..., iy[0], iy[1]]

    def x_section(self, ix) -> np.ndarray:
        """Mask over the y-grid of M(x) = {y : (x, y) in M}."""
        return self.mask[ix]

    def same_pairs(self, other: "GraphSet") -> bool:
        return np.array_equal(self.mask, other.mask)

    def to_csv(self, path) -> None:
        """Flat `x_index,y_index` rows plus grid metadata comment lines."""
        def gline(tag, g):
            lo = " ".join(repr(v) for v in g.lo)
            hi = " ".join(repr(v) for v in g.hi)
            n = " ".join(str(v) for v in g.n)
            return f"# {tag} lo={lo} hi={hi} n={n}\n"

        ny = self.ygrid.size
        flat = np.flatnonzero(self.mask.reshape(-1))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# bipot-graph v1\n")
            fh.write(gline("xgrid", self.xgrid))
            fh.write(gline("ygrid", self.ygrid))
            fh.write("x_index,y_index\n")
            for f in flat:
                fh.write(f"{f // ny},{f % ny}\n")

    @classmethod
    def read_csv(cls, path) -> "GraphSet":
        from .errors import FormatError

        def parse_grid(line, lineno):
            try:
                fields = dict(tok.split("=", 1) for tok in line.split()[2:])
                lo = tuple(float(v) for v in fields["lo"].split())
                hi = tuple(float(v) for v in fields["hi"].split())
                n = tuple(int(v) for v in fields["n"].split())
                return Grid(lo, hi, n)
            except (KeyError, ValueError, IndexError):
                raise FormatError("malformed grid metadata", line=lineno) from None

        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
        if len(lines) < 4 or not lines[0].startswith("# bipot-graph"):
            raise FormatError("missing '# bipot-graph' metadata header", line=1)
        xgrid = parse_grid(lines[1], 2)
        ygrid = parse_grid(lines[2], 3)
        if lines[3].strip() != "x_index,y_index":
            raise FormatError("expected header 'x_index,y_index'", line=4)
        mask = np.zeros((xgrid.size, ygrid.size), dtype=bool)
        for lineno, raw in enumerate(lines[4:], start=5):
            raw = raw.strip()
            if not raw:
                continue
            try:
                xs, ys = raw.split(",")
                mask[int(xs), int(ys)] = True
            except (ValueError, IndexError):
                raise FormatError("expected two integer indices", line=lineno) from None
        return cls(xgrid, ygrid, mask.reshape(xgrid.shape + ygrid.shape))


def graphs_match_within(a: GraphSet, b: GraphSet, nodes: int = 1) -> bool:
    """Mutual containment of two graphs up to `nodes` grid steps per axis."""
    if a.xgrid.shape != b.xgrid.shape or a.ygrid.shape != b.ygrid.shape:
        raise InvalidInputError("graphs live on different grids")

    def dilate(g: GraphSet) -> np.ndarray:
        m = chebyshev_dilate(g.mask, g.ygrid, nodes)
        xd, yd = g.xgrid.dim, g.ygrid.dim
        perm = tuple(range(xd, xd + yd)) + tuple(range(xd))
        m = chebyshev_dilate(m.transpose(perm), g.xgrid, nodes)
        back = tuple(range(yd, yd + xd)) + tuple(range(yd))
        return m.transpose(back)

    return bool((~dilate(a) & b.mask).sum() == 0 and (~dilate(b) & a.mask).sum() == 0)


# --- constructions ----------------------------------------------------------


def sync_from_bipotential(b: SampledBivariate) -> SampledBivariate:
    """c(x, y) = b(x, y) - <x, y>, the sync of a bipotential."""
    return SampledBivariate(b.xgrid, b.ygrid, b.vals - b.pairing())


def bipotential_from_sync(c: SampledBivariate) -> SampledBivariate:
    """b = c + <x, y>; rejects negative sync values."""
    if (c.vals < 0).any():
        idx = np.unravel_index(int(np.argmax(c.vals < 0)), c.vals.shape)
        raise InvalidInputError(f"sync values must be >= 0; c{tuple(idx)} < 0")
    return SampledBivariate(c.xgrid, c.ygrid, c.vals + c.pairing())


def separable(phi: SampledFunction, ygrid: Grid | None = None) -> SampledBivariate:
    """b(x, y) = phi(x) + phi*(y)."""
    phi.require_domain("separable")
    if ygrid is None:
        ygrid = phi.grid   # node-aligned dual box by default
    star = conjugate(phi, ygrid)
    xshape = phi.grid.shape
    yshape = star.grid.shape
    vals = phi.vals.reshape(xshape + (1,) * len(yshape)) + star.vals
    return SampledBivariate(phi.grid, star.grid, vals)


def b_infinity(M: GraphSet) -> SampledBivariate:
    """b_inf(x, y) = <x, y> on M, +inf elsewhere."""
    if M.is_empty:
        raise InvalidInputError("b_infinity needs a nonempty graph")
    vals = np.where(M.mask, pairing(M.xgrid, M.ygrid), INF)
    return SampledBivariate(M.xgrid, M.ygrid, vals)


def graph_of(b: SampledBivariate, tol: float) -> GraphSet:
    """All node pairs with b(x, y) - <x, y> <= tol."""
    if tol < 0:
        raise InvalidInputError("tol must be >= 0")
    with np.errstate(invalid="ignore"):
        mask = (b.vals - b.pairing()) <= tol
    return GraphSet(b.xgrid, b.ygrid, mask)


def default_graph_tol(xgrid: Grid, ygrid: Grid) -> float:
    """Equality-set threshold at curvature scale h^2/2 (plus float slack)."""
    h = max(max(xgrid.h), max(ygrid.h))
    return 0.5 * h * h + 1e-12


# --- axiom checkers ---------------------------------------------------------


def _yslice_stack(vals: np.ndarray, xdim: int) -> np.ndarray:
    """(ny, *xshape) view: one x-function per y-node."""
    nax = vals.ndim
    perm = tuple(range(xdim, nax)) + tuple(range(xdim))
    moved = vals.transpose(perm)
    return moved.reshape((-1,) + vals.shape[:xdim])


def _xslice_stack(vals: np.ndarray, xdim: int) -> np.ndarray:
    """(nx, *yshape) view: one y-function per x-node."""
    return vals.reshape((-1,) + vals.shape[xdim:])


def _first_bad_slice(flags: np.ndarray):
    bad = np.flatnonzero(~flags)
    return None if bad.size == 0 else int(bad[0])


def _unflatten(grid: Grid, flat: int):
    if grid.dim == 1:
        return flat
    return (flat // grid.n[1], flat % grid.n[1])


def _slice_convexity(b: SampledBivariate, tol: float) -> CheckReport:
    """Axiom (a): every nonempty slice passes the convexity battery."""
    ystack = _yslice_stack(b.vals, b.xgrid.dim)
    flags = batch_is_convex(ystack, b.xgrid, tol)
    bad = _first_bad_slice(flags)
    if bad is not None:
        iy = _unflatten(b.ygrid, bad)
        detail = is_convex(b.y_slice(iy), tol)
        return failing(f"slice-convex[{detail.axiom}]",
                       (("y", iy), detail.witness), detail.residual,
                       "slice b(., y) fails the line battery")
    xstack = _xslice_stack(b.vals, b.xgrid.dim)
    flags = batch_is_convex(xstack, b.ygrid, tol)
    bad = _first_bad_slice(flags)
    if bad is not None:
        ix = _unflatten(b.xgrid, bad)
        detail = is_convex(b.x_slice(ix), tol)
        return failing(f"slice-convex[{detail.axiom}]",
                       (("x", ix), detail.witness), detail.residual,
                       "slice b(x, .) fails the line battery")
    return passing("slice-convex")


def _interior_cut(shape, axes):
    """Slice tuple removing the boundary ring of the given axes."""
    cut = [slice(None)] * len(shape)
    for ax in axes:
        cut[ax] = slice(1, -1)
    return tuple(cut)


def slice_conjugate_at_self(b: SampledBivariate):
    """g*(y) for every y-slice g = b(., y), the x-slice analogue, and
    escape flags.

    g*(y) = max_x (<x, y> - b(x, y)) is the slice conjugate evaluated at the
    slice's own dual point, the only value the Fenchel-Young membership test
    needs. Empty slices give -inf. A slice whose maximum is attained only on
    the box boundary has a sup that (plausibly) escapes the box; its flag is
    set and the membership it feeds is treated as borderline, mirroring the
    attained-minimum guard of the sync axioms.
    """
    P = b.pairing()
    with np.errstate(invalid="ignore"):
        gap = np.where(np.isposinf(b.vals), -INF, P - b.vals)
    xdim = b.xgrid.dim
    xaxes = tuple(range(xdim))
    yaxes = tuple(range(xdim, gap.ndim))
    g_y = gap.max(axis=xaxes)   # (yshape): conjugate of b(., y) at y
    g_x = gap.max(axis=yaxes)   # (xshape): conjugate of b(x, .) at x
    ftol = 1e-12 * (1.0 + abs(b.finite_max))
    inner_y = gap[_interior_cut(gap.shape, xaxes)].max(axis=xaxes)
    inner_x = gap[_interior_cut(gap.shape, yaxes)].max(axis=yaxes)
    esc_y = np.isfinite(g_y) & (inner_y < g_y - ftol)
    esc_x = np.isfinite(g_x) & (inner_x < g_x - ftol)
    return g_y, g_x, esc_y, esc_x, P


def check_bipotential(b: SampledBivariate, tol: float | None = None,
                      slice_tol: float | None = None) -> CheckReport:
    """Decide the three bipotential axioms, reporting the first failure.

    (a) separate convexity of every nonempty slice (line battery, slice_tol,
        default 1e-9 * value scale);
    (b) b >= <x, y> within tol;
    (c) at every node pair the two subdifferential memberships, decided by
        the Fenchel-Young residual of the corresponding slice, and the
        equality membership b = <x, y> must coincide within tol.

    tol defaults to 3h(1 + |<x, y>|) per node pair. Residuals between tol
    and 3*tol are borderline and never fail (c) on their own.
    """
    if slice_tol is None:
        slice_tol = 1e-9 * (1.0 + abs(b.finite_max))
    rep = _slice_convexity(b, slice_tol)
    if not rep.ok:
        return rep

    P = b.pairing()
    h = max(max(b.xgrid.h), max(b.ygrid.h))
    tolc = (3.0 * h * (1.0 + np.abs(P))) if tol is None else np.full(P.shape, float(tol))

    with np.errstate(invalid="ignore"):
        diff = np.where(np.isposinf(b.vals), INF, b.vals - P)
    bad = diff < -tolc
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad)), bad.shape)
        return failing("duality-lower-bound", tuple(int(i) for i in idx),
                       float(diff[idx]), "b(x, y) < <x, y> - tol")

    g_y, g_x, esc_y, esc_x, _ = slice_conjugate_at_self(b)
    xdim = b.xgrid.dim
    gy = g_y.reshape((1,) * xdim + b.ygrid.shape)
    gx = g_x.reshape(b.xgrid.shape + (1,) * b.ygrid.dim)
    ey = esc_y.reshape(gy.shape)
    ex = esc_x.reshape(gx.shape)
    with np.errstate(invalid="ignore"):
        r1 = np.where(np.isposinf(diff), INF, diff + gy)
        r2 = np.where(np.isposinf(diff), INF, diff + gx)
    member = np.stack([(r1 <= tolc) & ~ey, (r2 <= tolc) & ~ex, diff <= tolc])
    nonmember = np.stack([(r1 >= _BAND * tolc) & ~ey,
                          (r2 >= _BAND * tolc) & ~ex,
                          diff >= _BAND * tolc])
    viol = member.any(axis=0) & nonmember.any(axis=0)
    if viol.any():
        idx = np.unravel_index(int(np.argmax(viol)), viol.shape)
        rs = (float(r1[idx]), float(r2[idx]), float(diff[idx]))
        return failing("three-way-equivalence", tuple(int(i) for i in idx),
                       min(rs), f"residuals (del_y, del_x, eq) = {rs}")
    notes = [CLOSEDNESS_NOTE]
    n_esc = int(esc_y.sum() + esc_x.sum())
    if n_esc:
        notes.append(f"box-escaping slice suprema treated as borderline: {n_esc}")
    return passing("bipotential", *notes)


def _attained_slice_minimum(vals: np.ndarray, flat_tol: float):
    """(attained, min) of one slice; the min at a box edge with a strictly
    larger inward neighbor is treated as escaping the box, not attained."""
    fin = np.isfinite(vals)
    if not fin.any():
        return False, INF
    masked = np.where(fin, vals, INF)
    flat = int(np.argmin(masked))
    mn = float(masked.reshape(-1)[flat])
    idx = np.unravel_index(flat, vals.shape)
    for ax in range(vals.ndim):
        n = vals.shape[ax]
        if idx[ax] == 0 and n > 1:
            inward = list(idx)
            inward[ax] += 1
        elif idx[ax] == n - 1 and n > 1:
            inward = list(idx)
            inward[ax] -= 1
        else:
            continue
        v_in = vals[tuple(inward)]
        if not np.isfinite(v_in) or v_in > mn + flat_tol:
            return False, mn
    return True, mn


def check_sync(c: SampledBivariate, tol: float | None = None,
               cross_check: bool = True) -> CheckReport:
    """Decide the sync axioms: c >= 0, separate convexity, attained slice
    minima equal to 0 (within a resolution tolerance), then cross-check
    against ``check_bipotential(c + <x, y>)``.

    Slice minima that sit on the box edge with a strictly increasing inward
    neighbor are counted as not attained (the true minimum escapes the box).
    """
    scale = 1.0 + abs(c.finite_max)
    neg_tol = 1e-9 * scale if tol is None else tol
    neg = c.vals < -neg_tol
    if neg.any():
        idx = np.unravel_index(int(np.argmax(neg)), neg.shape)
        return failing("nonnegative", tuple(int(i) for i in idx),
                       float(c.vals[idx]))

    rep = _slice_convexity(c, 1e-9 * scale)
    if not rep.ok:
        return rep

    P = c.pairing()
    h = max(max(c.xgrid.h), max(c.ygrid.h))
    flat_tol = 1e-12 * scale
    xdim = c.xgrid.dim
    for tag, stack, grid, pgather in (
            ("y", _yslice_stack(c.vals, xdim), c.ygrid,
             _yslice_stack(P, xdim)),
            ("x", _xslice_stack(c.vals, xdim), c.xgrid,
             _xslice_stack(P, xdim))):
        for s in range(stack.shape[0]):
            attained, mn = _attained_slice_minimum(stack[s], flat_tol)
            if not attained:
                continue
            arg = int(np.argmin(np.where(np.isfinite(stack[s]), stack[s], INF)))
            mtol = tol if tol is not None else \
                h * (1.0 + abs(float(pgather[s].reshape(-1)[arg])))
            if mn > mtol:
                return failing("attained-min-zero",
                               (tag, _unflatten(grid, s)), mn,
                               f"slice minimum {mn!r} exceeds {mtol!r}")

    if cross_check:
        rep_b = check_bipotential(bipotential_from_sync(c), tol)
        if not rep_b.ok:
            return failing(f"psync-crosscheck[{rep_b.axiom}]", rep_b.witness,
                           rep_b.residual,
                           "c passed the sync axioms but c + <x,y> fails "
                           "the bipotential axioms")
    return passing("sync", CLOSEDNESS_NOTE)


def check_bbgraph(M: GraphSet) -> CheckReport:
    """Bi-convexity of every nonempty section; closedness is vacuous.

    Sections are scanned y-first in ascending node order; the report names
    the first failing section. BIPOT_THREADS caps the scan workers without
    changing the verdict or the witness.
    """
    from ._threads import ordered_chunked_map

    if M.is_empty:
        raise InvalidInputError("check_bbgraph needs a nonempty graph")

    def check_one(job):
        tag, idx = job
        sec = M.y_section(idx) if tag == "y" else M.x_section(idx)
        if not sec.any():
            return None
        rep = is_set_convex(sec, M.xgrid if tag == "y" else M.ygrid)
        return None if rep.ok else (tag, idx, rep)

    jobs = [("y", iy) for iy in M.ygrid.node_indices()] \
        + [("x", ix) for ix in M.xgrid.node_indices()]
    for hit in ordered_chunked_map(check_one, jobs):
        if hit is not None:
            tag, idx, rep = hit
            return failing(f"{tag}-section-convex", ((tag, idx), rep.witness),
                           rep.residual, *rep.notes)
    return passing("bbgraph", CLOSEDNESS_NOTE)


def check_cyclically_monotone(points, n_max: int,
                              tol: float | None = None) -> CheckReport:
    """Exhaustive cycle inequality over tuples drawn from `points`.

    points: (x, y) pairs, scalars or 2-vectors. Every tuple
    (p_0, ..., p_n) with n + 1 <= n_max points (repetition allowed) must
    satisfy <x_n - x_0, y_n> + sum <x_{k-1} - x_k, y_{k-1}> >= -tol.
    Exhaustive by design; meant for point sets of desk scale (<= 8).
    """
    pts = list(points)
    if not pts:
        raise InvalidInputError("need at least one point")
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    k = len(pts)
    if n_max > k:
        warnings.warn(f"n_max={n_max} exceeds the point count {k}; clamping",
                      stacklevel=2)
        n_max = k
    X = np.asarray([np.atleast_1d(np.asarray(p[0], dtype=np.float64)) for p in pts])
    Y = np.asarray([np.atleast_1d(np.asarray(p[1], dtype=np.float64)) for p in pts])
    D = X @ Y.T                    # D[i, j] = <x_i, y_j>
    if tol is None:
        tol = 1e-12 * (1.0 + float(np.abs(D).max()))

    for L in range(2, n_max + 1):
        total = k ** L
        chunk = 200_000
        for start in range(0, total, chunk):
            ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
            digits = np.empty((len(ids), L), dtype=np.int64)
            rem = ids
            for pos in range(L - 1, -1, -1):
                rem, digits[:, pos] = np.divmod(rem, k)
            last = digits[:, -1]
            s = D[last, last] - D[digits[:, 0], last]
            for j in range(1, L):
                prev = digits[:, j - 1]
                s += D[prev, prev] - D[digits[:, j], prev]
            worst = int(np.argmin(s))
            if s[worst] < -tol:
                cycle = tuple(int(d) for d in digits[worst])
                return failing("cycle-inequality", cycle, float(s[worst]),
                               f"cycle of length {L} over point indices")
    return passing("cyclically-monotone")
