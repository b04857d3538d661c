"""Uniform grids over boxes in R^1 / R^2 and functions sampled on them.

Primal (x) and dual (y) spaces are both discretized this way. Nodes along
axis k are exactly ``lo[k] + i * h[k]`` with ``h = (hi - lo) / (n - 1)``;
off-node queries snap to the nearest node, never interpolate, so +inf
structure survives every operation.

CSV layouts (token ``inf`` for +inf, shortest round-trip decimals
otherwise, rows in row-major node order):

* ``SampledFunction``  -- header ``x,value`` (1-D) or ``x,y,value`` (2-D
  coordinates of the sample point).
* ``SampledBivariate`` -- header ``x,y,value`` (1-D spaces) or
  ``x1,x2,y1,y2,value`` (2-D), row-major over (x-node, y-node).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidInputError
from .extreal import ExtReal, as_ext_array, finite_mask


@dataclass(frozen=True)
class Grid:
    """Uniform node lattice over a box; dim 1 or 2, >= 3 nodes per axis."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        n = tuple(int(v) for v in self.n)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "n", n)
        if not (len(lo) == len(hi) == len(n)):
            raise InvalidInputError("lo, hi, n must have equal length")
        if len(lo) not in (1, 2):
            raise InvalidInputError("only dimensions 1 and 2 are supported")
        for a, b in zip(lo, hi):
            if not a < b:
                raise InvalidInputError(f"need lo < hi per axis, got [{a}, {b}]")
        for k in n:
            if k < 3:
                raise InvalidInputError("need at least 3 nodes per axis")

    @classmethod
    def line(cls, lo: float, hi: float, n: int) -> "Grid":
        return cls((lo,), (hi,), (n,))

    @classmethod
    def box(cls, lo, hi, n) -> "Grid":
        """2-D grid; scalar arguments are broadcast to both axes."""
        as_pair = lambda v: (v, v) if np.isscalar(v) else tuple(v)
        return cls(as_pair(lo), as_pair(hi), as_pair(n))

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def h(self) -> tuple[float, ...]:
        return tuple((b - a) / (k - 1) for a, b, k in zip(self.lo, self.hi, self.n))

    @property
    def hmax(self) -> float:
        return max(self.h)

    def axis(self, k: int) -> np.ndarray:
        return self.lo[k] + np.arange(self.n[k]) * self.h[k]

    @property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(self.axis(k) for k in range(self.dim))

    def coords(self, idx):
        """Coordinates of a node index (int in 1-D, (i, j) in 2-D)."""
        if self.dim == 1:
            i = int(idx) if np.isscalar(idx) else int(idx[0])
            return self.lo[0] + i * self.h[0]
        i, j = (int(v) for v in idx)
        return (self.lo[0] + i * self.h[0], self.lo[1] + j * self.h[1])

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*self.axes, indexing="ij")

    def snap(self, point):
        """Nearest node index; the point must lie within h/2 of the box."""
        p = np.atleast_1d(np.asarray(point, dtype=np.float64))
        if p.shape != (self.dim,):
            raise InvalidInputError(f"expected a point in R^{self.dim}, got {point!r}")
        idx = []
        for k in range(self.dim):
            t = (p[k] - self.lo[k]) / self.h[k]
            i = int(round(t))
            if i < 0 or i >= self.n[k] or abs(t - i) > 0.5 + 1e-9:
                raise InvalidInputError(
                    f"point {point!r} is outside the grid box on axis {k}")
            idx.append(i)
        return idx[0] if self.dim == 1 else tuple(idx)

    def node_indices(self):
        """All node indices in row-major order."""
        if self.dim == 1:
            return range(self.n[0])
        return itertools.product(range(self.n[0]), range(self.n[1]))

    def __repr__(self):
        parts = ", ".join(
            f"[{a}, {b}]x{k}" for a, b, k in zip(self.lo, self.hi, self.n))
        return f"Grid({parts})"


def pairing(xgrid: Grid, ygrid: Grid) -> np.ndarray:
    """Duality products <x, y> for all node pairs.

    Shape is ``xgrid.shape + ygrid.shape``. 1-D: x*y; 2-D: x1*y1 + x2*y2,
    evaluated as ``fl(fl(x1*y1) + fl(x2*y2))``.
    """
    if xgrid.dim != ygrid.dim:
        raise InvalidInputError("x-grid and y-grid must have the same dimension")
    if xgrid.dim == 1:
        return np.multiply.outer(xgrid.axis(0), ygrid.axis(0))
    x1, x2 = xgrid.meshgrid()
    y1, y2 = ygrid.meshgrid()
    return (np.multiply.outer(x1, y1) + np.multiply.outer(x2, y2))


@dataclass(frozen=True)
class SampledFunction:
    """Extended-real values of a function on the nodes of a grid."""

    grid: Grid
    vals: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vals", as_ext_array(self.vals, self.grid.shape))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "SampledFunction":
        """Sample ``fn`` at all nodes; 1-D fn(x), 2-D fn(x1, x2), vectorized."""
        if grid.dim == 1:
            return cls(grid, fn(grid.axis(0)))
        return cls(grid, fn(*grid.meshgrid()))

    @property
    def domain(self) -> np.ndarray:
        return finite_mask(self.vals)

    @property
    def domain_nonempty(self) -> bool:
        return bool(self.domain.any())

    def require_domain(self, who: str) -> None:
        if not self.domain_nonempty:
            raise InvalidInputError(f"{who}: dom(phi) is empty")

    @property
    def finite_max(self) -> float:
        dom = self.domain
        return float(self.vals[dom].max()) if dom.any() else 0.0

    def to_csv(self, path) -> None:
        names = ["x"] if self.grid.dim == 1 else ["x", "y"]
        _write_grid_csv(path, names, (self.grid,), self.vals)

    @classmethod
    def read_csv(cls, path) -> "SampledFunction":
        grids, vals = _read_grid_csv(path, n_coord_groups=1)
        return cls(grids[0], vals)


@dataclass(frozen=True)
class SampledBivariate:
    """Extended-real values on the product of an x-grid and a y-grid."""

    xgrid: Grid
    ygrid: Grid
    vals: np.ndarray

    def __post_init__(self):
        if self.xgrid.dim != self.ygrid.dim:
            raise InvalidInputError("x-grid and y-grid must have the same dimension")
        shape = self.xgrid.shape + self.ygrid.shape
        object.__setattr__(self, "vals", as_ext_array(self.vals, shape))

    @classmethod
    def from_callable(cls, xgrid: Grid, ygrid: Grid, fn) -> "SampledBivariate":
        """Sample fn on the product grid; 1-D fn(x, y), 2-D fn(x1, x2, y1, y2)."""
        if xgrid.dim == 1:
            x = xgrid.axis(0)[:, None]
            y = ygrid.axis(0)[None, :]
            return cls(xgrid, ygrid, fn(x, y))
        x1, x2 = (m[:, :, None, None] for m in xgrid.meshgrid())
        y1, y2 = (m[None, None, :, :] for m in ygrid.meshgrid())
        return cls(xgrid, ygrid, fn(x1, x2, y1, y2))

    @property
    def nx(self) -> int:
        return self.xgrid.size

    @property
    def ny(self) -> int:
        return self.ygrid.size

    def x_slice(self, ix) -> SampledFunction:
        """The function y -> b(x, y) at a fixed x-node."""
        return SampledFunction(self.ygrid, self.vals[ix])

    def y_slice(self, iy) -> SampledFunction:
        """The function x -> b(x, y) at a fixed y-node."""
        if self.ygrid.dim == 1:
            return SampledFunction(self.xgrid, self.vals[..., iy])
        return SampledFunction(self.xgrid, self.vals[..., iy[0], iy[1]])

    def pairing(self) -> np.ndarray:
        return pairing(self.xgrid, self.ygrid)

    @property
    def finite_max(self) -> float:
        dom = finite_mask(self.vals)
        return float(self.vals[dom].max()) if dom.any() else 0.0

    def to_csv(self, path) -> None:
        names = (["x", "y"] if self.xgrid.dim == 1
                 else ["x1", "x2", "y1", "y2"])
        _write_grid_csv(path, names, (self.xgrid, self.ygrid), self.vals)

    @classmethod
    def read_csv(cls, path) -> "SampledBivariate":
        grids, vals = _read_grid_csv(path, n_coord_groups=2)
        return cls(grids[0], grids[1], vals)


# --- CSV plumbing -----------------------------------------------------------


def _fmt(v: float) -> str:
    return ExtReal(v).token()


def _write_grid_csv(path, names, grids, vals) -> None:
    axes = [ax for g in grids for ax in g.axes]
    if len(names) != len(axes):
        raise InvalidInputError("column names do not match grid axes")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names + ["value"]) + "\n")
        flat = vals.ravel()
        for row, idx in enumerate(itertools.product(*(range(len(a)) for a in axes))):
            coords = [_fmt(axes[k][i]) for k, i in enumerate(idx)]
            fh.write(",".join(coords + [_fmt(flat[row])]) + "\n")


def _read_grid_csv(path, n_coord_groups: int):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise FormatError("empty file", line=1)
        names = [c.strip() for c in header.strip().split(",")]
        if names[-1] != "value":
            raise FormatError("last column must be 'value'", line=1)
        ncoord = len(names) - 1
        if n_coord_groups == 1 and ncoord not in (1, 2):
            raise FormatError("expected 1 or 2 coordinate columns", line=1)
        if n_coord_groups == 2 and ncoord not in (2, 4):
            raise FormatError("expected 2 or 4 coordinate columns", line=1)
        coords = [[] for _ in range(ncoord)]
        values = []
        for lineno, raw in enumerate(fh, start=2):
            raw = raw.strip()
            if not raw:
                continue
            toks = raw.split(",")
            if len(toks) != ncoord + 1:
                raise FormatError(
                    f"expected {ncoord + 1} fields, got {len(toks)}", line=lineno)
            try:
                for k in range(ncoord):
                    c = ExtReal.parse(toks[k])
                    if not c.is_finite:
                        raise InvalidInputError("coordinates must be finite")
                    coords[k].append(c.value)
                values.append(ExtReal.parse(toks[-1]).value)
            except InvalidInputError as exc:
                raise FormatError(str(exc), line=lineno) from None

    values = np.asarray(values, dtype=np.float64)
    axes = []
    for k in range(ncoord):
        uniq = np.unique(np.asarray(coords[k], dtype=np.float64))
        if len(uniq) < 3:
            raise FormatError(f"column {k}: fewer than 3 distinct coordinates")
        steps = np.diff(uniq)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12 * abs(steps[0])):
            raise FormatError(f"column {k}: coordinates are not uniformly spaced")
        axes.append(uniq)
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) != len(values):
        raise FormatError(
            f"got {len(values)} rows, expected {int(np.prod(shape))} "
            "(full row-major product grid)")

    # verify row-major ordering of the coordinate columns
    for k, ax in enumerate(axes):
        rep_right = int(np.prod(shape[k + 1:], dtype=np.int64))
        expected = np.tile(np.repeat(ax, rep_right), int(np.prod(shape[:k], dtype=np.int64)))
        if not np.array_equal(np.asarray(coords[k]), expected):
            raise FormatError(f"column {k}: rows are not in row-major node order")

    def make_grid(axs):
        lo = tuple(a[0] for a in axs)
        hi = tuple(a[-1] for a in axs)
        n = tuple(len(a) for a in axs)
        return Grid(lo, hi, n)

    if n_coord_groups == 1:
        grids = (make_grid(axes),)
    else:
        half = ncoord // 2
        grids = (make_grid(axes[:half]), make_grid(axes[half:]))
    return grids, values.reshape(shape)
