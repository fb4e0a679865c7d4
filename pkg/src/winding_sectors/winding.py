"""Per-cell winding numbers of closed lattice walks and winding-sector
accounting.

Cell (i, j) is the unit square with corners (i, j) and (i+1, j+1); its
winding number is the walk's winding around the cell center.  The field is
built scanline-style: net signed traversals of vertical lattice edges are
accumulated per column, and a suffix sum along x yields the winding of every
cell in one pass, O(N + area).

The inside/outside split follows the external frontier of the union of
traces: an edge traversed any number of times (in either direction) blocks
the flood fill.  The fill runs on a doubled pixel grid (cells at odd/odd
pixels, lattice edges and vertices at the even ones) so connected-component
labeling with 4-connectivity respects the thin walls, including curves that
only touch at a lattice vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .walks import ClosedWalk

__all__ = ["WindingField", "CellMask", "SectorTally", "winding_field",
           "signed_area", "inside_mask", "tally"]


@dataclass
class WindingField:
    """Dense per-cell winding numbers over the walk's bounding box."""

    x0: int  # cell coordinates of grid[0, 0]
    y0: int
    grid: np.ndarray  # int32, shape (nx_cells, ny_cells); may be empty

    @property
    def bbox(self):
        """(x0, y0, x1, y1), inclusive cell range; None when empty."""
        if self.grid.size == 0:
            return None
        return (self.x0, self.y0,
                self.x0 + self.grid.shape[0] - 1, self.y0 + self.grid.shape[1] - 1)

    def winding(self, ix: int, iy: int) -> int:
        jx, jy = ix - self.x0, iy - self.y0
        if 0 <= jx < self.grid.shape[0] and 0 <= jy < self.grid.shape[1]:
            return int(self.grid[jx, jy])
        return 0

    def total(self) -> int:
        return int(self.grid.sum())

    def nonzero_cells(self):
        """(ix, iy, w) arrays for cells with nonzero winding, global coords."""
        jx, jy = np.nonzero(self.grid)
        return jx + self.x0, jy + self.y0, self.grid[jx, jy]

    def to_text(self) -> str:
        """Rows printed top to bottom (decreasing y), columns left to right."""
        if self.grid.size == 0:
            return "(empty)"
        rows = []
        for jy in range(self.grid.shape[1] - 1, -1, -1):
            rows.append(" ".join(f"{int(w):+d}" for w in self.grid[:, jy]))
        return "\n".join(rows)


def _scatter_signed(ix, iy, sign, nx, ny):
    """Signed scatter-add on an (nx, ny) int32 grid via one weighted bincount."""
    lin = ix.astype(np.int64) * ny + iy
    net = np.bincount(lin, weights=sign, minlength=nx * ny)
    return net.astype(np.int32).reshape(nx, ny)


def winding_field(walk: ClosedWalk) -> WindingField:
    """Winding number of every cell enclosed at least once by the walk."""
    ex, ey, sign = walk.vertical_edges()
    if ex.size == 0:
        return WindingField(0, 0, np.zeros((0, 0), dtype=np.int32))
    # the vertex bbox bounds every edge, saving separate min/max passes
    x0, y0, x1, y1 = walk.vertex_bbox()
    nxe, ny = x1 - x0 + 1, y1 - y0
    net = _scatter_signed(ex - x0, ey - y0, sign, nxe, ny)
    # cell (i, j) winds by the net upward crossings strictly to its right
    suffix = net[::-1].cumsum(axis=0, dtype=np.int32)[::-1]
    return WindingField(x0, y0, suffix[1:])


def signed_area(walk: ClosedWalk) -> int:
    """Shoelace (algebraic) area of the closed polyline, exact in integers."""
    x, y = walk.coords()
    x = x.astype(np.int64)
    y = y.astype(np.int64)
    twice = int(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))
    if twice % 2 != 0:
        raise AssertionError("shoelace sum of a closed lattice loop must be even")
    return twice // 2


@dataclass
class CellMask:
    """Boolean cell grid anchored at (x0, y0)."""

    x0: int
    y0: int
    mask: np.ndarray

    def count(self) -> int:
        return int(self.mask.sum())

    def cells(self):
        jx, jy = np.nonzero(self.mask)
        return jx + self.x0, jy + self.y0

    def contains(self, ix: int, iy: int) -> bool:
        jx, jy = ix - self.x0, iy - self.y0
        if 0 <= jx < self.mask.shape[0] and 0 <= jy < self.mask.shape[1]:
            return bool(self.mask[jx, jy])
        return False


def _union_vertex_bbox(walks):
    boxes = [w.vertex_bbox() for w in walks]
    return (min(b[0] for b in boxes), min(b[1] for b in boxes),
            max(b[2] for b in boxes), max(b[3] for b in boxes))


def _cell_grid_geometry(walks):
    """(cx0, cy0, W, H): cell grid anchored one cell beyond the joint vertex
    bounding box, so the outside flood has a free ring around everything."""
    vx0, vy0, vx1, vy1 = _union_vertex_bbox(walks)
    cx0, cy0 = vx0 - 1, vy0 - 1
    return cx0, cy0, vx1 + 1 - cx0, vy1 + 1 - cy0


def _inside_cells(walks, cx0, cy0, W, H) -> np.ndarray:
    """Boolean (W, H) grid of cells not reachable from outside.

    On the doubled pixel grid the union of traces is exactly the set of
    visited vertex pixels plus the midpoints of traversed edges; blocking
    those and labeling 4-connected components separates inside from outside
    (vertex pixels must block too, or the flood would leak diagonally
    between two collinear wall edges meeting at a visited vertex).
    """
    stride = 2 * H + 1
    open_flat = np.ones((2 * W + 1) * stride, dtype=bool)
    for w in walks:
        vx, vy = w.coords()
        lin = (vx.astype(np.int64) - cx0) * (2 * stride) + 2 * (vy - cy0)
        open_flat[lin] = False
        mid = lin[:-1] + w.dx * np.int64(stride) + w.dy
        open_flat[mid] = False
    open_px = open_flat.reshape(2 * W + 1, stride)
    labels, _ = ndimage.label(open_px)
    outside = labels[0, 0]
    return labels[1::2, 1::2] != outside


def inside_mask(walks) -> CellMask:
    """Cells inside the external frontier of the union of traces.

    Outside is whatever a 4-adjacent flood from beyond the joint bounding box
    can reach without crossing a traversed lattice edge; inside is the
    complement.
    """
    walks = list(walks)
    if not walks:
        raise ValueError("need at least one walk")
    cx0, cy0, W, H = _cell_grid_geometry(walks)
    return CellMask(cx0, cy0, _inside_cells(walks, cx0, cy0, W, H))


@dataclass
class SectorTally:
    """Per-sample winding-sector areas (cell counts) for one set of m walks."""

    m: int
    s_total: int  # cells inside the external frontier
    s_zero_inside: int  # inside cells with zero total winding
    s_all_zero_inside: int  # inside cells where every path winds zero
    by_total_n: dict  # total winding -> inside cell count
    by_tuple_class: dict | None  # (sorted nonzero windings, zero count) -> cells


def tally(walks, collect_tuples: bool = True) -> SectorTally:
    """Full winding-sector accounting for m closed walks.

    Per-walk fields are rasterized one at a time on their own bounding boxes
    and only nonzero cells are kept, so memory stays O(union area + nonzero
    cells) regardless of m.
    """
    walks = list(walks)
    m = len(walks)
    if m < 1:
        raise ValueError("need at least one walk")
    cx0, cy0, nx, ny = _cell_grid_geometry(walks)
    ins = CellMask(cx0, cy0, _inside_cells(walks, cx0, cy0, nx, ny))

    # total winding field over the union box in one accumulation pass
    vex, vey, vsign = [], [], []
    for w in walks:
        ex, ey, sign = w.vertical_edges()
        vex.append(ex - cx0)
        vey.append(ey - cy0)
        vsign.append(sign)
    net = _scatter_signed(np.concatenate(vex), np.concatenate(vey),
                          np.concatenate(vsign), nx + 1, ny)
    total_field = net[::-1].cumsum(axis=0, dtype=np.int32)[::-1][1:]

    s_total = ins.count()
    inside = ins.mask
    totals_inside = total_field[inside]
    if totals_inside.size:
        shift = int(totals_inside.min())
        counts = np.bincount(totals_inside - shift)
        by_total_n = {int(nv + shift): int(c) for nv, c in enumerate(counts) if c > 0}
    else:
        by_total_n = {}
    s_zero_inside = by_total_n.get(0, 0)

    # per-walk nonzero windings; only the OR mask is needed unless tuple
    # classes are requested, which keeps the campaign path allocation-light
    lin_parts = []
    wind_parts = []
    any_nonzero = np.zeros((nx, ny), dtype=bool)
    for w in walks:
        fld = winding_field(w)
        if fld.grid.size == 0:
            continue
        jx = fld.x0 - ins.x0
        jy = fld.y0 - ins.y0
        nzw = fld.grid != 0
        any_nonzero[jx:jx + nzw.shape[0], jy:jy + nzw.shape[1]] |= nzw
        if collect_tuples:
            ix, iy, wv = fld.nonzero_cells()
            lin_parts.append((ix - ins.x0) * ny + (iy - ins.y0))
            wind_parts.append(wv)
    nz_inside = int((any_nonzero & inside).sum())
    s_all_zero_inside = s_total - nz_inside

    by_tuple_class = None
    if collect_tuples:
        by_tuple_class = _group_tuple_classes(lin_parts, wind_parts, inside.ravel(), m)
        if sum(by_tuple_class.values()) != s_total:
            raise AssertionError("tuple classes do not cover the inside area")

    if s_zero_inside > s_total or s_all_zero_inside > s_zero_inside:
        raise AssertionError("sector tally ordering violated")
    if sum(by_total_n.values()) != s_total:
        raise AssertionError("per-total-winding counts do not cover the inside area")
    return SectorTally(m, s_total, s_zero_inside, s_all_zero_inside,
                       by_total_n, by_tuple_class)


def _group_tuple_classes(lin_parts, wind_parts, inside_flat, m):
    """Group nonzero windings by cell and classify by sorted multiset."""
    classes: dict = {}
    all_zero = int(inside_flat.sum())
    if lin_parts:
        lin = np.concatenate(lin_parts)
        wind = np.concatenate(wind_parts)
        keep = inside_flat[lin]
        lin, wind = lin[keep], wind[keep]
        if lin.size:
            order = np.lexsort((wind, lin))
            lin, wind = lin[order], wind[order]
            starts = np.flatnonzero(np.diff(lin)) + 1
            bounds = np.concatenate([[0], starts, [lin.size]])
            for a, b in zip(bounds[:-1], bounds[1:]):
                key = (tuple(int(x) for x in wind[a:b]), int(m - (b - a)))
                classes[key] = classes.get(key, 0) + 1
            all_zero -= bounds.size - 1
    if all_zero:
        classes[((), m)] = all_zero
    return classes
