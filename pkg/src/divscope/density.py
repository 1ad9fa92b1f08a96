"""Hexagonal-bin density grids and parallel-coordinates tables from an embedding.

The lattice is pointy-top with axial coordinates (q, r). The center of
(q, r) is origin + R * (sqrt(3) * q + sqrt(3)/2 * r, 3/2 * r), where R is
the hexagon circumradius.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import BadAxis, JoinError, RankTooLarge

SQRT3 = np.sqrt(3.0)
DEFAULT_BINS_ACROSS = 50

# axial offsets of the 6 neighbors plus the cell itself, in lexicographic order
_CANDIDATES = np.array([(-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0)])
NEIGHBORS = np.array([(-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0)])


@dataclass(frozen=True)
class HexBinGrid:
    """Non-empty bins sorted by (q, r).

    ``point_bin[k]`` is the index of the bin holding point k. ``values``
    holds counts, or their log transform after :func:`log_counts`.
    """

    axes: tuple
    radius: float
    origin: tuple
    q: np.ndarray
    r: np.ndarray
    centers: np.ndarray
    counts: np.ndarray
    point_bin: np.ndarray
    values: np.ndarray

    def __len__(self):
        return self.q.shape[0]

    def index(self) -> dict:
        return {(int(a), int(b)): k for k, (a, b) in enumerate(zip(self.q, self.r))}


def hex_centers(q, r, radius: float, origin) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    cx = origin[0] + radius * (SQRT3 * q + SQRT3 / 2.0 * r)
    cy = origin[1] + radius * (1.5 * r)
    return np.stack([cx, cy], axis=-1)


def _cube_round(fq, fr):
    fs = -fq - fr
    q = np.rint(fq)
    r = np.rint(fr)
    s = np.rint(fs)
    dq = np.abs(q - fq)
    dr = np.abs(r - fr)
    ds = np.abs(s - fs)
    fix_q = (dq > dr) & (dq > ds)
    fix_r = ~fix_q & (dr > ds)
    q = np.where(fix_q, -r - s, q)
    r = np.where(fix_r, -q - s, r)
    return q.astype(np.int64), r.astype(np.int64)


def _sqdist(points, centers):
    dx = points[..., 0] - centers[..., 0]
    dy = points[..., 1] - centers[..., 1]
    return dx * dx + dy * dy


def assign_hex(points: np.ndarray, radius: float, origin) -> tuple[np.ndarray, np.ndarray]:
    """Axial (q, r) of the nearest hex center for each 2-D point.

    Cube rounding proposes a cell. The cell and its six neighbors are then
    compared by exact squared distance, with ties going to the smaller
    (q, r). This makes the result agree with a brute-force nearest-center
    search.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    x = pts[:, 0] - origin[0]
    y = pts[:, 1] - origin[1]
    fq = (SQRT3 / 3.0 * x - y / 3.0) / radius
    fr = (2.0 / 3.0 * y) / radius
    q0, r0 = _cube_round(fq, fr)
    cq = q0[:, None] + _CANDIDATES[None, :, 0]
    cr = r0[:, None] + _CANDIDATES[None, :, 1]
    d2 = _sqdist(pts[:, None, :], hex_centers(cq, cr, radius, origin))
    # argmin returns the first minimum, and candidates are in lexicographic order
    pick = np.argmin(d2, axis=1)
    rows = np.arange(pts.shape[0])
    return cq[rows, pick], cr[rows, pick]


def _coords(e):
    return np.asarray(e.coords if hasattr(e, "coords") else e, dtype=np.float64)


def default_radius(xy: np.ndarray) -> float:
    span = float(np.ptp(xy, axis=0).max()) if xy.size else 0.0
    return span / DEFAULT_BINS_ACROSS if span > 0 else 1.0


def hexbin(e, axes=(0, 1), radius: float | None = None) -> HexBinGrid:
    """Count embedded points per hexagon in the plane of two axes (0-based)."""
    coords = _coords(e)
    i, j = (int(a) for a in axes)
    rank = coords.shape[1]
    if i == j or not (0 <= i < rank) or not (0 <= j < rank):
        raise BadAxis(f"axes {axes} invalid for an embedding of rank {rank}")
    xy = coords[:, [i, j]]
    if radius is None:
        radius = default_radius(xy)
    if not radius > 0:
        raise ValueError("hexagon radius must be positive")
    origin = (float(xy[:, 0].min()), float(xy[:, 1].min())) if xy.size else (0.0, 0.0)
    q, r = assign_hex(xy, radius, origin)
    keys = np.stack([q, r], axis=1)
    uniq, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    uniq = uniq.reshape(-1, 2)
    return HexBinGrid(
        axes=(i, j), radius=float(radius), origin=origin,
        q=uniq[:, 0], r=uniq[:, 1],
        centers=hex_centers(uniq[:, 0], uniq[:, 1], radius, origin),
        counts=counts.astype(np.int64), point_bin=inverse.reshape(-1),
        values=counts.astype(np.float64),
    )


def log_counts(grid: HexBinGrid) -> HexBinGrid:
    return replace(grid, values=np.log10(1.0 + grid.counts.astype(np.float64)))


def local_maxima(grid: HexBinGrid) -> np.ndarray:
    """Bin indices whose count dominates all six neighbors, highest count first.

    Missing neighbors count as 0. On a plateau only the lexicographically
    smallest bin survives (a bin must strictly exceed any smaller neighbor).
    """
    lookup = grid.index()
    peaks = []
    for k in range(len(grid)):
        c = grid.counts[k]
        ok = True
        for dq, dr in NEIGHBORS:
            nk = lookup.get((int(grid.q[k] + dq), int(grid.r[k] + dr)))
            if nk is None:
                continue
            nc = grid.counts[nk]
            if nc > c or (nc == c and (dq, dr) < (0, 0)):
                ok = False
                break
        if ok:
            peaks.append(k)
    peaks = np.array(peaks, dtype=np.int64)
    order = np.lexsort((peaks, -grid.counts[peaks])) if peaks.size else peaks
    return peaks[order]


def neighborhood(grid: HexBinGrid, k: int) -> list[int]:
    """Bin k plus its non-empty neighbors."""
    lookup = grid.index()
    out = [k]
    for dq, dr in NEIGHBORS:
        nk = lookup.get((int(grid.q[k] + dq), int(grid.r[k] + dr)))
        if nk is not None:
            out.append(nk)
    return out


def write_hexbin(grid: HexBinGrid, path) -> None:
    """TSV ``q r center_x center_y count logcount``."""
    logs = np.log10(1.0 + grid.counts.astype(np.float64)).tolist()
    centers = grid.centers.tolist()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("q\tr\tcenter_x\tcenter_y\tcount\tlogcount\n")
        for k in range(len(grid)):
            cx, cy = centers[k]
            fh.write(f"{grid.q[k]}\t{grid.r[k]}\t{cx!r}\t{cy!r}\t{grid.counts[k]}\t{logs[k]!r}\n")


@dataclass(frozen=True)
class ParallelCoordsTable:
    ids: tuple
    values: np.ndarray
    labels: tuple

    @property
    def k(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return len(self.ids)


def parallel_coords(e, k: int, labels=None, species: str | None = None) -> ParallelCoordsTable:
    """First `k` coordinates per read with a label column.

    `labels` is either a mapping id -> label or a sequence aligned with the
    embedding rows (strings, or objects with a ``label`` attribute). With
    `species`, only rows carrying exactly that label are kept.
    """
    coords = _coords(e)
    n, rank = coords.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > rank:
        raise RankTooLarge(f"k = {k} exceeds the embedding rank {rank}")
    ids = tuple(getattr(e, "ids", None) or (str(i) for i in range(n)))
    if labels is None:
        labs = ("",) * n
    elif isinstance(labels, dict):
        labs = tuple(labels.get(i, "") for i in ids)
    else:
        labels = list(labels)
        if len(labels) != n:
            raise JoinError(f"{len(labels)} labels for {n} embedded points")
        labs = []
        for idx, lab in enumerate(labels):
            rid = getattr(lab, "read_id", None)
            if rid is not None and rid != ids[idx] and getattr(e, "ids", None) is not None:
                raise JoinError(f"row {idx}: embedding id {ids[idx]!r} vs label id {rid!r}")
            labs.append(getattr(lab, "label", lab))
        labs = tuple(labs)
    values = coords[:, :k].copy()
    if species is not None:
        mask = np.array([lab == species for lab in labs], dtype=bool)
        return ParallelCoordsTable(tuple(np.array(ids, dtype=object)[mask]), values[mask],
                                   tuple(np.array(labs, dtype=object)[mask]))
    return ParallelCoordsTable(ids, values, labs)


def write_parallel_coords(table: ParallelCoordsTable, path) -> None:
    """TSV ``id dim1 .. dimk label``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        head = ["id", *(f"dim{a + 1}" for a in range(table.k)), "label"]
        fh.write("\t".join(head) + "\n")
        for rid, row, lab in zip(table.ids, table.values, table.labels):
            fh.write("\t".join([rid, *(repr(float(x)) for x in row), lab]) + "\n")
