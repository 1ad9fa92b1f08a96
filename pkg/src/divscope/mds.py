"""Classical (Torgerson) multidimensional scaling on top of the randomized eigensolver."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import DimensionMismatch, RankTooLarge
from .rsvd import SolverOptions, Spectrum, eigs_sym
from .validation import check_distance_matrix, check_seed

# eigenvalues at or below this fraction of max |lambda| count as non-positive
POSITIVITY_CUTOFF = 1e-9
CENTER_BLOCK = 1024


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class Embedding:
    """Point coordinates ``coords`` (n x r), one row per item.

    ``eigenvalues`` are the retained positive eigenvalues in descending order.
    ``dropped_negative_mass`` sums |lambda| over negative eigenvalues among
    those computed. ``truncated`` is set when fewer than the requested number
    of positive eigenvalues were found.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    dropped_negative_mass: float = 0.0
    truncated: bool = False
    requested_rank: int = 0
    ids: tuple | None = field(default=None)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def r(self) -> int:
        return self.coords.shape[1]

    def with_ids(self, ids) -> "Embedding":
        ids = tuple(ids)
        if len(ids) != self.n:
            raise DimensionMismatch(f"{len(ids)} ids for {self.n} embedded points")
        return Embedding(self.coords, self.eigenvalues, self.dropped_negative_mass,
                         self.truncated, self.requested_rank, ids)


def gram_from_distances(d) -> GramMatrix:
    """Double-center squared distances into the Gram matrix of inner products.

    gamma_ij = -1/2 (d_ij^2 - mean_i d_ij^2 - mean_j d_ij^2 + mean_ij d_ij^2)

    Squares are formed per row block, so no n x n squared-distance matrix is
    kept alongside D and G.
    """
    d = check_distance_matrix(d, symmetric=True)
    n = d.shape[0]
    row_mean = np.empty(n)
    for s in range(0, n, CENTER_BLOCK):
        row_mean[s:s + CENTER_BLOCK] = np.square(d[s:s + CENTER_BLOCK]).mean(axis=1)
    # D is symmetric, so column means equal row means
    col_mean = row_mean
    grand = row_mean.mean()
    g = np.empty((n, n))
    for s in range(0, n, CENTER_BLOCK):
        blk = np.square(d[s:s + CENTER_BLOCK])
        blk -= row_mean[s:s + CENTER_BLOCK, None]
        blk -= col_mean[None, :]
        blk += grand
        blk *= -0.5
        g[s:s + CENTER_BLOCK] = blk
    # restore exact symmetry lost to the order of floating-point operations
    g = 0.5 * (g + g.T)
    return GramMatrix(g)


def _gram_values(g) -> np.ndarray:
    return g.values if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.float64)


def solver_options(n: int, r: int, oversampling: int = 10, power_iters: int = 2,
                   seed: int = 0, threads: int = 1) -> SolverOptions:
    """Solver settings for rank `r` on n items, clipping oversampling to fit n."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r > n:
        raise RankTooLarge(f"requested rank {r} exceeds the {n} items")
    return SolverOptions(rank=r, oversampling=min(oversampling, n - r),
                         power_iters=power_iters, seed=seed, threads=threads)


def embed(g, r: int, oversampling: int = 10, power_iters: int = 2, seed: int = 0,
          threads: int = 1) -> Embedding:
    """Coordinates X_r = U_r diag(sqrt(lambda_r)) from the leading eigenpairs of G.

    Only strictly positive eigenvalues (above POSITIVITY_CUTOFF * max|lambda|)
    yield coordinates. On small problems the oversampling is clipped to fit
    the matrix.
    """
    gv = _gram_values(g)
    opts = solver_options(gv.shape[0], r, oversampling, power_iters, seed, threads)
    return embedding_from_spectrum(eigs_sym(gv, opts), r)


def embedding_from_spectrum(spec: Spectrum, r: int | None = None) -> Embedding:
    """Keep the positive eigenpairs of `spec` and scale vectors by sqrt(lambda)."""
    lam = spec.eigenvalues
    r = spec.rank if r is None else r
    top = float(np.abs(lam).max(initial=0.0))
    eps = POSITIVITY_CUTOFF * top
    dropped = float(np.abs(lam[lam < 0]).sum())
    keep = np.flatnonzero(lam > eps)
    keep = keep[np.argsort(-lam[keep], kind="stable")]
    vals = lam[keep]
    coords = spec.vectors[:, keep] * np.sqrt(vals)
    return Embedding(coords=coords, eigenvalues=vals, dropped_negative_mass=dropped,
                     truncated=bool(vals.shape[0] < r), requested_rank=r)


def reconstruction_error(g, e: Embedding) -> float:
    """Frobenius norm of G - X_r X_r^T."""
    gv = _gram_values(g)
    if gv.shape[0] != e.n:
        raise DimensionMismatch(f"Gram matrix has {gv.shape[0]} rows, embedding has {e.n}")
    return float(np.linalg.norm(gv - e.coords @ e.coords.T))


class RandomizedMDS(BaseEstimator):
    """Classical MDS of a precomputed dissimilarity matrix.

    Parameters
    ----------
    n_components : int, default=50
        Number of eigenpairs requested. Fewer columns are returned when G has
        fewer positive eigenvalues.
    oversampling : int, default=10
        Extra sketch columns beyond ``n_components``.
    power_iters : int, default=2
        Power iterations of the range finder.
    random_state : int or None, default=None
        Seed of the Gaussian sketch. None behaves as 0.
    n_jobs : int, default=1
        Threads used for the products with G.

    Attributes
    ----------
    embedding_ : ndarray of shape (n_samples, n_retained)
    eigenvalues_ : ndarray of shape (n_retained,)
    dropped_negative_mass_ : float
    truncated_ : bool
    """

    def __init__(self, n_components=50, *, oversampling=10, power_iters=2,
                 random_state=None, n_jobs=1):
        self.n_components = n_components
        self.oversampling = oversampling
        self.power_iters = power_iters
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = gram_from_distances(X)
        e = embed(g, self.n_components, oversampling=self.oversampling,
                  power_iters=self.power_iters, seed=check_seed(self.random_state),
                  threads=self.n_jobs or 1)
        self.embedding_ = e.coords
        self.eigenvalues_ = e.eigenvalues
        self.dropped_negative_mass_ = e.dropped_negative_mass
        self.truncated_ = e.truncated
        self.n_features_in_ = g.n
        self.result_ = e
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_


def meta_path(embedding_path) -> str:
    return str(embedding_path) + ".meta"


def write_embedding(e: Embedding, path, extra: dict | None = None, meta_dest=None) -> None:
    """TSV ``id dim1 .. dimr`` plus a ``key=value`` sidecar (default ``<path>.meta``)."""
    ids = e.ids if e.ids is not None else tuple(str(i) for i in range(e.n))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(["id", *(f"dim{a + 1}" for a in range(e.r))]) + "\n")
        for rid, row in zip(ids, e.coords):
            fh.write("\t".join([rid, *(repr(float(x)) for x in row)]) + "\n")
    meta = {
        "n": e.n,
        "rank": e.r,
        "requested_rank": e.requested_rank,
        "truncated": str(e.truncated).lower(),
        "eigenvalues": ",".join(repr(float(x)) for x in e.eigenvalues),
        "dropped_negative_mass": repr(float(e.dropped_negative_mass)),
    }
    meta.update(extra or {})
    with open(meta_dest or meta_path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{k}={v}\n" for k, v in meta.items())


def read_meta(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if "=" in line:
                k, v = line.rstrip("\n").split("=", 1)
                out[k] = v
    return out


def read_embedding(path) -> Embedding:
    """Load an embedding TSV; eigenvalue metadata is read from the sidecar if present."""
    ids = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "id":
            raise ValueError(f"{path}: not an embedding TSV (header must start with 'id')")
        r = len(header) - 1
        for lineno, line in enumerate(fh, 2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != r + 1:
                raise ValueError(f"{path}:{lineno}: expected {r + 1} fields, got {len(parts)}")
            ids.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    coords = np.array(rows, dtype=np.float64).reshape(len(rows), r)
    eigenvalues = np.square(np.linalg.norm(coords, axis=0))
    dropped, truncated, requested = 0.0, False, r
    try:
        meta = read_meta(meta_path(path))
    except FileNotFoundError:
        meta = {}
    if meta.get("eigenvalues"):
        eigenvalues = np.array([float(x) for x in meta["eigenvalues"].split(",")])
    dropped = float(meta.get("dropped_negative_mass", dropped))
    truncated = meta.get("truncated", "false") == "true"
    requested = int(meta.get("requested_rank", requested))
    return Embedding(coords, eigenvalues, dropped, truncated, requested, tuple(ids))
