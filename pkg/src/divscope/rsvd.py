"""Randomized low-rank eigendecomposition of real symmetric matrices.

A Gaussian sketch captures the dominant range of G (a Halko-Martinsson-Tropp
range finder with power iterations). G is then projected onto that basis,
and the small projected problem is solved densely. For symmetric G the
singular values are |lambda|, so eigenpairs are ranked by magnitude and keep
their sign.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .exceptions import NotSymmetric, RankTooLarge, ZeroMatrix

# rows per block in G @ X; fixed so results do not depend on thread count
ROW_BLOCK = 512
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SolverOptions:
    rank: int
    oversampling: int = 10
    power_iters: int = 2
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be a positive integer")
        if self.oversampling < 0 or self.power_iters < 0:
            raise ValueError("oversampling and power_iters must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def sketch_size(self) -> int:
        return self.rank + self.oversampling

    def check(self, n: int):
        if self.sketch_size > n:
            raise RankTooLarge(
                f"rank + oversampling = {self.sketch_size} exceeds matrix size {n}")


@dataclass(frozen=True)
class Spectrum:
    """Leading eigenpairs, ordered by |eigenvalue| descending.

    ``vectors[:, k]`` pairs with ``eigenvalues[k]``. ``resid`` is the
    Frobenius norm of G - U diag(lambda) U^T. Because the pairs are Ritz
    pairs, it equals sqrt(||G||_F^2 - sum lambda^2).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    resid: float

    @property
    def rank(self) -> int:
        return self.eigenvalues.shape[0]


def _as_square(g) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {g.shape}")
    return g


def check_symmetric(g, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return `g` as float64 if max |g - g^T| <= tol * max(1, max |g|)."""
    g = _as_square(g)
    scale = max(1.0, float(np.abs(g).max(initial=0.0)))
    if not np.all(np.abs(g - g.T) <= tol * scale):
        raise NotSymmetric("matrix is not symmetric")
    return g


def block_matmul(g: np.ndarray, x: np.ndarray, threads: int = 1) -> np.ndarray:
    """G @ X computed by fixed row blocks.

    Each output row comes from exactly one BLAS call, and block boundaries
    depend only on the matrix size, so the product is bit-identical for any
    `threads`.
    """
    n = g.shape[0]
    out = np.empty((n, x.shape[1]), dtype=np.float64)
    blocks = [(s, min(s + ROW_BLOCK, n)) for s in range(0, n, ROW_BLOCK)]

    def work(b):
        s, e = b
        np.matmul(g[s:e], x, out=out[s:e])

    if threads <= 1 or len(blocks) == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))
    return out


def _orth(y: np.ndarray) -> np.ndarray:
    return la.qr(y, mode="economic", check_finite=False)[0]


def gaussian_sketch(n: int, size: int, seed: int) -> np.ndarray:
    """n x size standard normal test matrix from a PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed & ((1 << 64) - 1)))
    return rng.standard_normal((n, size))


def randomized_range(g, opts: SolverOptions) -> np.ndarray:
    """Orthonormal basis Q (n x (rank + oversampling)) for the dominant range of G."""
    g = _as_square(g)
    n = g.shape[0]
    opts.check(n)
    omega = gaussian_sketch(n, opts.sketch_size, opts.seed)
    q = _orth(block_matmul(g, omega, opts.threads))
    # G is symmetric, so G^T G Y = G (G Y); re-orthonormalize after every product
    for _ in range(opts.power_iters):
        q = _orth(block_matmul(g, q, opts.threads))
        q = _orth(block_matmul(g, q, opts.threads))
    return q


def normalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def order_by_magnitude(w: np.ndarray) -> np.ndarray:
    """Indices sorting eigenvalues by |w| descending, positive first on ties."""
    return np.lexsort((-w, -np.abs(w)))


def eigs_sym(g, opts: SolverOptions) -> Spectrum:
    g = check_symmetric(g)
    n = g.shape[0]
    opts.check(n)
    q = randomized_range(g, opts)
    gq = block_matmul(g, q, opts.threads)
    b = q.T @ gq
    b = 0.5 * (b + b.T)
    w, v = la.eigh(b, check_finite=False)
    keep = order_by_magnitude(w)[:opts.rank]
    w = w[keep]
    u = normalize_signs(q @ v[:, keep])
    fro2 = float(np.einsum("ij,ij->", g, g))
    resid = float(np.sqrt(max(fro2 - float(w @ w), 0.0)))
    return Spectrum(eigenvalues=w, vectors=u, resid=resid)


def spectral_norm(g, tol: float = 1e-13, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value of symmetric G by power iteration.

    Iterates v <- G v / ||G v|| and reports ||G v||. That is power iteration
    on G^2, which also converges when +lambda and -lambda share the top
    magnitude.
    """
    g = _as_square(g)
    v = gaussian_sketch(g.shape[0], 1, seed)[:, 0]
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = g @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - sigma) <= tol * new:
            return new
        sigma = new
    return sigma


def stable_rank(g) -> float:
    """||G||_F^2 / ||G||_2^2 for a matrix, or the same ratio over a Spectrum's eigenvalues."""
    if isinstance(g, Spectrum):
        s2 = np.asarray(g.eigenvalues, dtype=np.float64) ** 2
        if s2.size == 0 or s2.max() == 0.0:
            raise ZeroMatrix("spectrum has no non-zero eigenvalue")
        return float(s2.sum() / s2.max())
    g = _as_square(g)
    fro2 = float(np.einsum("ij,ij->", g, g))
    if fro2 == 0.0:
        raise ZeroMatrix("stable rank is undefined for the zero matrix")
    sigma = spectral_norm(g)
    return fro2 / (sigma * sigma)
