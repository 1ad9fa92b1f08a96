"""Parallel all-pairs alignment distances and the DVS1 matrix file format.

DVS1 layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"DVS1"
    4       4     format version, u32 (currently 1)
    8       8     rows m, u64
    16      8     cols n, u64
    24      8     flags, u64 (bit 0 = symmetric)
    32      8*m*n float64 values, row-major
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .align import DEFAULT_SCORING, ScoringScheme, _pair_distance, encode
from .exceptions import BadFormat, EmptyInput, NotSymmetric, Truncated
from .seqio import ReadSet
from .validation import check_reads

MAGIC = b"DVS1"
VERSION = 1
HEADER = struct.Struct("<4sIQQQ")
FLAG_SYMMETRIC = 1

# pairs per work unit; fixed so the decomposition never depends on thread count
CHUNK_PAIRS = 4096


@dataclass(eq=False)
class DistanceMatrix:
    values: np.ndarray
    symmetric: bool = False
    # alignments performed to build the matrix; not persisted
    n_alignments: int = field(default=0, compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError(f"distance matrix must be a non-empty 2-D array, got shape {v.shape}")
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError("distances must be finite and non-negative")
        if self.symmetric:
            if v.shape[0] != v.shape[1]:
                raise NotSymmetric(f"symmetric flag set on a {v.shape} matrix")
            if not np.array_equal(v, v.T) or np.diagonal(v).any():
                raise NotSymmetric("matrix flagged symmetric is not symmetric with zero diagonal")
        self.values = v

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return (self.symmetric == other.symmetric
                and self.values.shape == other.values.shape
                and self.values.tobytes() == other.values.tobytes())

    def to_bytes(self) -> bytes:
        flags = FLAG_SYMMETRIC if self.symmetric else 0
        head = HEADER.pack(MAGIC, VERSION, self.rows, self.cols, flags)
        return head + self.values.astype("<f8", copy=False).tobytes(order="C")


def _pack(rs: ReadSet):
    """Concatenate encoded reads into one buffer plus offsets."""
    codes = [encode(r.sequence) for r in rs]
    offsets = np.zeros(len(codes) + 1, dtype=np.int64)
    np.cumsum([c.shape[0] for c in codes], out=offsets[1:])
    buf = np.concatenate(codes) if codes else np.zeros(0, np.uint8)
    return buf, offsets


@numba.njit(nogil=True, cache=True)
def _fill_upper(buf, offs, start, stop, match, mismatch, gap, out):
    """Fill linear upper-triangle pairs [start, stop) and mirror them.

    Pairs are numbered row by row: (0,1), (0,2), ..., (1,2), ...
    """
    n = offs.shape[0] - 1
    # locate the (i, j) of pair `start`
    i = 0
    first = 0
    while first + (n - 1 - i) <= start:
        first += n - 1 - i
        i += 1
    j = i + 1 + (start - first)
    done = 0
    for _ in range(start, stop):
        d = _pair_distance(buf[offs[i]:offs[i + 1]], buf[offs[j]:offs[j + 1]],
                           match, mismatch, gap)
        out[i, j] = d
        out[j, i] = d
        done += 1
        j += 1
        if j == n:
            i += 1
            j = i + 1
    return done


@numba.njit(nogil=True, cache=True)
def _fill_cross(qbuf, qoffs, rbuf, roffs, start, stop, match, mismatch, gap, out):
    """Fill linear cross pairs [start, stop), numbered row-major."""
    ncols = roffs.shape[0] - 1
    done = 0
    for k in range(start, stop):
        i = k // ncols
        j = k - i * ncols
        out[i, j] = _pair_distance(qbuf[qoffs[i]:qoffs[i + 1]], rbuf[roffs[j]:roffs[j + 1]],
                                   match, mismatch, gap)
        done += 1
    return done


def _run_chunks(fn, total, threads):
    bounds = [(s, min(s + CHUNK_PAIRS, total)) for s in range(0, total, CHUNK_PAIRS)]
    if threads <= 1 or len(bounds) <= 1:
        return sum(fn(s, e) for s, e in bounds)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(lambda b: fn(*b), bounds))


def _check_threads(threads):
    threads = int(threads)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def pairwise_self(rs: ReadSet, scoring: ScoringScheme = DEFAULT_SCORING,
                  threads: int = 1) -> DistanceMatrix:
    """Symmetric n x n alignment distances; only the upper triangle is aligned.

    Every worker writes its own cells, so the matrix is identical for any
    thread count.
    """
    threads = _check_threads(threads)
    n = len(rs)
    if n < 2:
        raise EmptyInput(f"need at least 2 reads for a self distance matrix, got {n}")
    buf, offs = _pack(rs)
    out = np.zeros((n, n), dtype=np.float64)
    total = n * (n - 1) // 2
    done = _run_chunks(
        lambda s, e: _fill_upper(buf, offs, s, e, scoring.match, scoring.mismatch,
                                 scoring.gap, out),
        total, threads)
    return DistanceMatrix(out, symmetric=True, n_alignments=int(done))


def pairwise_cross(queries: ReadSet, refs: ReadSet, scoring: ScoringScheme = DEFAULT_SCORING,
                   threads: int = 1) -> DistanceMatrix:
    """m x n distances, row i = query i, column j = reference j."""
    threads = _check_threads(threads)
    if len(queries) == 0 or len(refs) == 0:
        raise EmptyInput("both read sets must be non-empty")
    qbuf, qoffs = _pack(queries)
    rbuf, roffs = _pack(refs)
    m, n = len(queries), len(refs)
    out = np.zeros((m, n), dtype=np.float64)
    done = _run_chunks(
        lambda s, e: _fill_cross(qbuf, qoffs, rbuf, roffs, s, e, scoring.match,
                                 scoring.mismatch, scoring.gap, out),
        m * n, threads)
    return DistanceMatrix(out, symmetric=False, n_alignments=int(done))


def from_bytes(data: bytes) -> DistanceMatrix:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadFormat("not a DVS1 matrix file (bad magic)")
    if len(data) < HEADER.size:
        raise Truncated(f"header needs {HEADER.size} bytes, file has {len(data)}")
    _, version, m, n, flags = HEADER.unpack_from(data)
    if version != VERSION:
        raise BadFormat(f"unsupported DVS1 version {version}")
    expected = HEADER.size + 8 * m * n
    if len(data) < expected:
        raise Truncated(f"payload needs {expected} bytes, file has {len(data)}")
    if len(data) > expected:
        raise BadFormat(f"{len(data) - expected} trailing bytes after payload")
    values = np.frombuffer(data, dtype="<f8", count=m * n, offset=HEADER.size)
    values = values.reshape(m, n).astype(np.float64)
    return DistanceMatrix(values, symmetric=bool(flags & FLAG_SYMMETRIC))


def write_matrix(d: DistanceMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(d.to_bytes())


def read_matrix(path) -> DistanceMatrix:
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def write_tsv(d: DistanceMatrix, path, row_ids, col_ids=None) -> None:
    """Tab-separated export with a header row of column ids."""
    col_ids = row_ids if col_ids is None else col_ids
    if len(row_ids) != d.rows or len(col_ids) != d.cols:
        raise ValueError("id lists do not match the matrix shape")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(["id", *col_ids]) + "\n")
        for rid, row in zip(row_ids, d.values):
            fh.write("\t".join([rid, *(format(x, ".17g") for x in row)]) + "\n")


def ids_path(matrix_path) -> str:
    """Sidecar file listing the row ids of a matrix, one per line."""
    return os.fspath(matrix_path) + ".ids"


def write_ids(path, ids) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{i}\n" for i in ids)


def read_ids(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


class AlignmentDistance(TransformerMixin, BaseEstimator):
    """Transformer from reads to alignment distances.

    ``fit`` stores reference reads. ``transform`` returns the query x
    reference matrix, and ``fit_transform`` returns the symmetric matrix of
    the fitted reads, ready for a precomputed-dissimilarity estimator.
    """

    def __init__(self, match=1, mismatch=-1, gap=-2, n_jobs=1):
        self.match = match
        self.mismatch = mismatch
        self.gap = gap
        self.n_jobs = n_jobs

    def _scoring(self):
        return ScoringScheme(self.match, self.mismatch, self.gap)

    def fit(self, X, y=None):
        self._scoring()
        self.references_ = check_reads(X)
        self.n_references_ = len(self.references_)
        return self

    def transform(self, X):
        check_is_fitted(self)
        return pairwise_cross(check_reads(X), self.references_, self._scoring(),
                              threads=self.n_jobs or 1).values

    def fit_transform(self, X, y=None):
        self.fit(X)
        return pairwise_self(self.references_, self._scoring(), threads=self.n_jobs or 1).values
