"""Smith-Waterman local alignment and the alignment dissimilarity between reads.

The kernel keeps two rolling rows of the score matrix. Instead of storing
the full matrix for a traceback, each cell also carries the edit count and
the start cell of the path its traceback would follow, so the result is the
one an explicit traceback from the best cell would produce.

Traceback rules, fixed for reproducibility:

* the best cell is the first maximum in row-major order (smallest ``(i, j)``);
* a step prefers diagonal, then vertical (gap in ``b``), then horizontal
  (gap in ``a``), taking the first move that reproduces the cell value;
* the path stops at the matrix border, or at a cell whose value only the
  zero floor explains.

Alignment runs on a canonical ordering of the pair (shorter read first,
then lexicographic), which makes the dissimilarity exactly symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .exceptions import BadScoring, EmptySequence
from .seqio import Read, normalize_sequence

N_CODE = 4
# above this many DP cells the kernel keeps one row instead of the whole matrix
FULL_MATRIX_CELLS = 1 << 22

_LUT = np.full(256, 255, dtype=np.uint8)
for _code, _chars in enumerate(("Aa", "Cc", "Gg", "TtUu", "Nn")):
    for _c in _chars:
        _LUT[ord(_c)] = _code


def encode(seq) -> np.ndarray:
    """Map a nucleotide string to uint8 codes A=0, C=1, G=2, T=3, N=4."""
    if isinstance(seq, Read):
        seq = seq.sequence
    raw = np.frombuffer(seq.encode("ascii"), dtype=np.uint8)
    codes = _LUT[raw]
    if (codes == 255).any():
        normalize_sequence(seq)  # raises InvalidCharacter with a position
    return codes


@dataclass(frozen=True)
class ScoringScheme:
    match: int = 1
    mismatch: int = -1
    gap: int = -2

    def __post_init__(self):
        for name in ("match", "mismatch", "gap"):
            if int(getattr(self, name)) != getattr(self, name):
                raise BadScoring(f"{name} must be an integer")
        if not (self.match > 0 and self.mismatch < 0 and self.gap < 0):
            raise BadScoring("scoring needs match > 0, mismatch < 0 and gap < 0")


DEFAULT_SCORING = ScoringScheme()


@dataclass(frozen=True)
class AlignmentResult:
    """Outcome of one local alignment.

    ``edits`` counts mismatches plus gapped positions along the traceback.
    ``unaligned`` is the number of positions left outside the local
    alignment in the read that is covered best (for reads of different
    lengths, usually the shorter one). ``distance`` is their sum.
    """

    score: int
    distance: int
    edits: int
    unaligned: int
    span_a: tuple
    span_b: tuple


@numba.njit(nogil=True, cache=True)
def _canonical_swap(a, b):
    """True if (b, a) is the canonical order of the pair."""
    if b.shape[0] != a.shape[0]:
        return b.shape[0] < a.shape[0]
    for k in range(a.shape[0]):
        if a[k] != b[k]:
            return b[k] < a[k]
    return False


@numba.njit(nogil=True, cache=True)
def _sw_full(a, b, match, mismatch, gap):
    """Fill the whole score matrix, then trace back from the best cell.

    Returns (score, edits, a_start, a_end, b_start, b_end).
    """
    n = a.shape[0]
    m = b.shape[0]
    H = np.zeros((n + 1, m + 1), np.int32)
    best = -1
    bi = 0
    bj = 0
    for i in range(1, n + 1):
        ai = a[i - 1]
        hp = H[i - 1]
        hc = H[i]
        d = 0
        left = 0
        for j in range(1, m + 1):
            u = hp[j]
            s = match if (ai == b[j - 1]) & (ai != N_CODE) else mismatch
            x = max(d + s, u + gap, left + gap, 0)
            hc[j] = x
            if x > best:
                best = x
                bi = i
                bj = j
            d = u
            left = x
    i = bi
    j = bj
    edits = 0
    while i > 0 and j > 0:
        h = H[i, j]
        same = (a[i - 1] == b[j - 1]) & (a[i - 1] != N_CODE)
        if h == H[i - 1, j - 1] + (match if same else mismatch):
            if not same:
                edits += 1
            i -= 1
            j -= 1
        elif h == H[i - 1, j] + gap:
            edits += 1
            i -= 1
        elif h == H[i, j - 1] + gap:
            edits += 1
            j -= 1
        else:
            break
    return best, edits, i, bi, j, bj


@numba.njit(nogil=True, cache=True)
def _sw_rolling(a, b, match, mismatch, gap):
    """Same result as _sw_full in O(len(b)) memory, for long sequences.

    A single DP row is updated in place. Besides H, each cell carries the
    edit count and start cell of the path that the traceback would follow
    from it, so no full matrix is stored.
    """
    m = b.shape[0]
    h_row = np.zeros(m + 1, np.int32)
    e_row = np.zeros(m + 1, np.int32)
    si_row = np.zeros(m + 1, np.int32)
    sj_row = np.arange(m + 1).astype(np.int32)

    best = -1
    best_e = 0
    best_i = 0
    best_j = 0
    best_si = 0
    best_sj = 0
    for i in range(1, a.shape[0] + 1):
        ai = a[i - 1]
        # (i-1, 0) is the diagonal predecessor of (i, 1); (i, 0) its left one
        d_h = 0
        d_e = 0
        d_si = i - 1
        d_sj = 0
        l_h = 0
        l_e = 0
        l_si = i
        l_sj = 0
        for j in range(1, m + 1):
            u_h = h_row[j]
            u_e = e_row[j]
            u_si = si_row[j]
            u_sj = sj_row[j]
            same = ai == b[j - 1] and ai != N_CODE
            diag = d_h + (match if same else mismatch)
            up = u_h + gap
            left = l_h + gap
            h = diag
            if up > h:
                h = up
            if left > h:
                h = left
            if h < 0:
                h = 0
            if h == diag:
                e = d_e if same else d_e + 1
                si = d_si
                sj = d_sj
            elif h == up:
                e = u_e + 1
                si = u_si
                sj = u_sj
            elif h == left:
                e = l_e + 1
                si = l_si
                sj = l_sj
            else:
                e = 0
                si = i
                sj = j
            h_row[j] = h
            e_row[j] = e
            si_row[j] = si
            sj_row[j] = sj
            if h > best:
                best = h
                best_e = e
                best_i = i
                best_j = j
                best_si = si
                best_sj = sj
            d_h = u_h
            d_e = u_e
            d_si = u_si
            d_sj = u_sj
            l_h = h
            l_e = e
            l_si = si
            l_sj = sj
    return best, best_e, best_si, best_i, best_sj, best_j


@numba.njit(nogil=True, cache=True)
def _sw_kernel(a, b, match, mismatch, gap):
    """Score plus traceback summary of the best local alignment of a vs b.

    Returns (score, edits, a_start, a_end, b_start, b_end). The traceback
    starts at the first maximal cell in row-major order and prefers the
    diagonal, then up, then left move.
    """
    if (a.shape[0] + 1) * (b.shape[0] + 1) <= FULL_MATRIX_CELLS:
        return _sw_full(a, b, match, mismatch, gap)
    return _sw_rolling(a, b, match, mismatch, gap)


@numba.njit(nogil=True, cache=True)
def _pair(a, b, match, mismatch, gap):
    """Canonical-order alignment; returns (score, edits, unaligned, spans, swapped)."""
    swapped = _canonical_swap(a, b)
    if swapped:
        score, edits, s0, s1, t0, t1 = _sw_kernel(b, a, match, mismatch, gap)
        a0, a1, b0, b1 = t0, t1, s0, s1
    else:
        score, edits, a0, a1, b0, b1 = _sw_kernel(a, b, match, mismatch, gap)
    un_a = a.shape[0] - (a1 - a0)
    un_b = b.shape[0] - (b1 - b0)
    unaligned = un_a if un_a < un_b else un_b
    return score, edits, unaligned, a0, a1, b0, b1


@numba.njit(nogil=True, cache=True)
def _pair_distance(a, b, match, mismatch, gap):
    score, edits, unaligned, a0, a1, b0, b1 = _pair(a, b, match, mismatch, gap)
    return edits + unaligned


def _as_codes(x):
    if isinstance(x, np.ndarray):
        return x
    codes = encode(x)
    if codes.shape[0] == 0:
        raise EmptySequence("cannot align an empty sequence")
    return codes


def sw_align(a, b, scoring: ScoringScheme = DEFAULT_SCORING) -> AlignmentResult:
    """Local alignment of two reads (``Read`` objects or nucleotide strings)."""
    ca = _as_codes(a)
    cb = _as_codes(b)
    if ca.shape[0] == 0 or cb.shape[0] == 0:
        raise EmptySequence("cannot align an empty sequence")
    score, edits, unaligned, a0, a1, b0, b1 = _pair(
        ca, cb, scoring.match, scoring.mismatch, scoring.gap)
    return AlignmentResult(
        score=int(score),
        distance=int(edits + unaligned),
        edits=int(edits),
        unaligned=int(unaligned),
        span_a=(int(a0), int(a1)),
        span_b=(int(b0), int(b1)),
    )


def distance(a, b, scoring: ScoringScheme = DEFAULT_SCORING) -> int:
    return sw_align(a, b, scoring).distance
