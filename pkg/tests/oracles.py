"""Reference implementations used only by the tests.

These are deliberately naive and share no code with the package kernels.
"""

import itertools

import numpy as np

ORDER = "ACGTN"


def _score(x, y, match, mismatch):
    return match if (x == y and x != "N") else mismatch


def full_matrix(a, b, match=1, mismatch=-1, gap=-2):
    H = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            H[i][j] = max(
                0,
                H[i - 1][j - 1] + _score(a[i - 1], b[j - 1], match, mismatch),
                H[i - 1][j] + gap,
                H[i][j - 1] + gap,
            )
    return H


def traceback_align(a, b, match=1, mismatch=-1, gap=-2):
    """Full-matrix Smith-Waterman with an explicit traceback.

    Returns dict(score, edits, unaligned, distance, span_a, span_b).
    """
    key = lambda s: (len(s), [ORDER.index(c) for c in s])
    swapped = key(b) < key(a)
    x, y = (b, a) if swapped else (a, b)
    H = full_matrix(x, y, match, mismatch, gap)
    best, bi, bj = -1, 0, 0
    for i in range(1, len(x) + 1):
        for j in range(1, len(y) + 1):
            if H[i][j] > best:
                best, bi, bj = H[i][j], i, j
    i, j, edits = bi, bj, 0
    while i > 0 and j > 0:
        h = H[i][j]
        s = _score(x[i - 1], y[j - 1], match, mismatch)
        if h == H[i - 1][j - 1] + s:
            edits += s != match
            i, j = i - 1, j - 1
        elif h == H[i - 1][j] + gap:
            edits += 1
            i -= 1
        elif h == H[i][j - 1] + gap:
            edits += 1
            j -= 1
        else:
            break
    span_x, span_y = (i, bi), (j, bj)
    span_a, span_b = (span_y, span_x) if swapped else (span_x, span_y)
    unaligned = min(len(a) - (span_a[1] - span_a[0]), len(b) - (span_b[1] - span_b[0]))
    return dict(score=best, edits=edits, unaligned=unaligned, distance=edits + unaligned,
                span_a=span_a, span_b=span_b)


def _all_global_scores(x, y, match, mismatch, gap):
    """Yield the score of every global alignment of x and y (exhaustive recursion)."""
    if not x and not y:
        yield 0
        return
    if x and y:
        s = _score(x[0], y[0], match, mismatch)
        for rest in _all_global_scores(x[1:], y[1:], match, mismatch, gap):
            yield s + rest
    if x:
        for rest in _all_global_scores(x[1:], y, match, mismatch, gap):
            yield gap + rest
    if y:
        for rest in _all_global_scores(x, y[1:], match, mismatch, gap):
            yield gap + rest


def brute_force_local_score(a, b, match=1, mismatch=-1, gap=-2):
    """Best local alignment score by enumerating every alignment of every substring pair."""
    best = 0
    subs_a = {a[i:k] for i in range(len(a)) for k in range(i + 1, len(a) + 1)}
    subs_b = {b[j:l] for j in range(len(b)) for l in range(j + 1, len(b) + 1)}
    for sa, sb in itertools.product(subs_a, subs_b):
        best = max(best, max(_all_global_scores(sa, sb, match, mismatch, gap)))
    return best


def euclidean_distances(X):
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            D[i, j] = np.sqrt(np.sum((X[i] - X[j]) ** 2))
    return D


def brute_force_hex(points, radius, origin, span=3):
    """Nearest hex center by scanning every lattice cell in a window around the cloud."""
    sq3 = np.sqrt(3.0)
    pts = np.asarray(points, dtype=np.float64)
    x0, x1 = pts[:, 0].min() - origin[0], pts[:, 0].max() - origin[0]
    y0, y1 = pts[:, 1].min() - origin[1], pts[:, 1].max() - origin[1]
    rmin = int(np.floor(y0 / (1.5 * radius))) - span
    rmax = int(np.ceil(y1 / (1.5 * radius))) + span
    qmin = int(np.floor(x0 / (sq3 * radius) - rmax / 2)) - span
    qmax = int(np.ceil(x1 / (sq3 * radius) - rmin / 2)) + span
    # lexicographic (q, r) order, so the first minimum is the smallest cell on ties
    cells = np.array([(q, r) for q in range(qmin, qmax + 1) for r in range(rmin, rmax + 1)])
    qf = cells[:, 0].astype(np.float64)
    rf = cells[:, 1].astype(np.float64)
    cx = origin[0] + radius * (sq3 * qf + sq3 / 2.0 * rf)
    cy = origin[1] + radius * (1.5 * rf)
    out = []
    for x, y in pts:
        dx = x - cx
        dy = y - cy
        k = int(np.argmin(dx * dx + dy * dy))
        out.append((int(cells[k, 0]), int(cells[k, 1])))
    return out


def random_dna(rng, length, alphabet="ACGT"):
    return "".join(rng.choice(list(alphabet), size=length))


def mutate(rng, seq, rate):
    """Substitute each base with probability `rate` by a different base."""
    out = []
    for c in seq:
        if rng.random() < rate:
            out.append(rng.choice([b for b in "ACGT" if b != c]))
        else:
            out.append(c)
    return "".join(out)


def substitute(rng, seq, k):
    """Substitute exactly k distinct positions of seq, each by a different base."""
    out = list(seq)
    for p in rng.choice(len(seq), size=k, replace=False):
        out[p] = rng.choice([b for b in "ACGT" if b != out[p]])
    return "".join(out)
