"""Supervised species assignment of reads by homology gap against a reference database.

A reference is a hit for a query when their alignment distance is at most
floor((1 - gap) * min(query length, reference length)). A query whose hits
all carry one species is assigned to it. Hits spanning several species
make the query ambiguous, and no hits make it unknown.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .align import ScoringScheme
from .distmat import DistanceMatrix, pairwise_cross
from .exceptions import BadGap, JoinError, MissingLabel, ShapeMismatch
from .seqio import ReadSet
from .validation import check_reads


class Status(str, enum.Enum):
    ASSIGNED = "assigned"
    AMBIGUOUS = "ambiguous"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class AssignmentResult:
    read_id: str
    status: Status
    species: str | None
    support: int
    matched_species: frozenset

    @property
    def label(self) -> str:
        """Species name when assigned, otherwise the reserved status label."""
        return self.species if self.status is Status.ASSIGNED else self.status.value


@dataclass(frozen=True)
class ReferenceDB:
    reads: ReadSet
    species: dict

    def __post_init__(self):
        clean = {}
        for rid, name in self.species.items():
            name = str(name).strip()
            if name:
                clean[rid] = name
        for r in self.reads:
            if r.id not in clean:
                raise MissingLabel(r.id)
        object.__setattr__(self, "species", clean)

    def labels(self) -> list[str]:
        return [self.species[r.id] for r in self.reads]


def _gap_fraction(gap) -> Fraction:
    # parse through the decimal text so 0.97 means exactly 97/100
    try:
        frac = Fraction(repr(float(gap)))
    except (TypeError, ValueError) as exc:
        raise BadGap(f"gap must be a number in (0, 1], got {gap!r}") from exc
    if not (0 < frac <= 1):
        raise BadGap(f"gap must lie in (0, 1], got {gap!r}")
    return frac


def gap_threshold(gap, query_len: int, ref_len: int) -> int:
    """Largest distance still inside the homology gap.

    Computed in exact rational arithmetic, so e.g. gap=0.9 on length 10
    gives 1 rather than a float-rounded 0.
    """
    frac = _gap_fraction(gap)
    if query_len < 1 or ref_len < 1:
        raise ValueError("sequence lengths must be positive")
    slack = 1 - frac
    return (slack.numerator * min(query_len, ref_len)) // slack.denominator


def threshold_matrix(gap, query_lens, ref_lens) -> np.ndarray:
    slack = 1 - _gap_fraction(gap)
    q = np.asarray(query_lens, dtype=np.int64)
    r = np.asarray(ref_lens, dtype=np.int64)
    if (q < 1).any() or (r < 1).any():
        raise ValueError("sequence lengths must be positive")
    return (slack.numerator * np.minimum(q[:, None], r[None, :])) // slack.denominator


def classify_distances(cross, query_ids, query_lens, ref_lens, ref_labels, gap) -> list[AssignmentResult]:
    """Apply the homology-gap rule to a precomputed query x reference matrix."""
    values = cross.values if isinstance(cross, DistanceMatrix) else np.asarray(cross, dtype=np.float64)
    m, n = len(query_ids), len(ref_labels)
    if values.shape != (m, n) or len(query_lens) != m or len(ref_lens) != n:
        raise ShapeMismatch(f"cross matrix {values.shape} does not match {m} queries x {n} references")
    theta = threshold_matrix(gap, query_lens, ref_lens)
    hits = values <= theta
    labels = np.asarray(ref_labels, dtype=object)
    out = []
    for i, rid in enumerate(query_ids):
        matched = frozenset(labels[hits[i]])
        support = int(hits[i].sum())
        if support == 0:
            res = AssignmentResult(rid, Status.UNKNOWN, None, 0, matched)
        elif len(matched) == 1:
            res = AssignmentResult(rid, Status.ASSIGNED, next(iter(matched)), support, matched)
        else:
            res = AssignmentResult(rid, Status.AMBIGUOUS, None, support, matched)
        out.append(res)
    return out


def classify(queries: ReadSet, db: ReferenceDB, cross, gap=0.97) -> list[AssignmentResult]:
    return classify_distances(cross, queries.ids, queries.lengths, db.reads.lengths,
                              db.labels(), gap)


def summarize(results) -> dict:
    counts = {s.value: 0 for s in Status}
    for r in results:
        counts[r.status.value] += 1
    return counts


@dataclass(frozen=True)
class LabeledCoords:
    ids: tuple
    coords: np.ndarray
    status: tuple
    labels: tuple

    def __len__(self):
        return len(self.ids)


def color_table(assignments, embedding) -> LabeledCoords:
    """Join embedding rows with assignment labels, checking that ids line up."""
    assignments = list(assignments)
    if len(assignments) != embedding.n:
        raise JoinError(f"{len(assignments)} assignments for {embedding.n} embedded points")
    ids = tuple(a.read_id for a in assignments)
    if embedding.ids is not None and tuple(embedding.ids) != ids:
        for k, (x, y) in enumerate(zip(embedding.ids, ids)):
            if x != y:
                raise JoinError(f"row {k}: embedding id {x!r} vs assignment id {y!r}")
    return LabeledCoords(
        ids=ids,
        coords=np.asarray(embedding.coords)[:, :],
        status=tuple(a.status.value for a in assignments),
        labels=tuple(a.label for a in assignments),
    )


def write_assignments(results, path) -> None:
    """TSV ``read_id status species support``.

    The species column holds the species name, the sorted matched species
    joined by '|' for ambiguous reads, or '-' for unknown ones.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("read_id\tstatus\tspecies\tsupport\n")
        for r in results:
            if r.status is Status.ASSIGNED:
                sp = r.species
            elif r.status is Status.AMBIGUOUS:
                sp = "|".join(sorted(r.matched_species))
            else:
                sp = "-"
            fh.write(f"{r.read_id}\t{r.status.value}\t{sp}\t{r.support}\n")


def read_assignment_labels(path) -> dict:
    """id -> plot label from an assignment TSV or a two-column ``id<TAB>label`` file."""
    labels = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        full = header[:2] == ["read_id", "status"]
        if not full and len(header) >= 2 and header[0] not in ("id", "read_id"):
            labels[header[0]] = header[1].strip()
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if full:
                rid, status, species = parts[0], parts[1], parts[2]
                labels[rid] = species if status == Status.ASSIGNED.value else status
            else:
                labels[parts[0]] = parts[1].strip() if len(parts) > 1 else ""
    return labels


def read_labels(path) -> dict:
    """Reference labels TSV ``ref_id<TAB>species`` (an optional header line is skipped)."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected 'ref_id<TAB>species'")
            if lineno == 1 and parts[0] in ("ref_id", "id"):
                continue
            out[parts[0]] = parts[1].strip()
    return out


class HomologyGapClassifier(ClassifierMixin, BaseEstimator):
    """Nearest-reference species classifier with a homology-gap acceptance rule.

    ``fit`` stores annotated reference reads. ``predict`` aligns queries against
    them and returns a species name, ``"ambiguous"`` or ``"unknown"`` per query.
    """

    def __init__(self, gap=0.97, *, match=1, mismatch=-1, gap_penalty=-2, n_jobs=1):
        self.gap = gap
        self.match = match
        self.mismatch = mismatch
        self.gap_penalty = gap_penalty
        self.n_jobs = n_jobs

    def _scoring(self):
        return ScoringScheme(self.match, self.mismatch, self.gap_penalty)

    def fit(self, X, y):
        _gap_fraction(self.gap)
        refs = check_reads(X, "X")
        y = [str(s).strip() for s in y]
        if len(y) != len(refs):
            raise ShapeMismatch(f"{len(refs)} references but {len(y)} labels")
        self.reference_db_ = ReferenceDB(refs, dict(zip(refs.ids, y)))
        self.classes_ = np.array(sorted(set(y)), dtype=object)
        return self

    def assign(self, X, cross=None) -> list[AssignmentResult]:
        check_is_fitted(self)
        queries = check_reads(X, "X")
        if cross is None:
            cross = pairwise_cross(queries, self.reference_db_.reads, self._scoring(),
                                   threads=self.n_jobs or 1)
        return classify(queries, self.reference_db_, cross, self.gap)

    def predict(self, X):
        return np.array([r.label for r in self.assign(X)], dtype=object)
