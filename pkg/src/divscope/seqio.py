"""FASTA ingestion, normalization and reproducible subsampling of reads."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, Iterator

from .exceptions import (
    DuplicateId,
    EmptyInput,
    FastaFormatError,
    InvalidCharacter,
    SampleTooLarge,
)

ALPHABET = "ACGTN"

# lowercase is folded to uppercase and RNA 'U' is read as 'T'
_NORMALIZE = {c: c for c in ALPHABET}
_NORMALIZE.update({c.lower(): c for c in ALPHABET})
_NORMALIZE.update({"U": "T", "u": "T"})

_MASK64 = (1 << 64) - 1


def normalize_sequence(seq: str, record_id: str = "?") -> str:
    """Uppercase `seq`, map U to T and reject anything outside ACGTN.

    Raises InvalidCharacter with a 1-based position on the first bad base.
    """
    out = []
    for pos, c in enumerate(seq, 1):
        n = _NORMALIZE.get(c)
        if n is None:
            raise InvalidCharacter(record_id, pos, c)
        out.append(n)
    return "".join(out)


@dataclass(frozen=True)
class Read:
    id: str
    sequence: str

    def __post_init__(self):
        if not self.id or any(c.isspace() for c in self.id):
            raise FastaFormatError(f"bad read id {self.id!r}")
        if not self.sequence:
            raise FastaFormatError(f"read {self.id!r} has an empty sequence")
        object.__setattr__(self, "sequence", normalize_sequence(self.sequence, self.id))

    @property
    def length(self) -> int:
        return len(self.sequence)

    def __len__(self):
        return len(self.sequence)


@dataclass(frozen=True)
class ReadSet:
    """Ordered, id-unique collection of reads.

    Position ``i`` here is row/column ``i`` of every matrix computed from
    the set.
    """

    reads: tuple
    source: str = ""

    def __post_init__(self):
        reads = tuple(self.reads)
        seen = set()
        for r in reads:
            if not isinstance(r, Read):
                raise TypeError(f"ReadSet holds Read objects, got {type(r).__name__}")
            if r.id in seen:
                raise DuplicateId(r.id)
            seen.add(r.id)
        object.__setattr__(self, "reads", reads)

    @classmethod
    def from_sequences(cls, sequences: Iterable[str], ids: Iterable[str] | None = None,
                       source: str = "") -> "ReadSet":
        sequences = list(sequences)
        if ids is None:
            ids = [f"seq{i}" for i in range(len(sequences))]
        return cls(tuple(Read(i, s) for i, s in zip(ids, sequences, strict=True)), source)

    def __len__(self):
        return len(self.reads)

    def __iter__(self) -> Iterator[Read]:
        return iter(self.reads)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return ReadSet(self.reads[idx], self.source)
        return self.reads[idx]

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.reads]

    @property
    def sequences(self) -> list[str]:
        return [r.sequence for r in self.reads]

    @property
    def lengths(self) -> list[int]:
        return [len(r.sequence) for r in self.reads]


def _open_text(source):
    """Return (text iterator, provenance, should_close)."""
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="ascii", newline=None), os.fspath(source), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("ascii"), newline=None), "<bytes>", False
    name = getattr(source, "name", "<stream>")
    if isinstance(source, io.TextIOBase):
        return source, str(name), False
    # binary stream
    return io.TextIOWrapper(source, encoding="ascii", newline=None), str(name), False


def parse_fasta(source) -> ReadSet:
    """Parse FASTA from a path, a bytes object or an open (binary or text) stream.

    Header text up to the first whitespace becomes the read id. Sequence
    lines are concatenated and normalized. LF and CRLF line endings are both
    accepted.
    """
    fh, provenance, close = _open_text(source)
    records = []
    header = None
    chunks: list[str] = []
    try:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if line.startswith(">"):
                if header is not None:
                    records.append((header, "".join(chunks)))
                tokens = line[1:].split(None, 1)
                if not tokens:
                    raise FastaFormatError(f"empty header at line {lineno}")
                header = tokens[0]
                chunks = []
            else:
                stripped = line.strip()
                if not stripped:
                    continue
                if header is None:
                    raise FastaFormatError(f"sequence data before first header at line {lineno}")
                chunks.append(stripped)
        if header is not None:
            records.append((header, "".join(chunks)))
    finally:
        if close:
            fh.close()

    if not records:
        raise EmptyInput(f"no FASTA records in {provenance}")

    reads = []
    seen = set()
    for rid, seq in records:
        if rid in seen:
            raise DuplicateId(rid)
        seen.add(rid)
        if not seq:
            raise FastaFormatError(f"record {rid!r} has no sequence")
        reads.append(Read(rid, normalize_sequence(seq, rid)))
    return ReadSet(tuple(reads), provenance)


def write_fasta(rs: ReadSet, dest, width: int = 60) -> None:
    """Write `rs` as FASTA to a path or text stream, wrapping at `width`."""
    lines = []
    for r in rs:
        lines.append(f">{r.id}\n")
        seq = r.sequence
        step = width if width and width > 0 else len(seq)
        for k in range(0, len(seq), step):
            lines.append(seq[k:k + step] + "\n")
    text = "".join(lines)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014).

    Chosen for subsampling because the algorithm is a few lines of integer
    arithmetic and reproduces bit-for-bit in any language.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def sample_indices(n: int, k: int, seed: int) -> list[int]:
    """Choose `k` of `range(n)` uniformly without replacement, in increasing order.

    Selection sampling (Knuth, TAOCP vol. 2, Algorithm S) driven by
    SplitMix64: item t is kept with probability (k - kept) / (n - t).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > n:
        raise SampleTooLarge(f"cannot draw {k} reads from {n}")
    rng = SplitMix64(seed)
    chosen = []
    for t in range(n):
        if len(chosen) == k:
            break
        if (n - t) * rng.next_double() < k - len(chosen):
            chosen.append(t)
    return chosen


def subsample(rs: ReadSet, k: int, seed: int) -> ReadSet:
    if k <= 0:
        raise ValueError("k must be a positive integer")
    if k > len(rs):
        raise SampleTooLarge(f"cannot draw {k} reads from a set of {len(rs)}")
    idx = sample_indices(len(rs), k, seed)
    return ReadSet(tuple(rs.reads[i] for i in idx), rs.source)
