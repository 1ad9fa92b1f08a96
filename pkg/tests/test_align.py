import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divscope.align import ScoringScheme, distance, encode, sw_align
from divscope.exceptions import BadScoring, EmptySequence, InvalidCharacter
from divscope.seqio import Read
from oracles import brute_force_local_score, random_dna, traceback_align

dna = st.text(alphabet="ACGT", min_size=1, max_size=30)
dna_n = st.text(alphabet="ACGTN", min_size=1, max_size=30)


def test_identity():
    r = sw_align("ACGT", "ACGT")
    assert (r.score, r.distance) == (4, 0)
    assert r.span_a == r.span_b == (0, 4)


def test_single_mismatch_full_length():
    r = sw_align("ACGT", "AGGT")
    assert (r.score, r.distance) == (2, 1)
    assert r.span_a == (0, 4)
    assert brute_force_local_score("ACGT", "AGGT") == 2
    assert traceback_align("ACGT", "AGGT")["distance"] == 1


def test_no_similarity():
    r = sw_align("AAAA", "TTTT")
    o = traceback_align("AAAA", "TTTT")
    assert r.score == 0 == brute_force_local_score("AAAA", "TTTT")
    assert r.edits == o["edits"] == 0
    # nothing aligns, so every position of either read is left over
    assert r.distance == o["distance"] == 4


def test_distance_examples():
    assert distance("ACGTACGT", "ACGAACGT") == 1
    assert traceback_align("ACGTACGT", "ACGAACGT")["distance"] == 1
    assert distance("ACGT", "ACG") == 0
    assert traceback_align("ACGT", "ACG")["distance"] == 0


def test_accepts_reads_and_lowercase():
    assert distance(Read("x", "acgt"), "ACGT") == 0


def test_n_never_matches():
    r = sw_align("N", "N")
    assert r.score == 0
    r = sw_align("ACNGT", "ACNGT")
    # the N column scores as a mismatch
    assert r.score == 3
    assert r.edits == 1


def test_errors():
    with pytest.raises(EmptySequence):
        sw_align("", "ACGT")
    with pytest.raises(InvalidCharacter):
        sw_align("ACXT", "ACGT")
    with pytest.raises(BadScoring):
        ScoringScheme(match=0)
    with pytest.raises(BadScoring):
        ScoringScheme(gap=1)


def test_encode():
    assert encode("ACGTNu").tolist() == [0, 1, 2, 3, 4, 3]


@given(dna_n, dna_n)
@settings(max_examples=300, deadline=None)
def test_matches_traceback_oracle(a, b):
    r = sw_align(a, b)
    o = traceback_align(a, b)
    assert (r.score, r.edits, r.unaligned, r.distance) == (
        o["score"], o["edits"], o["unaligned"], o["distance"])
    assert (r.span_a, r.span_b) == (o["span_a"], o["span_b"])


@given(st.text(alphabet="ACGT", min_size=1, max_size=5), st.text(alphabet="ACGT", min_size=1, max_size=5))
@settings(max_examples=150, deadline=None)
def test_score_matches_exhaustive_enumeration(a, b):
    assert sw_align(a, b).score == brute_force_local_score(a, b)


@given(dna, dna, st.integers(1, 4), st.integers(-4, -1), st.integers(-5, -1))
@settings(max_examples=150, deadline=None)
def test_other_scoring_schemes_match_oracle(a, b, m, x, g):
    s = ScoringScheme(m, x, g)
    r = sw_align(a, b, s)
    o = traceback_align(a, b, m, x, g)
    assert (r.score, r.distance) == (o["score"], o["distance"])


def test_symmetry_500_pairs():
    rng = np.random.default_rng(11)
    for _ in range(500):
        a = "".join(rng.choice(list("ACGT"), rng.integers(1, 61)))
        b = "".join(rng.choice(list("ACGT"), rng.integers(1, 61)))
        assert distance(a, b) == distance(b, a)


@given(dna_n)
@settings(max_examples=100, deadline=None)
def test_self_distance_zero(a):
    if "N" in a:
        # N never matches, so a read full of Ns is not identical to itself
        return
    assert distance(a, a) == 0


@given(dna, dna)
@settings(max_examples=100, deadline=None)
def test_zero_distance_on_prefix_extension(a, suffix):
    assert distance(a, a + suffix) == 0
    assert distance(suffix + a, a) == 0


@given(dna, dna)
@settings(max_examples=100, deadline=None)
def test_span_consistency(a, b):
    r = sw_align(a, b)
    assert 0 <= r.span_a[0] <= r.span_a[1] <= len(a)
    assert 0 <= r.span_b[0] <= r.span_b[1] <= len(b)
    assert r.distance == 0 or r.score < min(len(a), len(b))
    if r.distance == 0:
        assert a[slice(*r.span_a)] == b[slice(*r.span_b)]


def test_rolling_kernel_matches_full_matrix_kernel():
    from divscope.align import _sw_full, _sw_rolling, encode
    rng = np.random.default_rng(17)
    for _ in range(2000):
        a = encode(random_dna(rng, int(rng.integers(1, 60)), "ACGTN"))
        b = encode(random_dna(rng, int(rng.integers(1, 60)), "ACGTN"))
        for scoring in ((1, -1, -2), (2, -3, -1)):
            assert _sw_full(a, b, *scoring) == _sw_rolling(a, b, *scoring)
