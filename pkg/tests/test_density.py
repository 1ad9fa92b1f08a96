import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divscope.density import (assign_hex, default_radius, hex_centers, hexbin, local_maxima,
                              log_counts, neighborhood, parallel_coords, write_hexbin,
                              write_parallel_coords)
from divscope.exceptions import BadAxis, JoinError, RankTooLarge
from divscope.mds import Embedding
from oracles import brute_force_hex


def emb(coords, ids=None):
    coords = np.asarray(coords, dtype=np.float64)
    return Embedding(coords, np.ones(coords.shape[1]), ids=ids)


def test_single_point():
    g = hexbin(emb([[1.5, -2.0]]))
    assert len(g) == 1 and g.counts.tolist() == [1]
    assert g.radius == 1.0


def test_copies_share_one_bin():
    g = hexbin(emb(np.tile([[0.3, 0.7, 1.1]], (25, 1))), axes=(1, 2))
    assert len(g) == 1 and g.counts.tolist() == [25]


def test_bad_axes():
    e = emb(np.zeros((3, 2)))
    for axes in [(0, 2), (1, 1), (-1, 0)]:
        with pytest.raises(BadAxis):
            hexbin(e, axes)


def test_default_radius():
    assert default_radius(np.array([[0.0, 0.0], [10.0, 5.0]])) == pytest.approx(0.2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 1000), st.integers(0, 2**32 - 1), st.floats(0.05, 3.0))
def test_matches_brute_force(n, seed, scale):
    rng = np.random.default_rng(seed)
    pts = rng.normal(0.0, scale, (n, 2))
    g = hexbin(emb(pts))
    assert g.counts.sum() == n
    got = list(zip(g.q[g.point_bin].tolist(), g.r[g.point_bin].tolist()))
    assert got == brute_force_hex(pts, g.radius, g.origin)


def test_boundary_ties_go_to_smaller_cell():
    R = 1.0
    c = hex_centers([0, 1, 0], [0, 0, 1], R, (0.0, 0.0))
    pts = np.array([(c[0] + c[1]) / 2, (c[0] + c[2]) / 2, (c[0] + c[1] + c[2]) / 3])
    q, r = assign_hex(pts, R, (0.0, 0.0))
    oracle = brute_force_hex(pts, R, (0.0, 0.0))
    assert list(zip(q.tolist(), r.tolist())) == oracle


def test_rebinning_centers_is_idempotent():
    rng = np.random.default_rng(3)
    g = hexbin(emb(rng.normal(size=(2000, 2))))
    q, r = assign_hex(g.centers, g.radius, g.origin)
    assert np.array_equal(q, g.q) and np.array_equal(r, g.r)


def test_log_counts():
    g = hexbin(emb(np.zeros((9, 2))))
    assert log_counts(g).values.tolist() == [1.0]
    assert log_counts(hexbin(emb(np.zeros((99, 2))))).values.tolist() == [2.0]
    from dataclasses import replace
    z = replace(g, counts=np.array([0]))
    assert log_counts(z).values.tolist() == [0.0]
    assert np.array_equal(log_counts(g).counts, g.counts)


def test_two_gaussian_mixture():
    rng = np.random.default_rng(2024)
    means = np.array([[0.0, 0.0], [8.0, 3.0]])
    pts = np.concatenate([rng.normal(m, 1.0, (5000, 2)) for m in means])
    g = hexbin(emb(pts))
    assert g.counts.sum() == 10_000
    got = list(zip(g.q[g.point_bin].tolist(), g.r[g.point_bin].tolist()))
    assert got == brute_force_hex(pts, g.radius, g.origin)
    top = local_maxima(g)[:2]
    for m in means:
        d = np.linalg.norm(g.centers[top] - m, axis=1)
        assert d.min() <= 2 * g.radius


def test_local_maxima_plateau():
    # two adjacent cells with equal counts: only the smaller one is a peak
    R = 1.0
    c = hex_centers([0, 1], [0, 0], R, (0.0, 0.0))
    pts = np.concatenate([np.tile(c[0], (3, 1)), np.tile(c[1], (3, 1))])
    g = hexbin(emb(pts), radius=R)
    peaks = local_maxima(g)
    assert len(peaks) == 1
    assert (g.q[peaks[0]], g.r[peaks[0]]) == min(zip(g.q.tolist(), g.r.tolist()))
    assert sorted(neighborhood(g, 0)) == [0, 1]


def test_write_hexbin(tmp_path):
    g = hexbin(emb(np.zeros((9, 2))))
    p = tmp_path / "h.tsv"
    write_hexbin(g, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "q\tr\tcenter_x\tcenter_y\tcount\tlogcount"
    assert lines[1].split("\t")[4:] == ["9", "1.0"]


def test_parallel_coords_full_and_filtered():
    coords = np.arange(12.0).reshape(4, 3)
    e = emb(coords, ids=("a", "b", "c", "d"))
    t = parallel_coords(e, 3)
    assert np.array_equal(t.values, coords) and t.labels == ("",) * 4
    labels = {"a": "S1", "b": "S2", "c": "S1", "d": "unknown"}
    t = parallel_coords(e, 2, labels, species="S1")
    assert t.ids == ("a", "c") and t.values.shape == (2, 2)
    assert len(parallel_coords(e, 1, labels, species="nobody")) == 0
    with pytest.raises(RankTooLarge):
        parallel_coords(e, 4)
    with pytest.raises(JoinError):
        parallel_coords(e, 2, ["x"])


def test_parallel_coords_three_clusters(tmp_path):
    rng = np.random.default_rng(6)
    blocks = []
    for k in range(3):
        c = rng.normal(0.0, 0.3, (50, 6))
        c[:, 0] += 10.0 * k
        blocks.append(c)
    coords = np.concatenate(blocks)
    ids = tuple(f"r{i}" for i in range(150))
    labels = [f"c{i // 50}" for i in range(150)]
    t = parallel_coords(emb(coords, ids), 6, labels)
    ranges = []
    for k in range(3):
        t_k = parallel_coords(emb(coords, ids), 6, labels, species=f"c{k}")
        assert len(t_k) == 50
        ranges.append((t_k.values[:, 0].min(), t_k.values[:, 0].max()))
    ranges.sort()
    assert all(ranges[i][1] < ranges[i + 1][0] for i in range(2))
    p = tmp_path / "pc.tsv"
    write_parallel_coords(t, p)
    lines = p.read_text().splitlines()
    assert lines[0].split("\t") == ["id"] + [f"dim{i}" for i in range(1, 7)] + ["label"]
    assert len(lines) == 151 and lines[1].endswith("\tc0")
