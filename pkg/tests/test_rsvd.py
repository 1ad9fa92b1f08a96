import numpy as np
import pytest
from scipy.linalg import subspace_angles

from divscope.exceptions import NotSymmetric, RankTooLarge, ZeroMatrix
from divscope.rsvd import (ROW_BLOCK, SolverOptions, block_matmul, eigs_sym, randomized_range,
                           spectral_norm, stable_rank)


def low_rank_psd(n, k, seed, noise=0.0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, k))
    g = x @ x.T
    if noise:
        e = rng.standard_normal((n, n)) * noise
        g = g + 0.5 * (e + e.T)
    return g


def test_identity_gives_orthonormal_basis():
    q = randomized_range(np.eye(20), SolverOptions(3, oversampling=2))
    assert q.shape == (20, 5)
    assert np.allclose(q.T @ q, np.eye(5), atol=1e-12)


def test_range_captures_dominant_coordinates():
    g = np.diag([10.0, 5.0, 1.0] + [0.0] * 17)
    q = randomized_range(g, SolverOptions(3, oversampling=5, seed=4))
    e = np.eye(20)[:, :3]
    # the span of Q must contain e1, e2, e3: project them and compare
    angles = subspace_angles(q @ (q.T @ e), e)
    assert angles.max() <= 1e-10


def test_range_deterministic_across_threads():
    g = low_rank_psd(2 * ROW_BLOCK + 37, 8, 0)
    opts = [SolverOptions(8, seed=11, threads=t) for t in (1, 3, 8)]
    qs = [randomized_range(g, o) for o in opts]
    for q in qs[1:]:
        assert q.tobytes() == qs[0].tobytes()


def test_block_matmul_matches_numpy():
    rng = np.random.default_rng(1)
    g = rng.standard_normal((1100, 1100))
    x = rng.standard_normal((1100, 4))
    assert np.allclose(block_matmul(g, x, threads=4), g @ x, rtol=1e-12, atol=1e-9)


def test_rank_too_large():
    with pytest.raises(RankTooLarge):
        randomized_range(np.eye(5), SolverOptions(3, oversampling=3))
    with pytest.raises(RankTooLarge):
        eigs_sym(np.eye(5), SolverOptions(6, oversampling=0))


def test_invalid_options():
    with pytest.raises(ValueError):
        SolverOptions(0)
    with pytest.raises(ValueError):
        SolverOptions(2, oversampling=-1)


def test_non_symmetric_rejected():
    g = np.eye(4)
    g[0, 1] = 1.0
    with pytest.raises(NotSymmetric):
        eigs_sym(g, SolverOptions(2, oversampling=0))
    with pytest.raises(NotSymmetric):
        eigs_sym(np.ones((3, 4)), SolverOptions(1, oversampling=0))


def test_negative_eigenvalue_keeps_sign():
    spec = eigs_sym(np.diag([3.0, -2.0, 1.0]), SolverOptions(2, oversampling=1))
    assert np.allclose(spec.eigenvalues, [3.0, -2.0], rtol=1e-12)
    assert np.allclose(np.abs(spec.vectors), np.eye(3)[:, :2], atol=1e-12)


def test_rank_one():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(40)
    x /= np.linalg.norm(x)
    spec = eigs_sym(np.outer(x, x), SolverOptions(1, oversampling=5))
    assert abs(spec.eigenvalues[0] - 1.0) <= 1e-8
    u = spec.vectors[:, 0]
    assert min(np.abs(u - x).max(), np.abs(u + x).max()) <= 1e-8


def test_exact_low_rank_reconstruction():
    g = low_rank_psd(500, 20, 3)
    spec = eigs_sym(g, SolverOptions(20, oversampling=10, power_iters=2, seed=1))
    u, lam = spec.vectors, spec.eigenvalues
    err = np.linalg.norm(g - (u * lam) @ u.T)
    assert err <= 1e-6 * np.linalg.norm(g)
    assert np.abs(u.T @ u - np.eye(20)).max() <= 1e-8
    ray = np.einsum("ij,ij->j", u, g @ u)
    assert np.allclose(ray, lam, rtol=1e-6)


def test_oracle_agreement_fast_decay():
    rng = np.random.default_rng(5)
    n = 300
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    true = 100.0 * 0.6 ** np.arange(n) * rng.choice([-1.0, 1.0], n)
    g = (basis * true) @ basis.T
    g = 0.5 * (g + g.T)
    spec = eigs_sym(g, SolverOptions(8, oversampling=10, power_iters=2, seed=2))
    w, v = np.linalg.eigh(g)
    order = np.argsort(-np.abs(w))[:8]
    assert np.allclose(spec.eigenvalues, w[order], rtol=1e-6)
    for k in range(8):
        ang = subspace_angles(spec.vectors[:, [k]], v[:, [order[k]]])
        assert ang.max() <= 1e-5


def test_spectrum_deterministic_across_threads():
    g = low_rank_psd(ROW_BLOCK + 100, 6, 9, noise=1e-3)
    a = eigs_sym(g, SolverOptions(5, seed=3, threads=1))
    b = eigs_sym(g, SolverOptions(5, seed=3, threads=4))
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.vectors.tobytes() == b.vectors.tobytes()


def test_stable_rank_examples():
    assert abs(stable_rank(np.diag([10.0, 5.0, 1.0])) - 1.26) <= 1e-9
    assert stable_rank(np.eye(7)) == pytest.approx(7.0, rel=1e-12)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(30)
    assert stable_rank(np.outer(x, x)) == pytest.approx(1.0, rel=1e-9)


def test_stable_rank_of_spectrum():
    spec = eigs_sym(np.diag([10.0, -5.0, 1.0, 0.0]), SolverOptions(3, oversampling=1))
    assert stable_rank(spec) == pytest.approx(1.26, rel=1e-12)


def test_stable_rank_zero():
    with pytest.raises(ZeroMatrix):
        stable_rank(np.zeros((3, 3)))


def test_spectral_norm_with_symmetric_top_pair():
    assert spectral_norm(np.diag([4.0, -4.0, 1.0])) == pytest.approx(4.0, rel=1e-12)
