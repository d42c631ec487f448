import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from irkprec.errors import NotPositiveDefiniteError
from irkprec.smalldense import (balance, bandwidth, cholesky, companion, cond2, eig_dense, eig_spd,
                                is_conjugate_closed, match_spectra, polyroots_companion,
                                spectral_norm, to_band)


@pytest.mark.parametrize("A, expected", [
    ([[1, 1 / 5], [0, 22 / 25]], [1, 0.88]),
    (np.eye(3), [1, 1, 1]),
    ([[0, -1], [1, 0]], [1j, -1j]),
])
def test_eig_dense_examples(backend, A, expected):
    assert match_spectra(eig_dense(np.array(A, dtype=float)), np.array(expected)) <= 1e-14


@pytest.mark.parametrize("m", [1, 4, 30])
def test_eig_dense_residuals(backend, m, rng):
    A = rng.standard_normal((m, m))
    w, V = eig_dense(A, vectors=True)
    nrm = np.linalg.norm(A, 2)
    for k in range(m):
        assert np.linalg.norm(A @ V[:, k] - w[k] * V[:, k]) <= 1e-10 * nrm
    assert np.allclose(np.linalg.norm(V, axis=0), 1.0)


def test_eig_dense_complex_input(backend, rng):
    A = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    assert match_spectra(eig_dense(A), sla.eigvals(A)) <= 1e-11


def test_eig_dense_zero_matrix():
    assert np.all(eig_dense(np.zeros((3, 3))) == 0)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.array([[np.nan]]), np.zeros((0, 0))])
def test_eig_dense_rejects(bad):
    with pytest.raises(ValueError):
        eig_dense(bad)


def test_balance_is_similarity(rng):
    A = rng.standard_normal((6, 6)) * np.logspace(-6, 6, 6)[:, None]
    B, d = balance(A)
    assert np.allclose(B, A * d[None, :] / d[:, None])
    assert np.all(np.log2(d) == np.round(np.log2(d)))


@pytest.mark.parametrize("coeffs, roots", [
    ([1, 3 / 25, 0], [0, -3 / 25]),
    ([1, 0, 1], [1j, -1j]),
    ([1, 0, 0, 0], [0, 0, 0]),
])
def test_polyroots_examples(backend, coeffs, roots):
    assert match_spectra(polyroots_companion(coeffs), np.array(roots)) <= 1e-14


def test_polyroots_needs_degree():
    with pytest.raises(ValueError):
        polyroots_companion([1.0])


def test_polyroots_normalizes_leading_coefficient():
    assert match_spectra(polyroots_companion([2, -6, 4]), np.array([1, 2])) <= 1e-14


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 5, elements=st.floats(-3, 3)))
def test_polyroots_residual(c):
    coeffs = np.concatenate([[1.0], c])
    r = polyroots_companion(coeffs)
    assert r.size == 5
    for z in r:
        assert abs(np.polyval(coeffs, z)) <= 1e-8 * np.abs(coeffs).max()


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 4, elements=st.floats(-3, 3)))
def test_companion_eig_agrees_with_polyroots(c):
    coeffs = np.concatenate([[1.0], c])
    assert match_spectra(eig_dense(companion(coeffs)), polyroots_companion(coeffs)) <= 1e-9


def test_eig_spd_examples(backend):
    w, V = eig_spd(np.diag([2.0, 1.0]))
    assert np.allclose(w, [1, 2])
    w, V = eig_spd(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [1, 3])
    assert np.allclose(np.abs(V), np.sqrt(0.5))


def test_eig_spd_gram_matches_eig_dense(backend, rng):
    F = rng.standard_normal((5, 5))
    G = F @ F.T
    w, V = eig_spd(G)
    assert np.allclose(V.T @ V, np.eye(5), atol=1e-10)
    assert np.allclose(V @ np.diag(w) @ V.T, G, atol=1e-10 * np.abs(G).max())
    assert match_spectra(w, eig_dense(G)) <= 1e-9


def test_eig_spd_errors():
    with pytest.raises(ValueError):
        eig_spd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefiniteError):
        eig_spd(np.diag([1.0, -1.0]))


@pytest.mark.parametrize("A, expected", [
    (np.eye(3), 1.0),
    (np.diag([1.0, 2.0]), 2.0),
    (np.array([[1.0, 1.0], [0.0, 1.0]]), (3 + np.sqrt(5)) / 2),
])
def test_cond2_examples(backend, A, expected):
    assert cond2(A) == pytest.approx(expected, abs=1e-10)


def test_cond2_orthogonal_and_singular(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    assert cond2(Q) == pytest.approx(1.0, abs=1e-10)
    assert cond2(np.array([[1.0, 1.0], [1.0, 1.0]])) == np.inf


def test_cond2_unitary_invariance(rng):
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    U, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    assert cond2(U @ A) == pytest.approx(cond2(A), rel=1e-9)
    assert cond2(A) == pytest.approx(np.linalg.cond(A), rel=1e-9)


def test_spectral_norm(rng):
    A = rng.standard_normal((4, 6))
    assert spectral_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-12)


def test_cholesky_band_detection(backend, rng):
    A = 4 * np.eye(6) - np.eye(6, k=1) - np.eye(6, k=-1)
    assert bandwidth(A) == 1
    G = cholesky(A)
    assert np.allclose(G @ G.T, A)
    assert to_band(A).shape == (6, 2)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-5, 5)))
def test_real_spectrum_conjugate_closed(A):
    assert is_conjugate_closed(eig_dense(A), tol=1e-9 * max(1.0, np.abs(A).max()))


def test_match_spectra_is_symmetric():
    a = np.array([1, 2 + 1j, 2 - 1j])
    b = np.array([2 - 1j, 1 + 1e-3, 2 + 1j])
    assert match_spectra(a, b) == pytest.approx(1e-3)
    assert match_spectra(b, a) == pytest.approx(1e-3)


def test_polyroots_subnormal_coefficients(backend):
    tiny = 5e-324
    r = polyroots_companion([1.0, tiny, tiny, tiny, 1.0, tiny])
    expected = np.concatenate([np.exp(1j * np.pi * np.array([1, 3, 5, 7]) / 4), [0.0]])
    assert match_spectra(r, expected) <= 1e-12


def test_eigenvectors_with_graded_structure(backend):
    # near-decoupled blocks invite extreme balancing factors
    rng = np.random.default_rng(7)
    A = sla.block_diag(*[rng.standard_normal((3, 3)) + 3 * k * np.eye(3) for k in range(3)])
    A[:3, 3:] = 1e-17 * rng.standard_normal((3, 6))
    A[3:, :3] = rng.standard_normal((6, 3))
    w, V = eig_dense(A, vectors=True)
    assert np.abs(A @ V - V * w).max() <= 1e-12 * np.abs(A).max()
