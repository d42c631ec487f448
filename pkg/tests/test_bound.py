import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irkprec.bound import bound_curve, dedupe, eigenvector_matrix, kappa_S, minmax_poly
from irkprec.fem import scalar_problem
from irkprec.kron import assemble_full
from irkprec.krylov import PrecondOperator, StageSystemOperator, gmres
from irkprec.pencil import SpatialPencil, eig_pencil
from irkprec.smalldense import cond2
from irkprec.spectrum import full_spectrum

from oracles import cvx_minmax, exchange_minmax


def unit_setup(radau, s=2):
    tab, f = radau(s)
    p = SpatialPencil(np.eye(1), np.eye(1), 1.0)
    return assemble_full(tab, f, p), full_spectrum(f, eig_pencil(p))


def test_minmax_examples():
    r = minmax_poly([2.0], 1)
    assert r.value == 0 and np.allclose(r.phi, [-0.5, 1.0])
    r = minmax_poly([1.0, 3.0], 1)
    assert r.value == pytest.approx(0.5, abs=1e-10)
    assert np.allclose(r.phi, [-0.5, 1.0], atol=1e-8)
    assert minmax_poly(np.ones(7), 1).value == 0.0
    assert minmax_poly([0.3, 2.0], 0).value == 1.0


def test_minmax_phi_consistent():
    pts = np.array([0.5, 0.9 + 0.2j, 0.9 - 0.2j, 1.4, 1.0])
    r = minmax_poly(pts, 2)
    assert r.phi[-1] == pytest.approx(1.0)
    assert np.isrealobj(r.phi)
    assert np.abs(np.polyval(r.phi, pts)).max() == pytest.approx(r.value, abs=1e-12)
    assert r.lower <= r.value + 1e-15


def test_minmax_errors():
    with pytest.raises(ValueError):
        minmax_poly([], 1)
    with pytest.raises(ValueError):
        minmax_poly([0.0, 1.0], 1)
    with pytest.raises(ValueError):
        minmax_poly([1.0], -1)


def test_dedupe():
    assert dedupe([1.0, 1.0 + 1e-12, 2.0]).size == 2


@settings(max_examples=40, deadline=None)
@given(pts=st.lists(st.floats(0.05, 2.0), min_size=2, max_size=6, unique=True),
       ell=st.integers(1, 4))
def test_minmax_matches_exchange_oracle(pts, ell):
    pts = np.asarray(pts)
    if np.min(np.diff(np.sort(pts))) < 1e-3:
        pts = np.linspace(pts.min(), pts.min() + 1, pts.size)
    assert minmax_poly(pts, ell).value == pytest.approx(exchange_minmax(pts, ell), abs=1e-6)


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_minmax_matches_cone_program(rng, ell):
    w = 1 + 0.4 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    pts = np.concatenate([w, w.conj(), [0.7, 1.2]])
    assert minmax_poly(pts, ell).value == pytest.approx(cvx_minmax(pts, ell), abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), ell=st.integers(1, 4))
def test_minmax_invariances(seed, ell):
    r = np.random.default_rng(seed)
    w = 1 + 0.3 * (r.standard_normal(5) + 1j * r.standard_normal(5))
    base = minmax_poly(w, ell).value
    assert minmax_poly(w.conj(), ell).value == pytest.approx(base, abs=1e-8)
    assert minmax_poly(r.permutation(w), ell).value == pytest.approx(base, abs=1e-8)
    assert minmax_poly(w, ell + 1).value <= base + 1e-8


def test_kappa_examples(radau, laplace_setup):
    fs, spec = unit_setup(radau)
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.2, -0.12]) / np.hypot(0.2, 0.12)
    assert kappa_S(fs, spec) == pytest.approx(cond2(np.column_stack([e1, e2])), rel=1e-10)
    tab, f, _, p, pe = laplace_setup(6, 0.1, 1)
    spec = full_spectrum(f, pe)
    fs = assemble_full(tab, f, p)
    Q = pe.Q / np.linalg.norm(pe.Q, axis=0)
    assert kappa_S(fs, spec) == pytest.approx(cond2(Q), rel=1e-10)
    assert kappa_S(fs, spec) >= 1.0


def test_kappa_defective_is_infinite(radau):
    tab, f = radau(2)
    p = SpatialPencil(np.eye(1), np.zeros((1, 1)) + 1e-300, 1.0)
    spec = full_spectrum(f, eig_pencil(p))
    assert eigenvector_matrix(spec) is None
    assert kappa_S(None, spec) == np.inf


def test_bound_curve_single_point(radau, laplace_setup):
    tab, f, _, p, pe = laplace_setup(4, 0.1, 1)
    spec = full_spectrum(f, pe)
    bc = bound_curve(assemble_full(tab, f, p), spec, 4)
    assert bc.points.size == 1
    assert np.allclose(bc.bound, bc.kappa * np.array([1, 0, 0, 0, 0]))


def test_bound_curve_two_points(radau):
    fs, spec = unit_setup(radau)
    bc = bound_curve(fs, spec, 2)
    assert bc.minmax[0] == 1.0 and bc.minmax[2] == 0.0 and bc.bound[2] == 0.0
    assert np.all(np.diff(bc.minmax) <= 0)


def test_bound_curve_errors(radau):
    fs, spec = unit_setup(radau)
    with pytest.raises(ValueError):
        bound_curve(fs, spec, -1)


@pytest.mark.parametrize("n,s,tau", [(50, 2, 0.01), (20, 3, 0.1), (30, 2, 1.0)])
def test_bound_dominates_gmres(laplace_setup, rng, n, s, tau):
    tab, f, pr, p, pe = laplace_setup(n, tau, s)
    spec = full_spectrum(f, pe)
    fs = assemble_full(tab, f, p)
    kap = kappa_S(fs, spec)
    if not np.isfinite(kap):
        pytest.skip("eigenvector matrix is singular")
    op = StageSystemOperator(pr.M, pr.K, tau, f.Ainv)
    pc = PrecondOperator(pr.M, pr.K, tau, f.L)
    res = gmres(op, rng.standard_normal(op.size), tol=1e-10, apply_prec=pc)
    rel = res.relative_history
    bc = bound_curve(fs, spec, rel.size - 1, kappa=kap)
    assert np.all(rel <= bc.bound * (1 + 1e-8) + 1e-14)
