import numpy as np
import pytest

from irkprec import kernels
from irkprec.fem import assemble_1d
from irkprec.pencil import SpatialPencil, eig_pencil
from irkprec.tableau import factorize, radau_iia

KERNEL_NAMES = ("hessenberg_qr", "triu_eigvecs", "tridiag_ql", "band_cholesky", "band_solve")


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Route every dense kernel through one backend for the duration of a test."""
    mod = kernels.available_backends()[request.param]
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture(scope="session")
def radau():
    cache = {}

    def get(s):
        if s not in cache:
            tab = radau_iia(s)
            cache[s] = (tab, factorize(tab))
        return cache[s]

    return get


def make_laplace(n, tau, s):
    """(tab, f, problem, pencil, pencil eigen) for the 1D P1 model problem."""
    tab = radau_iia(s)
    f = factorize(tab)
    problem = assemble_1d(n)
    p = SpatialPencil.from_problem(problem, tau)
    return tab, f, problem, p, eig_pencil(p)


@pytest.fixture
def laplace_setup():
    return make_laplace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


def record_acceptance(line):
    _ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
