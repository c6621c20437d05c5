import numpy as np
import pytest

from modholder.standard_form import make_gibbs

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E21 = E12.T.copy()
LN2 = np.log(2.0)

ACCEPTANCE_LINES: list[str] = []


def random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def random_matrix(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2 * d)


def random_psd(rng, d, conditioning=100.0):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    s = np.exp(rng.uniform(-np.log(conditioning), 0.0, d))
    a = (q * s) @ q.conj().T
    return 0.5 * (a + a.conj().T)


def random_ensemble(rng, d, beta=None):
    h = random_hermitian(rng, d)
    e = np.linalg.eigvalsh(h)
    if e[-1] - e[0] > 0:
        h = h / (e[-1] - e[0])
    if beta is None:
        beta = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
    return make_gibbs(h, beta)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_level():
    """rho = diag(2/3, 1/3): H = diag(0, ln 2), beta = 1."""
    return make_gibbs(np.diag([0.0, LN2]), 1.0)


@pytest.fixture
def tracial():
    return make_gibbs(np.zeros((2, 2)), 1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
