import pathlib
import sys

import numpy as np
import pytest

from cansys import io
from cansys.system.model import make_system

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
SYSTEMS = ("dirac", "indefinite", "dirac_halfline", "signature3", "twopiece4")


def load_system(name, **overrides):
    return io.parse_system(io.load(DATA / "systems" / f"{name}.json"), overrides)


def load_condition(name, s):
    return io.parse_condition(io.load(DATA / "conditions" / f"{name}.json"), s)


def cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    q, r = np.linalg.qr(cplx(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_system(rng, n, pieces=1, length=1.0, linear=False):
    """Random definite regular system with a Hamiltonian J = V J0 V^* (n even)."""
    h = n // 2
    j0 = np.block([[np.zeros((h, h)), -np.eye(h)], [np.eye(h), np.zeros((h, h))]])
    v = random_unitary(rng, n)
    J = v @ j0 @ v.conj().T
    edges = np.linspace(0.0, length, pieces + 1)
    out = []
    for k in range(pieces):
        b = cplx(rng, n, n)
        b = 0.5 * (b + b.conj().T)
        w = cplx(rng, n, n)
        d = w @ w.conj().T / n + 0.2 * np.eye(n)
        bs, ds = [b], [d]
        if linear:
            b1 = cplx(rng, n, n)
            bs.append(0.3 * (b1 + b1.conj().T))
            ds.append(0.1 * np.eye(n))
        out.append((edges[k], edges[k + 1], bs, ds))
    return make_system(J, out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def dirac():
    return load_system("dirac")


@pytest.fixture(scope="session")
def indefinite():
    return load_system("indefinite")


@pytest.fixture(scope="session")
def halfline():
    return load_system("dirac_halfline")


@pytest.fixture(scope="session")
def sig3():
    return load_system("signature3")


@pytest.fixture(scope="session")
def four():
    return load_system("twopiece4")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
