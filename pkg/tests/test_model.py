import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cansys.errors import ValidationError
from cansys.system.model import (make_system, normal_form, require_valid, signature_of,
                                 validate_system)

from conftest import cplx, load_system, random_unitary

I2 = np.eye(2)
JD = np.array([[0, -1], [1, 0]])


def test_validate_examples(dirac, indefinite):
    assert validate_system(dirac).valid
    assert validate_system(indefinite).valid
    bad = load_system("bad_J")
    rep = validate_system(bad)
    assert not rep.valid
    with pytest.raises(ValidationError):
        require_valid(bad)


def test_validate_rejects_bad_coefficients():
    b = np.array([[0, 1], [0, 0]])
    assert not validate_system(make_system(JD, [(0, 1, b, I2)])).valid
    assert not validate_system(make_system(JD, [(0, 1, 0 * I2, np.diag([1, -1e-3]))])).valid
    # Delta(t) = diag(1, t - 0.5) turns negative on the first half only
    d = [np.diag([1.0, -0.5]), np.diag([0.0, 1.0])]
    assert not validate_system(make_system(JD, [(0, 1, 0 * I2, d)])).valid
    gap = make_system(JD, [(0, 1, 0 * I2, I2), (1.5, 2, 0 * I2, I2)])
    assert not validate_system(gap).valid


def test_signature_examples():
    sg = signature_of(JD)
    assert (sg.nu_plus, sg.nu_minus, sg.delta) == (1, 1, 0) and sg.is_hamiltonian
    sg = signature_of([[1j]])
    assert (sg.nu_plus, sg.nu_minus, sg.delta) == (0, 1, 1)
    assert (sg.dim_H, sg.dim_Hhat) == (0, 1)
    j3 = np.array([[0, 0, -1], [0, 1j, 0], [1, 0, 0]])
    sg = signature_of(j3)
    # eigen oracle on the explicit matrix
    w = np.linalg.eigvalsh(1j * j3)
    assert (sg.nu_plus, sg.nu_minus) == (int(np.sum(w > 0)), int(np.sum(w < 0))) == (1, 2)
    assert sg.delta == 1 and not sg.is_hamiltonian


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.sampled_from([-1, 1]), st.integers(0, 2**32 - 1))
def test_signature_normal_form(h, hh, sgn, seed):
    if h + hh == 0:
        return
    rng = np.random.default_rng(seed)
    delta = sgn if hh else 0
    jn = normal_form(h, hh, delta)
    v = random_unitary(rng, 2 * h + hh)
    J = v @ jn @ v.conj().T
    sg = signature_of(J)
    assert (sg.dim_H, sg.dim_Hhat, sg.delta) == (h, hh, delta)
    assert np.abs(sg.U.conj().T @ J @ sg.U - jn).max() <= 1e-10
    assert np.abs(sg.U.conj().T @ sg.U - np.eye(2 * h + hh)).max() <= 1e-10
    # nu+ = dim ker(iJ - I)
    assert sg.nu_plus == 2 * h + hh - np.linalg.matrix_rank(1j * J - np.eye(2 * h + hh), 1e-8)


def test_signature_rejects_non_unitary(rng):
    with pytest.raises(ValidationError):
        signature_of(2 * JD)
