import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from cansys import linalg
from cansys.errors import InputError

from conftest import cplx, random_unitary


def test_column_space_identity():
    s = linalg.column_space(np.eye(3))
    assert s.dim == 3


def test_column_space_rank_one():
    s = linalg.column_space([[1, 1], [1, 1]])
    assert s.dim == 1
    assert np.allclose(np.abs(s.basis[:, 0]), 1 / np.sqrt(2))


def test_column_space_matches_pivoted_qr(rng):
    for _ in range(20):
        m = cplx(rng, 5, 3)
        _, r, _ = scipy.linalg.qr(m, pivoting=True)
        d = np.abs(np.diag(r))
        qr_rank = int(np.sum(d > d[0] * 1e-12))
        assert linalg.column_space(m).dim == qr_rank == 3


def test_null_space_examples():
    n = linalg.null_space([[1, 0], [0, 0]])
    assert n.dim == 1 and np.isclose(abs(n.basis[1, 0]), 1)
    n = linalg.null_space([[1, 1], [1, 1]])
    assert n.dim == 1
    v = n.basis[:, 0]
    assert np.isclose(abs(v[0]), 1 / np.sqrt(2)) and np.isclose(v[0], -v[1])


def test_null_space_residual(rng):
    for _ in range(20):
        m = cplx(rng, 6, 4) @ cplx(rng, 4, 4)
        m[:, -1] = m[:, 0] + 2 * m[:, 1]
        n = linalg.null_space(m)
        assert n.dim == 1
        assert np.linalg.norm(m @ n.basis) <= 1e-10


def test_non_finite_rejected():
    with pytest.raises(InputError):
        linalg.column_space([[np.nan, 1.0]])


def test_intersect_examples():
    e = np.eye(3)
    s1 = linalg.column_space(e[:2, :1])
    s2 = linalg.column_space(e[:2, 1:2])
    assert linalg.intersect(s1, s2).dim == 0
    a = linalg.column_space(e[:, :2])
    b = linalg.column_space(e[:, 1:])
    c = linalg.intersect(a, b)
    assert linalg.subspace_equal(c, linalg.column_space(e[:, 1:2]))
    assert linalg.subspace_equal(linalg.intersect(a, a), a)


def test_intersect_ambient_mismatch():
    with pytest.raises(InputError):
        linalg.intersect(linalg.full_space(2), linalg.full_space(3))


def test_inertia_examples():
    assert linalg.hermitian_inertia(np.diag([1.0, -2.0, 0.0])).as_tuple() == (1, 1, 1)
    J = np.array([[0, -1], [1, 0]])
    assert linalg.hermitian_inertia(-1j * J).as_tuple() == (1, 1, 0)
    assert linalg.hermitian_inertia(np.eye(4)).as_tuple() == (4, 0, 0)


def test_inertia_rejects_non_hermitian():
    with pytest.raises(InputError):
        linalg.hermitian_inertia([[0, 1], [0, 0]])


def test_orthonormal_basis_invariant(rng):
    for _ in range(10):
        s = linalg.column_space(cplx(rng, 7, 4))
        assert np.max(np.abs(s.basis.conj().T @ s.basis - np.eye(s.dim))) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_rank_nullity(rows, cols, rank, seed):
    rng = np.random.default_rng(seed)
    r = min(rank, rows, cols)
    m = cplx(rng, rows, r) @ cplx(rng, r, cols) if r else np.zeros((rows, cols))
    cs = linalg.column_space(m)
    ns = linalg.null_space(m.conj().T)
    assert cs.dim + ns.dim == rows
    assert cs.dim == r
    if cs.dim and ns.dim:
        assert np.max(np.abs(cs.basis.conj().T @ ns.basis)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_intersect_commutative_idempotent(n, seed):
    rng = np.random.default_rng(seed)
    k1, k2 = rng.integers(1, n + 1, size=2)
    common = cplx(rng, n, 1)
    s1 = linalg.column_space(np.hstack([common, cplx(rng, n, k1 - 1)]))
    s2 = linalg.column_space(np.hstack([common, cplx(rng, n, k2 - 1)]))
    a = linalg.intersect(s1, s2)
    b = linalg.intersect(s2, s1)
    assert a.dim >= max(1, s1.dim + s2.dim - n)
    assert linalg.subspace_equal(a, b)
    assert linalg.subspace_equal(linalg.intersect(a, a), a)
    assert linalg.sin_largest_angle(a, b) <= 1e-10 or a.dim == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_inertia_congruence_invariant(n, seed):
    rng = np.random.default_rng(seed)
    w = np.round(rng.standard_normal(n)) * 2.0
    u = random_unitary(rng, n)
    h = u @ np.diag(w) @ u.conj().T
    assert linalg.hermitian_inertia(h, 1e-8).as_tuple() == linalg.hermitian_inertia(
        np.diag(w), 1e-8).as_tuple()
