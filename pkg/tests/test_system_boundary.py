import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cansys.errors import (DomainError, ImpossibleConditionError, InputError, PreconditionError,
                           VerificationError)
from cansys.system.boundary import (BoundaryCondition, RelationOracle, _gamma_b,
                                    classify_boundary_condition, classify_separated,
                                    decomposing_triplet, nevanlinna_summary, random_condition,
                                    separated_condition, weyl_function, weyl_sweep)
from cansys.system.model import make_system, normal_form

from conftest import cplx, load_condition, random_system, random_unitary


def test_dirac_triplet(dirac):
    dt = decomposing_triplet(dirac)
    assert dt.is_triplet and dt.green_residual <= 1e-12
    # coordinates (y1(a), y2(a), y1(b), y2(b))
    assert np.allclose(dt.gamma0, [[1, 0, 0, 0], [0, 0, 1, 0]])
    assert np.allclose(dt.gamma1, [[0, 1, 0, 0], [0, 0, 0, -1]])
    assert dt.gamma0.shape[0] == 2 * dt.sig.dim_H


def test_indefinite_gives_relation(indefinite):
    dt = decomposing_triplet(indefinite)
    assert not dt.is_triplet and dt.n_gamma == 1 == dt.k_N
    with pytest.raises(PreconditionError):
        weyl_function(indefinite, 1j)


def test_signature3_triplet(sig3):
    dt = decomposing_triplet(sig3)
    assert dt.gamma0.shape == (3, 6) and dt.green_residual <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.sampled_from([-1, 1]), st.integers(0, 2**32 - 1))
def test_green_identity_direct(h, hh, sgn, seed):
    """[y,z]_b - [y,z]_a against the boundary maps on random boundary data."""
    if h + hh == 0:
        return
    rng = np.random.default_rng(seed)
    n = 2 * h + hh
    v = random_unitary(rng, n)
    J = v @ normal_form(h, hh, sgn if hh else 0) @ v.conj().T
    s = make_system(J, [(0.0, 1.0, np.zeros((n, n)), np.eye(n))])
    dt = decomposing_triplet(s)
    assert dt.green_residual <= 1e-10
    yv, zv = cplx(rng, 2 * n), cplx(rng, 2 * n)
    form = lambda u, w: w.conj() @ J @ u
    lhs = form(yv[n:], zv[n:]) - form(yv[:n], zv[:n])
    g0y, g1y, g0z, g1z = dt.gamma0 @ yv, dt.gamma1 @ yv, dt.gamma0 @ zv, dt.gamma1 @ zv
    rhs = g0z.conj() @ g1y - g1z.conj() @ g0y
    assert abs(lhs - rhs) <= 1e-10 * (1 + np.abs(yv).max() * np.abs(zv).max())


def test_dirac_weyl_closed_form(dirac):
    def closed(lam):
        c, s = np.cos(lam * np.pi), np.sin(lam * np.pi)
        return np.array([[-c, 1], [1, -c]]) / s

    for lam in (1j, 0.3 + 0.5j, -2 - 1j):
        assert np.abs(weyl_function(dirac, lam).M - closed(lam)).max() <= 1e-8
    ch, sh = np.cosh(np.pi), np.sinh(np.pi)
    assert np.abs(weyl_function(dirac, 1j).M - 1j / sh * np.array([[ch, -1], [-1, ch]])).max() <= 1e-8
    m1, m2 = weyl_function(dirac, 1 + 1j).M, weyl_function(dirac, 1 - 1j).M
    assert np.abs(m2 - m1.conj().T).max() <= 1e-9
    w = np.linalg.eigvalsh((weyl_function(dirac, 1j).M - weyl_function(dirac, 1j).M.conj().T) / 2j)
    assert abs(w[0] - (ch - 1) / sh) <= 1e-8


def test_weyl_real_axis(dirac):
    with pytest.raises(DomainError):
        weyl_function(dirac, 2.0)


@pytest.mark.parametrize("name", ["dirac", "sig3", "four"])
def test_weyl_nevanlinna(name, request):
    s = request.getfixturevalue(name)
    xs = np.linspace(-4, 4, 9)
    lams = np.r_[xs + 0.5j, xs - 0.5j, xs + 3j]
    vals = weyl_sweep(s, lams)
    summ = nevanlinna_summary(vals)
    assert summ["min_im_eig"] >= -1e-9 and summ["conj_symmetry"] <= 1e-9
    # batched sweep agrees with single-point evaluation
    assert np.abs(vals[3].M - weyl_function(s, lams[3]).M).max() <= 1e-8


def test_classify_examples(dirac):
    rep = classify_boundary_condition(dirac, load_condition("dirichlet", dirac))
    assert rep.cls == "self-adjoint" and rep.pair_class == "Self"
    rep = classify_boundary_condition(dirac, load_condition("dissipative", dirac))
    assert rep.cls == "maximal-dissipative"
    assert np.allclose(rep.D, np.diag([0, -2]), atol=1e-12)
    rep = classify_boundary_condition(dirac, load_condition("none", dirac))
    assert rep.cls == "none" and rep.D_eigenvalues[0] > 0 > rep.D_eigenvalues[-1]


def test_classify_errors(dirac):
    with pytest.raises(VerificationError) as exc:
        classify_boundary_condition(dirac, BoundaryCondition(np.diag([1, 0]), np.zeros((2, 2))))
    assert exc.value.clause == "admissibility"
    with pytest.raises(InputError):
        classify_boundary_condition(dirac, BoundaryCondition([[1, 0]], [[0, 1]]))


def test_three_routes_small(rng):
    kinds = ["Self", "Dis", "Ac", "any"]
    for k in range(8):
        s = random_system(rng, 2, pieces=1 + k % 2)
        dt = decomposing_triplet(s)
        oracle = RelationOracle(s)
        kind = kinds[k % 4]
        rep = classify_boundary_condition(s, random_condition(s, kind, rng, dt), dt, oracle)
        assert rep.oracle_class == rep.cls
        if kind != "any":
            assert rep.pair_class == kind


def test_jb_signature_equivalence(dirac, rng):
    """A condition written against Jb equals the same condition moved to J by W."""
    jb = -dirac.J
    for _ in range(4):
        ca, cb = cplx(rng, 2, 2), cplx(rng, 2, 2)
        bc = BoundaryCondition(ca, cb, jb)
        w, _ = _gamma_b(dirac, bc)
        a = classify_boundary_condition(dirac, bc)
        b = classify_boundary_condition(dirac, BoundaryCondition(ca, cb @ w))
        assert a.cls == b.cls and np.allclose(a.D, b.D, atol=1e-10)


def test_separated_dirac(dirac):
    bc = load_condition("separated_dissipative", dirac)
    rep = classify_separated(dirac, bc)
    assert rep.cls == "maximal-dissipative" == rep.general_class
    assert np.allclose(rep.S_a, 0) and np.allclose(rep.S_b, [[-1]])
    assert rep.resolvent_blocks["dis_a"] and rep.resolvent_blocks["dis_b"]
    rep = classify_separated(dirac, load_condition("separated_dirichlet", dirac))
    assert rep.cls == "self-adjoint" and rep.tau == {"a": "Self", "b": "Self"}


def test_separated_impossible(sig3):
    with pytest.raises(ImpossibleConditionError):
        classify_separated(sig3, load_condition("signature3_selfadjoint", sig3))


def test_separated_dissipative_non_hamiltonian(sig3):
    # nu = (1, 2): dissipative separated conditions have dim K_a = nu- = 2, dim K_b = nu+ = 1
    bc = separated_condition(sig3, ([[1], [0]], [[0], [1]], [[0], [0]]), ([[1]], [[0]], [[-1j]]))
    rep = classify_separated(sig3, bc)
    assert rep.cls == "maximal-dissipative" == rep.general_class
    assert rep.dims == {"dim_K_a": 2, "dim_K_b": 1}
    assert min(np.linalg.eigvalsh(rep.S_a)) >= 0 and max(np.linalg.eigvalsh(rep.S_b)) <= 0
