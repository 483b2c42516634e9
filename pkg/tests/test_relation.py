import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cansys import linalg
from cansys import relation as rel
from cansys.errors import PreconditionError
from cansys.relation import LinearRelation

from conftest import cplx

MODEL_A = LinearRelation(2, 2, np.array([[1, 0, 0, 1]]).T)


def hermitian_graph(rng, d):
    h = cplx(rng, d, d)
    return LinearRelation.from_operator(h + h.conj().T)


def test_model_adjoint():
    adj = rel.adjoint(MODEL_A)
    assert adj.dim == 3
    # every ((g1, g2), (g2, g3)) lies in A*
    want = np.array([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]]).T
    assert linalg.subspace_equal(adj.graph, linalg.column_space(want))


def test_hermitian_graph_self_adjoint(rng):
    t = hermitian_graph(rng, 3)
    assert rel.relations_equal(rel.adjoint(t), t)


def test_zero_relation_adjoint_is_everything():
    adj = rel.adjoint(LinearRelation.zero(1))
    assert adj.dim == 2


def test_parts_examples():
    tau = LinearRelation(1, 1, np.array([[0, 1]]).T)
    p = rel.parts(tau)
    assert p.dom.dim == 0 and p.mul.dim == 1
    p = rel.parts(LinearRelation.from_operator(np.eye(2)))
    assert p.dom.dim == 2 and p.ran.dim == 2 and p.ker.dim == 0 and p.mul.dim == 0
    p = rel.parts(MODEL_A)
    assert linalg.subspace_equal(p.dom, linalg.column_space([[1], [0]]))
    assert p.mul.dim == 0


def test_defect_examples(rng):
    d = rel.defect(MODEL_A, 1j)
    assert linalg.subspace_equal(d, linalg.column_space([[1], [1j]]))
    assert rel.defect(hermitian_graph(rng, 3), 1j).dim == 0
    assert rel.defect(LinearRelation.zero(1), 0.3 + 2j).dim == 1


def test_deficiency_indices_examples(rng):
    idx = rel.deficiency_indices(MODEL_A)
    assert (idx.n_plus, idx.n_minus) == (1, 1)
    idx = rel.deficiency_indices(hermitian_graph(rng, 3))
    assert (idx.n_plus, idx.n_minus) == (0, 0)
    idx = rel.deficiency_indices(LinearRelation.zero(1))
    assert (idx.n_plus, idx.n_minus) == (1, 1)


def test_deficiency_needs_symmetric():
    t = LinearRelation.from_operator([[1j]])
    with pytest.raises(PreconditionError, match="not symmetric"):
        rel.deficiency_indices(t)


def test_classify_examples():
    assert rel.classify(LinearRelation.from_operator([[1j]])) == "maximal-dissipative"
    assert rel.classify(LinearRelation.from_operator([[-1j]])) == "maximal-accumulative"
    assert rel.classify(LinearRelation(1, 1, np.array([[0, 1]]).T)) == "self-adjoint"
    assert rel.classify(LinearRelation.from_operator(np.diag([1.0, 2.0]))) == "self-adjoint"
    assert rel.classify(MODEL_A) == "symmetric"


def random_relation(rng, d):
    k = int(rng.integers(0, 2 * d + 1))
    return LinearRelation(d, d, cplx(rng, 2 * d, k) if k else np.zeros((2 * d, 0)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_adjoint_involution_and_duality(d, seed):
    rng = np.random.default_rng(seed)
    t = random_relation(rng, d)
    adj = rel.adjoint(t)
    assert t.dim + adj.dim == 2 * d
    assert rel.relations_equal(rel.adjoint(adj), t)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_rank_nullity_of_parts(d, seed):
    rng = np.random.default_rng(seed)
    t = random_relation(rng, d)
    p = rel.parts(t)
    assert p.dom.dim + p.mul.dim == t.dim
    assert p.ran.dim + p.ker.dim == t.dim


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_extension_monotonicity(d, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, d + 1))
    t = rel.random_symmetric(d, n, rng)
    idx = rel.deficiency_indices(t)
    assert (idx.n_plus, idx.n_minus) == (n, n)
    assert rel.adjoint(t).dim - t.dim == 2 * n
    # adding (f, i f) with f in ker(t* - i) removes f from the defect space at i
    f = rel.defect(t, 1j).basis[:, :1]
    ext = rel.extend(t, np.vstack([f, 1j * f]))
    assert ext.dim == t.dim + 1
    assert rel.defect(ext, 1j).dim == n - 1
