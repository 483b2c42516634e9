"""Finite-dimensional linear relations (multivalued operators).

A relation from C^d0 to C^d1 is a subspace of C^d0 + C^d1, stored through an
orthonormal basis of its graph.  Graph vectors are stacked as
``(source; target)``.  The inner product is linear in the first slot,
``(u, v) = v^* u``.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InputError, PreconditionError, InternalConsistencyError
from .linalg import Subspace, as_matrix, column_space, null_space

# Graph bases are orthonormal, so forms evaluated on them are scale free
# and these thresholds are absolute.
FORM_TOL = 1e-10
COORD_TOL = 1e-10

CLASSES = ("self-adjoint", "maximal-dissipative", "maximal-accumulative",
           "maximal-symmetric", "symmetric", "none")


class LinearRelation:
    """Linear relation ``t`` from C^dim_source to C^dim_target.

    Parameters
    ----------
    dim_source, dim_target : int
    graph : Subspace or array_like
        Graph subspace of C^(dim_source + dim_target), or a matrix whose
        columns span it.
    """

    def __init__(self, dim_source, dim_target, graph, tol=0.0):
        n = dim_source + dim_target
        if not isinstance(graph, Subspace):
            g = as_matrix(graph, "graph").reshape(n, -1)
            graph = column_space(g, tol)
        if graph.ambient_dim != n:
            raise InputError(
                f"graph lives in C^{graph.ambient_dim}, expected C^{n}")
        self.dim_source = int(dim_source)
        self.dim_target = int(dim_target)
        self.graph = graph

    @classmethod
    def from_operator(cls, t):
        """Graph of a matrix ``t`` (d1 x d0)."""
        t = as_matrix(t, "operator")
        d1, d0 = t.shape
        return cls(d0, d1, np.vstack([np.eye(d0), t]))

    @classmethod
    def zero(cls, d):
        """The relation {(0, 0)} in C^d."""
        return cls(d, d, linalg.zero_space(2 * d))

    @property
    def dim(self):
        return self.graph.dim

    @property
    def source_block(self):
        return self.graph.basis[: self.dim_source]

    @property
    def target_block(self):
        return self.graph.basis[self.dim_source:]

    def is_square(self):
        return self.dim_source == self.dim_target

    def __repr__(self):
        return (f"LinearRelation({self.dim_source} -> {self.dim_target}, "
                f"dim={self.dim})")


def _require_square(t):
    if not t.is_square():
        raise PreconditionError("operation needs a relation in one space (d0 == d1)")


def pairing_matrix(t):
    """Matrix of the skew form (f', g) - (f, g') over the graph basis of ``t``.

    Entry ``[j, k]`` equals ``(f'_k, f_j) - (f_k, f'_j)``.
    """
    b1, b2 = t.source_block, t.target_block
    return b1.conj().T @ b2 - b2.conj().T @ b1


def imaginary_form(t):
    """Hermitian matrix of ``Im (f', f)`` over the graph basis of ``t``."""
    return pairing_matrix(t) / 2j


def adjoint(t):
    """Adjoint relation ``t* = {(g, g') : (f', g) = (f, g') for all (f, f') in t}``.

    Obtained as the null space of the rows ``[f'^*, -f^*]``.
    """
    _require_square(t)
    b1, b2 = t.source_block, t.target_block
    rows = np.hstack([b2.conj().T, -b1.conj().T])
    if rows.shape[0] == 0:
        return LinearRelation(t.dim_source, t.dim_target,
                              linalg.full_space(2 * t.dim_source))
    return LinearRelation(t.dim_source, t.dim_target, null_space(rows, COORD_TOL))


@dataclass(frozen=True)
class RelationParts:
    dom: Subspace
    ran: Subspace
    ker: Subspace
    mul: Subspace


def parts(t):
    """Domain, range, kernel and multivalued part of ``t``."""
    b1, b2 = t.source_block, t.target_block
    dom = column_space(b1, COORD_TOL)
    ran = column_space(b2, COORD_TOL)
    if t.dim == 0:
        ker = linalg.zero_space(t.dim_source)
        mul = linalg.zero_space(t.dim_target)
    else:
        ker = column_space(b1 @ null_space(b2, COORD_TOL).basis, COORD_TOL)
        mul = column_space(b2 @ null_space(b1, COORD_TOL).basis, COORD_TOL)
    return RelationParts(dom, ran, ker, mul)


def inverse(t):
    g = t.graph.basis
    swapped = np.vstack([g[t.dim_source:], g[: t.dim_source]])
    return LinearRelation(t.dim_target, t.dim_source, swapped)


def shift(t, lam):
    """The relation ``t - lam = {(f, f' - lam f)}``."""
    _require_square(t)
    b1, b2 = t.source_block, t.target_block
    return LinearRelation(t.dim_source, t.dim_target, np.vstack([b1, b2 - lam * b1]))


def eigenspace(t, lam):
    """``ker(t - lam) = {f : (f, lam f) in t}``."""
    _require_square(t)
    b1, b2 = t.source_block, t.target_block
    if t.dim == 0:
        return linalg.zero_space(t.dim_source)
    coeff = null_space(b2 - lam * b1, COORD_TOL).basis
    return column_space(b1 @ coeff, COORD_TOL)


def defect(t, lam, check=True):
    """Defect subspace ``ker(t* - lam)`` at a point ``lam``.

    It is computed twice: as an eigenspace of the adjoint, and as the
    orthogonal complement of ``ran(t - conj(lam))``.  With ``check`` the two
    results must coincide.
    """
    _require_square(t)
    d = t.dim_source
    via_adjoint = eigenspace(adjoint(t), lam)
    b1, b2 = t.source_block, t.target_block
    rng = b2 - np.conj(lam) * b1
    if rng.shape[1] == 0:
        via_range = linalg.full_space(d)
    else:
        via_range = null_space(rng.conj().T, COORD_TOL)
    if check and not linalg.subspace_equal(via_adjoint, via_range, 1e-7):
        raise InternalConsistencyError(
            f"defect space at {lam}: adjoint route gives dim {via_adjoint.dim}, "
            f"range route gives dim {via_range.dim}")
    return via_adjoint


def symmetry_violation(t):
    """Largest entry of the skew form on ``t`` and the offending basis pair."""
    w = pairing_matrix(t)
    if w.size == 0:
        return 0.0, None
    j, k = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    return float(np.abs(w[j, k])), (int(j), int(k))


def is_symmetric(t, tol=FORM_TOL):
    return symmetry_violation(t)[0] <= tol


@dataclass(frozen=True)
class DeficiencyIndices:
    n_plus: int
    n_minus: int


def deficiency_indices(t):
    """Deficiency indices ``(dim ker(t* - i), dim ker(t* + i))`` of a symmetric relation.

    Raises
    ------
    PreconditionError
        When ``t`` is not symmetric; the message carries the violating pair
        of basis vectors and the size of the violation.
    """
    _require_square(t)
    viol, pair = symmetry_violation(t)
    if viol > FORM_TOL:
        b = t.graph.basis
        raise PreconditionError(
            f"relation is not symmetric: basis pair {pair} gives "
            f"(f',g) - (f,g') of size {viol:.3e}; "
            f"elements {b[:, pair[0]].round(6).tolist()} and "
            f"{b[:, pair[1]].round(6).tolist()}")
    n_plus = defect(t, 1j).dim
    n_minus = defect(t, -1j).dim
    dim_adj = adjoint(t).dim
    if dim_adj - t.dim != n_plus + n_minus:
        raise InternalConsistencyError(
            f"dim t* - dim t = {dim_adj - t.dim} but n+ + n- = {n_plus + n_minus}")
    return DeficiencyIndices(n_plus, n_minus)


def is_dissipative(t, tol=FORM_TOL):
    return linalg.is_psd(imaginary_form(t), rtol=tol, scale=1.0) if t.dim else True


def is_accumulative(t, tol=FORM_TOL):
    return linalg.is_psd(-imaginary_form(t), rtol=tol, scale=1.0) if t.dim else True


def classify(t):
    """Strongest class of a relation in C^d.

    Returns one of ``self-adjoint``, ``maximal-dissipative``,
    ``maximal-accumulative``, ``maximal-symmetric``, ``symmetric`` or ``none``.
    In finite dimensions a dissipative relation is maximal exactly when its
    dimension is ``d``.  A maximal symmetric relation in C^d is already
    self-adjoint, so ``maximal-symmetric`` only shows up for degenerate input.
    """
    _require_square(t)
    d = t.dim_source
    sym = is_symmetric(t)
    if sym and linalg.subspace_equal(t.graph, adjoint(t).graph):
        return "self-adjoint"
    if t.dim == d:
        if is_dissipative(t):
            return "maximal-dissipative"
        if is_accumulative(t):
            return "maximal-accumulative"
    if sym:
        n_plus = defect(t, 1j).dim
        n_minus = defect(t, -1j).dim
        if min(n_plus, n_minus) == 0:
            return "maximal-symmetric"
        return "symmetric"
    return "none"


def extend(t, vectors):
    """Relation spanned by ``t`` and extra graph vectors (columns)."""
    v = as_matrix(vectors).reshape(t.dim_source + t.dim_target, -1)
    return LinearRelation(t.dim_source, t.dim_target,
                          np.hstack([t.graph.basis, v]), tol=COORD_TOL)


def relations_equal(s, t, angle_tol=linalg.ANGLE_TOL):
    return (s.dim_source == t.dim_source and s.dim_target == t.dim_target
            and linalg.subspace_equal(s.graph, t.graph, angle_tol))


def contains(t, s, tol=linalg.INTERSECT_TOL):
    """True when ``s`` is a subset of ``t``."""
    return t.graph.contains(s.graph.basis, tol) if s.dim else True


def resolvent(t, mu):
    """Matrix of ``(t - mu)^{-1}`` when it is an everywhere defined operator."""
    _require_square(t)
    b1, b2 = t.source_block, t.target_block
    m = b2 - mu * b1
    if m.shape[0] != m.shape[1] or not linalg.is_invertible(m):
        raise PreconditionError(f"{mu} is not in the resolvent set")
    return b1 @ np.linalg.inv(m)


def random_self_adjoint(d, rng, mul_dim=0):
    """Random self-adjoint relation in C^d with a multivalued part of dimension ``mul_dim``."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, _ = np.linalg.qr(z)
    dom, mul = q[:, : d - mul_dim], q[:, d - mul_dim:]
    r = d - mul_dim
    h = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    h = (h + h.conj().T) / 2
    op = np.vstack([dom, dom @ h])
    mv = np.vstack([np.zeros((d, mul_dim)), mul])
    return LinearRelation(d, d, np.hstack([op, mv]))


def random_symmetric(d, n, rng, mul_dim=0):
    """Random symmetric relation in C^d with deficiency indices ``(n, n)``.

    It is a random ``d - n`` dimensional subspace of a random self-adjoint
    relation.
    """
    if not 0 <= n <= d:
        raise InputError(f"need 0 <= n <= d, got n={n}, d={d}")
    s = random_self_adjoint(d, rng, mul_dim)
    c = rng.standard_normal((d, d - n)) + 1j * rng.standard_normal((d, d - n))
    return LinearRelation(d, d, s.graph.basis @ c)
