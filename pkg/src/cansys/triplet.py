"""Boundary triplets for a symmetric relation with possibly unequal deficiency indices.

A triplet ``{H0 + H1, G0, G1}`` for ``A*`` is stored through matrices acting
on coordinates of an orthonormal basis ``Q`` of ``A*`` (columns of
``adjoint_basis``, each a vector ``(f; f')`` in C^2d).  It must satisfy the
Green identity

    (f', g) - (f, g') = (G1 f, G0 g) - (G0 f, G1 g) + i (P2 G0 f, P2 G0 g),

be surjective onto ``H0 + H1`` and have ``ker G0 ∩ ker G1 = A``.
"""
from dataclasses import dataclass

import numpy as np

from . import linalg
from . import relation as rel
from .errors import (DomainError, InputError, InternalConsistencyError,
                     PreconditionError, VerificationError)
from .linalg import as_matrix
from .pairs import BoundarySpacePair, OperatorPair, classify_pair
from .relation import LinearRelation

GREEN_TOL = 1e-10
REAL_AXIS_TOL = 1e-12

# relation classes compatible with each pair label
_EXTENSION_CLASSES = {
    "Self": {"self-adjoint"},
    "Dis": {"maximal-dissipative"},
    "Ac": {"maximal-accumulative"},
    "Sym": {"maximal-symmetric", "self-adjoint"},
    "none": {"symmetric", "none"},
}


class BoundaryTriplet:
    """Boundary triplet ``{H0 + H1, G0, G1}`` for ``A*``.

    Parameters
    ----------
    base : LinearRelation
        The symmetric relation ``A`` in C^d.
    spaces : BoundarySpacePair
    g0, g1 : array_like
        ``G0`` (``h0 x m``) and ``G1`` (``h1 x m``) in the coordinates of
        ``adjoint_basis``.
    adjoint_basis : array_like, optional
        Orthonormal basis (``2d x m``) of ``A*``; computed when omitted.
    """

    def __init__(self, base, spaces, g0, g1, adjoint_basis=None):
        self.base = base
        self.spaces = spaces
        if adjoint_basis is None:
            adjoint_basis = rel.adjoint(base).graph.basis
        self.adjoint_basis = as_matrix(adjoint_basis, "adjoint_basis")
        m = self.adjoint_basis.shape[1]
        self.g0 = as_matrix(g0, "G0").reshape(spaces.h0, m)
        self.g1 = as_matrix(g1, "G1").reshape(spaces.h1, m)

    @classmethod
    def from_functionals(cls, base, spaces, g0_full, g1_full):
        """Build from maps defined on all of C^2d; they are restricted to ``A*``."""
        q = rel.adjoint(base).graph.basis
        g0_full = as_matrix(g0_full, "G0").reshape(spaces.h0, -1)
        g1_full = as_matrix(g1_full, "G1").reshape(spaces.h1, -1)
        return cls(base, spaces, g0_full @ q, g1_full @ q, q)

    @property
    def d(self):
        return self.base.dim_source

    def coords(self, vectors):
        """Coordinates in the adjoint basis of vectors ``(f; f')`` lying in ``A*``."""
        return self.adjoint_basis.conj().T @ as_matrix(vectors).reshape(2 * self.d, -1)

    def gamma0(self, vectors):
        return self.g0 @ self.coords(vectors)

    def gamma1(self, vectors):
        return self.g1 @ self.coords(vectors)

    def as_relation(self):
        """The triplet as a single-valued boundary relation ``{(f^, (G0 f^, G1 f^))}``."""
        q = self.adjoint_basis
        g = np.vstack([q, self.g0, self.g1])
        return LinearRelation(2 * self.d, self.spaces.h0 + self.spaces.h1, g)

    def swapped(self):
        """The triplet ``{H, G1, -G0}`` (only meaningful when ``h0 == h1``)."""
        if not self.spaces.is_square:
            raise PreconditionError("swapping G0 and G1 needs h0 == h1")
        return BoundaryTriplet(self.base, self.spaces, self.g1, -self.g0,
                               self.adjoint_basis)


def model_triplet():
    """The two-dimensional model: ``A = span{((1,0),(0,1))}``, ``G0 = f2``, ``G1 = f3 - f1``.

    Here ``A* = {((f1, f2), (f2, f3))}`` and the Weyl function is
    ``lam - 1/lam``.
    """
    base = LinearRelation(2, 2, np.array([[1, 0, 0, 1]]).T)
    spaces = BoundarySpacePair(1, 1)
    # coordinates of C^4 are (f1, f2, f'1, f'2) = (f1, f2, f2, f3)
    return BoundaryTriplet.from_functionals(base, spaces, [[0, 1, 0, 0]], [[-1, 0, 0, 1]])


def green_form_matrices(q_src, q_tgt, g0, g1, spaces):
    """Both sides of the Green identity as matrices of sesquilinear forms.

    Returns ``(lhs, rhs)`` with entry ``[j, k]`` the value on the pair
    (element k, element j).
    """
    lhs = q_src.conj().T @ q_tgt - q_tgt.conj().T @ q_src
    e1 = spaces.embed1()
    p2 = spaces.p2()
    g1e = e1 @ g1
    rhs = g0.conj().T @ g1e - g1e.conj().T @ g0 + 1j * (p2 @ g0).conj().T @ (p2 @ g0)
    return lhs, rhs


@dataclass
class TripletReport:
    valid: bool
    failed_clause: str
    green_residual: float
    rank: int
    n_plus: int
    n_minus: int
    kernel_matches: bool
    messages: list

    def to_dict(self):
        return dict(valid=self.valid, failed_clause=self.failed_clause,
                    green_residual=self.green_residual, rank=self.rank,
                    n_plus=self.n_plus, n_minus=self.n_minus,
                    kernel_matches=self.kernel_matches, messages=self.messages)


def verify_triplet(t, raise_on_failure=False):
    """Check the defining properties of a boundary triplet.

    Clauses are checked in the order: adjoint basis, Green identity,
    surjectivity, index dimensions ``h1 = n- <= n+ = h0``, and
    ``ker G0 ∩ ker G1 = A``.  The report names the first clause that fails.
    """
    sp = t.spaces
    d = t.d
    msgs = []
    failed = None
    q = t.adjoint_basis

    adj = rel.adjoint(t.base)
    basis_ok = linalg.subspace_equal(linalg.column_space(q), adj.graph)
    if not basis_ok:
        failed = failed or "adjoint-basis"
        msgs.append("adjoint_basis does not span A*")

    lhs, rhs = green_form_matrices(q[:d], q[d:], t.g0, t.g1, sp)
    scale = max(1.0, linalg.spectral_norm(np.vstack([t.g0, t.g1])) ** 2)
    green = float(np.max(np.abs(lhs - rhs))) / scale if lhs.size else 0.0
    if green > GREEN_TOL:
        failed = failed or "green-identity"
        msgs.append(f"Green identity residual {green:.3e}")

    stacked = np.vstack([t.g0, t.g1])
    r = linalg.rank(stacked)
    if r != sp.h0 + sp.h1:
        failed = failed or "surjectivity"
        msgs.append(f"rank [G0; G1] = {r} < h0 + h1 = {sp.h0 + sp.h1}")

    try:
        idx = rel.deficiency_indices(t.base)
        n_plus, n_minus = idx.n_plus, idx.n_minus
    except PreconditionError as exc:
        n_plus = n_minus = -1
        failed = failed or "base-symmetric"
        msgs.append(str(exc))
    if (n_plus, n_minus) != (sp.h0, sp.h1):
        failed = failed or "dimensions"
        msgs.append(f"(h0, h1) = ({sp.h0}, {sp.h1}) but (n+, n-) = ({n_plus}, {n_minus})")

    kern = linalg.null_space(stacked, 1e-10 * max(1.0, linalg.spectral_norm(stacked)))
    kern_graph = linalg.column_space(q @ kern.basis) if kern.dim else linalg.zero_space(2 * d)
    kernel_ok = linalg.subspace_equal(kern_graph, t.base.graph)
    if not kernel_ok:
        failed = failed or "kernel"
        msgs.append("ker G0 ∩ ker G1 differs from A")

    report = TripletReport(failed is None, failed, green, r, n_plus, n_minus, kernel_ok, msgs)
    if raise_on_failure and not report.valid:
        raise VerificationError(f"not a boundary triplet: {failed}: {'; '.join(msgs)}",
                                clause=failed, report=report)
    return report


def extension_from_pair(t, p, check=True):
    """Extension ``A_tau = {f^ in A* : C0 G0 f^ + C1 G1 f^ = 0}``.

    With ``check`` the class of the resulting relation is compared with the
    class of the pair (maximal dissipative for Dis, maximal accumulative for
    Ac, self-adjoint for Self, maximal symmetric for Sym).
    """
    if p.spaces != t.spaces:
        raise InputError("pair and triplet use different boundary spaces")
    if not np.any(p.stacked()):
        raise PreconditionError("the zero pair does not define an extension")
    if not p.is_admissible():
        raise PreconditionError("pair is not admissible: ran(C0 : C1) != K")
    cond = p.c0 @ t.g0 + p.c1 @ t.g1
    coeff = linalg.null_space(cond, 1e-10 * max(1.0, linalg.spectral_norm(cond)))
    ext = LinearRelation(t.d, t.d, t.adjoint_basis @ coeff.basis)
    if check:
        pc = classify_pair(p).label
        rc = rel.classify(ext)
        if rc not in _EXTENSION_CLASSES[pc]:
            raise InternalConsistencyError(
                f"pair class {pc} but extension classified as {rc}")
    return ext


def pair_from_extension(t, ext):
    """Inverse of ``extension_from_pair``: the relation ``{(G0 f^, G1 f^) : f^ in ext}``."""
    a = t.coords(ext.graph.basis)
    vals = np.vstack([t.g0 @ a, t.g1 @ a])
    sp = t.spaces
    ran = linalg.column_space(vals, 1e-10 * max(1.0, linalg.spectral_norm(vals)))
    tau = LinearRelation(sp.h0, sp.h1, ran.basis)
    # represent tau = ker(C0 : C1) with C the annihilator rows
    rows = tau.graph.complement().basis.conj().T
    k = rows.shape[0]
    return OperatorPair(sp, rows[:, : sp.h0], rows[:, sp.h0:], k)


def kernel_extension(t):
    """``A0 = ker G0`` as a relation in C^d."""
    coeff = linalg.null_space(t.g0, 1e-10 * max(1.0, linalg.spectral_norm(t.g0)))
    return LinearRelation(t.d, t.d, t.adjoint_basis @ coeff.basis)


@dataclass
class WeylSample:
    """Weyl function and gamma field at one point.

    For ``Im lam > 0`` ``m`` is ``M+(lam) : H0 -> H1`` and ``gamma`` is
    ``d x h0``; for ``Im lam < 0`` ``m`` is ``M-(lam) : H1 -> H0`` and
    ``gamma`` is ``d x h1``.
    """

    lam: complex
    m: np.ndarray
    gamma: np.ndarray
    sign: int


def _check_off_axis(lam):
    lam = complex(lam)
    if abs(lam.imag) <= REAL_AXIS_TOL * max(1.0, abs(lam)):
        raise DomainError(f"Weyl function needs Im lambda != 0, got {lam}")
    return lam


def defect_boundary_values(t, lam):
    """Defect basis ``F`` at ``lam`` and the values of ``G0``, ``G1`` on ``(F, lam F)``."""
    f = rel.defect(t.base, lam).basis
    a = t.coords(np.vstack([f, lam * f]))
    return f, t.g0 @ a, t.g1 @ a


def weyl(t, lam):
    """Weyl function and gamma field of a triplet.

    For ``Im lam > 0``: ``G1 = M+(lam) G0`` on the defect elements and
    ``gamma = pi1 (G0 restricted)^{-1}``.  For ``Im lam < 0``:
    ``(G1 + i P2 G0) = M-(lam) P1 G0`` on the defect elements, computed
    directly rather than by conjugating ``M+``.
    """
    lam = _check_off_axis(lam)
    sp = t.spaces
    f, v0, v1 = defect_boundary_values(t, lam)
    if lam.imag > 0:
        if v0.shape[0] != v0.shape[1] or not linalg.is_invertible(v0):
            raise VerificationError("G0 is not an isomorphism on the defect elements",
                                    clause="weyl")
        inv = np.linalg.inv(v0)
        return WeylSample(lam, v1 @ inv, f @ inv, +1)
    p1v0 = sp.p1() @ v0
    if p1v0.shape[0] != p1v0.shape[1] or not linalg.is_invertible(p1v0):
        raise VerificationError("P1 G0 is not an isomorphism on the defect elements",
                                clause="weyl")
    inv = np.linalg.inv(p1v0)
    top = np.vstack([1j * (sp.p2() @ v0), v1])
    return WeylSample(lam, top @ inv, f @ inv, -1)


def block_weyl(m_plus, spaces, sign=+1):
    """Square operator function on H0 built from ``M+`` (or ``M-``).

    For the upper half-plane with ``M+ = (N+ : M) : H2 + H1 -> H1`` this is
    ``[[i/2 I, 0], [N+, M]]``; for the lower half-plane with
    ``M- = (N- ; M)`` it is ``[[-i/2 I, N-], [0, M]]``.
    """
    h2, h1 = spaces.h2, spaces.h1
    out = np.zeros((spaces.h0, spaces.h0), dtype=complex)
    if sign > 0:
        out[:h2, :h2] = 0.5j * np.eye(h2)
        out[h2:, :] = m_plus
    else:
        out[:h2, :h2] = -0.5j * np.eye(h2)
        out[:, h2:] = m_plus
    return out


def nevanlinna_margin(t, lam):
    """Smallest eigenvalue of ``Im calM(lam) / Im lam`` (nonnegative for a triplet)."""
    lam = complex(lam)
    s = weyl(t, lam)
    big = block_weyl(s.m, t.spaces, s.sign)
    w = np.linalg.eigvalsh(linalg.im_part(big) / lam.imag)
    return float(w[0]) if w.size else 0.0


def gamma_identity_residual(t, lam, mu):
    """``calM(mu) - calM(lam)^* - (mu - conj lam) gamma(lam)^* gamma(mu)`` for ``lam, mu`` upper.

    In the square case either point may lie in either half-plane.
    """
    s_l, s_m = weyl(t, lam), weyl(t, mu)
    sp = t.spaces
    if not sp.is_square and (s_l.sign < 0 or s_m.sign < 0):
        raise PreconditionError("with h0 != h1 both points must lie in the upper half-plane")
    big_l = block_weyl(s_l.m, sp, s_l.sign)
    big_m = block_weyl(s_m.m, sp, s_m.sign)
    lhs = big_m - big_l.conj().T
    rhs = (complex(mu) - np.conj(complex(lam))) * s_l.gamma.conj().T @ s_m.gamma
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


def canonical_triplet(base):
    """A boundary triplet for ``A*`` built from the boundary form of ``A*``.

    The Hermitian form ``-i((f', g) - (f, g'))`` on ``A*`` has ``n`` positive,
    ``n`` negative and ``dim A`` zero eigenvalues.  With ``u``, ``v`` the
    weighted coordinates along the positive and negative eigenvectors,
    ``G0 = (u + v)/sqrt 2`` and ``G1 = i (u - v)/sqrt 2`` satisfy the Green
    identity.
    """
    q = rel.adjoint(base).graph.basis
    d = base.dim_source
    lhs = q[:d].conj().T @ q[d:] - q[d:].conj().T @ q[:d]
    w, v = np.linalg.eigh(-1j * lhs)
    thr = 1e-10
    pos, neg = w > thr, w < -thr
    if pos.sum() != neg.sum():
        raise PreconditionError("boundary form of A* is not balanced")
    u = np.sqrt(w[pos])[:, None] * v[:, pos].conj().T
    vv = np.sqrt(-w[neg])[:, None] * v[:, neg].conj().T
    n = int(pos.sum())
    g0 = (u + vv) / np.sqrt(2)
    g1 = 1j * (u - vv) / np.sqrt(2)
    return BoundaryTriplet(base, BoundarySpacePair(n, n), g0, g1, q)


def random_triplet(d, n, rng, mul_dim=0):
    """Random boundary triplet for a random symmetric relation with indices ``(n, n)``.

    The canonical triplet is transformed by ``G0 -> X G0``,
    ``G1 -> X^{-*}(G1 + H G0)`` with random invertible ``X`` and Hermitian
    ``H``, which preserves the Green identity.
    """
    base = rel.random_symmetric(d, n, rng, mul_dim)
    t = canonical_triplet(base)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 2 * np.eye(n)
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (h + h.conj().T) / 2
    g0 = x @ t.g0
    g1 = np.linalg.inv(x).conj().T @ (t.g1 + h @ t.g0)
    return BoundaryTriplet(base, t.spaces, g0, g1, t.adjoint_basis)
