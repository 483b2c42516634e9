"""Operator pairs ``{(C0, C1); K}`` between boundary spaces of unequal size.

The boundary spaces satisfy ``H1 subset H0`` and ``H0 = H2 + H1``.  In
coordinates the first ``h0 - h1`` entries of a vector in H0 belong to H2 and
the last ``h1`` entries to H1, so ``C0 = (C02 : C01)`` column-wise.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InputError, InternalConsistencyError, PreconditionError
from .linalg import as_matrix, im_part
from .relation import LinearRelation, classify

SIGN_RTOL = 1e-10
EQUIV_RTOL = 1e-9

PAIR_CLASSES = ("Self", "Dis", "Ac", "Sym", "none")
# relation class that a pair class should produce
RELATION_OF_PAIR = {
    "Self": "self-adjoint",
    "Dis": "maximal-dissipative",
    "Ac": "maximal-accumulative",
    "Sym": "maximal-symmetric",
    "none": "none",
}


@dataclass(frozen=True)
class BoundarySpacePair:
    """Dimensions of the boundary spaces ``H1 subset H0``."""

    h0: int
    h1: int

    def __post_init__(self):
        if self.h1 < 0 or self.h0 < self.h1:
            raise InputError(f"need 0 <= h1 <= h0, got h0={self.h0}, h1={self.h1}")

    @property
    def h2(self):
        return self.h0 - self.h1

    @property
    def is_square(self):
        return self.h0 == self.h1

    def p1(self):
        """Orthoprojector H0 -> H1 as an ``h1 x h0`` matrix."""
        return np.hstack([np.zeros((self.h1, self.h2)), np.eye(self.h1)]).astype(complex)

    def p2(self):
        """Orthoprojector H0 -> H2 as an ``h2 x h0`` matrix."""
        return np.hstack([np.eye(self.h2), np.zeros((self.h2, self.h1))]).astype(complex)

    def embed1(self):
        """Inclusion H1 -> H0 (``h0 x h1``)."""
        return self.p1().T.copy()


@dataclass
class OperatorPair:
    """Pair ``(C0, C1)`` with ``C0 : H0 -> K`` and ``C1 : H1 -> K``."""

    spaces: BoundarySpacePair
    c0: np.ndarray
    c1: np.ndarray
    k: int = field(default=None)

    def __post_init__(self):
        self.c0 = as_matrix(self.c0, "C0")
        self.c1 = as_matrix(self.c1, "C1")
        sp = self.spaces
        if self.k is None:
            rows = [c.shape[0] for c in (self.c0, self.c1) if c.size]
            self.k = rows[0] if rows else 0
        # empty blocks arrive with arbitrary shapes from JSON
        if self.c0.size == 0:
            self.c0 = np.zeros((self.k, sp.h0), dtype=complex)
        if self.c1.size == 0:
            self.c1 = np.zeros((self.k, sp.h1), dtype=complex)
        if self.c0.shape != (self.k, sp.h0):
            raise InputError(f"C0 has shape {self.c0.shape}, expected ({self.k}, {sp.h0})")
        if self.c1.shape != (self.k, sp.h1):
            raise InputError(f"C1 has shape {self.c1.shape}, expected ({self.k}, {sp.h1})")

    @property
    def c02(self):
        return self.c0[:, : self.spaces.h2]

    @property
    def c01(self):
        return self.c0[:, self.spaces.h2:]

    def stacked(self):
        return np.hstack([self.c0, self.c1])

    def is_admissible(self):
        """``ran (C0 : C1) = K``."""
        return linalg.rank(self.stacked()) == self.k

    def transform(self, x):
        """The equivalent pair ``(X C0, X C1)`` for invertible ``X``."""
        x = as_matrix(x, "X")
        return OperatorPair(self.spaces, x @ self.c0, x @ self.c1, x.shape[0])


def s_tilde(p):
    """``2 Im(C1 C01^*) - C02 C02^*``, a Hermitian operator in K."""
    return 2 * im_part(p.c1 @ p.c01.conj().T) - p.c02 @ p.c02.conj().T


def _scale(p):
    a = p.stacked()
    if a.size == 0:
        return 1.0
    return max(linalg.spectral_norm(a) ** 2, 1e-300)


def _sign(p):
    s = s_tilde(p)
    if s.shape[0] == 0:
        return True, True
    scale = _scale(p)
    return (linalg.is_psd(s, SIGN_RTOL, scale), linalg.is_psd(-s, SIGN_RTOL, scale))


def dis_resolvent(p):
    """``C01 - i C1`` (K <- H1), invertible for pairs of class Dis."""
    return p.c01 - 1j * p.c1


def ac_resolvent(p):
    """``C0 + i C1 P1`` (K <- H0), invertible for pairs of class Ac."""
    return p.c0 + 1j * p.c1 @ p.spaces.p1()


def sym_condition(p, nonpos, ac_inv, dis_inv=False, nonneg=False):
    """Whether ``ker(C0 : C1)`` is a maximal neutral subspace of the boundary form.

    For ``h0 == h1`` this is ``S~ = 0`` together with invertibility of
    ``C0 - i C1`` or ``C0 + i C1``.  When ``h0 > h1`` a maximal neutral
    subspace has dimension ``h1``, so ``dim K = h0`` and ``S~`` is the
    (negated) Gram matrix of its form-orthogonal companion.  That companion
    is nonnegative with an ``h1``-dimensional isotropic part, which means
    ``S~ <= 0`` with rank exactly ``h2``.  For ``h2 = 0`` both readings agree.
    """
    sp = p.spaces
    if sp.h2 == 0:
        return nonneg and nonpos and (dis_inv or ac_inv)
    if not (nonpos and ac_inv):
        return False
    st = s_tilde(p)
    r = linalg.hermitian_inertia(st, SIGN_RTOL * _scale(p))
    return r.n_minus == sp.h2 and r.n_plus == 0


@dataclass(frozen=True)
class PairClassification:
    label: str
    classes: frozenset
    admissible: bool
    s_tilde_inertia: tuple


def classify_pair(p):
    """Classify an operator pair.

    The pair is in Dis when ``S~ >= 0`` and ``C01 - i C1`` is invertible, in
    Ac when ``S~ <= 0`` and ``C0 + i C1 P1`` is invertible, and in Self when
    it is in both.  For Sym see ``sym_condition``.  The label is the
    strongest class that holds.
    In the square case with ``dim K = dim H`` the sign test alone decides
    and both answers are compared.
    """
    st = s_tilde(p)
    scale = _scale(p)
    inertia = linalg.hermitian_inertia(st, SIGN_RTOL * scale).as_tuple() if st.size else (0, 0, 0)
    if not p.is_admissible():
        return PairClassification("none", frozenset(), False, inertia)
    nonneg, nonpos = _sign(p)
    dis_inv = linalg.is_invertible(dis_resolvent(p))
    ac_inv = linalg.is_invertible(ac_resolvent(p))
    classes = set()
    if nonneg and dis_inv:
        classes.add("Dis")
    if nonpos and ac_inv:
        classes.add("Ac")
    if sym_condition(p, nonpos, ac_inv, dis_inv, nonneg):
        classes.add("Sym")
    if {"Dis", "Ac"} <= classes:
        classes.add("Self")
    for label in ("Self", "Dis", "Ac", "Sym"):
        if label in classes:
            break
    else:
        label = "none"

    sp = p.spaces
    if sp.is_square and p.k == sp.h0:
        quick = set()
        if nonneg:
            quick.add("Dis")
        if nonpos:
            quick.add("Ac")
        if quick != classes & {"Dis", "Ac"}:
            raise InternalConsistencyError(
                f"square-case sign test gives {sorted(quick)}, "
                f"full test gives {sorted(classes)}")
    return PairClassification(label, frozenset(classes), True, inertia)


def dimension_constraints(p):
    """Dimension facts implied by the class: Dis needs ``dim K = h1``, Ac needs ``dim K = h0``.

    Returns a dict of the checks.  A violated check means the classification
    itself is wrong and raises ``InternalConsistencyError``.
    """
    c = classify_pair(p)
    sp = p.spaces
    checks = {"label": c.label, "k": p.k, "h0": sp.h0, "h1": sp.h1, "violations": []}
    if "Dis" in c.classes and p.k != sp.h1:
        checks["violations"].append(f"Dis pair with dim K = {p.k} != h1 = {sp.h1}")
    if "Ac" in c.classes and p.k != sp.h0:
        checks["violations"].append(f"Ac pair with dim K = {p.k} != h0 = {sp.h0}")
    if "Self" in c.classes and sp.h0 != sp.h1:
        checks["violations"].append("Self pair with h0 != h1")
    if checks["violations"]:
        raise InternalConsistencyError("; ".join(checks["violations"]))
    return checks


def pairs_equivalent(p, q, rtol=EQUIV_RTOL):
    """True when ``q = X p`` for some invertible ``X`` (least squares residual test)."""
    if p.spaces != q.spaces or p.k != q.k:
        return False
    a, b = p.stacked(), q.stacked()
    # X a = b  <=>  a^* X^* = b^*
    xh, *_ = np.linalg.lstsq(a.conj().T, b.conj().T, rcond=None)
    x = xh.conj().T
    scale = max(np.linalg.norm(b), 1.0)
    if np.linalg.norm(x @ a - b) > rtol * scale:
        return False
    return linalg.is_invertible(x)


def pair_to_relation(p):
    """Relation ``{(h0, h1) : C0 h0 + C1 h1 = 0}`` from H0 to H1."""
    sp = p.spaces
    if not p.is_admissible():
        raise PreconditionError("pair is not admissible: ran(C0 : C1) != K")
    ns = linalg.null_space(p.stacked())
    return LinearRelation(sp.h0, sp.h1, ns)


def relation_class_agrees(p):
    """In the square case, compare ``classify_pair`` with ``classify`` on the relation."""
    if not p.spaces.is_square:
        raise PreconditionError("relation classification needs h0 == h1")
    pc = classify_pair(p)
    rc = classify(pair_to_relation(p))
    want = RELATION_OF_PAIR[pc.label]
    if want == "maximal-symmetric":
        want = "self-adjoint"
    if want == "none":
        # pair classes only name maximal relations
        return not rc.startswith("maximal") and rc != "self-adjoint", pc.label, rc
    return want == rc, pc.label, rc


def random_pair(spaces, kind, rng, mix=True):
    """Random pair of a prescribed class.

    ``kind`` is ``Dis``, ``Ac``, ``Self`` or ``any``.  The normalised
    representatives come from contractions through a Cayley-type map; with
    ``mix`` they are multiplied by a random invertible ``X``.
    """
    h0, h1, h2 = spaces.h0, spaces.h1, spaces.h2

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def contraction(m, n):
        w = cplx(m, n)
        if w.size == 0:
            return w
        return w / (linalg.spectral_norm(w) * (1.0 + rng.uniform(0.05, 1.0)))

    if kind == "Dis":
        w = contraction(h1, h1 + h2)
        kk, c02 = w[:, :h1], w[:, h1:] / np.sqrt(2)
        c1 = 0.5j * (np.eye(h1) - kk)
        c01 = np.eye(h1) + 1j * c1
        c0 = np.hstack([c02, c01])
        k = h1
    elif kind == "Ac":
        d = np.diag(np.r_[np.full(h2, np.sqrt(2)), np.ones(h1)])
        ll = d @ contraction(h0, h1)
        e = np.eye(h0)
        e2, e1 = e[:, :h2], e[:, h2:]
        c1 = -0.5j * (e1 - ll)
        c0 = np.hstack([e2, e1 - 1j * c1])
        k = h0
    elif kind == "Self":
        if h0 != h1:
            raise PreconditionError(
                f"self-adjoint pairs need h0 == h1, got h0={h0}, h1={h1}")
        q, r = np.linalg.qr(cplx(h0, h0))
        v = q * (np.diag(r) / np.abs(np.diag(r)))
        c0 = np.eye(h0) - v
        c1 = 1j * (np.eye(h0) + v)
        k = h0
    elif kind == "any":
        k = int(rng.integers(1, h0 + h1 + 1)) if h0 + h1 else 0
        return OperatorPair(spaces, cplx(k, h0), cplx(k, h1), k)
    else:
        raise InputError(f"unknown pair kind {kind!r}")
    p = OperatorPair(spaces, c0.reshape(k, h0), c1.reshape(k, h1), k)
    if mix and k:
        x = cplx(k, k) + 2 * np.eye(k)
        p = p.transform(x)
    return p
