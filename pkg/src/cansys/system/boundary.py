"""Decomposing boundary triplet, Weyl function and boundary conditions.

Boundary data of an element ``y`` of the maximal relation are the stacked
values ``v = (y(a); y(b))`` in C^2n.  In the coordinates ``U^* y`` that bring
``J`` to normal form they split as ``(y0, y^, y1)`` at each endpoint and the
decomposing triplet reads

    Gamma0 y = (y0(a), (i delta / sqrt 2)(y^(a) - y^(b)), y0(b))
    Gamma1 y = (y1(a), (y^(a) + y^(b)) / sqrt 2, -y1(b)).

A truncated endpoint ``b`` is handled as if it were regular.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import linalg
from ..errors import (DomainError, ImpossibleConditionError, InconclusiveError, InputError,
                      InternalConsistencyError, PreconditionError, VerificationError)
from ..linalg import Subspace, as_matrix
from ..pairs import BoundarySpacePair, OperatorPair, classify_pair
from .indices import boundary_form_inertia, null_manifold
from .model import signature_decompose, signature_of
from .solve import FundamentalSolution, SolutionFamily, delta_gram, transfer_batch

CLASS_OF_PAIR = {"Self": "self-adjoint", "Dis": "maximal-dissipative",
                 "Ac": "maximal-accumulative", "Sym": "self-adjoint", "none": "none"}
BC_CLASSES = ("self-adjoint", "maximal-dissipative", "maximal-accumulative", "none")
SQ2 = np.sqrt(2.0)


def _normal_maps(sig):
    """``(G0, G1)`` of the decomposing triplet on normal coordinates of ``(y(a); y(b))``."""
    n = sig.U.shape[0]
    s0, sh, s1 = sig.slices
    h, hh = sig.dim_H, sig.dim_Hhat
    g0 = np.zeros((n, 2 * n), dtype=complex)
    g1 = np.zeros((n, 2 * n), dtype=complex)
    eh = np.eye(h)
    ehh = np.eye(hh)
    a0, ah, a1 = (np.arange(n)[s] for s in (s0, sh, s1))
    b0, bh, b1 = (n + np.arange(n)[s] for s in (s0, sh, s1))
    r0, rh, r1 = np.arange(h), h + np.arange(hh), h + hh + np.arange(h)
    g0[np.ix_(r0, a0)] = eh
    g0[np.ix_(rh, ah)] = 1j * sig.delta / SQ2 * ehh
    g0[np.ix_(rh, bh)] = -1j * sig.delta / SQ2 * ehh
    g0[np.ix_(r1, b0)] = eh
    g1[np.ix_(r0, a1)] = eh
    g1[np.ix_(rh, ah)] = ehh / SQ2
    g1[np.ix_(rh, bh)] = ehh / SQ2
    g1[np.ix_(r1, b1)] = -eh
    return g0, g1


def endpoint_form(J):
    """Matrix of ``[y, z]_b - [y, z]_a`` on boundary data: ``diag(-J, J)``."""
    n = J.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = -J
    out[n:, n:] = J
    return out


@dataclass
class DecomposingTriplet:
    """Boundary maps of the decomposing triplet.

    ``g0``/``g1`` act on normal coordinates of ``(y(a); y(b))``; ``gamma0``/
    ``gamma1`` on the raw values.  For an indefinite system ``mul`` is the
    multivalued part ``{(Gamma0 y, Gamma1 y) : y in N}`` of the boundary
    relation and ``n_gamma`` its dimension.
    """

    sig: object
    g0: np.ndarray
    g1: np.ndarray
    gamma0: np.ndarray
    gamma1: np.ndarray
    green_residual: float
    k_N: int
    mul: Subspace
    spaces: BoundarySpacePair

    @property
    def n_gamma(self):
        return self.mul.dim

    @property
    def is_triplet(self):
        return self.n_gamma == 0

    def to_dict(self):
        return dict(kind="triplet" if self.is_triplet else "relation",
                    dim_H=self.sig.dim_H, dim_Hhat=self.sig.dim_Hhat, delta=self.sig.delta,
                    green_residual=self.green_residual, n_gamma=self.n_gamma)


def decomposing_triplet(s, nm=None, Y0=None):
    """Decomposing boundary triplet (or relation, when the system is indefinite).

    Raises
    ------
    VerificationError
        If the endpoint inertia violates ``nu_b+ - nu_b- = nu_- - nu_+``,
        the condition for equal deficiency indices.
    """
    sig = signature_decompose(s)
    n = s.n
    Y0 = Y0 if Y0 is not None else FundamentalSolution(s, 0.0)
    inert = boundary_form_inertia(s, Y0)
    if inert.nu_b_plus - inert.nu_b_minus != sig.nu_minus - sig.nu_plus:
        raise VerificationError(
            "endpoint inertia violates nu_b+ - nu_b- = nu_- - nu_+ (equal deficiency indices)",
            clause="endpoint-inertia")
    g0, g1 = _normal_maps(sig)
    uh = np.zeros((2 * n, 2 * n), dtype=complex)
    uh[:n, :n] = sig.U.conj().T
    uh[n:, n:] = sig.U.conj().T
    gamma0, gamma1 = g0 @ uh, g1 @ uh
    lhs = endpoint_form(s.J)
    rhs = gamma0.conj().T @ gamma1 - gamma1.conj().T @ gamma0
    green = float(np.max(np.abs(lhs - rhs)))
    if green > s.tol.green_tol:
        raise InternalConsistencyError(f"decomposing triplet Green residual {green:.3e}")
    nm = nm if nm is not None else null_manifold(s, Y0)
    if nm.k:
        c = nm.basis.basis
        v = np.vstack([c, Y0.end @ c])
        mul = linalg.column_space(np.vstack([gamma0 @ v, gamma1 @ v]), 1e-10)
    else:
        mul = linalg.zero_space(2 * n)
    return DecomposingTriplet(sig, g0, g1, gamma0, gamma1, green, nm.k, mul,
                              BoundarySpacePair(n, n))


@dataclass
class WeylValue:
    lam: complex
    M: np.ndarray
    cond: float
    flagged: bool


def _require_definite(dt):
    if not dt.is_triplet:
        raise PreconditionError(
            f"the system is not definite (null manifold of dimension {dt.k_N}); "
            "the Weyl function needs a boundary triplet")


def _weyl_from_end(dt, yb, lam, tol):
    n = yb.shape[0]
    bd = np.vstack([np.eye(n), yb])
    a0, a1 = dt.gamma0 @ bd, dt.gamma1 @ bd
    cond = linalg.condition_number(a0)
    if not np.isfinite(cond) or cond > 1.0 / tol.invert_rtol:
        raise InternalConsistencyError(
            f"Gamma0 B(lambda) is singular at lambda = {lam}; a non-real eigenvalue of ker Gamma0")
    m = np.linalg.solve(a0.T, a1.T).T
    return WeylValue(complex(lam), m, float(cond), bool(cond > tol.weyl_cond_flag))


def weyl_function(s, lam, dt=None):
    """``M(lam) = (Gamma1 B(lam)) (Gamma0 B(lam))^{-1}`` with ``B(lam)`` the boundary data of ``Y(., lam)``."""
    lam = complex(lam)
    if lam.imag == 0:
        raise DomainError(f"Weyl function needs Im lambda != 0, got {lam}")
    dt = dt if dt is not None else decomposing_triplet(s)
    _require_definite(dt)
    yb = FundamentalSolution(s, lam).end
    return _weyl_from_end(dt, yb, lam, s.tol)


def weyl_sweep(s, lams, dt=None):
    """Weyl function at many points with one batched integration."""
    lams = np.asarray(lams, dtype=complex)
    if np.any(lams.imag == 0):
        raise DomainError("Weyl function needs Im lambda != 0 at every sample")
    dt = dt if dt is not None else decomposing_triplet(s)
    _require_definite(dt)
    ends = transfer_batch(s, lams)
    return [_weyl_from_end(dt, ends[i], lams[i], s.tol) for i in range(len(lams))]


def nevanlinna_summary(values):
    """Worst ``min eig(Im M / Im lam)`` and worst ``||M(conj lam) - M(lam)^*||`` over pairs present."""
    worst_im = np.inf
    for v in values:
        w = np.linalg.eigvalsh(linalg.im_part(v.M) / v.lam.imag)
        worst_im = min(worst_im, float(w[0]))
    by_lam = {v.lam: v for v in values}
    worst_sym = 0.0
    for v in values:
        other = by_lam.get(np.conj(v.lam))
        if other is not None:
            worst_sym = max(worst_sym, float(np.linalg.norm(other.M - v.M.conj().T, 2)))
    return {"min_im_eig": worst_im, "conj_symmetry": worst_sym,
            "flagged": sum(v.flagged for v in values)}


@dataclass
class BoundaryCondition:
    """``C_a y(a) + C_b Gamma_b y = 0`` with ``Gamma_b`` built for the signature ``Jb``.

    When ``Jb`` equals ``J`` (the default) ``Gamma_b y = y(b)``.
    ``separated`` holds the blocks ``{"a": (N0, Nhat, N1), "b": (N0, Nhat, N1)}``
    in normal coordinates when the condition was given in separated form;
    ``request`` optionally names the class the caller asks for.
    """

    Ca: np.ndarray
    Cb: np.ndarray
    Jb: Optional[np.ndarray] = None
    separated: Optional[dict] = None
    request: Optional[str] = None

    @property
    def k(self):
        return self.Ca.shape[0]


def _gamma_b(s, bc):
    """Matrix ``W`` with ``Gamma_b y = W y(b)`` and the normal-form unitary of ``Jb``."""
    sig = signature_decompose(s)
    if bc.Jb is None:
        return np.eye(s.n, dtype=complex), sig.U
    jb = as_matrix(bc.Jb, "Jb")
    if jb.shape != s.J.shape:
        raise InputError(f"Jb must be {s.n} x {s.n} for a regular endpoint b, got {jb.shape}")
    sb = signature_of(jb)
    if (sb.nu_plus, sb.nu_minus) != (sig.nu_plus, sig.nu_minus):
        raise InputError("Jb must have the same signature as J at a regular endpoint")
    w = sb.U @ sig.U.conj().T
    return w, sb.U


def check_condition(s, bc):
    ca = as_matrix(bc.Ca, "Ca")
    cb = as_matrix(bc.Cb, "Cb")
    if ca.shape[1] != s.n or cb.shape[1] != s.n or ca.shape[0] != cb.shape[0]:
        raise InputError(f"Ca and Cb must both be k x {s.n}, got {ca.shape} and {cb.shape}")
    if ca.shape[0] != s.n:
        raise InputError(f"dim K must equal the deficiency index {s.n}, got {ca.shape[0]}")
    if linalg.rank(np.hstack([ca, cb])) != ca.shape[0]:
        raise VerificationError("boundary condition is not admissible: rank(Ca : Cb) < dim K",
                                clause="admissibility")
    return ca, cb


def tilde_pair(s, bc):
    """The operator pair ``(C~0, C~1)`` with ``C~0 Gamma0 + C~1 Gamma1 = C_a y(a) + C_b Gamma_b y``."""
    sig = signature_decompose(s)
    ca, cb = as_matrix(bc.Ca), as_matrix(bc.Cb)
    _, ub = _gamma_b(s, bc)
    pa, pb = ca @ sig.U, cb @ ub
    s0, sh, s1 = sig.slices
    d = sig.delta
    c0 = np.hstack([pa[:, s0], -1j * d / SQ2 * (pa[:, sh] - pb[:, sh]), pb[:, s0]])
    c1 = np.hstack([pa[:, s1], (pa[:, sh] + pb[:, sh]) / SQ2, -pb[:, s1]])
    return OperatorPair(BoundarySpacePair(s.n, s.n), c0, c1, ca.shape[0])


def _clean(vals, thr):
    return [0.0 if abs(x) <= thr else float(x) for x in vals]


@dataclass
class ConditionReport:
    cls: str
    D: np.ndarray
    D_eigenvalues: list
    pair_class: str
    form_identity_residual: float
    oracle_class: Optional[str] = None

    def to_dict(self):
        out = {"class": self.cls, "D_eigenvalues": list(self.D_eigenvalues),
               "pair_class": self.pair_class,
               "form_identity_residual": self.form_identity_residual}
        if self.oracle_class is not None:
            out["oracle_class"] = self.oracle_class
        return out


def sign_class(D, tol):
    """Class from the sign of ``D = i(C_a J C_a^* - C_b J_b C_b^*)``."""
    thr = tol * max(1.0, np.linalg.norm(D, 2))
    w = np.linalg.eigvalsh(D)
    if np.all(np.abs(w) <= thr):
        return "self-adjoint", w, thr
    if w[-1] <= thr:
        return "maximal-dissipative", w, thr
    if w[0] >= -thr:
        return "maximal-accumulative", w, thr
    return "none", w, thr


def classify_boundary_condition(s, bc, dt=None, oracle=None):
    """Classify the extension defined by ``C_a y(a) + C_b Gamma_b y = 0``.

    Two routes are always computed and must agree: the sign of
    ``D = i(C_a J C_a^* - C_b J_b C_b^*)`` and ``classify_pair`` on the pair
    ``(C~0, C~1)`` written against the decomposing triplet.  With an
    ``oracle`` (``RelationOracle``) a third, quadrature-based verdict is
    added and compared as well.
    """
    dt = dt if dt is not None else decomposing_triplet(s)
    _require_definite(dt)
    ca, cb = check_condition(s, bc)
    w, _ = _gamma_b(s, bc)
    jb = s.J if bc.Jb is None else as_matrix(bc.Jb)
    D = 1j * (ca @ s.J @ ca.conj().T - cb @ jb @ cb.conj().T)
    D = 0.5 * (D + D.conj().T)
    cls, eig, thr = sign_class(D, s.tol.sign_tol)

    pair = tilde_pair(s, bc)
    # 2 Im(C~1 C~0^*) must equal -D
    ident = float(np.max(np.abs(2 * linalg.im_part(pair.c1 @ pair.c0.conj().T) + D)))
    scale = max(1.0, np.linalg.norm(np.hstack([ca, cb]), 2) ** 2)
    if ident > 1e-10 * scale:
        raise InternalConsistencyError(f"2 Im(C~1 C~0^*) differs from -D by {ident:.3e}")
    pc = classify_pair(pair)
    pair_cls = CLASS_OF_PAIR[pc.label]
    if pair_cls != cls:
        raise InternalConsistencyError(
            f"sign test gives {cls} but the operator-pair route gives {pair_cls}")
    oc = None
    if oracle is not None:
        oc = oracle.classify(bc)
        if oc != cls:
            raise InternalConsistencyError(
                f"sign test gives {cls} but the relation-level oracle gives {oc}")
    eig_sorted = sorted(eig.tolist(), reverse=True)
    return ConditionReport(cls, D, _clean(eig_sorted, thr), pc.label, ident, oc)


class RelationOracle:
    """Relation-level classification by quadrature, independent of the J-algebra.

    A finite family of elements ``(y, f)`` of the maximal relation is built:
    homogeneous solutions at ``lam = 0`` with ``y(a) = e_k`` and solutions
    with ``y(a) = 0`` driven by ``f = e_j`` on each of ``m`` subintervals.
    Their boundary values span C^2n.  The Hermitian matrix of
    ``Im (f, y)_Delta`` over the family is computed by quadrature; a
    condition is classified by the sign of this form on the elements that
    satisfy it.
    """

    def __init__(self, s, subintervals=2, rtol=1e-7):
        n = s.n
        self.s = s
        self.rtol = rtol
        hom = SolutionFamily(s, 0.0, np.eye(n, dtype=complex))
        edges = np.linspace(s.a, s.b, subintervals + 1)
        blocks = []
        for k in range(subintervals):
            lo, hi = edges[k], edges[k + 1]
            last = k == subintervals - 1

            def g(t, lo=lo, hi=hi, last=last):
                on = lo <= t < hi or (last and t == hi)
                return np.eye(n, dtype=complex) if on else np.zeros((n, n), dtype=complex)

            blocks.append(SolutionFamily(s, 0.0, np.zeros((n, n), dtype=complex), g, [lo, hi]))
        fams = [hom] + blocks

        def y(t):
            return np.hstack([f.y(t) for f in fams])

        def f(t):
            return np.hstack([fm.f(t) for fm in fams])

        self.values = np.vstack([np.hstack([fm.start for fm in fams]),
                                 np.hstack([fm.end for fm in fams])])
        if linalg.rank(self.values, 1e-8 * np.linalg.norm(self.values, 2)) != 2 * n:
            raise InconclusiveError("oracle family does not reach every boundary value")
        g = delta_gram(s, f, y, extra=list(edges))
        self.form = linalg.im_part(g)

    def classify(self, bc):
        s = self.s
        ca, cb = as_matrix(bc.Ca), as_matrix(bc.Cb)
        w, _ = _gamma_b(s, bc)
        cond = np.hstack([ca, cb @ w]) @ self.values
        z = linalg.null_space(cond, 1e-9 * max(1.0, np.linalg.norm(cond, 2))).basis
        vz = self.values @ z
        if linalg.rank(vz, 1e-8 * max(1.0, np.linalg.norm(vz, 2))) != s.n:
            return "none"
        h = z.conj().T @ self.form @ z
        h = 0.5 * (h + h.conj().T)
        ev = np.linalg.eigvalsh(h)
        thr = self.rtol * max(1.0, np.max(np.abs(np.linalg.eigvalsh(self.form))))
        if np.all(np.abs(ev) <= thr):
            return "self-adjoint"
        if ev[0] >= -thr:
            return "maximal-dissipative"
        if ev[-1] <= thr:
            return "maximal-accumulative"
        return "none"


def separated_condition(s, a_blocks, b_blocks, request=None):
    """Assemble a ``BoundaryCondition`` from separated blocks in normal coordinates.

    ``a_blocks = (N0a, Nhat_a, N1a)`` acts on ``(y0(a), y^(a), y1(a))`` and
    ``b_blocks`` on ``Gamma_b y``; ``Nhat`` may be ``None`` when ``H^ = {0}``.
    """
    sig = signature_decompose(s)
    h, hh = sig.dim_H, sig.dim_Hhat

    def fix(blocks, side):
        n0, nh, n1 = blocks
        n0 = as_matrix(n0, f"N0{side}")
        n1 = as_matrix(n1, f"N1{side}")
        k = n0.shape[0]
        if nh is None:
            nh = np.zeros((k, hh), dtype=complex)
        nh = as_matrix(nh, f"Nhat_{side}").reshape(k, hh)
        if n0.shape != (k, h) or n1.shape != (k, h):
            raise InputError(f"separated {side}-blocks must be k x {h} (N0, N1) and k x {hh} (Nhat)")
        return n0, nh, n1

    a = fix(a_blocks, "a")
    b = fix(b_blocks, "b")
    ka, kb = a[0].shape[0], b[0].shape[0]
    pa = np.zeros((ka + kb, s.n), dtype=complex)
    pb = np.zeros((ka + kb, s.n), dtype=complex)
    pa[:ka] = np.hstack(a)
    pb[ka:] = np.hstack(b)
    ca = pa @ sig.U.conj().T
    cb = pb @ sig.U.conj().T
    return BoundaryCondition(ca, cb, None, {"a": a, "b": b}, request)


@dataclass
class SeparatedReport:
    cls: str
    S_a: np.ndarray
    S_b: np.ndarray
    dissipative: bool
    accumulative: bool
    resolvent_blocks: dict
    dims: dict
    general_class: str
    tau: Optional[dict] = None

    def to_dict(self):
        def herm_eigs(m):
            return [float(x) for x in np.linalg.eigvalsh(m)] if m.size else []

        return {"class": self.cls, "S_a_eigenvalues": herm_eigs(self.S_a),
                "S_b_eigenvalues": herm_eigs(self.S_b), "dissipative": self.dissipative,
                "accumulative": self.accumulative, "dims": dict(self.dims),
                "resolvent_invertible": {k: bool(v) for k, v in self.resolvent_blocks.items()},
                "general_class": self.general_class, "tau": self.tau}


def classify_separated(s, bc, dt=None):
    """Classify separated conditions from the endpoint operators ``S_a``, ``S_b``.

    With ``S_a = Im(N1a N0a^*) + (delta/2) Nhat_a Nhat_a^*`` and the analogous
    ``S_b``, the conditions are maximal dissipative when ``S_a >= 0``,
    ``S_b <= 0`` and the two diagonal blocks of ``C~0 - i C~1`` are
    invertible; maximal accumulative with the signs reversed and
    ``C~0 + i C~1``.  For ``delta = +1`` the blocks are ``N~_a``,
    ``N0b + i N1b`` (dissipative) and ``N0a + i N1a``, ``N~_b``
    (accumulative).  The verdict is cross-checked against
    ``classify_boundary_condition`` on the assembled condition.

    Raises
    ------
    ImpossibleConditionError
        When self-adjoint separated conditions are requested and
        ``nu_+ != nu_-``: they exist only for Hamiltonian ``J``.
    """
    if bc.separated is None:
        raise PreconditionError("condition has no separated structure")
    sig = signature_decompose(s)
    if bc.request == "self-adjoint" and sig.nu_plus != sig.nu_minus:
        raise ImpossibleConditionError(
            "self-adjoint separated boundary conditions exist only when nu+ = nu- "
            f"(J Hamiltonian); here nu+ = {sig.nu_plus}, nu- = {sig.nu_minus}")
    n0a, nha, n1a = bc.separated["a"]
    n0b, nhb, n1b = bc.separated["b"]
    d = sig.delta
    S_a = linalg.im_part(n1a @ n0a.conj().T) + 0.5 * d * nha @ nha.conj().T
    S_b = linalg.im_part(n1b @ n0b.conj().T) + 0.5 * d * nhb @ nhb.conj().T
    pair = tilde_pair(s, bc)
    ka = n0a.shape[0]
    h, hh = sig.dim_H, sig.dim_Hhat
    cols_h0 = list(range(h))
    cols_hat = list(range(h, h + hh))
    cols_h1 = list(range(h + hh, 2 * h + hh))
    rows_a, rows_b = slice(0, ka), slice(ka, None)
    res_m = pair.c0 - 1j * pair.c1
    res_p = pair.c0 + 1j * pair.c1
    # H^ columns belong to the a-block of C~0 - i C~1 when delta = +1, else to the b-block
    dis_a = res_m[rows_a][:, cols_h0 + (cols_hat if d > 0 else [])]
    dis_b = res_m[rows_b][:, (cols_hat if d < 0 else []) + cols_h1]
    acc_a = res_p[rows_a][:, cols_h0 + (cols_hat if d < 0 else [])]
    acc_b = res_p[rows_b][:, (cols_hat if d > 0 else []) + cols_h1]
    inv = {k: linalg.is_invertible(m, s.tol.invert_rtol)
           for k, m in (("dis_a", dis_a), ("dis_b", dis_b), ("acc_a", acc_a), ("acc_b", acc_b))}
    scale = max(1.0, np.linalg.norm(pair.stacked(), 2) ** 2)
    st = s.tol.sign_tol * scale

    def psd(m):
        return m.size == 0 or bool(np.linalg.eigvalsh(m)[0] >= -st)

    dis = bool(psd(S_a) and psd(-S_b) and inv["dis_a"] and inv["dis_b"])
    acc = bool(psd(-S_a) and psd(S_b) and inv["acc_a"] and inv["acc_b"])
    if dis and acc:
        cls = "self-adjoint"
    elif dis:
        cls = "maximal-dissipative"
    elif acc:
        cls = "maximal-accumulative"
    else:
        cls = "none"
    kb = n0b.shape[0]
    # regular b: nu_b+ = nu_-, nu_b- = nu_+
    dims = {"dim_K_a": ka, "dim_K_b": kb}
    if dis and (ka, kb) != (sig.nu_minus, sig.nu_plus):
        raise InternalConsistencyError(
            f"dissipative separated conditions need dim K_a = nu- = {sig.nu_minus} and "
            f"dim K_b = nu_b- = {sig.nu_plus}, got ({ka}, {kb})")
    if acc and (ka, kb) != (sig.nu_plus, sig.nu_minus):
        raise InternalConsistencyError(
            f"accumulative separated conditions need dim K_a = nu+ = {sig.nu_plus} and "
            f"dim K_b = nu_b+ = {sig.nu_minus}, got ({ka}, {kb})")

    general = classify_boundary_condition(s, bc, dt).cls if ka + kb == s.n else "none"
    if general != cls:
        raise InternalConsistencyError(
            f"separated test gives {cls}, the general condition test gives {general}")
    tau = None
    if sig.is_hamiltonian:
        sp = BoundarySpacePair(h, h)
        tau = {"a": classify_pair(OperatorPair(sp, n0a, n1a, ka)).label,
               "b": classify_pair(OperatorPair(sp, n0b, -n1b, kb)).label}
        if cls == "self-adjoint" and tau != {"a": "Self", "b": "Self"}:
            raise InternalConsistencyError(f"self-adjoint separated conditions with tau = {tau}")
    return SeparatedReport(cls, S_a, S_b, dis, acc, inv, dims, general, tau)


def random_condition(s, kind, rng, dt=None):
    """Random admissible ``(C_a, C_b)`` (with ``Jb = J``) of a prescribed class.

    ``kind`` is ``Self``, ``Dis``, ``Ac`` or ``any``; a pair of that class is
    drawn against the decomposing triplet and mapped back to endpoint data.
    """
    from ..pairs import random_pair

    sig = signature_decompose(s)
    n = s.n
    if kind == "any":
        ca = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        cb = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return BoundaryCondition(ca, cb)
    p = random_pair(BoundarySpacePair(n, n), kind, rng)
    c0, c1 = p.c0, p.c1
    s0, sh, s1 = sig.slices
    h, hh = sig.dim_H, sig.dim_Hhat
    m0, mh0, mb0 = c0[:, :h], c0[:, h: h + hh], c0[:, h + hh:]
    m1, mh1, mb1 = c1[:, :h], c1[:, h: h + hh], c1[:, h + hh:]
    pa = np.zeros((n, n), dtype=complex)
    pb = np.zeros((n, n), dtype=complex)
    pa[:, s0], pa[:, s1] = m0, m1
    pb[:, s0], pb[:, s1] = mb0, -mb1
    if hh:
        diff = 1j * SQ2 * sig.delta * mh0  # C^a - C^b
        plus = SQ2 * mh1                   # C^a + C^b
        pa[:, sh] = 0.5 * (plus + diff)
        pb[:, sh] = 0.5 * (plus - diff)
    return BoundaryCondition(pa @ sig.U.conj().T, pb @ sig.U.conj().T)
