"""Boundary relations ``Gamma : h^2 -> H0 + H1`` and their Weyl families.

A boundary relation generalises a boundary triplet by allowing ``Gamma`` to
be multivalued.  It is determined by a boundary triplet ``{K0 + K1, G0, G1}``
together with operators ``F2 : K' -> K2``, ``F1 : K' -> K1`` and
``F' : K' -> K'`` subject to ``F' - F'^* + i F2^* F2 = 0``, where
``K' = P1 dom(mul Gamma)``, ``K'' = mul(mul Gamma)``,
``H1 = K1 + K' + K''`` and ``H0 = K2 + H1`` (orthogonal sums).
``Gamma`` consists of the elements

    (f^, (G0 f^ - i F2 k', k', 0), (G1 f^ + F1 k', F0^* G0 f^ + F' k', k''))

with ``F0 = (F2; F1)``.  In stored coordinates H0 is ``(H2, H1)`` and the
position of K1, K', K'' inside H1 is described by a unitary ``frame``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from . import relation as rel
from . import triplet as trp
from .errors import (InputError, InternalConsistencyError, PreconditionError,
                     VerificationError)
from .linalg import Subspace, as_matrix
from .pairs import BoundarySpacePair
from .relation import LinearRelation

GREEN_TOL = 1e-10
WEYL_AGREE_TOL = 1e-9
COORD_TOL = 1e-10


class BoundaryRelation:
    """Linear relation ``Gamma`` from C^2d to ``H0 + H1``.

    Parameters
    ----------
    base : LinearRelation
        Symmetric relation ``A`` in C^d.
    gamma : LinearRelation or array_like
        Graph of ``Gamma``: columns ``(f; f'; h0; h1)`` in C^(2d + h0 + h1).
    spaces : BoundarySpacePair
    """

    def __init__(self, base, gamma, spaces):
        self.base = base
        self.spaces = spaces
        d = base.dim_source
        if not isinstance(gamma, LinearRelation):
            gamma = LinearRelation(2 * d, spaces.h0 + spaces.h1, gamma, tol=COORD_TOL)
        if gamma.dim_source != 2 * d or gamma.dim_target != spaces.h0 + spaces.h1:
            raise InputError("graph of Gamma has the wrong block sizes")
        self.gamma = gamma

    @property
    def d(self):
        return self.base.dim_source

    def blocks(self):
        """Graph basis split as ``(f, f', h0, h1)``."""
        z = self.gamma.graph.basis
        d, h0 = self.d, self.spaces.h0
        return z[:d], z[d: 2 * d], z[2 * d: 2 * d + h0], z[2 * d + h0:]


def green_residual(br):
    zf, zfp, zh0, zh1 = br.blocks()
    lhs, rhs = trp.green_form_matrices(zf, zfp, zh0, zh1, br.spaces)
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


@dataclass
class MultivaluedStructure:
    """``mul Gamma`` (a relation H0 -> H1), ``K'``, ``K''`` (subspaces of H1) and ``n_Gamma``."""

    mul: LinearRelation
    kp: Subspace
    kpp: Subspace
    n_gamma: int


def multivalued_structure(br, check=True):
    """Compute ``mul Gamma``, ``K' = P1 dom(mul Gamma)`` and ``K'' = mul(mul Gamma)``.

    With ``check`` the dimension identities ``h0 = n+ + n_Gamma`` and
    ``h1 = n- + n_Gamma`` are asserted.
    """
    zf, zfp, zh0, zh1 = br.blocks()
    sp = br.spaces
    src = np.vstack([zf, zfp])
    coeff = linalg.null_space(src, COORD_TOL).basis if src.shape[1] else np.zeros((0, 0))
    vals = np.vstack([zh0, zh1]) @ coeff if coeff.size else np.zeros((sp.h0 + sp.h1, 0))
    mul = LinearRelation(sp.h0, sp.h1, vals, tol=COORD_TOL)
    kp = linalg.column_space(sp.p1() @ mul.source_block, COORD_TOL)
    kpp = rel.parts(mul).mul
    n_gamma = mul.dim
    if check:
        idx = rel.deficiency_indices(br.base)
        if (sp.h0, sp.h1) != (idx.n_plus + n_gamma, idx.n_minus + n_gamma):
            raise InternalConsistencyError(
                f"(h0, h1) = ({sp.h0}, {sp.h1}) but (n+ + n_Gamma, n- + n_Gamma) = "
                f"({idx.n_plus + n_gamma}, {idx.n_minus + n_gamma})")
    return MultivaluedStructure(mul, kp, kpp, n_gamma)


@dataclass
class RelationReport:
    valid: bool
    failed_clause: str
    green_residual: float
    n_plus: int
    n_minus: int
    n_gamma: int
    messages: list = field(default_factory=list)

    def to_dict(self):
        return dict(valid=self.valid, failed_clause=self.failed_clause,
                    green_residual=self.green_residual, n_plus=self.n_plus,
                    n_minus=self.n_minus, n_gamma=self.n_gamma,
                    messages=list(self.messages))


def verify_boundary_relation(br, raise_on_failure=False):
    """Finite-dimensional test for a boundary relation.

    ``Gamma`` must have domain ``A*`` and kernel ``A``, satisfy the Green
    identity, and have ``dim(H0 + H1) = n+ + n- + 2 dim mul Gamma``.
    """
    sp = br.spaces
    d = br.d
    msgs = []
    failed = None
    zf, zfp, zh0, zh1 = br.blocks()
    src = np.vstack([zf, zfp])

    adj = rel.adjoint(br.base)
    dom = linalg.column_space(src, COORD_TOL)
    if not linalg.subspace_equal(dom, adj.graph):
        failed = failed or "domain"
        msgs.append(f"dom Gamma has dim {dom.dim}, A* has dim {adj.dim}")

    tgt = np.vstack([zh0, zh1])
    if tgt.shape[0]:
        kc = linalg.null_space(tgt, COORD_TOL).basis
        ker = linalg.column_space(src @ kc, COORD_TOL)
    else:
        ker = dom
    if not linalg.subspace_equal(ker, br.base.graph):
        failed = failed or "kernel"
        msgs.append(f"ker Gamma (dim {ker.dim}) differs from A (dim {br.base.dim})")

    g = green_residual(br)
    if g > GREEN_TOL:
        failed = failed or "green-identity"
        msgs.append(f"Green identity residual {g:.3e}")

    try:
        idx = rel.deficiency_indices(br.base)
        n_plus, n_minus = idx.n_plus, idx.n_minus
    except PreconditionError as exc:
        n_plus = n_minus = -1
        failed = failed or "base-symmetric"
        msgs.append(str(exc))
    ms = multivalued_structure(br, check=False)
    if sp.h0 + sp.h1 != n_plus + n_minus + 2 * ms.n_gamma:
        failed = failed or "dimension"
        msgs.append(f"h0 + h1 = {sp.h0 + sp.h1} but n+ + n- + 2 n_Gamma = "
                    f"{n_plus + n_minus + 2 * ms.n_gamma}")

    report = RelationReport(failed is None, failed, g, n_plus, n_minus, ms.n_gamma, msgs)
    if raise_on_failure and not report.valid:
        raise VerificationError(f"not a boundary relation: {failed}: {'; '.join(msgs)}",
                                clause=failed, report=report)
    return report


def mul_form_defect(f2, f1, fp):
    """``F' - F'^* + i F2^* F2``, which must vanish for Gamma to satisfy the Green identity."""
    fp = as_matrix(fp, "F'")
    kp = fp.shape[0]
    f2 = np.asarray(f2, dtype=complex).reshape(-1 if kp else 0, kp)
    return fp - fp.conj().T + 1j * f2.conj().T @ f2


@dataclass
class GammaDecomposition:
    """Triplet-plus-operators description of a boundary relation.

    ``frame`` is a unitary ``h1 x h1`` matrix whose columns are orthonormal
    bases of ``K1``, ``K'`` and ``K''`` in that order.  ``F2``, ``F1``, ``Fp``
    are expressed in these bases.
    """

    triplet: trp.BoundaryTriplet
    f2: np.ndarray
    f1: np.ndarray
    fp: np.ndarray
    k1: int
    kp: int
    kpp: int
    frame: np.ndarray

    @property
    def h2(self):
        return self.triplet.spaces.h2


def _frame_matrices(spaces, frame):
    """Maps from frame coordinates to stored coordinates of H0 and H1."""
    h2, h1 = spaces.h2, spaces.h1
    t0 = np.zeros((spaces.h0, spaces.h0), dtype=complex)
    t0[:h2, :h2] = np.eye(h2)
    t0[h2:, h2:] = frame
    return t0, frame


def assemble(base, triplet, f2, f1, fp, kpp=0, frame=None, check=True):
    """Boundary relation built from a triplet and the operators ``F2``, ``F1``, ``F'``.

    Parameters
    ----------
    base : LinearRelation
    triplet : BoundaryTriplet
        Triplet ``{K0 + K1, G0, G1}`` for ``A*`` with ``K2 = K0 - K1``.
    f2, f1, fp : array_like
        ``F2 : K' -> K2``, ``F1 : K' -> K1``, ``F' : K' -> K'``.
    kpp : int
        Dimension of ``K''``.
    frame : array_like, optional
        Unitary placing ``K1 + K' + K''`` inside ``H1``; identity by default.

    Raises
    ------
    PreconditionError
        If ``F' - F'^* + i F2^* F2 != 0``.
    """
    tsp = triplet.spaces
    fp = as_matrix(fp, "F'")
    kp = fp.shape[0]
    if fp.shape != (kp, kp):
        raise InputError("F' must be square")
    h2, k1 = tsp.h2, tsp.h1
    f2 = as_matrix(f2, "F2").reshape(h2, kp)
    f1 = as_matrix(f1, "F1").reshape(k1, kp)
    defect = mul_form_defect(f2, f1, fp)
    scale = max(1.0, linalg.spectral_norm(np.vstack([f2, f1, fp])) ** 2)
    if defect.size and np.max(np.abs(defect)) > 1e-10 * scale:
        raise PreconditionError(
            f"F' - F'^* + i F2^* F2 has size {np.max(np.abs(defect)):.3e}; it must vanish")
    h1 = k1 + kp + kpp
    spaces = BoundarySpacePair(h2 + h1, h1)
    if frame is None:
        frame = np.eye(h1, dtype=complex)
    frame = as_matrix(frame, "frame")
    if frame.shape != (h1, h1) or np.max(np.abs(frame.conj().T @ frame - np.eye(h1)), initial=0) > 1e-10:
        raise InputError("frame must be a unitary h1 x h1 matrix")

    q = triplet.adjoint_basis
    m = q.shape[1]
    d = base.dim_source
    ncols = m + kp + kpp
    src = np.zeros((2 * d, ncols), dtype=complex)
    h0v = np.zeros((h2 + h1, ncols), dtype=complex)
    h1v = np.zeros((h1, ncols), dtype=complex)

    g0, g1 = triplet.g0, triplet.g1
    g02, g01 = g0[:h2], g0[h2:]
    # elements of the single-valued part T
    src[:, :m] = q
    h0v[:h2, :m] = g02
    h0v[h2: h2 + k1, :m] = g01
    h1v[:k1, :m] = g1
    h1v[k1: k1 + kp, :m] = f2.conj().T @ g02 + f1.conj().T @ g01
    # elements generated by K'
    sl = slice(m, m + kp)
    h0v[:h2, sl] = -1j * f2
    h0v[h2 + k1: h2 + k1 + kp, sl] = np.eye(kp)
    h1v[:k1, sl] = f1
    h1v[k1: k1 + kp, sl] = fp
    # elements generated by K''
    h1v[k1 + kp:, m + kp:] = np.eye(kpp)

    t0, t1 = _frame_matrices(spaces, frame)
    graph = np.vstack([src, t0 @ h0v, t1 @ h1v])
    br = BoundaryRelation(base, graph, spaces)
    if check:
        g = green_residual(br)
        if g > GREEN_TOL * scale:
            raise InternalConsistencyError(f"assembled relation violates Green identity ({g:.3e})")
    return br


def decompose(br, check=True):
    """Recover the triplet and the operators ``F2``, ``F1``, ``F'`` from ``Gamma``.

    For each basis vector ``k'`` of ``K'`` the unique ``(h2, k1, m')`` with
    ``(0, (-i h2 + k', k1 + m')) in Gamma`` defines ``F2 k' = h2``,
    ``F1 k' = k1`` and ``F' k' = m'``.  The triplet is read off from the part
    of ``Gamma`` with ``h0 in K0`` and ``h1 in K1 + K'``.  With ``check`` the
    reassembled relation is compared with ``br``.
    """
    sp = br.spaces
    h2, h1 = sp.h2, sp.h1
    ms = multivalued_structure(br, check=False)
    vp, vpp = ms.kp.basis, ms.kpp.basis
    if vp.size and vpp.size and np.max(np.abs(vp.conj().T @ vpp)) > 1e-8:
        raise InternalConsistencyError("K' and K'' are not orthogonal")
    used = linalg.sum_space(ms.kp, ms.kpp) if (vp.size or vpp.size) else linalg.zero_space(h1)
    v1 = used.complement().basis
    k1, kp, kpp = v1.shape[1], vp.shape[1], vpp.shape[1]
    frame = np.hstack([v1, vp, vpp])

    # F-operators from mul Gamma
    pm = ms.mul.graph.projector()
    resid_proj = np.eye(sp.h0 + h1) - pm
    a = np.zeros((sp.h0 + h1, h2 + k1 + kp), dtype=complex)
    a[:h2, :h2] = -1j * np.eye(h2)
    a[sp.h0:, h2: h2 + k1] = v1
    a[sp.h0:, h2 + k1:] = vp
    ra = resid_proj @ a
    if linalg.rank(ra, 1e-9) != ra.shape[1]:
        raise InternalConsistencyError("mul Gamma does not determine F2, F1, F' uniquely")
    f2 = np.zeros((h2, kp), dtype=complex)
    f1 = np.zeros((k1, kp), dtype=complex)
    fp = np.zeros((kp, kp), dtype=complex)
    for j in range(kp):
        x = np.zeros(sp.h0 + h1, dtype=complex)
        x[h2:sp.h0] = vp[:, j]
        u, *_ = np.linalg.lstsq(ra, -resid_proj @ x, rcond=None)
        if np.linalg.norm(ra @ u + resid_proj @ x) > 1e-8:
            raise InternalConsistencyError("no element of mul Gamma over a vector of K'")
        f2[:, j], f1[:, j], fp[:, j] = u[:h2], u[h2: h2 + k1], u[h2 + k1:]

    # single-valued part T
    zf, zfp, zh0, zh1 = br.blocks()
    p1h0 = zh0[h2:]
    cons = np.vstack([vp.conj().T @ p1h0, vpp.conj().T @ p1h0, vpp.conj().T @ zh1])
    coeff = linalg.null_space(cons, COORD_TOL).basis if cons.shape[0] else np.eye(zf.shape[1])
    q = rel.adjoint(br.base).graph.basis
    src = np.vstack([zf, zfp]) @ coeff
    acoord = q.conj().T @ src
    if acoord.shape[0] != acoord.shape[1] or not linalg.is_invertible(acoord):
        raise InternalConsistencyError("the single-valued part of Gamma is not a graph over A*")
    ainv = np.linalg.inv(acoord)
    t_h0 = (zh0 @ coeff) @ ainv
    t_h1 = (zh1 @ coeff) @ ainv
    g0 = np.vstack([t_h0[:h2], v1.conj().T @ t_h0[h2:]])
    g1 = v1.conj().T @ t_h1
    tri = trp.BoundaryTriplet(br.base, BoundarySpacePair(h2 + k1, k1), g0, g1, q)
    dec = GammaDecomposition(tri, f2, f1, fp, k1, kp, kpp, frame)
    if check:
        f0 = np.vstack([f2, f1])
        kprime_part = vp.conj().T @ t_h1
        if kp and np.max(np.abs(kprime_part - f0.conj().T @ g0)) > 1e-8:
            raise InternalConsistencyError("K' component of T differs from F0^* G0")
        again = reassemble(dec)
        if not rel.relations_equal(again.gamma, br.gamma, 1e-7):
            raise InternalConsistencyError("reassembled relation differs from Gamma")
    return dec


def reassemble(dec):
    return assemble(dec.triplet.base, dec.triplet, dec.f2, dec.f1, dec.fp,
                    dec.kpp, dec.frame)


@dataclass
class WeylFamilySample:
    """Weyl family of a boundary relation at one point.

    ``m`` is the operator part (``h1 x h0`` above the real axis, ``h0 x h1``
    below), ``m_block`` the same operator from the block formula, ``mul`` the
    multivalued part, ``dom`` the domain, ``big`` the square function on H0
    and ``gamma`` the gamma field.
    """

    lam: complex
    sign: int
    m: np.ndarray
    m_block: np.ndarray
    dom: Subspace
    mul: Subspace
    big: np.ndarray
    gamma: np.ndarray
    n_block: np.ndarray
    agreement: float


def _operator_part(src, tgt):
    """Orthogonal operator part of the relation spanned by columns ``(src; tgt)``."""
    r = LinearRelation(src.shape[0], tgt.shape[0], np.vstack([src, tgt]), tol=COORD_TOL)
    parts = rel.parts(r)
    pmul = parts.mul.projector() if parts.mul.dim else np.zeros((tgt.shape[0],) * 2)
    op = (np.eye(tgt.shape[0]) - pmul) @ tgt @ np.linalg.pinv(src, rcond=1e-10)
    return op, parts.dom, parts.mul


def weyl_family_direct(br, lam):
    """Weyl family straight from the graph of Gamma.

    Above the real axis ``M+(lam) = {(h0, h1) : (f, lam f, h0, h1) in Gamma}``;
    below it ``M-(z) = {(P1 h0, h1 + i P2 h0)}`` over the same elements.
    """
    lam = trp._check_off_axis(lam)
    sp = br.spaces
    zf, zfp, zh0, zh1 = br.blocks()
    c = linalg.null_space(zfp - lam * zf, COORD_TOL).basis
    f, x0, x1 = zf @ c, zh0 @ c, zh1 @ c
    if lam.imag > 0:
        op, dom, mul = _operator_part(x0, x1)
        gamma = f @ np.linalg.pinv(x0, rcond=1e-10)
        return op, dom, mul, gamma, +1
    src = sp.p1() @ x0
    tgt = np.vstack([1j * (sp.p2() @ x0), x1])
    op, dom, mul = _operator_part(src, tgt)
    gamma = f @ np.linalg.pinv(src, rcond=1e-10)
    return op, dom, mul, gamma, -1


def weyl_family_block(dec, spaces, lam):
    """Operator part of the Weyl family from the triplet Weyl function and ``F2, F1, F'``.

    In frame coordinates ``M+ = [[M_Pi, F1 + i M_Pi F2], [F0^*, F'^*]]`` on
    ``K0 + K'``, and ``M-(z) = M+(conj z)^*``.
    """
    lam = complex(lam)
    up = lam if lam.imag > 0 else np.conj(lam)
    tri = dec.triplet
    h2, k1, kp, kpp = dec.h2, dec.k1, dec.kp, dec.kpp
    k0 = h2 + k1
    mpi = trp.weyl(tri, up).m
    f0 = np.vstack([dec.f2, dec.f1])
    blk = np.zeros((k1 + kp + kpp, k0 + kp + kpp), dtype=complex)
    blk[:k1, :k0] = mpi
    blk[:k1, k0: k0 + kp] = dec.f1 + 1j * mpi @ np.vstack([dec.f2, np.zeros((k1, kp))])
    blk[k1: k1 + kp, :k0] = f0.conj().T
    blk[k1: k1 + kp, k0: k0 + kp] = dec.fp.conj().T
    t0, t1 = _frame_matrices(spaces, dec.frame)
    m_plus = t1 @ blk @ t0.conj().T
    return m_plus if lam.imag > 0 else m_plus.conj().T


def weyl_family(br, lam, dec=None):
    """Weyl family at ``lam`` computed directly and by the block formula.

    The two operator parts must agree to ``1e-9`` (relative); otherwise
    ``InternalConsistencyError`` is raised.  When ``K'' != {0}`` the family
    is a relation; the sample then carries its operator part together with
    the multivalued part ``mul``.
    """
    lam = trp._check_off_axis(lam)
    sp = br.spaces
    if dec is None:
        dec = decompose(br)
    op, dom, mul, gamma, sign = weyl_family_direct(br, lam)
    blk = weyl_family_block(dec, sp, lam)
    scale = max(1.0, linalg.spectral_norm(op))
    agree = float(np.max(np.abs(op - blk), initial=0.0)) / scale
    if agree > WEYL_AGREE_TOL:
        raise InternalConsistencyError(
            f"Weyl family at {lam}: direct and block formulas differ by {agree:.3e}")
    big = trp.block_weyl(op, sp, sign)
    n_block = op[:, : sp.h2] if sign > 0 else op[: sp.h2, :]
    return WeylFamilySample(lam, sign, op, blk, dom, mul, big, gamma, n_block, agree)


def big_identity_residual(br, lam, mu, dec=None):
    """``calM(mu) - calM(lam)^* - (mu - conj lam) gamma(lam)^* gamma(mu)`` for ``lam, mu`` upper.

    Compressed to the domain of the Weyl family, which is all of H0 when
    ``K'' = {0}``.
    """
    a = weyl_family(br, lam, dec)
    b = weyl_family(br, mu, dec)
    if a.sign < 0 or b.sign < 0:
        raise InputError("both points must lie in the upper half-plane")
    vd = a.dom.basis
    lhs = b.big - a.big.conj().T
    rhs = (complex(mu) - np.conj(complex(lam))) * a.gamma.conj().T @ b.gamma
    diff = vd.conj().T @ (lhs - rhs) @ vd
    return float(np.max(np.abs(diff), initial=0.0))


def nevanlinna_margin(br, lam, dec=None):
    """Smallest eigenvalue of ``Im calM(lam) / Im lam`` on the domain of the family."""
    s = weyl_family(br, lam, dec)
    vd = s.dom.basis
    w = np.linalg.eigvalsh(vd.conj().T @ linalg.im_part(s.big) @ vd / s.lam.imag)
    return float(w[0]) if w.size else 0.0


def random_boundary_relation(rng, d=None, n=None, kp=None, kpp=None, max_dim=6):
    """Random boundary relation with all dimensions at most ``max_dim``.

    Returns ``(br, parts)`` where ``parts`` holds the generating triplet,
    ``F2``, ``F1``, ``F'``, ``K''`` dimension and frame.
    """
    if d is None:
        d = int(rng.integers(1, max_dim + 1))
    if n is None:
        n = int(rng.integers(1, d + 1))
    room = max(max_dim - n, 0)
    if kp is None:
        kp = int(rng.integers(0, min(room, 3) + 1))
    if kpp is None:
        kpp = int(rng.integers(0, min(room - kp, 2) + 1)) if room - kp > 0 else 0
    tri = trp.random_triplet(d, n, rng, mul_dim=int(rng.integers(0, d - n + 1)))
    h2, k1 = tri.spaces.h2, tri.spaces.h1

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    f2 = cplx(h2, kp)
    f1 = cplx(k1, kp)
    herm = cplx(kp, kp)
    herm = (herm + herm.conj().T) / 2
    fp = herm - 0.5j * f2.conj().T @ f2
    h1 = k1 + kp + kpp
    frame, _ = np.linalg.qr(cplx(h1, h1)) if h1 else (np.zeros((0, 0)), None)
    br = assemble(tri.base, tri, f2, f1, fp, kpp, frame)
    return br, dict(triplet=tri, f2=f2, f1=f1, fp=fp, kpp=kpp, frame=frame)
