"""Canonical systems ``J y' - B(t) y = Delta(t) f`` on ``[a, b>``.

Coefficients are piecewise polynomial: on each piece ``[t0, t1]``
``B(t) = sum_k B_k t^k`` and likewise for ``Delta``, with ``t`` the absolute
variable.  The endpoint ``a`` is always regular.  The endpoint ``b`` is
either regular or a truncation point standing in for a singular endpoint
``true_b`` (finite or ``inf``).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import linalg
from ..errors import InputError, InternalConsistencyError, ValidationError
from .config import DEFAULT, Tolerances


@dataclass(frozen=True)
class Piece:
    """One polynomial piece; ``b_coef`` and ``delta_coef`` have shape ``(deg + 1, n, n)``."""

    t0: float
    t1: float
    b_coef: np.ndarray
    delta_coef: np.ndarray

    def _poly(self, coef, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + coef.shape[1:], dtype=complex)
        for c in coef[::-1]:  # Horner
            out = out * t[..., None, None] + c
        return out

    def B(self, t):
        return self._poly(self.b_coef, t)

    def Delta(self, t):
        return self._poly(self.delta_coef, t)


@dataclass(frozen=True)
class EndpointB:
    """Kind of the right endpoint.

    ``kind`` is ``"regular"`` or ``"truncated"``; for truncation ``true_b``
    is the singular endpoint being approximated (a float or ``inf``).
    """

    kind: str = "regular"
    true_b: Optional[float] = None

    @property
    def is_regular(self):
        return self.kind == "regular"

    def as_json(self):
        if self.is_regular:
            return "regular"
        tb = "inf" if np.isinf(self.true_b) else float(self.true_b)
        return {"truncated": {"true_b": tb}}


@dataclass(frozen=True)
class CanonicalSystem:
    n: int
    a: float
    b: float
    J: np.ndarray
    pieces: tuple
    endpoint_b: EndpointB = field(default_factory=EndpointB)
    tol: Tolerances = DEFAULT

    def piece_at(self, t):
        for p in self.pieces:
            if t <= p.t1:
                return p
        return self.pieces[-1]

    def B(self, t):
        return self.piece_at(t).B(t)

    def Delta(self, t):
        return self.piece_at(t).Delta(t)

    @property
    def breakpoints(self):
        return [self.pieces[0].t0] + [p.t1 for p in self.pieces]

    def with_tolerances(self, tol):
        return CanonicalSystem(self.n, self.a, self.b, self.J, self.pieces,
                               self.endpoint_b, tol)

    def shifted(self, mu):
        """The system with ``B`` replaced by ``B + mu Delta``; its spectrum moves by ``-mu``."""
        new = []
        for p in self.pieces:
            deg = max(len(p.b_coef), len(p.delta_coef))
            bc = np.zeros((deg, self.n, self.n), dtype=complex)
            bc[: len(p.b_coef)] += p.b_coef
            bc[: len(p.delta_coef)] += mu * p.delta_coef
            new.append(Piece(p.t0, p.t1, bc, p.delta_coef))
        return CanonicalSystem(self.n, self.a, self.b, self.J, tuple(new),
                               self.endpoint_b, self.tol)


def make_system(J, pieces, endpoint_b=None, tol=None):
    """Build a ``CanonicalSystem`` from plain arrays.

    Parameters
    ----------
    J : array_like, shape (n, n)
    pieces : sequence of (t0, t1, B, Delta)
        ``B`` and ``Delta`` are either one ``n x n`` matrix (constant) or a
        sequence of coefficient matrices by degree.
    endpoint_b : EndpointB, optional
    """
    J = linalg.as_matrix(J, "J")
    n = J.shape[0]
    if J.shape != (n, n):
        raise InputError(f"J must be square, got {J.shape}")
    out = []
    for i, pc in enumerate(pieces):
        t0, t1, bm, dm = pc
        coefs = []
        for name, m in (("B", bm), ("Delta", dm)):
            c = np.asarray(m, dtype=complex)
            if c.ndim == 2:
                c = c[None]
            if c.ndim != 3 or c.shape[1:] != (n, n):
                raise InputError(f"piece {i}: {name} must be n x n or a list of n x n "
                                 f"coefficients, got shape {c.shape}")
            if not np.all(np.isfinite(c)):
                raise InputError(f"piece {i}: {name} has non-finite entries")
            coefs.append(c)
        out.append(Piece(float(t0), float(t1), coefs[0], coefs[1]))
    if not out:
        raise InputError("a system needs at least one piece")
    return CanonicalSystem(n, out[0].t0, out[-1].t1, J, tuple(out),
                           endpoint_b or EndpointB(), tol or DEFAULT)


@dataclass
class ValidationReport:
    valid: bool
    j_skew: float
    j_unitary: float
    b_hermitian: float
    delta_min_eig: float
    delta_worst_t: Optional[float]
    tiling_gap: float
    points_checked: int
    messages: list

    def to_dict(self):
        return dict(valid=self.valid, j_skew=self.j_skew, j_unitary=self.j_unitary,
                    b_hermitian=self.b_hermitian, delta_min_eig=self.delta_min_eig,
                    delta_worst_t=self.delta_worst_t, tiling_gap=self.tiling_gap,
                    points_checked=self.points_checked, messages=list(self.messages))


def _grid(t0, t1, m):
    # Chebyshev-Lobatto points, dense near the ends where polynomials vary most
    k = np.arange(m)
    return 0.5 * (t0 + t1) - 0.5 * (t1 - t0) * np.cos(np.pi * k / (m - 1))


def _min_eig_refined(piece, t_grid, vals):
    """Refine the worst grid point of ``lambda_min(Delta)`` by golden search on its bracket."""
    from scipy.optimize import minimize_scalar

    j = int(np.argmin(vals))
    lo = t_grid[max(j - 1, 0)]
    hi = t_grid[min(j + 1, len(t_grid) - 1)]
    best_t, best = t_grid[j], vals[j]
    if hi > lo:
        res = minimize_scalar(lambda t: np.linalg.eigvalsh(piece.Delta(t))[0],
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(hi))})
        if res.fun < best:
            best_t, best = float(res.x), float(res.fun)
    return best_t, best


def validate_system(s, raise_on_failure=False):
    """Check ``J^* = J^{-1} = -J``, ``B = B^*``, ``Delta >= 0`` and the tiling of the pieces.

    ``B`` and ``Delta`` are sampled on ``s.tol.validation_points`` points per
    piece; the worst point of ``Delta`` is then refined by a bounded scalar
    minimisation.
    """
    tol = s.tol
    msgs = []
    J = s.J
    n = s.n
    eye = np.eye(n)
    j_skew = float(np.linalg.norm(J.conj().T + J, 2))
    j_unit = float(np.linalg.norm(J.conj().T @ J - eye, 2))
    if j_skew > tol.j_tol:
        msgs.append(f"J is not skew-adjoint: ||J^* + J|| = {j_skew:.3e} (J^* = -J violated)")
    if j_unit > tol.j_tol:
        msgs.append(f"J is not unitary: ||J^* J - I|| = {j_unit:.3e} (J^* = J^-1 violated)")

    gap = abs(s.pieces[0].t0 - s.a)
    for p, q in zip(s.pieces[:-1], s.pieces[1:]):
        gap = max(gap, abs(p.t1 - q.t0))
    scale_t = max(1.0, abs(s.a), abs(s.b))
    if gap > 1e-12 * scale_t:
        msgs.append(f"pieces do not tile the interval: gap or overlap {gap:.3e}")
    for i, p in enumerate(s.pieces):
        if not p.t1 > p.t0:
            msgs.append(f"piece {i} has t1 <= t0")

    herm = 0.0
    dmin = np.inf
    worst_t = None
    dscale = 1.0
    npts = 0
    for p in s.pieces:
        if not p.t1 > p.t0:
            continue
        t = _grid(p.t0, p.t1, max(tol.validation_points, 2))
        npts += len(t)
        bv, dv = p.B(t), p.Delta(t)
        bnorm = np.maximum(1.0, np.linalg.norm(bv, axis=(1, 2)))
        herm = max(herm, float(np.max(np.linalg.norm(bv - np.swapaxes(bv.conj(), 1, 2),
                                                       axis=(1, 2)) / bnorm)))
        dh = 0.5 * (dv + np.swapaxes(dv.conj(), 1, 2))
        dskew = np.linalg.norm(dv - dh, axis=(1, 2)) / np.maximum(1.0, np.linalg.norm(dv, axis=(1, 2)))
        herm = max(herm, float(np.max(dskew)))
        lo = np.linalg.eigvalsh(dh)[:, 0]
        dscale = max(dscale, float(np.max(np.linalg.norm(dv, 2, axis=(1, 2)))))
        tw, vw = _min_eig_refined(p, t, lo)
        if vw < dmin:
            dmin, worst_t = vw, tw
    if herm > tol.herm_tol:
        msgs.append(f"B(t) or Delta(t) is not Hermitian: relative defect {herm:.3e}")
    if dmin < -tol.psd_tol * dscale:
        msgs.append(f"Delta(t) is not positive semidefinite: eigenvalue {dmin:.3e} at t = {worst_t:.6g}")
    report = ValidationReport(not msgs, j_skew, j_unit, herm, float(dmin),
                              None if worst_t is None else float(worst_t), float(gap), npts, msgs)
    if raise_on_failure and msgs:
        raise ValidationError("; ".join(msgs))
    return report


def require_valid(s):
    validate_system(s, raise_on_failure=True)
    return s


@dataclass(frozen=True)
class SignatureData:
    """Unitary invariants of ``J`` and a unitary ``U`` with ``U^* J U`` in normal form.

    The normal form is ``[[0, 0, -I], [0, i delta I, 0], [I, 0, 0]]`` on
    ``H + H^ + H``; coordinates ``U^* y`` split as ``(y0, y^, y1)``.
    """

    nu_plus: int
    nu_minus: int
    delta: int
    U: np.ndarray
    dim_H: int
    dim_Hhat: int

    @property
    def is_hamiltonian(self):
        return self.dim_Hhat == 0

    @property
    def slices(self):
        h, hh = self.dim_H, self.dim_Hhat
        return slice(0, h), slice(h, h + hh), slice(h + hh, 2 * h + hh)

    def normal_form(self):
        return normal_form(self.dim_H, self.dim_Hhat, self.delta)


def normal_form(dim_h, dim_hhat, delta):
    n = 2 * dim_h + dim_hhat
    jn = np.zeros((n, n), dtype=complex)
    h = dim_h
    jn[:h, h + dim_hhat:] = -np.eye(h)
    jn[h + dim_hhat:, :h] = np.eye(h)
    jn[h: h + dim_hhat, h: h + dim_hhat] = 1j * delta * np.eye(dim_hhat)
    return jn


def signature_of(J, tol=1e-10):
    """Signature data of a signature operator ``J`` (``J^* = J^{-1} = -J``).

    ``iJ`` is Hermitian with eigenvalues ``+1`` (``nu_plus`` of them) and
    ``-1``.  Pairing ``+1`` vectors ``p`` with ``-1`` vectors ``m`` gives the
    ``H`` coordinates ``(p + m)/sqrt 2`` and ``-i (p - m)/sqrt 2``; the unpaired
    eigenvectors carry ``H^``.  If ``J`` already is in normal form ``U = I``.
    """
    J = linalg.as_matrix(J, "J")
    n = J.shape[0]
    w, v = np.linalg.eigh(1j * J)
    plus = v[:, w > 0]
    minus = v[:, w < 0]
    nu_p, nu_m = plus.shape[1], minus.shape[1]
    if np.max(np.abs(np.abs(w) - 1), initial=0) > 1e-8:
        raise ValidationError("iJ has eigenvalues other than +1 and -1; J is not a signature operator")
    delta = int(np.sign(nu_m - nu_p))
    h, hh = min(nu_p, nu_m), abs(nu_m - nu_p)
    jn = normal_form(h, hh, delta)
    if np.linalg.norm(J - jn) <= tol:
        u = np.eye(n, dtype=complex)
    else:
        p, m = plus[:, :h], minus[:, :h]
        extra = plus[:, h:] if nu_p > nu_m else minus[:, h:]
        u = np.hstack([(p + m) / np.sqrt(2), extra, -1j * (p - m) / np.sqrt(2)])
    return SignatureData(nu_p, nu_m, delta, u, h, hh)


def signature_decompose(s):
    """Signature data of the system's ``J`` together with a normal-form check."""
    sig = signature_of(s.J)
    resid = np.linalg.norm(sig.U.conj().T @ s.J @ sig.U - sig.normal_form(), 2)
    if resid > 1e-10:
        raise InternalConsistencyError(f"U^* J U misses the normal form by {resid:.3e}")
    return sig
