"""Dense complex subspace arithmetic.

Everything here works on orthonormal bases obtained from the SVD.  A rank
decision uses the tolerance ``eps * max(shape) * s_max`` unless an explicit
absolute threshold is passed.  Subspaces compare equal when their dimensions
agree and the largest principal angle is at most ``ANGLE_TOL``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InputError

EPS = np.finfo(float).eps
ANGLE_TOL = 1e-8
INVERTIBILITY_RTOL = 1e-10
# Threshold used when intersecting already-computed subspaces.  Their bases
# carry rounding error, so the machine rule would be too strict.
INTERSECT_TOL = 1e-8


def as_matrix(m, name="matrix", dtype=complex):
    """Return ``m`` as a finite 2-D complex array or raise ``InputError``."""
    a = np.asarray(m, dtype=dtype)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contains non-finite entries")
    return a


def auto_tol(s, shape):
    """Default rank tolerance for singular values ``s`` of a matrix of ``shape``."""
    if len(s) == 0:
        return 0.0
    return EPS * max(shape) * s[0]


def spectral_norm(a):
    """Largest singular value, zero for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def im_part(x):
    """Imaginary part ``(X - X^*) / 2i`` of a square matrix (a Hermitian matrix)."""
    return (x - x.conj().T) / 2j


def re_part(x):
    """Real part ``(X + X^*) / 2`` of a square matrix."""
    return (x + x.conj().T) / 2


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^n given by an orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray
    ambient_dim: int

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.conj().T

    def complement(self):
        """Orthogonal complement in the ambient space."""
        if self.dim == 0:
            return Subspace(np.eye(self.ambient_dim, dtype=complex), self.ambient_dim)
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return Subspace(q[:, self.dim:], self.ambient_dim)

    def contains(self, v, tol=INTERSECT_TOL):
        """True when every column of ``v`` lies in the subspace up to ``tol`` (relative)."""
        v = as_matrix(v, "vector")
        resid = v - self.basis @ (self.basis.conj().T @ v)
        scale = max(np.linalg.norm(v), 1.0)
        return np.linalg.norm(resid) <= tol * scale

    def coordinates(self, v):
        """Coefficients of ``v`` in the orthonormal basis (orthogonal projection)."""
        return self.basis.conj().T @ as_matrix(v, "vector")

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def zero_space(n):
    return Subspace(np.zeros((n, 0), dtype=complex), n)


def full_space(n):
    return Subspace(np.eye(n, dtype=complex), n)


def column_space(m, tol=0.0):
    """Orthonormal basis of the range of ``m``.

    Parameters
    ----------
    m : array_like, shape (n, k)
        Spanning vectors as columns.
    tol : float, optional
        Absolute singular value threshold.  ``0`` selects the machine rule
        ``eps * max(n, k) * s_max``.

    Returns
    -------
    Subspace
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.size == 0:
        return zero_space(n)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    thr = tol if tol > 0 else auto_tol(s, a.shape)
    r = int(np.sum(s > thr))
    return Subspace(u[:, :r].copy(), n)


def null_space(m, tol=0.0):
    """Orthonormal basis of the kernel of ``m`` (same tolerance rule as ``column_space``)."""
    a = as_matrix(m)
    k = a.shape[1]
    if a.shape[0] == 0:
        return full_space(k)
    if k == 0:
        return zero_space(0)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    thr = tol if tol > 0 else auto_tol(s, a.shape)
    r = int(np.sum(s > thr))
    return Subspace(vh[r:].conj().T.copy(), k)


def rank(m, tol=0.0):
    return column_space(m, tol).dim


def sum_space(*spaces, tol=INTERSECT_TOL):
    """Span of the union of several subspaces of the same ambient space."""
    n = spaces[0].ambient_dim
    return column_space(np.hstack([s.basis for s in spaces]).reshape(n, -1), tol)


def intersect(s1, s2, tol=INTERSECT_TOL):
    """Intersection of two subspaces.

    Computed as the kernel of the stacked complementary projectors
    ``[(I - P1); (I - P2)]``.  A unit vector is accepted when its combined
    distance to both subspaces is below ``tol``.
    """
    if s1.ambient_dim != s2.ambient_dim:
        raise InputError("subspaces live in different ambient spaces")
    n = s1.ambient_dim
    eye = np.eye(n)
    stacked = np.vstack([eye - s1.projector(), eye - s2.projector()])
    _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    s_full = np.zeros(n)
    s_full[: len(s)] = s
    keep = s_full <= tol
    basis = vh.conj().T[:, keep]
    return column_space(basis, tol) if basis.shape[1] else zero_space(n)


def sin_largest_angle(s1, s2):
    """Sine of the largest principal angle between equidimensional subspaces."""
    if s1.dim != s2.dim:
        raise InputError("principal angles need equal dimensions")
    if s1.dim == 0:
        return 0.0
    resid = s2.basis - s1.basis @ (s1.basis.conj().T @ s2.basis)
    return float(np.linalg.norm(resid, 2))


def subspace_equal(s1, s2, angle_tol=ANGLE_TOL):
    """Equal dimension and largest principal angle at most ``angle_tol``."""
    if s1.ambient_dim != s2.ambient_dim or s1.dim != s2.dim:
        return False
    return bool(sin_largest_angle(s1, s2) <= np.sin(angle_tol) + EPS * 10)


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_minus: int
    n_zero: int
    tol: float

    def as_tuple(self):
        return (self.n_plus, self.n_minus, self.n_zero)


def check_hermitian(m, rtol=1e-10, name="matrix"):
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise InputError(f"{name} must be square, got {a.shape}")
    scale = max(np.linalg.norm(a), 1.0)
    if np.linalg.norm(a - a.conj().T) > rtol * scale:
        raise InputError(f"{name} is not Hermitian")
    return (a + a.conj().T) / 2


def hermitian_inertia(m, tol=0.0):
    """Counts of positive, negative and zero eigenvalues of a Hermitian matrix.

    ``tol`` is an absolute eigenvalue threshold; ``0`` selects
    ``eps * n * max|eig|``.
    """
    a = check_hermitian(m)
    if a.shape[0] == 0:
        return Inertia(0, 0, 0, float(tol))
    w = np.linalg.eigvalsh(a)
    thr = tol if tol > 0 else EPS * a.shape[0] * max(np.max(np.abs(w)), 0.0)
    return Inertia(int(np.sum(w > thr)), int(np.sum(w < -thr)),
                   int(np.sum(np.abs(w) <= thr)), float(thr))


def is_psd(m, rtol=1e-10, scale=None):
    """Most negative eigenvalue exceeds ``-rtol * scale`` (``scale`` defaults to the norm)."""
    a = check_hermitian(m)
    if a.shape[0] == 0:
        return True
    w = np.linalg.eigvalsh(a)
    if scale is None:
        scale = np.max(np.abs(w))
    return bool(w[0] >= -rtol * scale)


def is_invertible(m, rtol=INVERTIBILITY_RTOL):
    """Square and smallest singular value above ``rtol`` times the largest."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    if a.size == 0:
        return True
    s = np.linalg.svd(a, compute_uv=False)
    return bool(s[-1] > rtol * s[0])


def condition_number(m):
    a = as_matrix(m)
    if a.size == 0:
        return 1.0
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def orthonormal_rows(m, tol=0.0):
    """Row space of ``m`` returned as a matrix with orthonormal rows."""
    return column_space(as_matrix(m).conj().T, tol).basis.conj().T
