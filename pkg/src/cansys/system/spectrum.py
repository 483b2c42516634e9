"""Eigenvalues of self-adjoint boundary conditions by singular-value scanning."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, PreconditionError
from .boundary import _gamma_b, check_condition, classify_boundary_condition
from .solve import transfer_batch

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)


@dataclass
class Eigenvalue:
    value: float
    multiplicity: int
    residual: float

    def to_dict(self):
        return {"lambda": self.value, "multiplicity": self.multiplicity,
                "residual": self.residual}


@dataclass
class SpectrumReport:
    range: tuple
    step: float
    eigenvalues: list
    truncated: bool = False
    count_stable: bool = True
    rejected_dips: list = field(default_factory=list)

    @property
    def values(self):
        return np.array([e.value for e in self.eigenvalues])

    def to_dict(self):
        return {"range": list(self.range), "step": self.step, "count": len(self.eigenvalues),
                "truncated": self.truncated, "count_stable": self.count_stable,
                "eigenvalues": [e.to_dict() for e in self.eigenvalues]}


def _sv(s, ca, cbw, lams):
    """Singular values of ``C_a + C_b W Y(b, lam)``, normalised by the largest."""
    ends = transfer_batch(s, np.asarray(lams, dtype=float))
    sv = np.linalg.svd(ca[None] + cbw[None] @ ends, compute_uv=False)
    return sv / sv[:, :1]


def _scan(s, ca, cbw, lo, hi, step):
    m = max(int(np.ceil((hi - lo) / step)), 2)
    grid = np.linspace(lo, hi, m + 1)
    return grid, _sv(s, ca, cbw, grid)[:, -1]


def _brackets(grid, d):
    out = []
    for k in range(len(d)):
        left = d[k - 1] if k > 0 else np.inf
        right = d[k + 1] if k + 1 < len(d) else np.inf
        if d[k] <= left and d[k] < right or d[k] < left and d[k] <= right:
            out.append((grid[max(k - 1, 0)], grid[min(k + 1, len(d) - 1)]))
    return out


def _golden(s, ca, cbw, brackets, resolution):
    """Batched golden-section minimisation of ``d`` on every bracket."""
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _sv(s, ca, cbw, x1)[:, -1]
    f2 = _sv(s, ca, cbw, x2)[:, -1]
    while np.max(hi - lo) > resolution:
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        keep = np.where(left, x1, x2)
        fkeep = np.where(left, f1, f2)
        new = np.where(left, hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo))
        fn = _sv(s, ca, cbw, new)[:, -1]
        x1, f1 = np.where(left, new, keep), np.where(left, fn, fkeep)
        x2, f2 = np.where(left, keep, new), np.where(left, fkeep, fn)
    return 0.5 * (lo + hi)


def _locate(s, ca, cbw, lo, hi, step, tol):
    grid, d = _scan(s, ca, cbw, lo, hi, step)
    br = _brackets(grid, d)
    if not br:
        return [], []
    roots = _golden(s, ca, cbw, br, tol.eig_resolution)
    sv = _sv(s, ca, cbw, roots)
    found, rejected = [], []
    mult_thr = np.sqrt(tol.eig_residual)
    for r, row in zip(roots, sv):
        res = float(row[-1])
        if res <= tol.eig_residual:
            found.append(Eigenvalue(float(r), int(np.sum(row <= mult_thr)), res))
        else:
            rejected.append((float(r), res))
    # neighbouring brackets may converge to one root
    merged = []
    for e in sorted(found, key=lambda e: e.value):
        if merged and abs(e.value - merged[-1].value) <= 10 * tol.eig_resolution:
            if e.residual < merged[-1].residual:
                merged[-1] = e
            continue
        merged.append(e)
    return merged, rejected


def eigenvalues(s, bc, lam_range, max_count=None, step=None, check_stability=True):
    """Real eigenvalues of the extension ``C_a y(a) + C_b Gamma_b y = 0`` in ``lam_range``.

    Scans ``d(lam) = s_min / s_max`` of ``C_a + C_b W Y(b, lam)`` on a uniform
    grid, refines every local minimum by golden section and accepts roots
    with ``d <= eig_residual``.  With ``check_stability`` the scan is repeated
    at half the step and the counts compared.

    Parameters
    ----------
    lam_range : (float, float)
    max_count : int, optional
        Keep at most this many eigenvalues (smallest first) and set
        ``truncated``.
    step : float, optional
        Scan step, default ``eig_step_fraction`` times the range width.

    Raises
    ------
    PreconditionError
        If the condition is not self-adjoint.
    """
    lo, hi = (float(x) for x in lam_range)
    if not hi > lo:
        raise InputError(f"empty range ({lo}, {hi})")
    rep = classify_boundary_condition(s, bc)
    if rep.cls != "self-adjoint":
        raise PreconditionError(f"eigenvalue search needs a self-adjoint condition, got {rep.cls}")
    ca, cb = check_condition(s, bc)
    w, _ = _gamma_b(s, bc)
    cbw = cb @ w
    tol = s.tol
    step = step if step is not None else tol.eig_step_fraction * (hi - lo)
    found, rejected = _locate(s, ca, cbw, lo, hi, step, tol)
    stable = True
    if check_stability:
        again, _ = _locate(s, ca, cbw, lo, hi, 0.5 * step, tol)
        stable = len(again) == len(found) and np.allclose(
            [e.value for e in again], [e.value for e in found], atol=1e-6)
    truncated = max_count is not None and len(found) > max_count
    if truncated:
        found = found[:max_count]
    return SpectrumReport((lo, hi), float(step), found, bool(truncated), bool(stable), rejected)
