"""Numerical tolerances shared by the canonical-system layer."""
from dataclasses import dataclass, fields, replace

from ..errors import InputError


@dataclass(frozen=True)
class Tolerances:
    """All thresholds in one place.

    Attributes
    ----------
    rel_tol, abs_tol : float
        Integrator tolerances (also used by adaptive quadrature).
    max_step : float
        Largest integrator step, ``inf`` for none.
    j_tol : float
        Bound for ``||J^* + J||`` and ``||J^* J - I||``.
    herm_tol, psd_tol : float
        Hermitian defect of B and lower bound on the eigenvalues of Delta,
        both relative to ``max(1, norm)``.
    validation_points : int
        Points per piece on the validation grid.
    rank_rtol : float
        Relative singular value threshold for numerical rank.
    sign_tol : float
        Relative threshold for sign tests of Hermitian matrices.
    invert_rtol : float
        ``s_min > invert_rtol * s_max`` counts as invertible.
    green_tol : float
        Green identity residual allowed for the decomposing triplet.
    weyl_cond_flag : float
        Weyl samples whose ``Gamma0 B(lambda)`` has a larger condition
        number are flagged.
    null_start, null_cap : int
        Null manifold grid: initial points per piece and the cap.
    decay_windows : int
        Windows used by the truncation heuristic.
    decay_ratio : float
        A direction is decaying when its fitted windowed Delta-norm shrinks
        at least by this factor per window.
    growth_ratio : float
        A direction is non-decaying when the fitted ratio is at least this.
    eig_step_fraction : float
        Default scan step as a fraction of the range width.
    eig_resolution : float
        Golden-section stopping width.
    eig_residual : float
        Largest normalised smallest singular value accepted at a root.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = float("inf")
    j_tol: float = 1e-12
    herm_tol: float = 1e-10
    psd_tol: float = 1e-10
    validation_points: int = 64
    rank_rtol: float = 1e-8
    sign_tol: float = 1e-9
    invert_rtol: float = 1e-10
    green_tol: float = 1e-10
    weyl_cond_flag: float = 1e10
    null_start: int = 16
    null_cap: int = 4096
    decay_windows: int = 8
    decay_ratio: float = 0.5
    growth_ratio: float = 0.95
    eig_step_fraction: float = 1e-3
    eig_resolution: float = 1e-10
    eig_residual: float = 1e-7

    def with_overrides(self, overrides):
        """Copy with some fields replaced; values are coerced to the field type."""
        if not overrides:
            return self
        known = {f.name: f.type for f in fields(self)}
        kw = {}
        for key, val in overrides.items():
            if key not in known:
                raise InputError(f"unknown tolerance {key!r}")
            typ = int if known[key] in (int, "int") else float
            try:
                kw[key] = typ(val)
            except (TypeError, ValueError):
                raise InputError(f"tolerance {key!r} needs a number, got {val!r}") from None
        return replace(self, **kw)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT = Tolerances()
