"""Fundamental solutions, inhomogeneous solutions and Delta-weighted quadrature.

The homogeneous equation ``J y' - B y = lam Delta y`` is integrated as
``y' = J^{-1}(B + lam Delta) y`` with scipy's DOP853 (an adaptive embedded
Runge-Kutta pair of order 8(5,3)), one piece at a time so that every
breakpoint is a mandatory node.  Integrals are computed with adaptive
Gauss-Kronrod quadrature (``scipy.integrate.quad_vec``) split at the same
breakpoints.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from ..errors import NumericalError, StiffnessError

# DOP853 spends 12 stages per attempted step and 3 more per accepted step
# when dense output is requested; 2 evaluations go into the initial step.
_STAGES = 12
_DENSE_EXTRA = 3


def _solve(fun, t0, t1, y0, tol, dense):
    if t1 == t0:
        return None
    res = solve_ivp(fun, (t0, t1), y0, method="DOP853", rtol=tol.rel_tol,
                    atol=tol.abs_tol, max_step=tol.max_step, dense_output=dense)
    if res.status != 0:
        t_fail = float(res.t[-1]) if len(res.t) else t0
        if "step size" in res.message.lower():
            raise StiffnessError(f"integrator step size underflow at t = {t_fail:.10g}: "
                                 f"{res.message}", t=t_fail)
        raise NumericalError(f"integration failed at t = {t_fail:.10g}: {res.message}")
    return res


def _stats(results, dense):
    steps = sum(len(r.t) - 1 for r in results if r is not None)
    nfev = sum(r.nfev for r in results if r is not None)
    per = _STAGES + (_DENSE_EXTRA if dense else 0)
    rejected = 0
    for r in results:
        if r is None:
            continue
        extra = r.nfev - 2 - per * (len(r.t) - 1)
        rejected += max(0, int(round(extra / _STAGES)))
    return {"steps": int(steps), "nfev": int(nfev), "rejected_estimate": int(rejected)}


def _segments(s, t0, t1, extra=()):
    """Breakpoints of the system and of ``extra`` inside ``[t0, t1]``."""
    pts = {t0, t1}
    pts.update(t for t in s.breakpoints if t0 < t < t1)
    pts.update(t for t in extra if t0 < t < t1)
    pts = sorted(pts)
    return list(zip(pts[:-1], pts[1:]))


class SolutionFamily:
    """Columns ``y_j`` solving ``J y' - B y = Delta f`` with ``f_j = lam y_j + g_j``.

    ``g`` is a callable returning an ``n x N`` matrix (piecewise constant in
    practice) or ``None``.  Evaluation ``y(t)`` works for scalars and arrays.
    """

    def __init__(self, s, lam, y0, g=None, g_breaks=(), t_span=None):
        self.s = s
        self.lam = complex(lam)
        y0 = np.asarray(y0, dtype=complex)
        if y0.ndim == 1:
            y0 = y0[:, None]
        n, m = y0.shape
        self.n, self.m = n, m
        self.g = g
        t0, t1 = t_span if t_span is not None else (s.a, s.b)
        self.t0, self.t1 = t0, t1
        jinv = np.linalg.inv(s.J)
        lam = self.lam
        self.segs = []
        results = []
        y = y0.reshape(-1)
        for lo, hi in _segments(s, t0, t1, g_breaks):
            piece = s.piece_at(0.5 * (lo + hi))

            def fun(t, v, piece=piece):
                Y = v.reshape(n, m)
                rhs = (piece.B(t) + lam * piece.Delta(t)) @ Y
                if g is not None:
                    rhs = rhs + piece.Delta(t) @ g(t)
                return (jinv @ rhs).reshape(-1)

            r = _solve(fun, lo, hi, y, s.tol, dense=True)
            results.append(r)
            self.segs.append((lo, hi, r.sol))
            y = r.y[:, -1]
        self.stats = _stats(results, True)
        self.grid = np.unique(np.concatenate([r.t for r in results]))
        self._end = y.reshape(n, m)
        self._start = y0

    def y(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        out = np.empty((len(tt), self.n, self.m), dtype=complex)
        edges = np.array([seg[1] for seg in self.segs[:-1]])
        idx = np.searchsorted(edges, tt, side="left")
        for k in np.unique(idx):
            sel = idx == k
            vals = self.segs[k][2](tt[sel])
            out[sel] = vals.T.reshape(-1, self.n, self.m)
        return out[0] if scalar else out

    def f(self, t):
        yv = self.y(t)
        if self.g is None:
            return self.lam * yv
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self.lam * yv + self.g(float(t))
        return self.lam * yv + np.stack([self.g(float(x)) for x in t])

    @property
    def start(self):
        return self._start

    @property
    def end(self):
        return self._end


class FundamentalSolution(SolutionFamily):
    """``Y(t, lam)`` with ``Y(a) = I``.

    Attributes
    ----------
    grid : ndarray
        Accepted integrator nodes (every breakpoint included).
    stats : dict
        Steps, function evaluations and an estimate of rejected steps.
    """

    def __init__(self, s, lam, t_span=None):
        super().__init__(s, lam, np.eye(s.n, dtype=complex), t_span=t_span)

    def __call__(self, t):
        return self.y(t)

    def at_grid(self):
        return self.y(self.grid)


def fundamental_solution(s, lam):
    return FundamentalSolution(s, lam)


def transfer_batch(s, lams, t_span=None):
    """``Y(t1, t0, lam)`` for many ``lam`` at once, shape ``(len(lams), n, n)``.

    All samples share one adaptive integration, so the step size follows the
    hardest sample.  Only end values are kept.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    n, m = s.n, len(lams)
    t0, t1 = t_span if t_span is not None else (s.a, s.b)
    jinv = np.linalg.inv(s.J)
    y = np.broadcast_to(np.eye(n, dtype=complex), (m, n, n)).reshape(-1).copy()
    for lo, hi in _segments(s, t0, t1):
        piece = s.piece_at(0.5 * (lo + hi))

        def fun(t, v, piece=piece):
            jb = jinv @ piece.B(t)
            jd = jinv @ piece.Delta(t)
            a = jb[None] + lams[:, None, None] * jd[None]
            return (a @ v.reshape(m, n, n)).reshape(-1)

        r = _solve(fun, lo, hi, y, s.tol, dense=False)
        y = r.y[:, -1]
    return y.reshape(m, n, n)


def integrate(s, fun, t0=None, t1=None, extra=()):
    """``int fun(t) dt`` over ``[t0, t1]`` split at breakpoints, for array-valued ``fun``."""
    t0 = s.a if t0 is None else t0
    t1 = s.b if t1 is None else t1
    total = None
    err = 0.0
    for lo, hi in _segments(s, t0, t1, extra):
        val, e = quad_vec(fun, lo, hi, epsabs=s.tol.abs_tol, epsrel=s.tol.rel_tol,
                          limit=2000)
        total = val if total is None else total + val
        err += float(e)
    return total, err


def delta_gram(s, u, v, extra=()):
    """Matrix ``G[i, j] = (u_j, v_i)_Delta = int v_i^* Delta u_j`` for callables ``u``, ``v``.

    ``u(t)`` and ``v(t)`` return ``n x N`` matrices.
    """
    val, _ = integrate(s, lambda t: v(t).conj().T @ s.Delta(t) @ u(t), extra=extra)
    return val


def j_invariance(s, lam, grid=None):
    """``max_t ||Y(t, conj lam)^* J Y(t, lam) - J||`` over a grid (default: both solvers' nodes)."""
    ya = FundamentalSolution(s, lam)
    yb = FundamentalSolution(s, np.conj(complex(lam)))
    if grid is None:
        grid = np.union1d(ya.grid, yb.grid)
    a, b = ya(grid), yb(grid)
    resid = np.swapaxes(b.conj(), 1, 2) @ s.J @ a - s.J
    return float(np.max(np.linalg.norm(resid, 2, axis=(1, 2))))


@dataclass
class PairData:
    """One element ``(y, f)`` of the maximal relation, built from initial data.

    ``y0`` is ``y(a)``, ``lam`` and ``g`` define ``f = lam y + g`` where ``g``
    is piecewise constant: a list of ``(t0, t1, vector)``.
    """

    y0: np.ndarray
    lam: complex = 0.0
    g: tuple = ()


def _g_callable(n, pieces):
    if not pieces:
        return None, ()
    pieces = [(float(a), float(b), np.asarray(v, dtype=complex).reshape(n)) for a, b, v in pieces]

    def g(t):
        out = np.zeros((n, 1), dtype=complex)
        for a, b, v in pieces:
            if a <= t < b or (t == b and b == max(p[1] for p in pieces)):
                out[:, 0] += v
        return out

    breaks = sorted({p[0] for p in pieces} | {p[1] for p in pieces})
    return g, breaks


def pair_family(s, pair):
    g, breaks = _g_callable(s.n, pair.g)
    return SolutionFamily(s, pair.lam, np.asarray(pair.y0, dtype=complex), g, breaks)


@dataclass
class LagrangeResidual:
    """Both sides of the Lagrange identity for one pair of elements.

    ``absolute = |lhs - rhs|``; ``relative`` divides by
    ``max(1, |(f,z)| + |(y,g)| + |[y,z]_b| + |[y,z]_a|)``.
    """

    lhs: complex
    rhs: complex
    absolute: float
    relative: float


def lagrange_identity(s, pair1, pair2):
    """Evaluate ``(f, z)_Delta - (y, g)_Delta`` and ``[y, z]_b - [y, z]_a``.

    ``[y, z]_e = (J y(e), z(e))``; for a truncated endpoint the value at the
    truncation point stands in for the limit.
    """
    fy = pair_family(s, pair1)
    fz = pair_family(s, pair2)
    breaks = sorted({p for pr in (pair1, pair2) for a, b, _ in pr.g for p in (a, b)})

    def terms(t):
        d = s.Delta(t)
        return np.array([(fz.y(t).conj().T @ d @ fy.f(t))[0, 0],
                         (fz.f(t).conj().T @ d @ fy.y(t))[0, 0]])

    (fz_, yg), _ = integrate(s, terms, extra=breaks)
    ya, yb = fy.start[:, 0], fy.end[:, 0]
    za, zb = fz.start[:, 0], fz.end[:, 0]
    form_b = zb.conj() @ s.J @ yb
    form_a = za.conj() @ s.J @ ya
    lhs, rhs = fz_ - yg, form_b - form_a
    scale = max(1.0, abs(fz_) + abs(yg) + abs(form_b) + abs(form_a))
    diff = float(abs(lhs - rhs))
    return LagrangeResidual(complex(lhs), complex(rhs), diff, diff / scale)


def lagrange_residual(s, pair1, pair2):
    """Scale-relative residual of the Lagrange identity (see ``lagrange_identity``)."""
    return lagrange_identity(s, pair1, pair2).relative
