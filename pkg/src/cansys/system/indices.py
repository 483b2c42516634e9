"""Null manifold, reachable sets, formal deficiency indices and endpoint inertia."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import linalg
from ..errors import InconclusiveError, InternalConsistencyError
from ..linalg import Subspace
from .model import signature_decompose
from .solve import FundamentalSolution, integrate


def _rank_tol(m, rtol):
    s = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
    return rtol * s[0] if len(s) and s[0] > 0 else 0.0


@dataclass
class NullManifold:
    """Homogeneous solutions with ``Delta y = 0`` almost everywhere.

    ``basis`` spans the initial values ``y(a)`` of such solutions, which is
    also the subspace ``H_a``.  ``n_prime_dim`` is the dimension of the part
    ``N'`` whose elements have ``[y, z]_a = 0`` for every ``z`` in the
    maximal domain.
    """

    k: int
    basis: Subspace
    is_definite: bool
    n_prime_dim: int
    points_per_piece: int
    history: list

    @property
    def H_a(self):
        return self.basis


def null_manifold(s, y0=None):
    """Common null space of ``Delta(t_k) Y(t_k, 0)`` over refining grids.

    Starts with ``s.tol.null_start`` Chebyshev points per piece and doubles
    until the dimension has repeated on two successive refinements; beyond
    ``s.tol.null_cap`` points the result is inconclusive.
    """
    tol = s.tol
    Y = y0 if y0 is not None else FundamentalSolution(s, 0.0)
    m = tol.null_start
    history = []
    while True:
        rows = []
        for p in s.pieces:
            k = np.arange(m)
            t = 0.5 * (p.t0 + p.t1) - 0.5 * (p.t1 - p.t0) * np.cos(np.pi * k / (m - 1))
            rows.append((p.Delta(t) @ Y(t)).reshape(-1, s.n))
        stacked = np.vstack(rows)
        ns = linalg.null_space(stacked, max(_rank_tol(stacked, tol.rank_rtol), 1e-300))
        if not np.any(stacked):
            ns = linalg.full_space(s.n)
        history.append((m, ns.dim))
        if len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1]:
            break
        if 2 * m > tol.null_cap:
            raise InconclusiveError(
                f"null manifold dimension did not stabilise up to {m} points per piece: "
                f"{[h[1] for h in history]}")
        m *= 2
    reach = reachable_set(s, "a", Y)
    nprime = _n_prime(s, ns, reach)
    return NullManifold(ns.dim, ns, ns.dim == 0, nprime, m, history)


def _n_prime(s, ns, reach):
    if ns.dim == 0:
        return 0
    # c in N' iff J c is orthogonal to every attainable value at a
    m = reach.basis.conj().T @ s.J @ ns.basis
    return int(linalg.null_space(m, 1e-9).dim) if m.size else ns.dim


def controllability_gramian(s, endpoint, Y=None):
    """``W = int Phi Delta Phi^* dt`` with ``Phi(t) = Y(e,0) Y(t,0)^{-1} J^{-1}``.

    Its range is the set of values ``y(e)`` of solutions of
    ``J y' - B y = Delta f`` that vanish at the other endpoint.
    """
    Y = Y if Y is not None else FundamentalSolution(s, 0.0)
    jinv = np.linalg.inv(s.J)
    ye = np.eye(s.n) if endpoint == "a" else Y.end

    def integrand(t):
        phi = ye @ np.linalg.solve(Y(t), jinv)
        return phi @ s.Delta(t) @ phi.conj().T

    w, _ = integrate(s, integrand)
    return 0.5 * (w + w.conj().T)


def _gram_range(w, rtol):
    return linalg.column_space(w, max(_rank_tol(w, rtol), 1e-300)) if np.any(w) else linalg.zero_space(w.shape[0])


def null_controllable_set(s, Y=None):
    """``{y(a) : y in the maximal domain, y(b) = 0}``, the range of the Gramian at ``a``."""
    return _gram_range(controllability_gramian(s, "a", Y), s.tol.rank_rtol)


def reachable_set(s, endpoint, Y=None):
    """Attainable boundary values ``{y(e)}`` at ``e`` in ``{"a", "b"}``.

    The range of the controllability Gramian plus the values of homogeneous
    solutions ``span Y(e, 0)``.  A truncated endpoint ``b`` is treated as
    regular.
    """
    Y = Y if Y is not None else FundamentalSolution(s, 0.0)
    w = _gram_range(controllability_gramian(s, endpoint, Y), s.tol.rank_rtol)
    hom = linalg.column_space(np.eye(s.n) if endpoint == "a" else Y.end, 0.0)
    return linalg.sum_space(w, hom)


@dataclass
class DecayReport:
    lam: complex
    count: Optional[int]
    ratios: list
    classes: list


def _window_decay(s, lam, windows):
    """Windowed Delta-norms of a QR-propagated solution frame at ``lam``.

    Each window is integrated from the identity, so nothing overflows; the
    frame is carried across windows by QR, and the accumulated logs of the
    diagonal of ``R`` give each direction's size.  The Delta-norm of direction
    ``j`` in window ``k`` is ``q_j^* G_k q_j`` scaled by that size.
    """
    edges = np.linspace(s.a, s.b, windows + 1)
    n = s.n
    q = np.eye(n, dtype=complex)
    logscale = np.zeros(n)
    lognorm = np.full((windows, n), -np.inf)
    relnorm = np.zeros((windows, n))
    for k in range(windows):
        Yw = FundamentalSolution(s, lam, t_span=(edges[k], edges[k + 1]))
        g, _ = integrate(s, lambda t: Yw(t).conj().T @ s.Delta(t) @ Yw(t),
                         edges[k], edges[k + 1])
        wq = np.real(np.einsum("ij,ik,kj->j", q.conj(), g, q))
        # size of q_j's Delta-norm against window length times ||Delta||
        dn = max(np.linalg.norm(s.Delta(t), 2) for t in np.linspace(edges[k], edges[k + 1], 5))
        relnorm[k] = np.maximum(wq, 0.0) / max(dn * (edges[k + 1] - edges[k]), 1e-300)
        with np.errstate(divide="ignore"):
            lognorm[k] = np.log(np.maximum(wq, 0.0)) + 2 * logscale
        q, r = np.linalg.qr(Yw.end @ q)
        d = np.abs(np.diag(r))
        logscale = logscale + np.log(d)
    return edges, lognorm, relnorm


def decay_count(s, lam):
    """Number of directions whose windowed Delta-norm decays geometrically.

    A direction whose windowed norms are all negligible against its own size
    counts as decaying (it lies in the null manifold).  The fitted per-window ratio decides:
    at most ``decay_ratio`` is decaying, at least ``growth_ratio`` is not,
    anything between (or a poor fit) makes the count ``None``.
    """
    tol = s.tol
    windows = max(tol.decay_windows, 5)
    edges, lognorm, relnorm = _window_decay(s, lam, windows)
    ratios, classes = [], []
    idx = np.arange(windows)
    for j in range(s.n):
        ln = lognorm[:, j]
        if np.all(relnorm[:, j] < 1e-20):
            ratios.append(0.0)
            classes.append("null")
            continue
        use = np.isfinite(ln)
        slope, icpt = np.polyfit(idx[use], ln[use], 1)
        fit = icpt + slope * idx[use]
        ss_res = float(np.sum((ln[use] - fit) ** 2))
        ss_tot = float(np.sum((ln[use] - ln[use].mean()) ** 2)) or 1.0
        r2 = 1.0 - ss_res / ss_tot
        ratio = float(np.exp(slope))
        ratios.append(ratio)
        if ratio <= tol.decay_ratio and r2 >= 0.9:
            classes.append("decaying")
        elif ratio >= tol.growth_ratio:
            classes.append("growing")
        else:
            classes.append("ambiguous")
    count = None if "ambiguous" in classes else sum(c in ("decaying", "null") for c in classes)
    return DecayReport(complex(lam), count, ratios, classes)


@dataclass
class FormalIndices:
    """Formal deficiency indices ``N+ = dim N_i`` and ``N- = dim N_{-i}``.

    ``method`` is ``exact-regular`` or ``truncation-heuristic``.  When the
    heuristic is inconclusive ``n_plus``/``n_minus`` are ``None`` and
    ``range`` holds the interval known to contain both.
    """

    n_plus: Optional[int]
    n_minus: Optional[int]
    method: str
    conclusive: bool = True
    range: Optional[tuple] = None
    samples: list = field(default_factory=list)


# points per half-plane used to check that dim N_lam is constant
_UPPER = (1j, 1 + 1j, -0.5 + 2j)


def formal_deficiency_indices(s):
    if s.endpoint_b.is_regular:
        return FormalIndices(s.n, s.n, "exact-regular")
    sig = signature_decompose(s)
    lo = (sig.nu_plus, sig.nu_minus)
    if np.isfinite(s.endpoint_b.true_b):
        # a truncation of a finite singular endpoint carries no growth signal
        return FormalIndices(None, None, "truncation-heuristic", False,
                             (min(lo), s.n))
    samples = []
    counts = {+1: set(), -1: set()}
    for z in _UPPER:
        for sign, lam in ((+1, z), (-1, np.conj(z))):
            rep = decay_count(s, lam)
            samples.append(rep)
            counts[sign].add(rep.count)
    ok = all(None not in c and len(c) == 1 for c in counts.values())
    if not ok:
        return FormalIndices(None, None, "truncation-heuristic", False,
                             (min(lo), s.n), samples)
    return FormalIndices(counts[+1].pop(), counts[-1].pop(), "truncation-heuristic",
                         True, None, samples)


def solution_gram_rank(s, lam):
    """``dim pi N_lam``: rank of ``int Y(t,lam)^* Delta Y(t,lam) dt``."""
    Y = FundamentalSolution(s, lam)
    g, _ = integrate(s, lambda t: Y(t).conj().T @ s.Delta(t) @ Y(t))
    g = 0.5 * (g + g.conj().T)
    w = np.linalg.eigvalsh(g)
    if w[-1] <= 0:
        return 0
    return int(np.sum(w > s.tol.rank_rtol * w[-1]))


@dataclass
class EndpointInertia:
    nu_b_plus: int
    nu_b_minus: int
    method: str


def boundary_form_inertia(s, Y=None):
    """Inertia of ``Im [y, y]_b = ((-iJ) y(b), y(b))`` on the attainable values at ``b``."""
    reach = reachable_set(s, "b", Y)
    p = reach.basis
    form = p.conj().T @ (-1j * s.J) @ p
    form = 0.5 * (form + form.conj().T)
    inert = linalg.hermitian_inertia(form, s.tol.sign_tol * max(1.0, np.linalg.norm(form, 2)))
    method = "exact-regular" if s.endpoint_b.is_regular else "truncation-point"
    return EndpointInertia(inert.n_plus, inert.n_minus, method)


@dataclass
class IndicesReport:
    """Everything the index bookkeeping needs.

    ``n_plus``/``n_minus`` are deficiency indices of the minimal relation;
    for regular ``b`` they come from the rank of the Delta-Gram of solutions
    at ``+-i`` and are checked against ``N - k_N``.
    """

    N_plus: Optional[int]
    N_minus: Optional[int]
    N_method: str
    n_plus: Optional[int]
    n_minus: Optional[int]
    n_method: str
    k_N: int
    k_N_prime: int
    nu_plus: int
    nu_minus: int
    nu_b_plus: int
    nu_b_minus: int
    nu_b_method: str
    H_a: Subspace
    null_controllable: Subspace
    conclusive: bool
    N_range: Optional[tuple]
    checks: dict

    def to_dict(self):
        return dict(
            N_plus=self.N_plus, N_minus=self.N_minus, N_method=self.N_method,
            N_range=None if self.N_range is None else list(self.N_range),
            n_plus=self.n_plus, n_minus=self.n_minus, n_method=self.n_method,
            k_N=self.k_N, k_N_prime=self.k_N_prime,
            nu_plus=self.nu_plus, nu_minus=self.nu_minus,
            nu_b_plus=self.nu_b_plus, nu_b_minus=self.nu_b_minus,
            nu_b_method=self.nu_b_method, conclusive=self.conclusive,
            checks=dict(self.checks))


def indices(s):
    """Formal and actual deficiency indices, null manifold and endpoint inertia.

    For exact indices the identities ``N = n + k_N`` and, with a regular
    ``b``, ``N = nu + nu_b`` are asserted (``InternalConsistencyError``), as is
    ``{y(a) : y(b) = 0} = (J H_a)^perp``.
    """
    Y = FundamentalSolution(s, 0.0)
    sig = signature_decompose(s)
    nm = null_manifold(s, Y)
    fi = formal_deficiency_indices(s)
    inert = boundary_form_inertia(s, Y)
    nc = null_controllable_set(s, Y)
    checks = {}

    jha = linalg.column_space(s.J @ nm.basis.basis, 0.0) if nm.k else linalg.zero_space(s.n)
    want = jha.complement()
    checks["null_controllable_matches"] = bool(linalg.subspace_equal(nc, want, 1e-6))
    if not checks["null_controllable_matches"]:
        raise InternalConsistencyError(
            f"null-controllable set has dim {nc.dim}, (J H_a)^perp has dim {want.dim}")

    if fi.conclusive and s.endpoint_b.is_regular:
        n_p, n_m = solution_gram_rank(s, 1j), solution_gram_rank(s, -1j)
        n_method = "solution-gram-rank"
        ok = (fi.n_plus, fi.n_minus) == (n_p + nm.k, n_m + nm.k)
        checks["N_equals_n_plus_kN"] = bool(ok)
        if not ok:
            raise InternalConsistencyError(
                f"N = ({fi.n_plus}, {fi.n_minus}) but n + k_N = ({n_p + nm.k}, {n_m + nm.k})")
        ok = (fi.n_plus, fi.n_minus) == (sig.nu_plus + inert.nu_b_plus,
                                         sig.nu_minus + inert.nu_b_minus)
        checks["N_equals_nu_plus_nu_b"] = bool(ok)
        if not ok:
            raise InternalConsistencyError(
                f"N = ({fi.n_plus}, {fi.n_minus}) but nu + nu_b = "
                f"({sig.nu_plus + inert.nu_b_plus}, {sig.nu_minus + inert.nu_b_minus})")
        ok = (inert.nu_b_plus, inert.nu_b_minus) == (sig.nu_minus, sig.nu_plus)
        checks["regular_nu_b_swap"] = bool(ok)
        if not ok:
            raise InternalConsistencyError("regular endpoint with (nu_b+, nu_b-) != (nu-, nu+)")
    elif fi.conclusive:
        n_p, n_m = fi.n_plus - nm.k, fi.n_minus - nm.k
        n_method = "N-minus-kN"
    else:
        n_p = n_m = None
        n_method = "unavailable"
    return IndicesReport(fi.n_plus, fi.n_minus, fi.method, n_p, n_m, n_method,
                         nm.k, nm.n_prime_dim, sig.nu_plus, sig.nu_minus,
                         inert.nu_b_plus, inert.nu_b_minus, inert.method,
                         nm.basis, nc, fi.conclusive, fi.range, checks)
