"""JSON documents for systems, boundary conditions and abstract boundary relations.

Complex scalars are written ``[re, im]`` (plain numbers are accepted on
input); a matrix is a list of rows; a poly-matrix is a list of coefficient
matrices ordered by degree.  Every document carries ``"schema": 1``.
Parsing errors name the offending location as a JSON pointer.

Output is deterministic: keys are sorted, floats use Python's shortest
round-trip repr, non-finite floats are written as strings.
"""
import json
import math

import numpy as np

from .errors import InputError
from .system.config import DEFAULT
from .system.model import EndpointB, make_system

SCHEMA = 1


class DocumentError(InputError):
    """Input document error carrying a JSON pointer."""

    def __init__(self, pointer, message):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer or "/"


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError("", f"malformed JSON in {path} (line {exc.lineno}, "
                                f"column {exc.colno}): {exc.msg}") from None


def _get(doc, key, ptr, required=True):
    if not isinstance(doc, dict):
        raise DocumentError(ptr, "expected an object")
    if key not in doc:
        if required:
            raise DocumentError(f"{ptr}/{key}", "missing field")
        return None
    return doc[key]


def _number(x, ptr):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(ptr, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise DocumentError(ptr, "non-finite number")
    return float(x)


def _scalar(x, ptr):
    if isinstance(x, list):
        if len(x) != 2:
            raise DocumentError(ptr, "complex numbers are [re, im]")
        return complex(_number(x[0], f"{ptr}/0"), _number(x[1], f"{ptr}/1"))
    return complex(_number(x, ptr))


def parse_matrix(x, ptr, shape=None):
    """List of rows of scalars; ``[]`` gives an empty matrix of the requested shape."""
    if not isinstance(x, list):
        raise DocumentError(ptr, "expected a matrix (list of rows)")
    if not x:
        if shape is not None and shape[0] * shape[1] != 0:
            raise DocumentError(ptr, f"empty matrix, expected shape {shape}")
        return np.zeros(shape if shape is not None else (0, 0), dtype=complex)
    rows = []
    for i, row in enumerate(x):
        if not isinstance(row, list):
            raise DocumentError(f"{ptr}/{i}", "expected a row (list of scalars)")
        rows.append([_scalar(v, f"{ptr}/{i}/{j}") for j, v in enumerate(row)])
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DocumentError(ptr, "rows have different lengths")
    m = np.array(rows, dtype=complex).reshape(len(rows), widths.pop())
    if shape is not None and m.shape != tuple(shape):
        raise DocumentError(ptr, f"shape {m.shape}, expected {tuple(shape)}")
    return m


def parse_poly(x, ptr, n):
    if not isinstance(x, list) or not x:
        raise DocumentError(ptr, "expected a non-empty list of coefficient matrices by degree")
    return np.stack([parse_matrix(c, f"{ptr}/{k}", (n, n)) for k, c in enumerate(x)])


def _check_schema(doc):
    if not isinstance(doc, dict):
        raise DocumentError("", "expected a JSON object")
    v = _get(doc, "schema", "")
    if v != SCHEMA:
        raise DocumentError("/schema", f"unsupported schema {v!r}, expected {SCHEMA}")


def _endpoint(x, ptr):
    if x is None or x == "regular":
        return EndpointB()
    tr = _get(x, "truncated", ptr) if isinstance(x, dict) else None
    if tr is None:
        raise DocumentError(ptr, 'expected "regular" or {"truncated": {"true_b": ...}}')
    tb = _get(tr, "true_b", f"{ptr}/truncated")
    if tb == "inf":
        tb = float("inf")
    else:
        tb = _number(tb, f"{ptr}/truncated/true_b")
    return EndpointB("truncated", tb)


def parse_tolerances(x, ptr, base=DEFAULT):
    if x is None:
        return base
    if not isinstance(x, dict):
        raise DocumentError(ptr, "expected an object of tolerance overrides")
    try:
        return base.with_overrides(x)
    except InputError as exc:
        raise DocumentError(ptr, str(exc)) from None


def parse_system(doc, overrides=None):
    """``CanonicalSystem`` from a system document.

    ``overrides`` (from the command line) are applied on top of the
    document's own ``tolerances`` block.
    """
    _check_schema(doc)
    n = _get(doc, "n", "")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DocumentError("/n", "expected a positive integer")
    iv = _get(doc, "interval", "")
    if not isinstance(iv, list) or len(iv) != 2:
        raise DocumentError("/interval", "expected [a, b]")
    a, b = _number(iv[0], "/interval/0"), _number(iv[1], "/interval/1")
    J = parse_matrix(_get(doc, "J", ""), "/J", (n, n))
    pieces = _get(doc, "pieces", "")
    if not isinstance(pieces, list) or not pieces:
        raise DocumentError("/pieces", "expected a non-empty list")
    out = []
    for i, pc in enumerate(pieces):
        p = f"/pieces/{i}"
        t0 = _number(_get(pc, "t0", p), f"{p}/t0")
        t1 = _number(_get(pc, "t1", p), f"{p}/t1")
        out.append((t0, t1, parse_poly(_get(pc, "B", p), f"{p}/B", n),
                    parse_poly(_get(pc, "Delta", p), f"{p}/Delta", n)))
    if out[0][0] != a or out[-1][1] != b:
        raise DocumentError("/pieces", f"pieces must start at a = {a} and end at b = {b}")
    tol = parse_tolerances(doc.get("tolerances"), "/tolerances")
    tol = tol.with_overrides(overrides or {})
    return make_system(J, out, _endpoint(doc.get("endpoint_b"), "/endpoint_b"), tol)


def parse_condition(doc, s):
    """``BoundaryCondition`` from a condition document for the system ``s``."""
    from .system.boundary import BoundaryCondition, separated_condition
    from .system.model import signature_decompose

    _check_schema(doc)
    request = doc.get("request")
    if request is not None and request not in ("self-adjoint", "maximal-dissipative",
                                               "maximal-accumulative"):
        raise DocumentError("/request", f"unknown class {request!r}")
    sep = doc.get("separated")
    if sep is not None:
        sig = signature_decompose(s)
        h, hh = sig.dim_H, sig.dim_Hhat
        blocks = []
        for side in ("a", "b"):
            p = f"/separated/{side}"
            blk = _get(sep, side, "/separated")
            n0 = parse_matrix(_get(blk, "N0", p), f"{p}/N0")
            k = n0.shape[0]
            n1 = parse_matrix(_get(blk, "N1", p), f"{p}/N1", (k, h))
            if n0.shape != (k, h):
                raise DocumentError(f"{p}/N0", f"shape {n0.shape}, expected (k, {h})")
            nh = blk.get("Nhat")
            nh = None if nh is None else parse_matrix(nh, f"{p}/Nhat", (k, hh))
            blocks.append((n0, nh, n1))
        return separated_condition(s, blocks[0], blocks[1], request)
    ca = parse_matrix(_get(doc, "Ca", ""), "/Ca")
    cb = parse_matrix(_get(doc, "Cb", ""), "/Cb")
    jb = doc.get("Jb")
    jb = None if jb is None else parse_matrix(jb, "/Jb", (s.n, s.n))
    return BoundaryCondition(ca, cb, jb, None, request)


def parse_relation(doc):
    """Abstract boundary relation document.

    Fields: ``d`` and ``A`` (columns spanning the graph of the symmetric
    base relation in C^2d), then either ``"Gamma": {"h0", "h1", "graph"}``
    with columns ``(f; f'; h0; h1)``, or ``"triplet": {"h0", "h1", "G0",
    "G1"}`` with functionals on C^2d together with optional ``F2``, ``F1``,
    ``Fp`` and ``kpp`` for the assembled relation.

    Returns
    -------
    (BoundaryRelation, BoundaryTriplet or None)
    """
    from . import boundary_relation as brl
    from .pairs import BoundarySpacePair
    from .relation import LinearRelation
    from .triplet import BoundaryTriplet

    _check_schema(doc)
    d = _get(doc, "d", "")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise DocumentError("/d", "expected a positive integer")
    a = parse_matrix(_get(doc, "A", ""), "/A")
    if a.shape[0] != 2 * d and a.size:
        raise DocumentError("/A", f"columns must lie in C^{2 * d}")
    base = LinearRelation(d, d, a.reshape(2 * d, -1))

    def spaces(obj, p):
        h0, h1 = _get(obj, "h0", p), _get(obj, "h1", p)
        for key, v in (("h0", h0), ("h1", h1)):
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise DocumentError(f"{p}/{key}", "expected a non-negative integer")
        try:
            return BoundarySpacePair(h0, h1)
        except InputError as exc:
            raise DocumentError(p, str(exc)) from None

    if "Gamma" in doc:
        g = doc["Gamma"]
        sp = spaces(g, "/Gamma")
        graph = parse_matrix(_get(g, "graph", "/Gamma"), "/Gamma/graph")
        rows = 2 * d + sp.h0 + sp.h1
        if graph.shape[0] != rows and graph.size:
            raise DocumentError("/Gamma/graph", f"columns must lie in C^{rows}")
        return brl.BoundaryRelation(base, graph.reshape(rows, -1), sp), None
    t = _get(doc, "triplet", "")
    sp = spaces(t, "/triplet")
    g0 = parse_matrix(_get(t, "G0", "/triplet"), "/triplet/G0", (sp.h0, 2 * d))
    g1 = parse_matrix(_get(t, "G1", "/triplet"), "/triplet/G1", (sp.h1, 2 * d))
    tri = BoundaryTriplet.from_functionals(base, sp, g0, g1)
    fp = doc.get("Fp")
    fp = np.zeros((0, 0), dtype=complex) if fp is None else parse_matrix(fp, "/Fp")
    kp = fp.shape[0]
    if fp.shape != (kp, kp):
        raise DocumentError("/Fp", "must be square")
    f2 = doc.get("F2")
    f2 = np.zeros((sp.h2, kp)) if f2 is None else parse_matrix(f2, "/F2", (sp.h2, kp))
    f1 = doc.get("F1")
    f1 = np.zeros((sp.h1, kp)) if f1 is None else parse_matrix(f1, "/F1", (sp.h1, kp))
    kpp = doc.get("kpp", 0)
    if isinstance(kpp, bool) or not isinstance(kpp, int) or kpp < 0:
        raise DocumentError("/kpp", "expected a non-negative integer")
    # the Green identity is left to the verifier so that broken input gets a report
    return brl.assemble(base, tri, f2, f1, fp, kpp, check=False), tri


def _encode(x):
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_encode(v) for v in x.tolist()] if x.ndim else _encode(x.item())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_encode(float(x.real)), _encode(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return 0.0 if x == 0 else x
    return x


def encode_matrix(m):
    """Complex matrix as rows of ``[re, im]``."""
    m = np.asarray(m, dtype=complex)
    return [[_encode(complex(v)) for v in row] for row in m]


def dumps(obj):
    """Deterministic JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(_encode(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
