"""Command line front end: ``cansys <command> --system FILE ...``.

Every command prints one JSON report on standard output.  Exit codes:
0 success, 2 input error, 3 verification or classification failure,
4 numerical inconclusiveness.
"""
import argparse
import csv
import sys

import numpy as np

from . import io
from .errors import CansysError, InputError, VerificationError

COMMANDS = ("validate", "signature", "indices", "triplet", "weyl", "classify-bc",
            "spectrum", "verify-relation")


def _complex_arg(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"--lambda expects 're,im', got {text!r}") from None
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise InputError(f"--lambda expects 're,im', got {text!r}")
    return complex(parts[0], parts[1])


def _range_arg(text):
    try:
        lo, hi = (float(p) for p in text.split(","))
    except ValueError:
        raise InputError(f"--range expects 'lo,hi', got {text!r}") from None
    if not hi > lo:
        raise InputError(f"--range needs lo < hi, got {text!r}")
    return lo, hi


def _tol_args(items):
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="cansys", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--system", help="system document (JSON)")
    p.add_argument("--bc", help="boundary condition document (JSON)")
    p.add_argument("--relation", help="abstract boundary relation document (JSON)")
    p.add_argument("--lambda", dest="lams", action="append", default=[], metavar="RE,IM",
                   help="spectral parameter, repeatable")
    p.add_argument("--range", dest="lam_range", metavar="LO,HI")
    p.add_argument("--grid", type=int, help="number of sweep points (weyl) or scan intervals (spectrum)")
    p.add_argument("--eta", type=float, default=1.0,
                   help="imaginary part of the weyl sweep line (default 1)")
    p.add_argument("--max-count", type=int)
    p.add_argument("--oracle", action="store_true",
                   help="classify-bc: add the quadrature-based relation oracle")
    p.add_argument("--out", help="CSV file for weyl samples")
    p.add_argument("--tol", action="append", metavar="KEY=VAL", help="tolerance override")
    return p


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise InputError(f"this command needs --{name}")
    return val


def _system(args, validate=True):
    from .system.model import require_valid

    s = io.parse_system(io.load(_need(args, "system")), _tol_args(args.tol))
    return require_valid(s) if validate else s


def cmd_validate(args):
    from .system.model import validate_system

    s = _system(args, validate=False)
    rep = validate_system(s)
    out = {"valid": rep.valid, "report": rep.to_dict(), "n": s.n,
           "interval": [s.a, s.b], "endpoint_b": s.endpoint_b.as_json()}
    return out, (0 if rep.valid else 2)


def cmd_signature(args):
    from .system.model import signature_decompose

    sig = signature_decompose(_system(args))
    return {"nu_plus": sig.nu_plus, "nu_minus": sig.nu_minus, "delta": sig.delta,
            "dim_H": sig.dim_H, "dim_Hhat": sig.dim_Hhat, "is_hamiltonian": sig.is_hamiltonian,
            "U": io.encode_matrix(sig.U)}, 0


def cmd_indices(args):
    from .system.indices import indices

    return indices(_system(args)).to_dict(), 0


def cmd_triplet(args):
    from .system.boundary import decomposing_triplet

    dt = decomposing_triplet(_system(args))
    out = dt.to_dict()
    out.update(Gamma0=io.encode_matrix(dt.gamma0), Gamma1=io.encode_matrix(dt.gamma1),
               Gamma0_normal=io.encode_matrix(dt.g0), Gamma1_normal=io.encode_matrix(dt.g1),
               U=io.encode_matrix(dt.sig.U), mul_dim=dt.mul.dim)
    return out, 0


def _weyl_points(args):
    lams = [_complex_arg(x) for x in args.lams]
    if args.lam_range is not None:
        lo, hi = _range_arg(args.lam_range)
        m = args.grid if args.grid is not None else 21
        if m < 1:
            raise InputError("--grid must be positive")
        xs = np.linspace(lo, hi, m) if m > 1 else np.array([0.5 * (lo + hi)])
        lams.extend(complex(x, args.eta) for x in xs)
    if not lams:
        raise InputError("weyl needs --lambda or --range")
    return lams


def write_weyl_csv(path, values):
    """Columns ``lambda_re, lambda_im`` then ``M`` row-major as ``re``/``im`` pairs."""
    n = values[0].M.shape[0]
    header = ["lambda_re", "lambda_im"]
    for i in range(n):
        for j in range(n):
            header += [f"M{i + 1}{j + 1}_re", f"M{i + 1}{j + 1}_im"]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for v in values:
                row = [repr(v.lam.real), repr(v.lam.imag)]
                for z in v.M.reshape(-1):
                    row += [repr(float(z.real)), repr(float(z.imag))]
                w.writerow(row)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def cmd_weyl(args):
    from .system.boundary import nevanlinna_summary, weyl_sweep

    s = _system(args)
    vals = weyl_sweep(s, _weyl_points(args))
    if args.out:
        write_weyl_csv(args.out, vals)
    samples = [{"lambda": v.lam, "M": io.encode_matrix(v.M), "cond": v.cond,
                "flagged": v.flagged} for v in vals]
    return {"samples": samples, "nevanlinna": nevanlinna_summary(vals),
            "csv": args.out}, 0


def cmd_classify_bc(args):
    from .system.boundary import (RelationOracle, classify_boundary_condition,
                                  classify_separated, decomposing_triplet)

    s = _system(args)
    bc = io.parse_condition(io.load(_need(args, "bc")), s)
    dt = decomposing_triplet(s)
    out = {}
    if bc.separated is not None:
        out["separated"] = classify_separated(s, bc, dt).to_dict()
    oracle = RelationOracle(s) if args.oracle else None
    out.update(classify_boundary_condition(s, bc, dt, oracle).to_dict())
    return out, 0


def cmd_spectrum(args):
    from .system.spectrum import eigenvalues

    s = _system(args)
    bc = io.parse_condition(io.load(_need(args, "bc")), s)
    lo, hi = _range_arg(_need(args, "lam_range"))
    step = None if args.grid is None else (hi - lo) / max(args.grid, 1)
    rep = eigenvalues(s, bc, (lo, hi), max_count=args.max_count, step=step)
    return rep.to_dict(), 0


def cmd_verify_relation(args):
    from . import boundary_relation as brl
    from . import triplet as trp

    br, tri = io.parse_relation(io.load(_need(args, "relation")))
    rep = brl.verify_boundary_relation(br)
    out = {"relation": rep.to_dict(), "h0": br.spaces.h0, "h1": br.spaces.h1}
    if tri is not None:
        out["triplet"] = trp.verify_triplet(tri).to_dict()
    if rep.valid and args.lams:
        samples = []
        for lam in (_complex_arg(x) for x in args.lams):
            w = brl.weyl_family(br, lam)
            samples.append({"lambda": lam, "M": io.encode_matrix(w.m), "mul_dim": w.mul.dim,
                            "block_agreement": w.agreement})
        out["weyl"] = samples
    return out, (0 if rep.valid else 3)


HANDLERS = {"validate": cmd_validate, "signature": cmd_signature, "indices": cmd_indices,
            "triplet": cmd_triplet, "weyl": cmd_weyl, "classify-bc": cmd_classify_bc,
            "spectrum": cmd_spectrum, "verify-relation": cmd_verify_relation}


def _error_report(command, exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "pointer", None):
        err["pointer"] = exc.pointer
    if isinstance(exc, VerificationError) and exc.clause:
        err["clause"] = exc.clause
    return {"schema": io.SCHEMA, "command": command, "ok": False, "error": err}


def _join_values(argv):
    # argparse reads "-10.5,10.5" as an option; glue such values to their flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--range", "--lambda"):
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(list(argv)))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        body, code = HANDLERS[args.command](args)
    except CansysError as exc:
        stdout.write(io.dumps(_error_report(args.command, exc)))
        stderr.write(f"cansys {args.command}: {exc}\n")
        return exc.exit_code
    report = {"schema": io.SCHEMA, "command": args.command, "ok": code == 0}
    report.update(body)
    stdout.write(io.dumps(report))
    return code


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
