"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``python3 -m pytest tests/test_acceptance.py -v``; the lines
are repeated in the terminal summary.
"""
import subprocess
import sys

import numpy as np

from cansys import relation as rel
from cansys import triplet as trp
from cansys.boundary_relation import (big_identity_residual, decompose, multivalued_structure,
                                      random_boundary_relation, reassemble,
                                      verify_boundary_relation, weyl_family)
from cansys.errors import ImpossibleConditionError
from cansys.pairs import classify_pair
from cansys.system.boundary import (CLASS_OF_PAIR, RelationOracle, check_condition,
                                    classify_separated, decomposing_triplet, nevanlinna_summary,
                                    random_condition, sign_class, tilde_pair, weyl_function,
                                    weyl_sweep)
from cansys.system.indices import indices
from cansys.system.model import make_system, normal_form
from cansys.system.solve import PairData, j_invariance, lagrange_identity
from cansys.system.spectrum import eigenvalues

from conftest import ROOT, SYSTEMS, cplx, load_condition, load_system, random_system, random_unitary
from regen_golden import COMMANDS, golden_path

RESULTS = {}


def record(num, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{num:2d}] {name}: {detail}"
    RESULTS[num] = line
    print(line)
    return ok


def test_01_dirac_spectrum(dirac):
    rep = eigenvalues(dirac, load_condition("dirichlet", dirac), (-10.5, 10.5))
    want = np.arange(-10, 11)
    vals = rep.values
    err = float(np.abs(vals - want).max()) if len(vals) == len(want) else np.inf
    simple = all(e.multiplicity == 1 for e in rep.eigenvalues)
    ok = len(vals) == 21 and err <= 1e-8 and simple
    assert record(1, "free Dirac spectrum", ok,
                  f"{len(vals)} eigenvalues, max |lam_k - k| = {err:.2e}, all simple = {simple}")


def test_02_dirac_weyl(dirac):
    ch, sh = np.cosh(np.pi), np.sinh(np.pi)
    want = 1j / sh * np.array([[ch, -1], [-1, ch]])
    err = float(np.abs(weyl_function(dirac, 1j).M - want).max())
    xs = np.linspace(-5, 5, 20)
    vals = weyl_sweep(dirac, np.r_[xs + 0.5j, xs - 0.5j])
    summ = nevanlinna_summary(vals)
    ok = err <= 1e-8 and summ["conj_symmetry"] <= 1e-9 and summ["min_im_eig"] >= -1e-9
    assert record(2, "free Dirac Weyl function", ok,
                  f"|M(i) - closed form| = {err:.2e}, conj symmetry {summ['conj_symmetry']:.2e}, "
                  f"min eig Im M/Im lam = {summ['min_im_eig']:.3e} on 40 points")


def test_03_index_bookkeeping(dirac, indefinite):
    rows = []
    ok = True
    for s in (dirac, indefinite):
        r = indices(s)
        ok &= (r.N_plus, r.N_minus) == (r.nu_plus + r.nu_b_plus, r.nu_minus + r.nu_b_minus)
        ok &= (r.N_plus, r.N_minus) == (r.n_plus + r.k_N, r.n_minus + r.k_N)
        rows.append(r)
    ex = rows[1]
    ok &= (ex.k_N, ex.N_plus, ex.N_minus, ex.n_plus, ex.n_minus) == (1, 2, 2, 1, 1)
    assert record(3, "index bookkeeping", ok,
                  f"Dirac N=({rows[0].N_plus},{rows[0].N_minus}) nu_b=({rows[0].nu_b_plus},"
                  f"{rows[0].nu_b_minus}); indefinite example k_N={ex.k_N} N=({ex.N_plus},{ex.N_minus}) "
                  f"n=({ex.n_plus},{ex.n_minus})")


def _random_j_system(rng, h, hh, delta):
    n = 2 * h + hh
    v = random_unitary(rng, n)
    J = v @ normal_form(h, hh, delta) @ v.conj().T
    b = cplx(rng, n, n)
    w = cplx(rng, n, n)
    return make_system(J, [(0.0, 1.0, 0.5 * (b + b.conj().T), w @ w.conj().T / n + 0.2 * np.eye(n))])


def test_04_classification_concordance():
    rng = np.random.default_rng(4)
    systems = []
    for k in range(10):
        systems.append(random_system(rng, 2, pieces=1 + k % 2))
    for k in range(6):
        systems.append(random_system(rng, 4, pieces=1 + k % 2, linear=k % 3 == 0))
    # 4 x 4 with nu_+ != nu_- (H^ of dimension 2)
    for k in range(4):
        systems.append(_random_j_system(rng, 1, 2, 1 if k % 2 else -1))
    kinds = ["Self", "Dis", "Ac", "any", "any"]
    total = disagree = 0
    seen = {}
    for s in systems:
        dt = decomposing_triplet(s)
        oracle = RelationOracle(s)
        for j in range(10):
            bc = random_condition(s, kinds[j % 5], rng, dt)
            ca, cb = check_condition(s, bc)
            D = 1j * (ca @ s.J @ ca.conj().T - cb @ s.J @ cb.conj().T)
            by_sign, _, _ = sign_class(0.5 * (D + D.conj().T), s.tol.sign_tol)
            by_pair = CLASS_OF_PAIR[classify_pair(tilde_pair(s, bc)).label]
            by_oracle = oracle.classify(bc)
            total += 1
            disagree += not (by_sign == by_pair == by_oracle)
            seen[by_sign] = seen.get(by_sign, 0) + 1
    ok = total >= 200 and disagree == 0
    assert record(4, "classification concordance", ok,
                  f"{total} conditions on {len(systems)} systems, {disagree} disagreements, "
                  f"classes {dict(sorted(seen.items()))}")


def test_05_separated(dirac, sig3):
    rep = classify_separated(dirac, load_condition("separated_dissipative", dirac))
    ok = rep.cls == "maximal-dissipative" and rep.general_class == rep.cls
    ok &= np.allclose(rep.S_a, 0) and np.allclose(rep.S_b, [[-1]])
    try:
        classify_separated(sig3, load_condition("signature3_selfadjoint", sig3))
        raised = False
    except ImpossibleConditionError:
        raised = True
    assert record(5, "separated conditions", ok and raised,
                  f"worked example -> {rep.cls} (S_a=0, S_b=-1), 3x3 self-adjoint request "
                  f"raises impossibility = {raised}")


def test_06_abstract_layer():
    rng = np.random.default_rng(6)
    n_ok = 0
    worst_block = worst_ident = 0.0
    bad = []
    count = 120
    for k in range(count):
        br, parts = random_boundary_relation(rng, max_dim=6)
        rep = verify_boundary_relation(br)
        dec = decompose(br)
        same = rel.relations_equal(reassemble(dec).gamma, br.gamma, 1e-7)
        ms = multivalued_structure(br, check=False)
        dims = (br.spaces.h0, br.spaces.h1) == (rep.n_plus + ms.n_gamma, rep.n_minus + ms.n_gamma)
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2))
        mu = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2))
        block = weyl_family(br, lam, dec).agreement
        ident = big_identity_residual(br, lam, mu, dec)
        worst_block, worst_ident = max(worst_block, block), max(worst_ident, ident)
        good = rep.valid and same and dims and block <= 1e-9 and ident <= 1e-9
        n_ok += good
        if not good:
            bad.append(k)
    ok = n_ok == count
    assert record(6, "abstract boundary relations", ok,
                  f"{n_ok}/{count} pass; worst block-vs-direct {worst_block:.2e}, "
                  f"worst identity residual {worst_ident:.2e}; failing {bad[:5]}")


def test_07_model_triplet():
    t = trp.model_triplet()
    valid = trp.verify_triplet(t).valid
    rng = np.random.default_rng(7)
    lams = rng.uniform(-3, 3, 10) + 1j * rng.choice([-1, 1], 10) * rng.uniform(0.2, 3, 10)
    err = max(abs(trp.weyl(t, z).m[0, 0] - (z - 1 / z)) for z in lams)
    assert record(7, "model triplet", valid and err <= 1e-10,
                  f"valid = {valid}, max |M(lam) - (lam - 1/lam)| = {err:.2e} at 10 points")


def test_08_numerical_invariants():
    rng = np.random.default_rng(8)
    worst_j = worst_l = worst_g = 0.0
    for name in SYSTEMS:
        s = load_system(name)
        n, L = s.n, s.b - s.a
        # growth of Y is exp(|Im lam| L); keep it moderate on long intervals
        eta = min(1.0, np.pi / L)
        for lam in (1j * eta, 0.5 - 0.25j * eta, 2.0):
            worst_j = max(worst_j, j_invariance(s, lam))
        for _ in range(3):
            g = lambda: tuple((s.a + u * L, s.a + (u + 0.25) * L, cplx(rng, n)) for u in (0.0, 0.5))
            y = PairData(cplx(rng, n), float(rng.uniform(-2, 2)), g())
            z = PairData(cplx(rng, n), complex(rng.uniform(-2, 2), 0.25 * eta), g())
            worst_l = max(worst_l, lagrange_identity(s, y, z).relative)
        worst_g = max(worst_g, decomposing_triplet(s).green_residual)
    ok = worst_j <= 1e-8 and worst_l <= 1e-8 and worst_g <= 1e-10
    assert record(8, "numerical invariants", ok,
                  f"J-invariance {worst_j:.2e}, Lagrange (relative) {worst_l:.2e}, "
                  f"Green {worst_g:.2e} over {len(SYSTEMS)} systems, |Im lam| <= min(1, pi/L)")


def test_09_truncated_heuristic(halfline):
    r = indices(halfline)
    ok = (r.N_plus, r.N_minus) == (1, 1) and r.N_method == "truncation-heuristic"
    assert record(9, "truncated limit-point heuristic", ok,
                  f"N = ({r.N_plus}, {r.N_minus}) tagged {r.N_method}")


def test_10_cli_golden():
    mismatched = []
    for name in SYSTEMS:
        for command in COMMANDS:
            cmd = [sys.executable, "-m", "cansys", command, "--system",
                   str(ROOT / "data" / "systems" / f"{name}.json")]
            a = subprocess.run(cmd, capture_output=True, cwd=ROOT)
            b = subprocess.run(cmd, capture_output=True, cwd=ROOT)
            gold = golden_path(name, command).read_bytes()
            if not (a.returncode == b.returncode == 0 and a.stdout == b.stdout == gold):
                mismatched.append(f"{name}/{command}")
    total = len(SYSTEMS) * len(COMMANDS)
    assert record(10, "CLI determinism", not mismatched,
                  f"{total - len(mismatched)}/{total} reports byte-identical to golden files "
                  f"over two runs; mismatched {mismatched}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
