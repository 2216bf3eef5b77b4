"""Acceptance criteria 1-8; each test records one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` for the summary block, or execute this
file directly to print the lines as the criteria finish.
"""
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from p1n.classify import EQUATIONS, RepContent, classify, equation_spec, is_ptc_pattern
from p1n.clifford import (build_gamma_5d, build_gamma_8d, check_product_constraint,
                          spin_isospin_split, spin_tensor, verify_clifford)
from p1n.exact import ExactMatrix
from p1n.fw import fw_apply, fw_split_kdp
from p1n.kdp import build_beta15, build_beta6, covariance_check, verify_kdp
from p1n.realization import (MomentumGrid, admissible_suite, build_class1, build_class3,
                             commutator_residuals, evolve, gaussian_state, gaussian_suite,
                             invariance_report)
from p1n.spectrum import half_norm, mass_distribution

if __name__ == "__main__":
    def record(number, passed, detail):
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}", flush=True)
else:
    from conftest import record

HALF = Fraction(1, 2)
Z2 = ExactMatrix.zeros(2)
PAULI = (ExactMatrix.from_rows([[0, 1], [1, 0]]), ExactMatrix.from_rows([[0, -1j], [1j, 0]]),
         ExactMatrix.from_rows([[1, 0], [0, -1]]))


def _check(number, checks, elapsed, limit, extra=""):
    failed = [name for name, ok in checks.items() if not ok]
    ok = not failed and elapsed < limit
    detail = f"{elapsed:.2f}s (limit {limit}s)"
    if extra:
        detail += f"; {extra}"
    if failed:
        detail += "; failed: " + ", ".join(failed)
    record(number, ok, detail)
    assert not failed, failed
    assert elapsed < limit


def test_criterion_1_clifford():
    t = time.perf_counter()
    g5, g8 = build_gamma_5d(), build_gamma_8d()
    r5, r8 = verify_clifford(g5), verify_clifford(g8)
    checks = {
        "5d: 25 anticommutators": len(r5) == 25 and r5.passed,
        "5d: gamma0 = gamma1..gamma4": check_product_constraint(g5).holds_17 is True,
        "8d: 49 anticommutators": len(r8) == 49 and r8.passed,
        "8d: Gamma = -i Gamma1..Gamma6": check_product_constraint(g8).holds_17prime is True,
        "8d: Gamma0 != Gamma1..Gamma4": check_product_constraint(g8.restrict(range(5))).holds_17 is False,
    }
    _check(1, checks, time.perf_counter() - t, 1)


def test_criterion_2_spin_isospin():
    t = time.perf_counter()
    pair = spin_isospin_split(spin_tensor(build_gamma_5d()))
    checks = {}
    for a, s in enumerate(PAULI, start=1):
        checks[f"S{a}"] = pair.S[a - 1] == ExactMatrix.block([[s, Z2], [Z2, Z2]]) * HALF
        checks[f"T{a}"] = pair.T[a - 1] == ExactMatrix.block([[Z2, Z2], [Z2, s]]) * HALF
    checks["S^2"] = pair.S_sq == ExactMatrix.diag([1, 1, 0, 0]) * Fraction(3, 4)
    checks["T^2"] = pair.T_sq == ExactMatrix.diag([0, 0, 1, 1]) * Fraction(3, 4)
    checks["brackets"] = pair.bracket_report().passed
    _check(2, checks, time.perf_counter() - t, 1)


def test_criterion_3_kdp():
    t = time.perf_counter()
    b6, b15 = build_beta6(), build_beta15()
    checks = {}
    for name, b in (("6x6", b6), ("15x15", b15)):
        r = verify_kdp(b)
        checks[f"{name}: 125 triples"] = len(r) == 125 and r.passed
        checks[f"{name}: covariance"] = covariance_check(b).passed
    checks["15x15 beta5^2"] = b15[5] @ b15[5] == ExactMatrix.diag((1,) * 4 + (0,) * 6 + (1,) * 4 + (0,))
    _check(3, checks, time.perf_counter() - t, 5)


H = "1/2"
EXPECTED = {
    "dirac18a": (RepContent.of([(1, H, 0), (-1, 0, H)]), False),
    "dirac18b": (RepContent.of([(-1, H, 0), (1, 0, H)]), False),
    "dirac26": (RepContent.of([(1, H, 0), (-1, H, 0), (1, 0, H), (-1, 0, H)]), True),
    "kdp6": (RepContent.of([(1, 0, 0), (-1, 0, 0)], [(H, H)]), True),
    "kdp15": (RepContent.of([(1, H, H), (-1, H, H)], [(1, 0), (0, 1), (0, 0)]), True),
}


def test_criterion_4_classification():
    t = time.perf_counter()
    checks = {}
    for name in EQUATIONS:
        content = classify(equation_spec(name))
        expected, ptc = EXPECTED[name]
        checks[f"{name} content"] = content == expected
        checks[f"{name} ptc"] = is_ptc_pattern(content) is ptc
    kdp15 = classify(equation_spec("kdp15"))
    checks["kdp15 8 principal + 7 redundant"] = (kdp15.principal_dim, kdp15.dim) == (8, 15)
    _check(4, checks, time.perf_counter() - t, 5)


def test_criterion_5_fw():
    t = time.perf_counter()
    rng = np.random.default_rng(20240501)
    kappa = 1.0
    worst_u = worst_r = 0.0
    checks = {}
    for family in ("dirac4", "dirac8"):
        ok = True
        for _ in range(100):
            d = rng.normal(size=4)
            p = d / np.linalg.norm(d) * rng.uniform(0, 10 * kappa)
            r = fw_apply(family, p, kappa)
            worst_u, worst_r = max(worst_u, r.unitarity), max(worst_r, r.residual)
            ok &= r.unitarity <= 1e-12 and r.residual <= 1e-10
        checks[f"{family}: 100 momenta"] = ok
    p, k = (1.0, 0.5, -0.3, 2.0), 1.2
    literal = fw_split_kdp(build_beta15(), p, k, form="literal")
    corrected = fw_split_kdp(build_beta15(), p, k, form="corrected")
    # the literal exponent leaves an O(1) coupling (documented deviation);
    # the corrected exponent must meet the threshold
    checks["kdp literal coupling measured"] = literal.coupling_residual > 1e-8
    checks["kdp corrected coupling <= 1e-8"] = corrected.passed
    extra = (f"max unitarity {worst_u:.1e}, max residual {worst_r:.1e}, kdp coupling "
             f"literal {literal.coupling_residual:.3f} / corrected {corrected.coupling_residual:.1e}")
    _check(5, checks, time.perf_counter() - t, 10, extra)


@pytest.mark.slow
def test_criterion_6_realization():
    t = time.perf_counter()
    grid = MomentumGrid(4, 32, 10.0)
    spin = spin_tensor(build_gamma_5d())
    gens = build_class1(grid, spin, 1.0)
    states = gaussian_suite(grid, 2, 4, seed=0, kappa_or_eta=1.0)
    rel = commutator_residuals(gens, states)
    inv = invariance_report(gens, states)
    mutant = build_class1(grid, spin, 1.0, boost_spin_sign=-1)
    boosts = [f"[J0{a},J0{b}]" for a in range(1, 5) for b in range(a + 1, 5)]
    mut = commutator_residuals(mutant, states[:1], names=boosts)
    grid3 = MomentumGrid(3, 64, 8.0)
    cls3 = build_class3(grid3, None, None, 1.0)
    rel3 = commutator_residuals(cls3, admissible_suite(grid3, 1.0, 2, 1, seed=0))
    checks = {
        "class I relations": len(rel) == 105 and rel.passed,
        "class I invariance": inv.passed,
        "mutation detected": mut.max_residual() >= 1e-2,
        "class III scalar relations": rel3.passed,
    }
    extra = (f"class I max {rel.max_residual():.1e} over {len(rel)}, invariance max "
             f"{inv.max_residual():.1e}, mutation {mut.max_residual():.2f}, class III max "
             f"{rel3.max_residual():.1e}")
    _check(6, checks, time.perf_counter() - t, 300, extra)


def test_criterion_7_spectrum():
    t = time.perf_counter()
    grid = MomentumGrid(4, 64, 3.5)
    state = gaussian_state(grid, (0, 0, 0, 2.0), 0.2, kappa_or_eta=1.0)
    d = mass_distribution(state, 1.0)
    later = mass_distribution(evolve(state, "irreducible_p0", 3.0), 1.0)
    drift = float(np.max(np.abs(later.values - d.values)))
    parseval = abs(d.total() - half_norm(state))
    checks = {
        "peak bin contains m^2 = 5": d.peak_bin() == d.bin_of(5.0),
        "Parseval within 1e-2": parseval <= 1e-2,
        "evolution invariance 1e-10": drift <= 1e-10,
    }
    extra = f"peak bin {d.peak_bin()}, Parseval {parseval:.1e}, drift {drift:.1e}"
    _check(7, checks, time.perf_counter() - t, 120, extra)


RUNS = [
    ["verify", "kdp", "--rep", "15", "--seed", "7"],
    ["classify", "--equation", "kdp15"],
    ["fw", "--equation", "dirac8", "--momentum", "1,2,0,-1", "--kappa", "2"],
    ["commutators", "--n", "2", "--spin", "dirac", "--grid-points", "16", "--extent", "8"],
]


def test_criterion_8_determinism(tmp_path):
    t = time.perf_counter()
    checks = {}
    for argv in RUNS:
        outputs = []
        for i in range(2):
            proc = subprocess.run([sys.executable, "-m", "p1n.cli", *argv],
                                  capture_output=True, check=False)
            outputs.append((proc.returncode, proc.stdout))
        checks[" ".join(argv[:1])] = outputs[0] == outputs[1] and outputs[0][0] == 0
    state = tmp_path / "g.bin"
    spectra = []
    for i in range(2):
        subprocess.run([sys.executable, "-m", "p1n.cli", "gaussian", "--grid-points", "16",
                        "--extent", "3.5", "--center", "0,0,0,2", "--sigma", "0.4",
                        "--output-state", str(state)], capture_output=True, check=True)
        spectra.append(subprocess.run([sys.executable, "-m", "p1n.cli", "spectrum", "--state", str(state)],
                                      capture_output=True, check=True).stdout)
    checks["spectrum"] = spectra[0] == spectra[1]
    _check(8, checks, time.perf_counter() - t, 600)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    for fn in (test_criterion_1_clifford, test_criterion_2_spin_isospin, test_criterion_3_kdp,
               test_criterion_4_classification, test_criterion_5_fw, test_criterion_6_realization,
               test_criterion_7_spectrum):
        try:
            fn()
        except AssertionError:
            pass
    with tempfile.TemporaryDirectory() as tmp:
        try:
            test_criterion_8_determinism(Path(tmp))
        except AssertionError:
            pass
