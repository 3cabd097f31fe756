"""Acceptance criteria 1-9, run through the verification suite with timing budgets.

Each criterion prints one PASS/FAIL line; the lines are also repeated in the
pytest terminal summary.
"""

import subprocess
import sys
import time

import pytest
import sympy

from conftest import ACCEPTANCE_LINES, T, to_sympy
from linkform.knot import alexander_poly_seifert, blanchfield_from_seifert, satellite_blanchfield
from linkform.module import order
from linkform.verify import DEFAULT_FIXTURES, Corpus, connected_sum_pairs, run_criterion

# seconds; None means the criterion states no time limit
BUDGETS = {1: 5.0, 2: 5.0, 3: 5.0, 4: None, 5: 10.0, 6: None, 7: None, 8: 30.0, 9: None}


@pytest.fixture(scope="module")
def corpus():
    return Corpus.load(DEFAULT_FIXTURES)


def _run(n, corpus, extra_failures=0):
    start = time.perf_counter()
    reports = run_criterion(n, corpus)
    elapsed = time.perf_counter() - start
    failed = [r for r in reports if not r.passed]
    budget = BUDGETS[n]
    ok = not failed and not extra_failures and reports and (budget is None or elapsed < budget)
    limit = f" (budget {budget:.0f} s)" if budget else ""
    line = (f"criterion {n}: {'PASS' if ok else 'FAIL'}  {len(reports) - len(failed)}/{len(reports)} checks, "
            f"{elapsed:.2f} s{limit}")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return reports, failed, elapsed


def _assert_ok(n, reports, failed, elapsed):
    assert reports, f"criterion {n} produced no checks"
    assert not failed, "; ".join(f"{r.case}: {r.witness}" for r in failed[:5])
    if BUDGETS[n] is not None:
        assert elapsed < BUDGETS[n], f"criterion {n} took {elapsed:.2f} s"


def test_criterion_1_connected_sums(corpus):
    reports, failed, elapsed = _run(1, corpus)
    assert len(reports) == 11 and reports[0].case == "trefoil#figure_eight"
    assert len(set(connected_sum_pairs(corpus))) == 11
    _assert_ok(1, reports, failed, elapsed)


def test_criterion_2_satellite_orders(corpus):
    reports, failed, elapsed = _run(2, corpus)
    n = len(corpus.seifert_knots())
    assert len(reports) == n * n
    _assert_ok(2, reports, failed, elapsed)


def test_criterion_2_sympy_oracle(corpus):
    """Seifert's formula recomputed with sympy determinants for a few pairs."""
    for p_name, c_name, w in (("trefoil", "figure_eight", 2), ("5_2", "trefoil", 3), ("8_20", "6_1", 1)):
        P, C = corpus[p_name], corpus[c_name]
        VP, VC = sympy.Matrix(P.seifert.V), sympy.Matrix(C.seifert.V)
        dp = (T * VP - VP.T).det()
        dc = (T * VC - VC.T).det().subs(T, T**w)
        S = satellite_blanchfield(blanchfield_from_seifert(P.seifert), blanchfield_from_seifert(C.seifert), w)
        ratio = sympy.cancel(to_sympy(order(S.module)) / (dp * dc))
        num, den = sympy.fraction(ratio)
        assert len(sympy.Poly(num, T).terms()) == 1 and len(sympy.Poly(den, T).terms()) == 1


def test_criterion_3_tensoring(corpus):
    reports, failed, elapsed = _run(3, corpus)
    assert len(reports) == len(corpus.seifert_knots())
    _assert_ok(3, reports, failed, elapsed)


def test_criterion_4_morphisms(corpus):
    reports, failed, elapsed = _run(4, corpus)
    n = len(corpus.seifert_knots())
    assert len(reports) == 11 + 3 * n * n
    _assert_ok(4, reports, failed, elapsed)


def test_criterion_5_oracles(corpus):
    reports, failed, elapsed = _run(5, corpus)
    both = [k for k in corpus.knots if k.seifert is not None and k.pd is not None]
    assert len(both) == len(corpus.knots) == 36
    _assert_ok(5, reports, failed, elapsed)
    for k in both:  # recomputed with sympy, independently of the suite
        V = sympy.Matrix(k.seifert.V)
        d = sympy.Poly((T * V - V.T).det() if V.shape[0] else sympy.Integer(1), T)
        d = sympy.Poly(sympy.cancel(d.as_expr() / T ** min(m[0] for m in d.monoms())), T)
        if d.LC() < 0:
            d = -d
        assert abs(d.eval(1)) == 1
        assert sympy.expand(to_sympy(alexander_poly_seifert(k.seifert)) - d.as_expr()) == 0


def test_criterion_6_classical_pairings(corpus):
    reports, failed, elapsed = _run(6, corpus)
    assert len(reports) == len(corpus.seifert_knots())
    _assert_ok(6, reports, failed, elapsed)


def test_criterion_7_twisted(corpus):
    reports, failed, elapsed = _run(7, corpus)
    assert [r.case for r in reports] == ["trefoil#trefoil F5 permutation", "trefoil#trefoil trivial"]
    _assert_ok(7, reports, failed, elapsed)


def test_criterion_8_isometries(corpus):
    reports, failed, elapsed = _run(8, corpus)
    assert len(reports) == 50
    _assert_ok(8, reports, failed, elapsed)


def test_criterion_9_eta_regularity(corpus):
    trefoil, fig8 = str(DEFAULT_FIXTURES / "trefoil.json"), str(DEFAULT_FIXTURES / "figure_eight.json")
    commands = {
        "infect": ["infect", "--host", fig8, "--knot", trefoil, "--winding", "0"],
        "satellite (infect with a knot host)": ["infect", "--host", trefoil, "--knot", fig8, "--winding", "0"],
        "tensor": ["tensor", "--knot", trefoil, "--winding", "0"],
    }
    codes = {}
    for label, argv in commands.items():
        proc = subprocess.run([sys.executable, "-m", "linkform", *argv], capture_output=True, text=True)
        codes[label] = (proc.returncode, proc.stderr)
    bad = {k: v[0] for k, v in codes.items() if v[0] != 2 or "eta-regular" not in v[1]}
    reports, failed, elapsed = _run(9, corpus, extra_failures=len(bad))
    assert not bad, f"CLI did not exit 2: {bad}"
    assert {r.case for r in reports} == {"tensor w=0", "infect w=0", "satellite w=0"}
    _assert_ok(9, reports, failed, elapsed)
