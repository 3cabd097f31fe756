import sympy
from hypothesis import strategies as st

from linkform.ring import QQ, ZZ, LaurentPoly

T = sympy.Symbol("t")


def to_sympy(p: LaurentPoly):
    """Independent sympy expression for a Laurent polynomial."""
    return sum((sympy.Rational(int(c.numerator), int(c.denominator)) if hasattr(c, "denominator") else c) * T**e
               for e, c in p.items())


def is_laurent(expr) -> bool:
    """Is a rational function of t a Laurent polynomial? (sympy oracle)"""
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    den = sympy.Poly(den, T)
    return len(den.terms()) == 1


def laurent_polys(base=QQ, max_terms=4, lo=-3, hi=3, nonzero=False):
    coeff = st.integers(-4, 4)
    terms = st.dictionaries(st.integers(lo, hi), coeff, max_size=max_terms)
    s = terms.map(lambda d: LaurentPoly(base, d))
    return s.filter(lambda p: not p.is_zero()) if nonzero else s


def int_polys(**kw):
    return laurent_polys(base=ZZ, **kw)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts, one line per criterion, after the run."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
