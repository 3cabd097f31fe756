"""Finitely presented torsion modules over one-variable Laurent rings.

A module is ``R^n / A R^n`` for a square nonsingular presentation matrix
``A`` whose columns are the relations; generators are the standard basis.
Classification (primary decomposition, isomorphism testing) is only
available over Q and F_p, where the Laurent ring is a PID.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import sympy

from .matrix import Mat, block_diag, det, inverse_over_fractions, invariant_factors
from .ring import (
    QQ,
    BaseRing,
    LaurentFraction,
    LaurentPoly,
    WindingMorphism,
    divides,
    exact_div,
    format_poly,
    poly_lcm,
)


class ModuleError(ValueError):
    pass


class TorsionModule:
    """``R^n / A R^n`` with ``det(A) != 0``."""

    def __init__(self, presentation: Mat, check: bool = True):
        if not presentation.is_square():
            raise ModuleError(f"presentation must be square, got {presentation.rows}x{presentation.cols}")
        if presentation.is_fraction_matrix():
            raise ModuleError("presentation entries must be Laurent polynomials")
        self.base = presentation.base
        self.presentation = presentation
        if check:
            d = det(presentation)
            if d.is_zero():
                raise ModuleError("presentation matrix is singular; module is not torsion")
            self.__dict__["determinant"] = d

    @classmethod
    def trivial(cls, base: BaseRing) -> "TorsionModule":
        return cls(Mat.identity(base, 0))

    @classmethod
    def cyclic(cls, p: LaurentPoly) -> "TorsionModule":
        """``R / (p)``."""
        return cls(Mat(p.base, [[p]]))

    @property
    def ngens(self) -> int:
        return self.presentation.rows

    @cached_property
    def determinant(self) -> LaurentPoly:
        return det(self.presentation)

    @cached_property
    def inverse(self) -> Mat:
        """Presentation inverse over the fraction field (cached)."""
        return inverse_over_fractions(self.presentation)

    def order(self) -> LaurentPoly:
        return order(self)

    def relations(self) -> list[list[LaurentPoly]]:
        """Presentation columns."""
        return [list(c) for c in self.presentation.col_tuples()]

    @cached_property
    def _cleared_inverse(self) -> list[tuple[LaurentPoly, dict[int, LaurentPoly]]]:
        """Rows of the inverse as ``(delta, {j: numerator})`` over a common denominator."""
        out = []
        for row in self.inverse.tolist():
            terms = {j: x for j, x in enumerate(row) if not x.is_zero()}
            delta = LaurentPoly.one(self.base)
            for x in terms.values():
                if isinstance(x, LaurentFraction) and not divides(x.den, delta):
                    delta = poly_lcm(delta, x.den)
            nums = {}
            for j, x in terms.items():
                if isinstance(x, LaurentFraction):
                    nums[j] = x.num * exact_div(delta, x.den)
                else:
                    nums[j] = x * delta
            out.append((delta, nums))
        return out

    def contains(self, vec) -> bool:
        """Is ``vec`` in the relation submodule ``A R^n``, i.e. is ``A^-1 vec`` integral?"""
        if len(vec) != self.ngens:
            raise ModuleError(f"vector of length {len(vec)} for a module with {self.ngens} generators")
        vec = [v if isinstance(v, LaurentPoly) else LaurentPoly.constant(self.base, v) for v in vec]
        if all(v.is_zero() for v in vec):
            return True
        if not self.base.is_field:
            return all(isinstance(x, LaurentPoly) or x.is_polynomial() for x in self.inverse.apply(vec))
        for delta, nums in self._cleared_inverse:
            acc = LaurentPoly.zero(self.base)
            for j, n in nums.items():
                if not vec[j].is_zero():
                    acc = acc + n * vec[j]
            if not divides(delta, acc):
                return False
        return True

    def promote(self, target: BaseRing = QQ) -> "TorsionModule":
        if self.base == target:
            return self
        m = WindingMorphism(1, self.base, target)
        return tensor_along(m, self)

    def __eq__(self, other):
        if not isinstance(other, TorsionModule):
            return NotImplemented
        return self.presentation == other.presentation

    def __hash__(self):
        return hash(self.presentation)

    def __repr__(self):
        return f"TorsionModule({self.base}, n={self.ngens}, order={format_poly(order(self))})"

    def to_json(self) -> dict:
        return {
            "base": str(self.base),
            "presentation": [[format_poly(x) for x in r] for r in self.presentation.tolist()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TorsionModule":
        try:
            base = BaseRing.parse(obj["base"])
            rows = obj["presentation"]
        except KeyError as exc:
            raise ModuleError(f"module object is missing field {exc.args[0]!r}") from None
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise ModuleError("field 'presentation' must be a list of rows")
        return cls(Mat(base, rows, len(rows[0]) if rows else 0))


def load_module(path) -> TorsionModule:
    return TorsionModule.from_json(json.loads(Path(path).read_text()))


def order(M: TorsionModule) -> LaurentPoly:
    """Normalized determinant of the presentation."""
    return M.determinant.normalize()


def direct_sum(M1: TorsionModule, M2: TorsionModule) -> TorsionModule:
    if M1.base != M2.base:
        raise ModuleError(f"base ring mismatch: {M1.base} vs {M2.base}")
    if M1.ngens == 0:
        return M2
    if M2.ngens == 0:
        return M1
    S = TorsionModule(block_diag(M1.presentation, M2.presentation), check=False)
    S.__dict__["determinant"] = M1.determinant * M2.determinant  # block diagonal
    n1 = M1.ngens
    S.__dict__["_cleared_inverse"] = list(M1._cleared_inverse) + [
        (d, {j + n1: x for j, x in nums.items()}) for d, nums in M2._cleared_inverse
    ]
    return S


def tensor_along(m: WindingMorphism, M: TorsionModule) -> TorsionModule:
    """Base change along ``t -> t^omega`` (and the coefficient map of ``m``)."""
    if M.base != m.source:
        raise ModuleError(f"morphism expects a module over {m.source}, got {M.base}")
    P = M.presentation
    return TorsionModule(Mat(m.target, [[m(x) for x in r] for r in P.tolist()], P.cols))


# -- factorization ------------------------------------------------------------

_T = sympy.Symbol("t")


def factor_poly(p: LaurentPoly) -> list[tuple[LaurentPoly, int]]:
    """Irreducible factors (normalized) with multiplicities; units dropped.

    Backed by sympy's univariate factorization over Q and GF(p).
    """
    base = p.base
    if not base.is_field:
        raise ModuleError("factorization needs field coefficients; promote Z to Q first")
    if p.is_zero():
        raise ModuleError("cannot factor the zero polynomial")
    q = p.normalize()
    if q.span == 0:
        return []
    coeffs = q.to_coeffs()[::-1]
    if base.kind == "q":
        poly = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in coeffs], _T, domain="QQ")
        _, facs = poly.factor_list()
    else:
        poly = sympy.Poly([int(c) for c in coeffs], _T, modulus=base.p)
        _, facs = poly.factor_list()
    out = []
    for f, k in facs:
        cs = [sympy.Rational(c) for c in f.all_coeffs()[::-1]]
        if base.kind == "q":
            lp = LaurentPoly.from_coeffs(base, [sympy_to_fraction(c) for c in cs])
        else:
            lp = LaurentPoly.from_coeffs(base, [int(c) % base.p for c in cs])
        lp = lp.normalize()
        if lp.span > 0:
            out.append((lp, int(k)))
    return out


def sympy_to_fraction(c):
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


def primary_decomposition(M: TorsionModule) -> list[tuple[LaurentPoly, int, int]]:
    """Cyclic primary summands ``R/(p^k)`` as ``(p, k, multiplicity)`` triples."""
    if not M.base.is_field:
        raise ModuleError("primary decomposition needs field coefficients; promote Z to Q first")
    if M.ngens == 0:
        return []
    counts: dict[tuple[LaurentPoly, int], int] = {}
    for d in invariant_factors(M.presentation):
        if d.is_unit():
            continue
        for p, k in factor_poly(d):
            counts[(p, k)] = counts.get((p, k), 0) + 1
    return sorted(((p, k, n) for (p, k), n in counts.items()), key=lambda x: (format_poly(x[0]), x[1]))


def modules_isomorphic(M1: TorsionModule, M2: TorsionModule) -> bool:
    if M1.base != M2.base:
        raise ModuleError(f"base ring mismatch: {M1.base} vs {M2.base}")
    if order(M1) != order(M2):
        return False
    return primary_decomposition(M1) == primary_decomposition(M2)


def is_surjective(matrix: Mat, target: TorsionModule) -> bool:
    """Do the columns of ``matrix`` generate ``target``? (field coefficients)"""
    if matrix.rows != target.ngens:
        raise ModuleError("map matrix does not match the target generator count")
    if target.ngens == 0:
        return True
    if not target.base.is_field:
        raise ModuleError("surjectivity test needs field coefficients")
    facs = invariant_factors(matrix.hstack(target.presentation))
    return len(facs) == target.ngens and all(d.is_unit() for d in facs)


__all__ = [
    "ModuleError",
    "TorsionModule",
    "direct_sum",
    "factor_poly",
    "is_surjective",
    "load_module",
    "modules_isomorphic",
    "order",
    "primary_decomposition",
    "tensor_along",
]

