"""Linking pairings ``M x M -> Q(t)/R`` on presented torsion modules.

Pairings are sesquilinear: linear in the first slot and conjugate-linear
in the second, ``Bl(a, b) = sum_ij a_i * gram[i][j] * conj(b_j)``.
Gram entries are canonical :class:`FractionClass` values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .matrix import Mat, hermitian_defect, smith_normal_form
from .module import (
    ModuleError,
    TorsionModule,
    direct_sum,
    is_surjective,
    order,
    tensor_along,
)
from .ring import (
    BaseRing,
    FractionClass,
    LaurentFraction,
    LaurentPoly,
    WindingMorphism,
    divides,
    exact_div,
    poly_gcd,
    poly_lcm,
    reduce_mod_ring,
)


class LinkingError(ValueError):
    pass


def _as_poly(base: BaseRing, x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.constant(base, x)


def _class_sum(base: BaseRing, terms) -> FractionClass:
    """Reduce ``sum c * x`` for (ring element, class) pairs, grouping by denominator."""
    by_den: dict[LaurentPoly, LaurentPoly] = {}
    single = None
    for c, x in terms:
        if c.is_zero() or x.is_zero():
            continue
        single = x if not by_den and c == 1 else None
        acc = by_den.get(x.den)
        prod = c * x.num
        by_den[x.den] = prod if acc is None else acc + prod
    if single is not None and len(by_den) == 1:
        return single
    total = None
    for den, num in by_den.items():
        if num.is_zero():
            continue
        piece = reduce_mod_ring(LaurentFraction(num, den))
        total = piece if total is None else total + piece
    return total if total is not None else FractionClass.zero(base)


class LinkingPairing:
    """A torsion module with a Gram table ``gram[i][j] = Bl(e_i, e_j)``."""

    def __init__(self, module: TorsionModule, gram: Sequence[Sequence], check: bool = True):
        n = module.ngens
        base = module.base
        rows = [list(r) for r in gram]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise LinkingError(f"gram table must be {n}x{n} for a module with {n} generators")
        table = []
        for r in rows:
            out = []
            for x in r:
                if isinstance(x, str):
                    x = FractionClass.parse(x, base)
                elif not isinstance(x, FractionClass):
                    x = reduce_mod_ring(x)
                if x.base != base:
                    raise LinkingError(f"gram entry over {x.base} for a module over {base}")
                out.append(x)
            table.append(tuple(out))
        self.module = module
        self.gram = tuple(table)
        if check:
            bad = self.relation_defect()
            if bad is not None:
                raise LinkingError(
                    "pairing is not well defined: relation column {} does not pair to zero "
                    "with generator {} in the {} slot".format(*bad)
                )

    @property
    def base(self) -> BaseRing:
        return self.module.base

    @property
    def ngens(self) -> int:
        return self.module.ngens

    @classmethod
    def zero(cls, module: TorsionModule) -> "LinkingPairing":
        z = FractionClass.zero(module.base)
        return cls(module, [[z] * module.ngens for _ in range(module.ngens)], check=False)

    def relation_defect(self):
        """First ``(relation, generator, slot)`` where relation-vanishing fails, else None."""
        n = self.ngens
        if n == 0:
            return None
        # Clear denominators once: gram = P / delta with P polynomial.
        delta = LaurentPoly.one(self.base)
        for den in {x.den for r in self.gram for x in r}:
            if not divides(den, delta):
                delta = poly_lcm(delta, den)
        P = [[x.num * exact_div(delta, x.den) for x in r] for r in self.gram]
        for k, rel in enumerate(self.module.relations()):
            crel = [x.conj() for x in rel]
            for j in range(n):
                if not divides(delta, sum((rel[i] * P[i][j] for i in range(n)), LaurentPoly.zero(self.base))):
                    return (k, j, "first")
            for i in range(n):
                if not divides(delta, sum((P[i][j] * crel[j] for j in range(n)), LaurentPoly.zero(self.base))):
                    return (k, i, "second")
        return None

    def is_well_defined(self) -> bool:
        return self.relation_defect() is None

    def evaluate(self, a: Sequence, b: Sequence) -> FractionClass:
        return evaluate(self, a, b)

    def __eq__(self, other):
        if not isinstance(other, LinkingPairing):
            return NotImplemented
        return self.module == other.module and self.gram == other.gram

    def __hash__(self):
        return hash((self.module, self.gram))

    def __repr__(self):
        return f"LinkingPairing({self.base}, n={self.ngens})"

    def to_json(self) -> dict:
        return {"module": self.module.to_json(), "gram": [[str(x) for x in r] for r in self.gram]}

    @classmethod
    def from_json(cls, obj: dict) -> "LinkingPairing":
        if "module" not in obj or "gram" not in obj:
            missing = "module" if "module" not in obj else "gram"
            raise LinkingError(f"pairing object is missing field {missing!r}")
        module = TorsionModule.from_json(obj["module"])
        return cls(module, obj["gram"])


def load_pairing(path) -> LinkingPairing:
    return LinkingPairing.from_json(json.loads(Path(path).read_text()))


def dump_pairing(B: LinkingPairing) -> str:
    return json.dumps(B.to_json(), indent=1) + "\n"


def pairing_from_presentation(A: Mat, scale: LaurentPoly | None = None) -> LinkingPairing:
    """Pairing on ``R^n / A R^n`` with ``gram = scale * (A^T)^{-1}``.

    ``A / scale`` must be hermitian; then the pairing is well defined,
    hermitian and nonsingular.
    """
    base = A.base
    if not A.is_square():
        raise LinkingError(f"presentation must be square, got {A.rows}x{A.cols}")
    if scale is None:
        scale = LaurentPoly.one(base)
    if scale.is_zero():
        raise LinkingError("scale must be nonzero")
    cs = scale.conj()
    for i in range(A.rows):
        for j in range(i, A.cols):
            if A[i, j] * cs != A[j, i].conj() * scale:
                raise LinkingError(f"presentation is not hermitian: cell ({i}, {j}) differs from "
                                   f"the conjugate of cell ({j}, {i})")
    module = TorsionModule(A)
    inv = module.inverse
    n = A.rows
    gram = [[reduce_mod_ring(inv[j, i] * scale) for j in range(n)] for i in range(n)]
    return LinkingPairing(module, gram, check=True)


def evaluate(B: LinkingPairing, a: Sequence, b: Sequence) -> FractionClass:
    """``sum_ij a_i * gram[i][j] * conj(b_j)`` reduced modulo the ring."""
    n = B.ngens
    if len(a) != n or len(b) != n:
        raise LinkingError(f"vectors of length {len(a)}, {len(b)} for a pairing on {n} generators")
    base = B.base
    a = [_as_poly(base, x) for x in a]
    cb = [_as_poly(base, x).conj() for x in b]
    G = B.gram
    return _class_sum(
        base,
        ((a[i] * cb[j], G[i][j]) for i in range(n) if not a[i].is_zero() for j in range(n) if not cb[j].is_zero()),
    )


# -- classification --------------------------------------------------------------


def is_hermitian(B: LinkingPairing) -> bool:
    G = B.gram
    n = B.ngens
    return all(G[i][j] == G[j][i].conj() for i in range(n) for j in range(i, n))


def is_nonsingular(B: LinkingPairing) -> bool:
    """Is the adjoint ``b -> Bl(-, b)`` an isomorphism onto the dual module?

    The kernel of the adjoint is ``L / conj(A) R^n`` (after conjugating
    ``b``) with ``L = {c : gram @ c integral}``.  ``L`` is computed from the
    Smith form of the numerator matrix over a common denominator, and the
    adjoint is injective, hence bijective, iff ``det L`` and ``det conj(A)``
    agree up to units.
    """
    base = B.base
    if not base.is_field:
        raise LinkingError("nonsingularity test needs field coefficients")
    n = B.ngens
    if n == 0:
        return True
    one = LaurentPoly.one(base)
    delta = one
    for r in B.gram:
        for x in r:
            if not x.is_zero():
                delta = poly_lcm(delta, x.den)
    target = order(B.module).conj().normalize()
    if delta.is_unit():
        return target.is_unit()
    P = Mat(base, [[exact_div(delta, x.den) * x.num for x in r] for r in B.gram], n)
    _, D, _ = smith_normal_form(P, transforms=False)
    lattice = one
    for i in range(n):
        d = D[i, i]
        g = poly_gcd(delta, d) if not d.is_zero() else delta
        lattice = lattice * exact_div(delta, g)
    return lattice.normalize() == target


def classify(B: LinkingPairing) -> dict:
    return {"hermitian": is_hermitian(B), "nonsingular": is_nonsingular(B)}


# -- sums, maps and morphisms -----------------------------------------------------


def orthogonal_sum(B1: LinkingPairing, B2: LinkingPairing) -> LinkingPairing:
    """Block-diagonal Gram on the direct sum, left summand first."""
    if B1.base != B2.base:
        raise LinkingError(f"base ring mismatch: {B1.base} vs {B2.base}")
    if B2.ngens == 0:
        return B1
    if B1.ngens == 0:
        return B2
    z = FractionClass.zero(B1.base)
    n1, n2 = B1.ngens, B2.ngens
    gram = [list(r) + [z] * n2 for r in B1.gram] + [[z] * n1 + list(r) for r in B2.gram]
    return LinkingPairing(direct_sum(B1.module, B2.module), gram, check=False)


class ModuleMap:
    """Module homomorphism given by a matrix whose columns are images of source generators."""

    def __init__(self, source: TorsionModule, target: TorsionModule, matrix: Mat, check: bool = True):
        if matrix.shape != (target.ngens, source.ngens):
            raise LinkingError(
                f"map matrix must be {target.ngens}x{source.ngens}, got {matrix.rows}x{matrix.cols}"
            )
        if not (source.base == target.base == matrix.base):
            raise LinkingError("source, target and matrix must share a base ring")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            k = self.defect()
            if k is not None:
                raise LinkingError(f"map is not well defined: relation {k} of the source "
                                   "does not map into the target relations")

    @classmethod
    def identity(cls, M: TorsionModule) -> "ModuleMap":
        return cls(M, M, Mat.identity(M.base, M.ngens), check=False)

    @classmethod
    def zero(cls, source: TorsionModule, target: TorsionModule) -> "ModuleMap":
        return cls(source, target, Mat.zeros(source.base, target.ngens, source.ngens), check=False)

    def defect(self):
        """Index of the first source relation whose image is not a target relation."""
        for k, rel in enumerate(self.source.relations()):
            if not self.target.contains(self.matrix.apply(rel)):
                return k
        return None

    def is_well_defined(self) -> bool:
        return self.defect() is None

    def image(self, j: int) -> list:
        return list(self.matrix.col(j))

    def __repr__(self):
        return f"ModuleMap({self.source.ngens} -> {self.target.ngens})"


def block_inclusions(M1: TorsionModule, M2: TorsionModule) -> tuple[ModuleMap, ModuleMap]:
    """Inclusions of the summands into ``direct_sum(M1, M2)``."""
    S = direct_sum(M1, M2)
    base = S.base
    n1, n2 = M1.ngens, M2.ngens
    one, zero = LaurentPoly.one(base), LaurentPoly.zero(base)
    i1 = Mat(base, [[one if i == j else zero for j in range(n1)] for i in range(n1 + n2)], n1)
    i2 = Mat(base, [[one if i == j + n1 else zero for j in range(n2)] for i in range(n1 + n2)], n2)
    return ModuleMap(M1, S, i1, check=False), ModuleMap(M2, S, i2, check=False)


def pullback(psi: ModuleMap, B: LinkingPairing) -> LinkingPairing:
    """``gram'[i][j] = Bl(psi(e_i), psi(e_j))`` on the source of ``psi``."""
    if psi.target != B.module:
        raise LinkingError("pairing does not live on the target of the map")
    n = psi.source.ngens
    images = [psi.image(j) for j in range(n)]
    gram = [[evaluate(B, images[i], images[j]) for j in range(n)] for i in range(n)]
    return LinkingPairing(psi.source, gram, check=False)


def is_morphism(psi: ModuleMap, B_M: LinkingPairing, B_N: LinkingPairing) -> bool:
    if psi.source != B_M.module or psi.target != B_N.module:
        raise LinkingError("map source/target do not match the pairings' modules")
    if not psi.is_well_defined():
        return False
    return pullback(psi, B_N).gram == B_M.gram


def is_isometry(psi: ModuleMap, B_M: LinkingPairing, B_N: LinkingPairing) -> bool:
    """Morphism of pairings whose underlying module map is bijective."""
    if order(B_M.module) != order(B_N.module):
        return False
    if not is_morphism(psi, B_M, B_N):
        return False
    # A surjection between torsion modules of equal order is injective.
    return is_surjective(psi.matrix, psi.target)


# -- base change and infection ---------------------------------------------------------


def _morphism(m, source: BaseRing, target: BaseRing | None = None) -> WindingMorphism:
    if isinstance(m, WindingMorphism):
        return m
    return WindingMorphism(int(m), source, target or source)


def tensor_pairing(m: WindingMorphism | int, B: LinkingPairing) -> LinkingPairing:
    """``R (x) Bl`` along ``t -> t^omega``: substitute into the Gram table and re-reduce."""
    m = _morphism(m, B.base)
    if m.source != B.base:
        raise LinkingError(f"morphism expects a pairing over {m.source}, got {B.base}")
    if m.omega == 1 and m.source == m.target:
        return B
    return _tensor_pairing(m, B)


@lru_cache(maxsize=512)
def _tensor_pairing(m: WindingMorphism, B: LinkingPairing) -> LinkingPairing:
    # Pairings are immutable, so repeated satellites reuse the tensored companion.
    module = tensor_along(m, B.module)
    gram = [[m.apply_class(x) for x in r] for r in B.gram]
    return LinkingPairing(module, gram, check=True)


@dataclass(frozen=True)
class InfectedModule:
    """Host module plus the tensored knot module, with the block maps realizing psi."""

    module: TorsionModule
    psi: ModuleMap
    host_inclusion: ModuleMap
    knot_inclusion: ModuleMap


@dataclass(frozen=True)
class Infection:
    pairing: LinkingPairing
    psi: ModuleMap
    host_inclusion: ModuleMap
    knot_inclusion: ModuleMap

    @property
    def module(self) -> TorsionModule:
        return self.pairing.module


def infected_module(M_Y: TorsionModule, M_J: TorsionModule, m: WindingMorphism | int) -> InfectedModule:
    m = _morphism(m, M_J.base, M_Y.base)
    if m.target != M_Y.base:
        raise ModuleError(f"morphism lands in {m.target}, host module is over {M_Y.base}")
    MJ = tensor_along(m, M_J)
    S = direct_sum(M_Y, MJ)
    i_y, i_j = block_inclusions(M_Y, MJ)
    return InfectedModule(S, ModuleMap.identity(S), i_y, i_j)


def infect(B_Y: LinkingPairing, B_J: LinkingPairing, m: WindingMorphism | int) -> Infection:
    """Pairing of the infected manifold: ``B_Y`` orthogonally summed with the tensored knot pairing."""
    m = _morphism(m, B_J.base, B_Y.base)
    if m.target != B_Y.base:
        raise LinkingError(f"morphism lands in {m.target}, host pairing is over {B_Y.base}")
    BJ = tensor_pairing(m, B_J)
    B = orthogonal_sum(B_Y, BJ)
    i_y, i_j = block_inclusions(B_Y.module, BJ.module)
    return Infection(B, ModuleMap.identity(B.module), i_y, i_j)


__all__ = [
    "Infection",
    "InfectedModule",
    "LinkingError",
    "LinkingPairing",
    "ModuleMap",
    "block_inclusions",
    "classify",
    "dump_pairing",
    "evaluate",
    "infect",
    "infected_module",
    "is_hermitian",
    "is_isometry",
    "is_morphism",
    "is_nonsingular",
    "load_pairing",
    "orthogonal_sum",
    "pairing_from_presentation",
    "pullback",
    "tensor_pairing",
]
