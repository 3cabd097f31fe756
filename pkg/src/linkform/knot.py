"""Knot inputs and classical invariants.

Seifert matrices give the Alexander polynomial ``det(tV - V^T)`` and the
Blanchfield form; PD codes give Wirtinger presentations, whose Fox
matrices give the Alexander module and, with a representation over F_p,
twisted Alexander orders.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .linking import LinkingPairing, infect, pairing_from_presentation
from .matrix import Mat, det
from .module import TorsionModule
from .ring import GF, QQ, ZZ, BaseRing, LaurentPoly, RingError

Word = tuple  # tuple of (generator, +1 | -1)


class KnotError(ValueError):
    pass


# -- Seifert matrices ---------------------------------------------------------------


@dataclass(frozen=True)
class SeifertMatrix:
    V: tuple

    def __init__(self, V: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in V)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise KnotError("Seifert matrix must be square")
        object.__setattr__(self, "V", rows)
        skew = Mat(ZZ, [[rows[i][j] - rows[j][i] for j in range(n)] for i in range(n)], n)
        d = det(skew)
        if d != 1:
            raise KnotError(f"V - V^T must be unimodular (det 1), got det {d}")

    @property
    def size(self) -> int:
        return len(self.V)

    def alexander_matrix(self, base: BaseRing = ZZ) -> Mat:
        """``t V - V^T``."""
        n = self.size
        V = self.V
        t = LaurentPoly.gen(base)
        rows = [[t.scale(V[i][j]) - LaurentPoly.constant(base, V[j][i]) for j in range(n)] for i in range(n)]
        return Mat(base, rows, n)

    def tolist(self):
        return [list(r) for r in self.V]


def alexander_poly_seifert(V: SeifertMatrix) -> LaurentPoly:
    return det(V.alexander_matrix(ZZ)).normalize()


def blanchfield_from_seifert(V: SeifertMatrix, base: BaseRing = QQ) -> LinkingPairing:
    """``Bl(a, b) = (1 - t) a^T (tV - V^T)^{-T} conj(b)`` on the module presented by ``tV - V^T``.

    ``(tV - V^T) / (1 - t)`` is hermitian, which makes the pairing well
    defined, hermitian and nonsingular.
    """
    if not base.is_field:
        raise KnotError("Blanchfield pairings need field coefficients (q or fp:<p>)")
    A = V.alexander_matrix(base)
    if det(A).is_zero():
        raise KnotError(f"det(tV - V^T) vanishes over {base}")
    t = LaurentPoly.gen(base)
    return pairing_from_presentation(A, LaurentPoly.one(base) - t)


def connected_sum(V1: SeifertMatrix, V2: SeifertMatrix) -> SeifertMatrix:
    n1, n2 = V1.size, V2.size
    rows = [list(r) + [0] * n2 for r in V1.V] + [[0] * n1 + list(r) for r in V2.V]
    return SeifertMatrix(rows)


def satellite_blanchfield(B_P: LinkingPairing, B_C: LinkingPairing, omega: int) -> LinkingPairing:
    """Pattern pairing summed with the companion pairing under ``t -> t^omega``."""
    return infect(B_P, B_C, omega).pairing


# -- PD codes and Wirtinger presentations -------------------------------------------------


@dataclass(frozen=True)
class PDCode:
    """Crossings ``(a, b, c, d)``: edges counterclockwise from the incoming under-strand."""

    crossings: tuple

    def __init__(self, crossings: Sequence[Sequence[int]]):
        xs = []
        for k, x in enumerate(crossings):
            x = tuple(x)
            if len(x) != 4:
                raise KnotError(f"crossing {k} must list 4 arcs, got {len(x)}")
            xs.append(tuple(int(a) for a in x))
        object.__setattr__(self, "crossings", tuple(xs))
        counts: dict[int, int] = {}
        for x in xs:
            for a in x:
                counts[a] = counts.get(a, 0) + 1
        for a in sorted(counts):
            if counts[a] != 2:
                raise KnotError(f"arc {a} appears {counts[a]} time(s) in the PD code; expected 2")

    def __len__(self):
        return len(self.crossings)


@dataclass(frozen=True)
class WirtingerPresentation:
    generators: int
    relators: tuple = field(default_factory=tuple)

    def __post_init__(self):
        rels = tuple(tuple((int(g), int(e)) for g, e in r) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        for k, r in enumerate(rels):
            for g, e in r:
                if not 0 <= g < self.generators or e not in (1, -1):
                    raise KnotError(f"relator {k} has an invalid letter ({g}, {e})")
            if sum(e for _, e in r) != 0:
                raise KnotError(f"relator {k} does not abelianize to the identity")


def _edge_directions(pd: PDCode):
    """For each (crossing, slot), whether the edge there enters the crossing."""
    occ: dict[int, list[tuple[int, int]]] = {}
    for c, x in enumerate(pd.crossings):
        for s, a in enumerate(x):
            occ.setdefault(a, []).append((c, s))
    entering: dict[tuple[int, int], bool] = {}
    for c in range(len(pd.crossings)):
        entering[(c, 0)] = True
        entering[(c, 2)] = False
    changed = True
    while changed:
        changed = False
        for a, (p, q) in occ.items():
            for u, v in ((p, q), (q, p)):
                if u in entering and v not in entering:
                    entering[v] = not entering[u]
                    changed = True
                elif u in entering and v in entering and entering[u] == entering[v]:
                    raise KnotError(f"arc {a} has inconsistent orientation")
        for c in range(len(pd.crossings)):
            b, d = (c, 1), (c, 3)
            for u, v in ((b, d), (d, b)):
                if u in entering and v not in entering:
                    entering[v] = not entering[u]
                    changed = True
    if len(entering) != 4 * len(pd.crossings):
        raise KnotError("could not orient every arc of the PD code")
    return entering, occ


def wirtinger_from_pd(pd: PDCode) -> WirtingerPresentation:
    """One generator per over-arc, one relator per crossing, last relator dropped."""
    if len(pd) == 0:
        return WirtingerPresentation(1, ())
    entering, occ = _edge_directions(pd)
    # single component: follow the diagram from one edge
    start = min(occ)
    seen = set()
    a = start
    while a not in seen:
        seen.add(a)
        c, s = next(o for o in occ[a] if entering[o])
        a = pd.crossings[c][(s + 2) % 4]
    if len(seen) != len(occ):
        missing = min(set(occ) - seen)
        raise KnotError(f"PD code has more than one component (arc {missing} is not reached)")
    parent = {a: a for a in occ}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in pd.crossings:
        ra, rb = find(x[1]), find(x[3])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(a) for a in occ})
    arc = {a: roots.index(find(a)) for a in occ}
    relators = []
    for c, x in enumerate(pd.crossings):
        g_in, g_out, g_over = arc[x[0]], arc[x[2]], arc[x[1]]
        eps = 1 if entering[(c, 1)] else -1
        relators.append(((g_out, -1), (g_over, eps), (g_in, 1), (g_over, -eps)))
    return WirtingerPresentation(len(roots), tuple(relators[:-1]))


# -- Fox calculus -------------------------------------------------------------------


def reduce_word(word: Sequence) -> Word:
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def inverse_word(word: Sequence) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def fox_derivative(word: Sequence, g: int) -> dict:
    """Free derivative ``d word / d g`` as a map reduced word -> integer coefficient."""
    out: dict = {}
    prefix: list = []
    for h, e in word:
        if h == g:
            if e == 1:
                key, c = reduce_word(prefix), 1
            else:
                key, c = reduce_word(prefix + [(h, -1)]), -1
            out[key] = out.get(key, 0) + c
            if out[key] == 0:
                del out[key]
        prefix.append((h, e))
    return out


def group_ring_mul(x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for u, a in x.items():
        for v, b in y.items():
            w = reduce_word(tuple(u) + tuple(v))
            out[w] = out.get(w, 0) + a * b
    return {w: c for w, c in out.items() if c}


def group_ring_add(x: Mapping, y: Mapping) -> dict:
    out = dict(x)
    for w, c in y.items():
        out[w] = out.get(w, 0) + c
    return {w: c for w, c in out.items() if c}


def format_word(word: Sequence, names: str = "abcdefghijklmnopqrstuvwxyz") -> str:
    if not word:
        return "1"
    return "".join(names[g] + ("" if e == 1 else "^-1") for g, e in word)


def fox_matrix(pres: WirtingerPresentation) -> list[list[dict]]:
    return [[fox_derivative(r, g) for g in range(pres.generators)] for r in pres.relators]


def abelianize(elem: Mapping, base: BaseRing = ZZ) -> LaurentPoly:
    """Every generator goes to ``t``."""
    terms: dict[int, int] = {}
    for w, c in elem.items():
        e = sum(x for _, x in w)
        terms[e] = terms.get(e, 0) + c
    return LaurentPoly(base, terms)


def alexander_module(pres: WirtingerPresentation, base: BaseRing = ZZ) -> TorsionModule:
    """Abelianized Fox matrix with the last generator column deleted.

    Relators become the columns of the presentation.
    """
    n = pres.generators
    if n - 1 != len(pres.relators):
        raise KnotError(f"expected {n - 1} relators for {n} generators, got {len(pres.relators)}")
    if n <= 1:
        return TorsionModule.trivial(base)
    fox = fox_matrix(pres)
    rows = [[abelianize(fox[i][j], base) for j in range(n - 1)] for i in range(n - 1)]
    A = Mat(base, rows, n - 1).T
    if det(A).is_zero():
        raise KnotError("presentation does not define a torsion module")
    return TorsionModule(A, check=False)


def alexander_poly_fox(pres: WirtingerPresentation) -> LaurentPoly:
    return alexander_module(pres, ZZ).order()


# -- representations and twisted Alexander orders -----------------------------------------


def _mat_mul_mod(A, B, p):
    k = len(A)
    return tuple(
        tuple(sum(A[i][l] * B[l][j] for l in range(k)) % p for j in range(k)) for i in range(k)
    )


def _mat_identity(k):
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def _mat_inverse_mod(A, p):
    k = len(A)
    M = [list(r) + [1 if i == j else 0 for j in range(k)] for i, r in enumerate(A)]
    for c in range(k):
        piv = next((r for r in range(c, k) if M[r][c] % p), None)
        if piv is None:
            raise KnotError("representation image is not invertible")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, p)
        M[c] = [x * inv % p for x in M[c]]
        for r in range(k):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[c])]
    return tuple(tuple(r[k:]) for r in M)


def _char_poly_mod(A, p) -> LaurentPoly:
    k = len(A)
    F = GF(p)
    t = LaurentPoly.gen(F)
    rows = [[(t if i == j else LaurentPoly.zero(F)) - LaurentPoly.constant(F, A[i][j]) for j in range(k)]
            for i in range(k)]
    return det(Mat(F, rows, k))


@dataclass(frozen=True)
class Representation:
    """``k x k`` matrices over F_p, one per Wirtinger generator."""

    p: int
    k: int
    images: tuple

    def __init__(self, p: int, k: int, images: Sequence):
        F = GF(p)  # validates p
        imgs = []
        for g, m in enumerate(images):
            m = tuple(tuple(int(x) % p for x in r) for r in m)
            if len(m) != k or any(len(r) != k for r in m):
                raise KnotError(f"image of generator {g} is not {k}x{k}")
            imgs.append(m)
        object.__setattr__(self, "p", F.p)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "images", tuple(imgs))
        object.__setattr__(self, "_inverses", tuple(_mat_inverse_mod(m, p) for m in imgs))

    @classmethod
    def trivial(cls, p: int, generators: int, k: int = 1) -> "Representation":
        return cls(p, k, [_mat_identity(k)] * generators)

    def word_image(self, word: Sequence):
        M = _mat_identity(self.k)
        for g, e in word:
            M = _mat_mul_mod(M, self.images[g] if e == 1 else self._inverses[g], self.p)
        return M

    def validate(self, pres: WirtingerPresentation) -> None:
        if len(self.images) != pres.generators:
            raise KnotError(f"representation has {len(self.images)} images for {pres.generators} generators")
        ident = _mat_identity(self.k)
        for i, r in enumerate(pres.relators):
            if self.word_image(r) != ident:
                raise KnotError(f"relator {i} does not map to the identity")
        if self.images:
            cp = _char_poly_mod(self.images[0], self.p)
            for g, m in enumerate(self.images[1:], start=1):
                if _char_poly_mod(m, self.p) != cp:
                    raise KnotError(f"image of generator {g} is not conjugate to that of generator 0")

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k,
                "images": {str(g): [list(r) for r in m] for g, m in enumerate(self.images)}}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Representation":
        try:
            p, k, images = int(obj["p"]), int(obj["k"]), obj["images"]
        except KeyError as exc:
            raise KnotError(f"representation is missing field {exc.args[0]!r}") from None
        if isinstance(images, Mapping):
            images = [images[str(g)] for g in range(len(images))]
        return cls(p, k, images)


def twisted_matrix(pres: WirtingerPresentation, rho: Representation) -> Mat:
    """Fox matrix under ``g -> rho(g) t`` with the last generator's block column deleted."""
    rho.validate(pres)
    F = GF(rho.p)
    k = rho.k
    n = pres.generators
    size = k * (n - 1)
    zero = LaurentPoly.zero(F)
    rows = [[zero] * size for _ in range(size)]
    for i, r in enumerate(pres.relators):
        for j in range(n - 1):
            for w, c in fox_derivative(r, j).items():
                e = sum(x for _, x in w)
                M = rho.word_image(w)
                for a in range(k):
                    for b in range(k):
                        if M[a][b]:
                            rows[i * k + a][j * k + b] = rows[i * k + a][j * k + b] + LaurentPoly(F, {e: c * M[a][b]})
    return Mat(F, rows, size)


def twisted_alexander(pres: WirtingerPresentation, rho: Representation) -> LaurentPoly:
    """Normalized order of the twisted Alexander module (no Wada denominator)."""
    A = twisted_matrix(pres, rho)
    d = det(A)
    if d.is_zero():
        raise KnotError("twisted presentation is not torsion")
    return d.normalize()


def connected_sum_presentation(p1: WirtingerPresentation, p2: WirtingerPresentation,
                               rho1: Representation | None = None, rho2: Representation | None = None):
    """Presentation of the connected sum: meridian generators of the two factors identified.

    Without representations the last generator of ``p1`` is identified with
    the first of ``p2``; with them, the first pair with equal images.
    Returns ``(presentation, representation or None)``.
    """
    n1, n2 = p1.generators, p2.generators
    if (rho1 is None) != (rho2 is None):
        raise KnotError("give representations for both factors or for neither")
    pair = (n1 - 1, 0)
    if rho1 is not None:
        if rho1.p != rho2.p or rho1.k != rho2.k:
            raise KnotError("factor representations must share p and k")
        pair = next(((i, j) for i in range(n1) for j in range(n2) if rho1.images[i] == rho2.images[j]), None)
        if pair is None:
            raise KnotError("no pair of meridian generators with equal images")
    i0, j0 = pair
    relabel = {}
    nxt = n1
    for j in range(n2):
        if j == j0:
            relabel[j] = i0
        else:
            relabel[j] = nxt
            nxt += 1
    rels = list(p1.relators) + [tuple((relabel[g], e) for g, e in r) for r in p2.relators]
    pres = WirtingerPresentation(n1 + n2 - 1, tuple(rels))
    rho = None
    if rho1 is not None:
        images = list(rho1.images) + [None] * (n2 - 1)
        for j in range(n2):
            images[relabel[j]] = rho2.images[j]
        rho = Representation(rho1.p, rho1.k, images)
    return pres, rho


# -- knot files ----------------------------------------------------------------------


class KnotFileError(ValueError):
    """Bad knot file; the message names the file and the offending field."""


@dataclass(frozen=True)
class KnotData:
    name: str
    seifert: SeifertMatrix | None = None
    pd: PDCode | None = None
    rep: Representation | None = None
    path: str | None = None

    def wirtinger(self) -> WirtingerPresentation:
        if self.pd is None:
            raise KnotError(f"knot {self.name} has no PD code")
        return wirtinger_from_pd(self.pd)

    def blanchfield(self, base: BaseRing = QQ) -> LinkingPairing:
        if self.seifert is None:
            raise KnotError(f"knot {self.name} has no Seifert matrix")
        return blanchfield_from_seifert(self.seifert, base)

    def alexander(self) -> LaurentPoly:
        if self.seifert is not None:
            return alexander_poly_seifert(self.seifert)
        return alexander_poly_fox(self.wirtinger())

    def to_json(self) -> dict:
        obj: dict = {"name": self.name}
        if self.seifert is not None:
            obj["seifert"] = self.seifert.tolist()
        if self.pd is not None:
            obj["pd"] = [list(x) for x in self.pd.crossings]
        if self.rep is not None:
            obj["rep"] = self.rep.to_json()
        return obj


def parse_knot(obj, source: str = "<knot>") -> KnotData:
    if not isinstance(obj, Mapping):
        raise KnotFileError(f"{source}: top level must be a JSON object")
    name = obj.get("name")
    if not isinstance(name, str):
        raise KnotFileError(f"{source}: field 'name' must be a string")
    if "seifert" not in obj and "pd" not in obj:
        raise KnotFileError(f"{source}: at least one of 'seifert' or 'pd' is required")
    seifert = pd = rep = None
    try:
        if obj.get("seifert") is not None:
            seifert = SeifertMatrix(obj["seifert"])
    except (KnotError, RingError, TypeError, ValueError) as exc:
        raise KnotFileError(f"{source}: field 'seifert': {exc}") from None
    try:
        if obj.get("pd") is not None:
            pd = PDCode(obj["pd"])
            wirtinger_from_pd(pd)
    except (KnotError, TypeError, ValueError) as exc:
        raise KnotFileError(f"{source}: field 'pd': {exc}") from None
    try:
        if obj.get("rep") is not None:
            rep = Representation.from_json(obj["rep"])
            if pd is not None:
                rep.validate(wirtinger_from_pd(pd))
    except (KnotError, RingError, TypeError, ValueError) as exc:
        raise KnotFileError(f"{source}: field 'rep': {exc}") from None
    return KnotData(name, seifert, pd, rep, source)


def load_knot(path) -> KnotData:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise KnotFileError(f"{path}: cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise KnotFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_knot(obj, str(path))


def load_corpus(directory) -> list[KnotData]:
    """All ``*.json`` knot files in a directory, sorted by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise KnotFileError(f"{directory}: fixture directory not found")
    files = sorted(directory.glob("*.json"))
    if not files:
        raise KnotFileError(f"{directory}: no knot files")
    return [load_knot(f) for f in files]


__all__ = [
    "KnotData",
    "KnotError",
    "KnotFileError",
    "PDCode",
    "Representation",
    "SeifertMatrix",
    "WirtingerPresentation",
    "abelianize",
    "alexander_module",
    "alexander_poly_fox",
    "alexander_poly_seifert",
    "blanchfield_from_seifert",
    "connected_sum",
    "connected_sum_presentation",
    "fox_derivative",
    "fox_matrix",
    "load_corpus",
    "load_knot",
    "parse_knot",
    "satellite_blanchfield",
    "twisted_alexander",
    "twisted_matrix",
    "wirtinger_from_pd",
]
