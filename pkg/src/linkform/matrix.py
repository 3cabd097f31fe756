"""Dense exact matrices over Laurent polynomial rings and their fraction fields."""

from __future__ import annotations

from numbers import Integral, Rational
from typing import Iterable, Sequence

from .ring import (
    BaseRing,
    LaurentFraction,
    LaurentPoly,
    exact_div,
    parse_fraction,
    parse_poly,
    poly_divmod,
)


class MatrixError(ValueError):
    pass


def _entry(base: BaseRing, x):
    if isinstance(x, (LaurentPoly, LaurentFraction)):
        if x.base != base:
            raise MatrixError(f"entry over {x.base} in a matrix over {base}")
        return x
    if isinstance(x, Rational):
        return LaurentPoly.constant(base, x)
    if isinstance(x, str):
        if "/(" in x.replace(" ", ""):
            return parse_fraction(x, base)
        return parse_poly(x, base)
    raise MatrixError(f"unsupported matrix entry {x!r}")


class Mat:
    """Immutable ``rows x cols`` matrix; entries are LaurentPoly or LaurentFraction."""

    __slots__ = ("base", "rows", "cols", "_e")

    def __init__(self, base: BaseRing, rows: Sequence[Sequence], cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise MatrixError("ragged matrix rows")
        self.base = base
        self.rows = len(rows)
        self.cols = cols
        self._e = tuple(tuple(_entry(base, x) for x in r) for r in rows)

    @classmethod
    def _raw(cls, base, entries, cols):
        obj = cls.__new__(cls)
        obj.base = base
        obj._e = tuple(tuple(r) for r in entries)
        obj.rows = len(obj._e)
        obj.cols = cols
        return obj

    @classmethod
    def identity(cls, base: BaseRing, n: int) -> "Mat":
        one, zero = LaurentPoly.one(base), LaurentPoly.zero(base)
        return cls._raw(base, [[one if i == j else zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, base: BaseRing, rows: int, cols: int) -> "Mat":
        zero = LaurentPoly.zero(base)
        return cls._raw(base, [[zero] * cols for _ in range(rows)], cols)

    @classmethod
    def from_ints(cls, base: BaseRing, rows: Iterable[Iterable[int]]) -> "Mat":
        rows = [list(r) for r in rows]
        return cls(base, rows, len(rows[0]) if rows else 0)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def row(self, i):
        return self._e[i]

    def col(self, j):
        return tuple(r[j] for r in self._e)

    def tolist(self):
        return [list(r) for r in self._e]

    def is_fraction_matrix(self) -> bool:
        return any(isinstance(x, LaurentFraction) for r in self._e for x in r)

    def map(self, f) -> "Mat":
        return Mat(self.base, [[f(x) for x in r] for r in self._e], self.cols)

    def map_base(self, f, target: BaseRing) -> "Mat":
        return Mat(target, [[f(x) for x in r] for r in self._e], self.cols)

    @property
    def T(self) -> "Mat":
        return Mat._raw(self.base, [list(c) for c in zip(*self._e)] if self.rows else [], self.rows)

    def transpose(self) -> "Mat":
        return self.T

    def conj(self) -> "Mat":
        return Mat._raw(self.base, [[x.conj() for x in r] for r in self._e], self.cols)

    @property
    def H(self) -> "Mat":
        """Conjugate transpose."""
        return self.conj().T

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(self.base, [[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(self.base, [[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)], self.cols)

    def __neg__(self):
        return Mat._raw(self.base, [[-a for a in r] for r in self._e], self.cols)

    def scale(self, c) -> "Mat":
        return Mat._raw(self.base, [[c * a for a in r] for r in self._e], self.cols)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise MatrixError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.base != other.base:
            raise MatrixError(f"base ring mismatch: {self.base} vs {other.base}")

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise MatrixError(f"cannot multiply {self.shape} by {other.shape}")
        if self.base != other.base:
            raise MatrixError(f"base ring mismatch: {self.base} vs {other.base}")
        zero = LaurentPoly.zero(self.base)
        ocols = other.col_tuples()
        out = []
        for r in self._e:
            row = []
            for c in ocols:
                acc = zero
                for a, b in zip(r, c):
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Mat._raw(self.base, out, other.cols)

    def col_tuples(self):
        return list(zip(*self._e)) if self.rows else [() for _ in range(self.cols)]

    def apply(self, vec: Sequence) -> list:
        """Matrix times a column vector given as a sequence."""
        if len(vec) != self.cols:
            raise MatrixError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        zero = LaurentPoly.zero(self.base)
        out = []
        for r in self._e:
            acc = zero
            for a, b in zip(r, vec):
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            out.append(acc)
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat._raw(self.base, [[self._e[i][j] for j in cols] for i in rows], len(cols))

    def delete_col(self, j: int) -> "Mat":
        keep = [k for k in range(self.cols) if k != j]
        return self.submatrix(range(self.rows), keep)

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise MatrixError("hstack needs equal row counts")
        return Mat._raw(self.base, [list(a) + list(b) for a, b in zip(self._e, other._e)], self.cols + other.cols)

    def vstack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise MatrixError("vstack needs equal column counts")
        return Mat._raw(self.base, list(self._e) + list(other._e), self.cols)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.base == other.base and self.shape == other.shape and all(
            a == b for r, s in zip(self._e, other._e) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash((self.base, self.shape, self._e))

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self._e for x in r)

    def __str__(self):
        if not self.rows:
            return "[]"
        return "[" + ",\n ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._e) + "]"

    def __repr__(self):
        return f"Mat({self.base}, {self.rows}x{self.cols})"


def block_diag(*mats: Mat) -> Mat:
    if not mats:
        raise MatrixError("block_diag needs at least one matrix")
    base = mats[0].base
    zero = LaurentPoly.zero(base)
    total = sum(m.cols for m in mats)
    out = []
    offset = 0
    for m in mats:
        if m.base != base:
            raise MatrixError(f"base ring mismatch: {m.base} vs {base}")
        for r in m._e:
            out.append([zero] * offset + list(r) + [zero] * (total - offset - m.cols))
        offset += m.cols
    return Mat._raw(base, out, total)


# -- block structure ---------------------------------------------------------


def _components(A: Mat):
    """Connected components of the row/column incidence graph of nonzero entries.

    Returns a list of (row indices, col indices) pairs in order of first row.
    """
    n, m = A.rows, A.cols
    parent = list(range(n + m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(m):
            if not A._e[i][j].is_zero():
                ri, rj = find(i), find(n + j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, tuple[list, list]] = {}
    order = []
    for x in range(n + m):
        r = find(x)
        if r not in groups:
            groups[r] = ([], [])
            order.append(r)
        (groups[r][0] if x < n else groups[r][1]).append(x if x < n else x - n)
    return [groups[r] for r in order]


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _bareiss_det(rows: list[list[LaurentPoly]], base: BaseRing) -> LaurentPoly:
    n = len(rows)
    if n == 0:
        return LaurentPoly.one(base)
    M = [list(r) for r in rows]
    sign = 1
    prev = LaurentPoly.one(base)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly.zero(base)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, n):
                v = M[i][j] * pivot
                if not mik.is_zero() and not M[k][j].is_zero():
                    v = v - mik * M[k][j]
                M[i][j] = exact_div(v, prev) if not v.is_zero() else v
        prev = pivot
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def det(A: Mat) -> LaurentPoly:
    """Exact determinant (fraction-free Bareiss, run per block of the sparsity pattern)."""
    if not A.is_square():
        raise MatrixError(f"determinant of a non-square {A.rows}x{A.cols} matrix")
    if A.is_fraction_matrix():
        raise MatrixError("det expects Laurent polynomial entries")
    base = A.base
    if A.rows == 0:
        return LaurentPoly.one(base)
    comps = _components(A)
    row_perm, col_perm = [], []
    result = LaurentPoly.one(base)
    for rs, cs in comps:
        if len(rs) != len(cs):
            return LaurentPoly.zero(base)
        row_perm += rs
        col_perm += cs
        result = result * _bareiss_det([[A._e[i][j] for j in cs] for i in rs], base)
        if result.is_zero():
            return result
    s = _perm_sign(row_perm) * _perm_sign(col_perm)
    return -result if s < 0 else result


def _bareiss_adjugate(rows, base):
    """Return ``(Y, d)`` with ``A @ Y == d * I`` and ``d == det(A)``."""
    n = len(rows)
    one, zero = LaurentPoly.one(base), LaurentPoly.zero(base)
    M = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    width = 2 * n
    sign = 1
    prev = one
    for k in range(n):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                raise MatrixError("presentation matrix is singular; module is not torsion")
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, width):
                v = M[i][j] * pivot
                if not mik.is_zero() and not M[k][j].is_zero():
                    v = v - mik * M[k][j]
                M[i][j] = exact_div(v, prev) if not v.is_zero() else v
            M[i][k] = zero
        prev = pivot
    D = M[n - 1][n - 1]
    Y = [[zero] * n for _ in range(n)]
    for c in range(n):
        for i in range(n - 1, -1, -1):
            acc = D * M[i][n + c]
            for j in range(i + 1, n):
                if not M[i][j].is_zero() and not Y[j][c].is_zero():
                    acc = acc - M[i][j] * Y[j][c]
            Y[i][c] = exact_div(acc, M[i][i]) if not acc.is_zero() else acc
    # Y = D * A^{-1} and D = sign * det(A)
    if sign < 0:
        Y = [[-y for y in r] for r in Y]
        D = -D
    return Y, D


def adjugate(A: Mat) -> tuple[Mat, LaurentPoly]:
    """Return ``(adj(A), det(A))`` for a nonsingular square polynomial matrix."""
    if not A.is_square():
        raise MatrixError(f"adjugate of a non-square {A.rows}x{A.cols} matrix")
    base = A.base
    n = A.rows
    if n == 0:
        return A, LaurentPoly.one(base)
    comps = _components(A)
    dets = []
    blocks = []
    for rs, cs in comps:
        if len(rs) != len(cs):
            raise MatrixError("presentation matrix is singular; module is not torsion")
        Y, d = _bareiss_adjugate([[A._e[i][j] for j in cs] for i in rs], base)
        blocks.append((rs, cs, Y, d))
        dets.append(d)
    total = det(A)
    zero = LaurentPoly.zero(base)
    adj = [[zero] * n for _ in range(n)]
    for idx, (rs, cs, Y, d) in enumerate(blocks):
        # adj(A) = det(A) * A^{-1}; A^{-1} restricted to the block is Y/d.
        other = exact_div(total, d)
        for a, j in enumerate(cs):
            for b, i in enumerate(rs):
                y = Y[a][b]
                if not y.is_zero():
                    adj[j][i] = y * other
    return Mat._raw(base, adj, n), total


def inverse_over_fractions(A: Mat) -> Mat:
    """``A^{-1}`` as a matrix of LaurentFraction entries."""
    if not A.is_square():
        raise MatrixError(f"inverse of a non-square {A.rows}x{A.cols} matrix")
    base = A.base
    n = A.rows
    if n == 0:
        return A
    comps = _components(A)
    out = [[None] * n for _ in range(n)]
    zero = LaurentFraction(LaurentPoly.zero(base))
    for i in range(n):
        for j in range(n):
            out[i][j] = zero
    for rs, cs in comps:
        if len(rs) != len(cs):
            raise MatrixError("presentation matrix is singular; module is not torsion")
        Y, d = _bareiss_adjugate([[A._e[i][j] for j in cs] for i in rs], base)
        for a, j in enumerate(cs):
            for b, i in enumerate(rs):
                if not Y[a][b].is_zero():
                    out[j][i] = LaurentFraction(Y[a][b], d)
    return Mat._raw(base, out, n)


# -- Smith normal form -----------------------------------------------------------


def _coeff_size(c) -> int:
    if isinstance(c, Rational) and not isinstance(c, Integral):
        return int(abs(c.numerator)).bit_length() + int(c.denominator).bit_length()
    if isinstance(c, int):
        return abs(c).bit_length()
    return 0


def _pivot_key(p: LaurentPoly, i: int, j: int):
    return (p.span, sum(_coeff_size(c) for c in p._terms.values()), i, j)


def smith_normal_form(A: Mat, transforms: bool = True):
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` over a field-coefficient Laurent ring.

    ``D`` is diagonal with normalized entries forming a divisor chain, zero
    entries last.  With ``transforms=False`` U and V are returned as None.
    """
    base = A.base
    if not base.is_field:
        raise MatrixError("Smith normal form needs field coefficients; promote Z to Q first")
    if A.is_fraction_matrix():
        raise MatrixError("Smith normal form expects Laurent polynomial entries")
    m, n = A.rows, A.cols
    D = [list(r) for r in A._e]
    one, zero = LaurentPoly.one(base), LaurentPoly.zero(base)
    U = [[one if i == j else zero for j in range(m)] for i in range(m)] if transforms else None
    V = [[one if i == j else zero for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(a, b):
        if a != b:
            D[a], D[b] = D[b], D[a]
            if transforms:
                U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        if a != b:
            for r in D:
                r[a], r[b] = r[b], r[a]
            if transforms:
                for r in V:
                    r[a], r[b] = r[b], r[a]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [x + q * y if not y.is_zero() else x for x, y in zip(D[dst], D[src])]
        if transforms:
            U[dst] = [x + q * y if not y.is_zero() else x for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in D:
            if not r[src].is_zero():
                r[dst] = r[dst] + q * r[src]
        if transforms:
            for r in V:
                if not r[src].is_zero():
                    r[dst] = r[dst] + q * r[src]

    r = 0
    while r < min(m, n):
        best = None
        for i in range(r, m):
            for j in range(r, n):
                x = D[i][j]
                if not x.is_zero():
                    k = _pivot_key(x, i, j)
                    if best is None or k < best[0]:
                        best = (k, i, j)
        if best is None:
            break
        swap_rows(r, best[1])
        swap_cols(r, best[2])
        while True:
            pivot = D[r][r]
            clean = True
            for i in range(r + 1, m):
                if not D[i][r].is_zero():
                    q, rem = poly_divmod(D[i][r], pivot)
                    add_row(i, r, -q)
                    if not rem.is_zero():
                        clean = False
            for j in range(r + 1, n):
                if not D[r][j].is_zero():
                    q, rem = poly_divmod(D[r][j], pivot)
                    add_col(j, r, -q)
                    if not rem.is_zero():
                        clean = False
            if not clean:
                cands = [(_pivot_key(D[i][r], i, r), i, r) for i in range(r + 1, m) if not D[i][r].is_zero()]
                cands += [(_pivot_key(D[r][j], r, j), r, j) for j in range(r + 1, n) if not D[r][j].is_zero()]
                _, i, j = min(cands)
                swap_rows(r, i)
                swap_cols(r, j)
                continue
            bad = None
            for i in range(r + 1, m):
                for j in range(r + 1, n):
                    x = D[i][j]
                    if not x.is_zero() and not poly_divmod(x, pivot)[1].is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(r, bad, one)
        c, k = D[r][r].unit_to_normal()
        if c != 1 or k != 0:
            unit = LaurentPoly.monomial(base, c, k)
            D[r] = [x * unit for x in D[r]]
            if transforms:
                U[r] = [x * unit for x in U[r]]
        r += 1
    Dm = Mat._raw(base, D, n)
    if not transforms:
        return None, Dm, None
    return Mat._raw(base, U, m), Dm, Mat._raw(base, V, n)


def invariant_factors(A: Mat) -> list[LaurentPoly]:
    """Diagonal of the Smith normal form (nonzero entries only)."""
    _, D, _ = smith_normal_form(A, transforms=False)
    return [D[i, i] for i in range(min(D.rows, D.cols)) if not D[i, i].is_zero()]


# -- hermitian forms ----------------------------------------------------------------


def is_hermitian_matrix(A: Mat) -> bool:
    """True iff ``conj(A[j][i]) == A[i][j]`` for all cells."""
    return hermitian_defect(A) is None


def hermitian_defect(A: Mat):
    """First cell ``(i, j)`` violating hermitian symmetry, or None."""
    if not A.is_square():
        raise MatrixError(f"hermitian check on a non-square {A.rows}x{A.cols} matrix")
    for i in range(A.rows):
        for j in range(i, A.cols):
            if A[i, j] != A[j, i].conj():
                return (i, j)
    return None


def congruence(A: Mat, P: Mat) -> Mat:
    """``conj(P)^T @ A @ P``."""
    if not A.is_square() or A.cols != P.rows:
        raise MatrixError(f"congruence shape mismatch: A {A.shape}, P {P.shape}")
    return P.H @ A @ P


def is_unimodular(P: Mat) -> bool:
    """Square with unit determinant."""
    return P.is_square() and det(P).is_unit()


def poly_matrix_inverse(P: Mat) -> Mat:
    """Inverse of a unimodular polynomial matrix, with polynomial entries."""
    adj, d = adjugate(P)
    if not d.is_unit():
        raise MatrixError("matrix is not unimodular")
    inv = d ** -1
    return adj.scale(inv)


__all__ = [
    "Mat",
    "MatrixError",
    "adjugate",
    "block_diag",
    "congruence",
    "det",
    "hermitian_defect",
    "inverse_over_fractions",
    "invariant_factors",
    "is_hermitian_matrix",
    "is_unimodular",
    "poly_matrix_inverse",
    "smith_normal_form",
]

