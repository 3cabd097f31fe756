"""Laurent polynomials in one variable over Z, Q or F_p.

Polynomials carry the involution ``t -> t^-1``.  Quotients by the Laurent
ring are stored as :class:`FractionClass` values with a canonical
representative: the denominator is normalized (lowest exponent 0, monic)
and the numerator is reduced modulo the denominator to an ordinary
polynomial of smaller degree.  Two classes are equal iff their
representatives are equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Mapping

from gmpy2 import mpq


class RingError(ValueError):
    """Raised for arithmetic that is undefined in the chosen ring."""


class EtaRegularityError(RingError):
    """Winding number 0: ``t -> t^0`` is not injective on ``Z[t, t^-1]``."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class BaseRing:
    """Coefficient ring: ``kind`` is ``"z"``, ``"q"`` or ``"fp"``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("z", "q", "fp"):
            raise RingError(f"unknown base ring kind {self.kind!r}")
        if self.kind == "fp":
            if self.p is None or not (2 <= self.p < 2**31) or not _is_prime(self.p):
                raise RingError(f"fp base ring needs a prime p < 2^31, got {self.p}")
        elif self.p is not None:
            raise RingError(f"{self.kind} base ring takes no modulus")

    @classmethod
    def parse(cls, text: str) -> "BaseRing":
        text = text.strip().lower()
        if text in ("z", "q"):
            return cls(text)
        m = re.fullmatch(r"fp:(\d+)", text)
        if m:
            return cls("fp", int(m.group(1)))
        raise RingError(f"cannot parse base ring {text!r} (expected z, q or fp:<p>)")

    def __str__(self):
        return f"fp:{self.p}" if self.kind == "fp" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "z"

    def coerce(self, c):
        if not isinstance(c, Rational):
            raise RingError(f"cannot coerce {c!r} into {self}")
        if self.kind == "z":
            if c.denominator != 1:
                raise RingError(f"{c} is not an integer")
            return int(c.numerator)
        if self.kind == "q":
            # gmpy2 rationals: same semantics as Fraction, much faster
            return mpq(c)
        if c.denominator != 1:
            return int(c.numerator) * pow(int(c.denominator), -1, self.p) % self.p
        return int(c) % self.p

    def inv(self, c):
        if c == 0:
            raise ZeroDivisionError("division by zero coefficient")
        if self.kind == "z":
            if c in (1, -1):
                return c
            raise RingError(f"{c} is not a unit in Z")
        if self.kind == "q":
            return 1 / mpq(c)
        return pow(c, -1, self.p)

    def neg(self, c):
        return (-c) % self.p if self.kind == "fp" else -c

    def is_unit(self, c) -> bool:
        return c in (1, -1) if self.kind == "z" else c != 0


ZZ = BaseRing("z")
QQ = BaseRing("q")


def GF(p: int) -> BaseRing:
    return BaseRing("fp", p)


class LaurentPoly:
    """Immutable element of ``base[t, t^-1]``.

    ``terms`` maps exponents to nonzero coefficients.
    """

    __slots__ = ("base", "_terms", "_hash")

    def __init__(self, base: BaseRing, terms: Mapping[int, object] | None = None):
        clean = {}
        if terms:
            for e, c in terms.items():
                c = base.coerce(c)
                if c != 0:
                    clean[int(e)] = c
        self.base = base
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, base, terms):
        obj = cls.__new__(cls)
        obj.base = base
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, base: BaseRing) -> "LaurentPoly":
        return cls._raw(base, {})

    @classmethod
    def one(cls, base: BaseRing) -> "LaurentPoly":
        return cls._raw(base, {0: base.coerce(1)})

    @classmethod
    def constant(cls, base: BaseRing, c) -> "LaurentPoly":
        return cls(base, {0: c})

    @classmethod
    def monomial(cls, base: BaseRing, c, e: int) -> "LaurentPoly":
        return cls(base, {e: c})

    @classmethod
    def gen(cls, base: BaseRing) -> "LaurentPoly":
        return cls(base, {1: 1})

    @classmethod
    def from_coeffs(cls, base: BaseRing, coeffs: Iterable, low: int = 0) -> "LaurentPoly":
        """Coefficients in ascending order starting at exponent ``low``."""
        return cls(base, {low + i: c for i, c in enumerate(coeffs)})

    @classmethod
    def parse(cls, text: str, base: BaseRing = ZZ) -> "LaurentPoly":
        return parse_poly(text, base)

    # -- inspection ------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def low(self) -> int:
        if not self._terms:
            raise RingError("zero polynomial has no lowest exponent")
        return min(self._terms)

    @property
    def high(self) -> int:
        if not self._terms:
            raise RingError("zero polynomial has no highest exponent")
        return max(self._terms)

    @property
    def span(self) -> int:
        """Degree span ``high - low``; -1 for zero."""
        if not self._terms:
            return -1
        return max(self._terms) - min(self._terms)

    def coeff(self, e: int):
        return self._terms.get(e, 0)

    def leading(self):
        return self._terms[self.high]

    def trailing(self):
        return self._terms[self.low]

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and self.base.is_unit(next(iter(self._terms.values())))

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def to_coeffs(self) -> list:
        """Dense ascending coefficient list from ``low`` to ``high``."""
        if not self._terms:
            return []
        lo, hi = self.low, self.high
        return [self._terms.get(e, 0) for e in range(lo, hi + 1)]

    # -- arithmetic -----------------------------------------------------

    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            if other.base != self.base:
                raise RingError(f"base ring mismatch: {self.base} vs {other.base}")
            return other
        if isinstance(other, Rational):
            return LaurentPoly.constant(self.base, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        fp = self.base.p if self.base.kind == "fp" else None
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if fp:
                v %= fp
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.base, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.base, {e: self.base.neg(c) for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return LaurentPoly._raw(self.base, {})
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        if self.base.kind == "fp":
            p = self.base.p
            out = {e: c % p for e, c in out.items() if c % p}
        else:
            out = {e: c for e, c in out.items() if c}
        return LaurentPoly._raw(self.base, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_unit():
                raise RingError("negative power of a non-unit")
            (e, c), = self._terms.items()
            return LaurentPoly(self.base, {e * n: self.base.inv(c) ** (-n)})
        result = LaurentPoly.one(self.base)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "LaurentPoly":
        c = self.base.coerce(c)
        return self * LaurentPoly._raw(self.base, {0: c} if c else {})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t^k``."""
        return LaurentPoly._raw(self.base, {e + k: c for e, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.base == other.base and self._terms == other._terms
        if isinstance(other, Rational):
            try:
                return self == LaurentPoly.constant(self.base, other)
            except RingError:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.base, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, x):
        """Evaluate at a scalar; negative powers need ``x`` invertible."""
        if self.base.kind == "fp":
            p = self.base.p
            x = self.base.coerce(x)
            return sum(c * pow(x, e, p) for e, c in self._terms.items()) % p
        total = 0
        for e, c in self._terms.items():
            total += c * (mpq(x) ** e if e < 0 else x**e)
        if self.base.kind == "z":
            return self.base.coerce(total)
        return mpq(total)

    # -- structural operations ------------------------------------------

    def conj(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.base, {-e: c for e, c in self._terms.items()})

    def map_coeffs(self, target: BaseRing) -> "LaurentPoly":
        return LaurentPoly(target, self._terms)

    def substitute(self, m: "WindingMorphism") -> "LaurentPoly":
        return m(self)

    def content(self):
        """Gcd of the integer coefficients (Z only); sign follows the top coefficient."""
        if self.base.kind != "z":
            raise RingError("content is defined for integer coefficients")
        from math import gcd

        g = 0
        for c in self._terms.values():
            g = gcd(g, c)
        return g

    def normalize(self) -> "LaurentPoly":
        if not self._terms:
            raise RingError("zero polynomial has no normal form")
        p = self.shift(-self.low)
        top = p.leading()
        if self.base.kind == "z":
            return -p if top < 0 else p
        return p.scale(self.base.inv(top))

    def unit_to_normal(self):
        """Return ``(c, k)`` with ``normalize(p) == p * c * t^k``."""
        if not self._terms:
            raise RingError("zero polynomial has no normal form")
        top = self.leading()
        if self.base.kind == "z":
            c = -1 if top < 0 else 1
        else:
            c = self.base.inv(top)
        return c, -self.low

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"LaurentPoly({self.base}, {format_poly(self)!r})"


def conj(p):
    """Apply the involution ``t -> t^-1``."""
    return p.conj()


def normalize(p: LaurentPoly) -> LaurentPoly:
    """Unit-normalize: lowest exponent 0, positive top coefficient over Z, monic over fields."""
    return p.normalize()


def substitute(p: LaurentPoly, m: "WindingMorphism") -> LaurentPoly:
    return m(p)


# -- polynomial division ---------------------------------------------------


def _divmod_poly(a: LaurentPoly, b: LaurentPoly):
    """Division with remainder for ordinary polynomials (exponents >= 0).

    Over Z the divisor must have leading coefficient +-1 unless the division
    is exact at every step.
    """
    base = a.base
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    db = b.high
    lb = b.leading()
    rem = dict(a._terms)
    quo = {}
    bt = b._terms
    fp = base.p if base.kind == "fp" else None
    inv_lb = None if base.kind == "z" else base.inv(lb)
    while rem:
        dr = max(rem)
        if dr < db:
            break
        cr = rem[dr]
        if base.kind == "z":
            q, r = divmod(cr, lb)
            if r:
                break
        else:
            q = cr * inv_lb
            if fp:
                q %= fp
        shift = dr - db
        quo[shift] = q
        for e, c in bt.items():
            k = e + shift
            v = rem.get(k, 0) - q * c
            if fp:
                v %= fp
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return LaurentPoly._raw(base, quo), LaurentPoly._raw(base, rem)


def poly_divmod(a: LaurentPoly, b: LaurentPoly):
    """Euclidean division in the Laurent ring: ``a = q*b + r`` with ``r.span < b.span``.

    Exponents of ``r`` lie in ``[a.low, a.low + b.span)``.
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return a, a
    sa, sb = a.low, b.low
    q0, r0 = _divmod_poly(a.shift(-sa), b.shift(-sb))
    return q0.shift(sa - sb), r0.shift(sa)


def exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Quotient ``a / b`` in the Laurent ring, which must be exact."""
    q, r = poly_divmod(a, b)
    if not r.is_zero():
        raise RingError(f"{b} does not divide {a}")
    return q


def divides(b: LaurentPoly, a: LaurentPoly) -> bool:
    if b.is_zero():
        return a.is_zero()
    return poly_divmod(a, b)[1].is_zero()


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Normalized gcd over a field coefficient ring."""
    if not a.base.is_field:
        raise RingError("gcd requires field coefficients")
    if a.is_zero():
        return b.normalize() if not b.is_zero() else b
    if b.is_zero():
        return a.normalize()
    x, y = a.normalize(), b.normalize()
    while not y.is_zero():
        _, r = _divmod_poly(x, y)
        x, y = y, (r.normalize() if not r.is_zero() else r)
    return x


def poly_lcm(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return exact_div(a * b, poly_gcd(a, b)).normalize()


def xgcd(a: LaurentPoly, b: LaurentPoly):
    """Return ``(g, s, u)`` with ``s*a + u*b = g`` and ``g`` normalized (field coefficients)."""
    base = a.base
    zero, one = LaurentPoly.zero(base), LaurentPoly.one(base)
    if a.is_zero() and b.is_zero():
        return zero, zero, zero
    r0, r1 = a, b
    s0, s1 = one, zero
    u0, u1 = zero, one
    while not r1.is_zero():
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        u0, u1 = u1, u0 - q * u1
    c, k = r0.unit_to_normal()
    unit = LaurentPoly.monomial(base, c, k)
    return r0 * unit, s0 * unit, u0 * unit


# -- fractions -------------------------------------------------------------


def _promote(p: LaurentPoly) -> LaurentPoly:
    return p.map_coeffs(QQ) if p.base.kind == "z" else p


class LaurentFraction:
    """Element ``num/den`` of the fraction field, kept in lowest terms.

    Over Z the pair is kept reduced over Q and then cleared back to
    integer coefficients, with the denominator's top coefficient positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.one(num.base)
        if num.base != den.base:
            raise RingError(f"base ring mismatch: {num.base} vs {den.base}")
        if den.is_zero():
            raise ZeroDivisionError("fraction with zero denominator")
        self.num, self.den = _reduce_pair(num, den)

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @property
    def base(self) -> BaseRing:
        return self.num.base

    @classmethod
    def parse(cls, text: str, base: BaseRing = QQ) -> "LaurentFraction":
        return parse_fraction(text, base)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_unit()

    def __add__(self, other):
        other = _as_fraction(other, self.base)
        if self.den == other.den:
            return LaurentFraction(self.num + other.num, self.den)
        return LaurentFraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return LaurentFraction._raw(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_fraction(other, self.base))

    def __rsub__(self, other):
        return _as_fraction(other, self.base) + (-self)

    def __mul__(self, other):
        other = _as_fraction(other, self.base)
        return LaurentFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_fraction(other, self.base)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero fraction")
        return LaurentFraction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_fraction(other, self.base) / self

    def conj(self) -> "LaurentFraction":
        return LaurentFraction(self.num.conj(), self.den.conj())

    def __eq__(self, other):
        if isinstance(other, (LaurentPoly, Rational)):
            other = _as_fraction(other, self.base)
        if not isinstance(other, LaurentFraction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        return format_fraction(self.num, self.den)

    def __repr__(self):
        return f"LaurentFraction({self})"


def _as_fraction(x, base) -> LaurentFraction:
    if isinstance(x, LaurentFraction):
        return x
    if isinstance(x, LaurentPoly):
        return LaurentFraction._raw(x, LaurentPoly.one(x.base))
    if isinstance(x, Rational):
        return LaurentFraction(LaurentPoly.constant(base, x))
    raise TypeError(f"cannot use {type(x).__name__} as a fraction")


def _reduce_pair(num: LaurentPoly, den: LaurentPoly):
    base = num.base
    if num.is_zero():
        return num, LaurentPoly.one(base)
    if base.is_field:
        g = poly_gcd(num, den)
        if not g.is_unit():
            num, den = exact_div(num, g), exact_div(den, g)
        c, k = den.unit_to_normal()
        unit = LaurentPoly.monomial(base, c, k)
        return num * unit, den * unit
    # Z: reduce over Q, then clear denominators and content.
    n, d = _reduce_pair(_promote(num), _promote(den))
    from math import gcd, lcm

    m = 1
    for c in list(n._terms.values()) + list(d._terms.values()):
        m = lcm(m, c.denominator)
    n_int = {e: int(c * m) for e, c in n._terms.items()}
    d_int = {e: int(c * m) for e, c in d._terms.items()}
    g = 0
    for c in list(n_int.values()) + list(d_int.values()):
        g = gcd(g, c)
    n_int = {e: c // g for e, c in n_int.items()}
    d_int = {e: c // g for e, c in d_int.items()}
    return LaurentPoly._raw(base, n_int), LaurentPoly._raw(base, d_int)


def frac_arith(x: LaurentFraction, y: LaurentFraction | None, op: str) -> LaurentFraction:
    """Fraction-field arithmetic by name: ``add``, ``mul``, ``sub``, ``div`` or ``conj``."""
    if op == "conj":
        return x.conj()
    if y is None:
        raise RingError(f"operation {op!r} needs two operands")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise RingError(f"unknown fraction operation {op!r}")


# -- the quotient Q(t)/R ----------------------------------------------------


def _mul_t_inverse_mod(r: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """``t^-1 * r`` reduced modulo ``d`` (both ordinary polynomials, ``d(0) != 0``)."""
    base = r.base
    c0 = r.coeff(0)
    if c0:
        d0 = d.coeff(0)
        r = r - d.scale(c0 * base.inv(d0))
    return r.shift(-1)


def _residue(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Canonical residue of ``num`` modulo a normalized ``den`` with ``den(0) != 0``."""
    if num.is_zero():
        return num
    lo = num.low
    _, r = _divmod_poly(num.shift(-lo), den)
    if lo >= 0:
        if lo:
            _, r = _divmod_poly(r.shift(lo), den)
        return r
    for _ in range(-lo):
        if r.is_zero():
            break
        r = _mul_t_inverse_mod(r, den)
    return r


class FractionClass:
    """Class of a fraction in ``Q(t) / R``, stored as its canonical representative."""

    __slots__ = ("num", "den")

    def __init__(self, x):
        rep = reduce_mod_ring(x)
        self.num, self.den = rep.num, rep.den

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def zero(cls, base: BaseRing) -> "FractionClass":
        return cls._raw(LaurentPoly.zero(base), LaurentPoly.one(base))

    @classmethod
    def parse(cls, text: str, base: BaseRing = QQ) -> "FractionClass":
        return reduce_mod_ring(parse_fraction(text, base))

    @property
    def base(self) -> BaseRing:
        return self.num.base

    @property
    def rep(self) -> LaurentFraction:
        return LaurentFraction._raw(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        if isinstance(other, FractionClass):
            if other.den == self.den:
                return reduce_mod_ring(LaurentFraction(self.num + other.num, self.den))
            other = other.rep
        return reduce_mod_ring(self.rep + other)

    __radd__ = __add__

    def __neg__(self):
        return reduce_mod_ring(LaurentFraction._raw(-self.num, self.den))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a ring element (products of classes are undefined)."""
        if isinstance(other, FractionClass):
            raise RingError("classes in Q/R cannot be multiplied together")
        if isinstance(other, LaurentFraction):
            return reduce_mod_ring(self.rep * other)
        if isinstance(other, Rational):
            other = LaurentPoly.constant(self.base, other)
        return reduce_mod_ring(LaurentFraction(self.num * other, self.den))

    __rmul__ = __mul__

    def conj(self) -> "FractionClass":
        return reduce_mod_ring(self.rep.conj())

    def __eq__(self, other):
        if not isinstance(other, FractionClass):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        return format_fraction(self.num, self.den)

    def __repr__(self):
        return f"FractionClass({self})"


def reduce_mod_ring(x) -> FractionClass:
    """Canonical representative of ``x`` in ``Q(t)/R``.

    Over Z the normalized denominator must have unit top and bottom
    coefficients; otherwise promote to Q first.
    """
    if isinstance(x, FractionClass):
        return x
    if isinstance(x, LaurentPoly):
        return FractionClass.zero(x.base)
    if not isinstance(x, LaurentFraction):
        raise TypeError(f"cannot reduce {type(x).__name__} modulo the ring")
    base = x.base
    if x.num.is_zero() or x.den.is_unit():
        return FractionClass.zero(base)
    if base.kind == "z":
        d = x.den.normalize()
        if abs(d.leading()) != 1 or abs(d.trailing()) != 1:
            raise RingError("canonical form requires field coefficients")
        q = reduce_mod_ring(LaurentFraction(_promote(x.num), _promote(x.den)))
        return FractionClass._raw(q.num.map_coeffs(ZZ), q.den.map_coeffs(ZZ))
    num, den = x.num, x.den
    if den.low != 0 or den.leading() != 1:
        c, k = den.unit_to_normal()
        unit = LaurentPoly.monomial(base, c, k)
        num, den = num * unit, den * unit
    r = _residue(num, den)
    if r.is_zero():
        return FractionClass.zero(base)
    return FractionClass._raw(r, den)


# -- winding morphisms -------------------------------------------------------


@dataclass(frozen=True)
class WindingMorphism:
    """Ring map ``t -> t^omega`` combined with a coefficient map.

    Supported coefficient maps: identity, Z -> Q and Z -> F_p.
    """

    omega: int
    source: BaseRing = QQ
    target: BaseRing | None = None

    def __post_init__(self):
        if self.omega == 0:
            raise EtaRegularityError("infection curve is not eta-regular: winding number 0 "
                                     "makes t -> t^0 non-injective")
        if self.target is None:
            object.__setattr__(self, "target", self.source)
        src, tgt = self.source, self.target
        if src != tgt and not (src.kind == "z" and tgt.kind in ("q", "fp")):
            raise RingError(f"no coefficient map {src} -> {tgt}")

    def __call__(self, p: LaurentPoly) -> LaurentPoly:
        if p.base != self.source:
            raise RingError(f"morphism expects {self.source} coefficients, got {p.base}")
        w = self.omega
        return LaurentPoly(self.target, {w * e: c for e, c in p._terms.items()})

    def apply_fraction(self, f: LaurentFraction) -> LaurentFraction:
        den = self(f.den)
        if den.is_zero():
            raise RingError(f"denominator {f.den} vanishes under the coefficient map")
        return LaurentFraction(self(f.num), den)

    def apply_class(self, x: FractionClass) -> FractionClass:
        if self.source == self.target and not x.is_zero():
            # t -> t^w keeps coprime pairs coprime (substitute into a Bezout
            # identity), so the canonical pair needs no new gcd.
            return reduce_mod_ring(LaurentFraction._raw(self(x.num), self(x.den)))
        return reduce_mod_ring(self.apply_fraction(x.rep))


# -- text format ---------------------------------------------------------------


def _fmt_coeff(c) -> str:
    if isinstance(c, Rational) and not isinstance(c, Integral):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(p: LaurentPoly) -> str:
    """Render as ``c*t^e`` terms in ascending exponent order, e.g. ``t^-1 - 3 + t``."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.items():
        neg = p.base.kind != "fp" and c < 0
        a = -c if neg else c
        if e == 0:
            body = _fmt_coeff(a)
        else:
            mono = "t" if e == 1 else f"t^{e}"
            body = mono if a == 1 else f"{_fmt_coeff(a)}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def format_fraction(num: LaurentPoly, den: LaurentPoly) -> str:
    return f"({format_poly(num)})/({format_poly(den)})"


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?P<coef>\d+(?:/\d+)?)?\s*"
    r"(?P<star>\*)?\s*"
    r"(?P<var>t(?:\s*\^\s*(?P<exp>[+-]?\d+)|\s*\^\s*\(\s*(?P<pexp>[+-]?\d+)\s*\))?)?"
)


def parse_poly(text: str, base: BaseRing = ZZ) -> LaurentPoly:
    """Parse the ``c*t^e`` grammar produced by :func:`format_poly`."""
    s = text.strip()
    if not s:
        raise RingError("empty polynomial string")
    pos = 0
    terms: dict[int, object] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise RingError(f"cannot parse polynomial {text!r} at position {pos}")
        sign, coef, star, var = m.group("sign"), m.group("coef"), m.group("star"), m.group("var")
        if coef is None and var is None:
            raise RingError(f"cannot parse polynomial {text!r} at position {pos}")
        if star and (coef is None or var is None):
            raise RingError(f"misplaced '*' in {text!r}")
        if sign is None and not first:
            raise RingError(f"missing operator in {text!r} at position {pos}")
        c = Fraction(coef) if coef is not None else Fraction(1)
        if sign == "-":
            c = -c
        if var is None:
            e = 0
        else:
            exp = m.group("exp") or m.group("pexp")
            e = int(exp) if exp is not None else 1
        terms[e] = terms.get(e, 0) + c
        first = False
        pos = m.end()
    return LaurentPoly(base, terms)


def parse_fraction(text: str, base: BaseRing = QQ) -> LaurentFraction:
    """Parse ``(num)/(den)`` or a bare polynomial."""
    s = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", s)
    if m:
        return LaurentFraction(parse_poly(m.group(1), base), parse_poly(m.group(2), base))
    return LaurentFraction(parse_poly(s, base))
