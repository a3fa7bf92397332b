"""Exact numbers of the form ``p + q1*sqrt(r1) + q2*sqrt(r2) + ...``.

Every radicand is a square-free positive integer and every coefficient is a
:class:`fractions.Fraction`.  Square roots of distinct square-free integers
are linearly independent over the rationals, so a :class:`Surd` is zero
exactly when all of its coefficients vanish.  That makes equality tests
exact, which is what the solution verifier relies on.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, r = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            s *= p ** (e // 2)
            if e % 2:
                r *= p
        p += 1 if p == 2 else 2
    r *= m
    return s, r


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Surd:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for r, q in terms.items():
                q = _frac(q)
                if q:
                    clean[int(r)] = q
        self._terms = clean

    @classmethod
    def rational(cls, x) -> "Surd":
        return cls({1: _frac(x)})

    @classmethod
    def sqrt(cls, x) -> "Surd":
        """Exact square root of a non-negative rational."""
        x = _frac(x)
        if x < 0:
            raise ValueError("square root of a negative rational")
        if x == 0:
            return cls()
        # sqrt(a/b) = sqrt(a*b)/b
        s, r = squarefree_split(x.numerator * x.denominator)
        return cls({r: Fraction(s, x.denominator)})

    @classmethod
    def coerce(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return cls.rational(x)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(r == 1 for r in self._terms)

    def rational_part(self) -> Fraction:
        return self._terms.get(1, Fraction(0))

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    def radicands(self) -> set[int]:
        return {r for r in self._terms if r != 1}

    def __float__(self) -> float:
        return float(sum(float(q) * math.sqrt(r) for r, q in self._terms.items()))

    def sign(self) -> int:
        if not self._terms:
            return 0
        if len(self._terms) == 1:
            (q,) = self._terms.values()
            return 1 if q > 0 else -1
        # two terms decide exactly; beyond that fall back to high precision
        if len(self._terms) == 2:
            (r1, q1), (r2, q2) = sorted(self._terms.items())
            s1, s2 = (1 if q1 > 0 else -1), (1 if q2 > 0 else -1)
            if s1 == s2:
                return s1
            a, b = q1 * q1 * r1, q2 * q2 * r2
            return s1 if a > b else s2
        import mpmath

        with mpmath.workdps(60):
            v = mpmath.fsum(mpmath.mpf(q.numerator) / q.denominator * mpmath.sqrt(r)
                            for r, q in self._terms.items())
        return 1 if v > 0 else -1

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for r, q in other._terms.items():
            out[r] = out.get(r, Fraction(0)) + q
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({r: -q for r, q in self._terms.items()})

    def __sub__(self, other):
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for r1, q1 in self._terms.items():
            for r2, q2 in other._terms.items():
                g = math.gcd(r1, r2)
                r = (r1 // g) * (r2 // g)
                q = q1 * q2 * g
                out[r] = out.get(r, Fraction(0)) + q
        return Surd(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, Surd):
            if len(other._terms) != 1:
                if other.is_zero():
                    raise ZeroDivisionError("division by zero surd")
                # rationalise one prime at a time: sqrt(p) -> -sqrt(p) is a field
                # automorphism, and den * conj(den) no longer involves sqrt(p)
                num, den = self, other
                while len(den._terms) > 1:
                    p = _prime_factors(max(den.radicands()))[0]
                    conj = Surd({k: (-q if k % p == 0 else q)
                                 for k, q in den._terms.items()})
                    num, den = num * conj, den * conj
                return num / den
            ((r, q),) = other._terms.items()
            # 1/(q sqrt r) = sqrt(r)/(q r)
            return self * Surd({r: 1 / (q * r)})
        return self * Surd.rational(1 / _frac(other))

    def __rtruediv__(self, other):
        return Surd.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Surd.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, float):
            return float(self) == other
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_part())
        return hash(frozenset(self._terms.items()))

    def __lt__(self, other):
        return (self - Surd.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - Surd.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - Surd.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - Surd.coerce(other)).sign() >= 0

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "Surd(0)"
        parts = []
        for r, q in sorted(self._terms.items()):
            parts.append(str(q) if r == 1 else f"{q}*sqrt({r})")
        return "Surd(" + " + ".join(parts) + ")"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for r, q in sorted(self._terms.items()):
            parts.append(str(q) if r == 1 else f"({q})*sqrt({r})")
        return " + ".join(parts)

    # -- serialisation ----------------------------------------------------
    def to_json(self):
        """Rationals become ``"p/q"``; one-radicand surds ``{"p","q","r"}``."""
        if self.is_rational():
            return _frac_str(self.rational_part())
        irr = sorted((r, q) for r, q in self._terms.items() if r != 1)
        if len(irr) == 1:
            r, q = irr[0]
            return {"p": _frac_str(self.rational_part()), "q": _frac_str(q), "r": r}
        return {"p": _frac_str(self.rational_part()),
                "terms": [{"q": _frac_str(q), "r": r} for r, q in irr]}

    @classmethod
    def from_json(cls, obj) -> "Surd":
        if isinstance(obj, str):
            return cls.rational(Fraction(obj))
        if isinstance(obj, int):
            return cls.rational(obj)
        terms = {1: Fraction(obj.get("p", "0"))}
        if "r" in obj:
            terms[int(obj["r"])] = Fraction(obj["q"])
        for t in obj.get("terms", ()):
            terms[int(t["r"])] = Fraction(t["q"])
        return cls(terms)


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_exact(x):
    """Collapse rational Surds to Fractions; leave everything else alone."""
    if isinstance(x, Surd) and x.is_rational():
        return x.rational_part()
    return x
