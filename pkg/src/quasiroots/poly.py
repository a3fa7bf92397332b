"""Sparse polynomials of degree at most two with exact coefficients."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _key(*idx):
    return tuple(sorted(idx))


class Poly:
    """``sum c_m x^m`` over monomials ``m`` = (), (i,), (i, j) with i <= j."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = Fraction(c)

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @classmethod
    def var(cls, i, coeff=1):
        return cls({(i,): coeff})

    @property
    def degree(self):
        return max((len(k) for k in self.terms), default=0)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, Fraction(0)) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        p = Poly()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly()
        p.terms = {k: -c for k, c in self.terms.items()}
        return p

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly.const(-Fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            p = Poly()
            if c:
                p.terms = {k: v * c for k, v in self.terms.items()}
            return p
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _key(*k1, *k2)
                if len(k) > 2:
                    raise ValueError("product exceeds degree two")
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return Poly({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.terms == other.terms

    def __hash__(self):  # pragma: no cover - polys are not used as keys
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def variables(self):
        return sorted({i for k in self.terms for i in k})

    def evaluate(self, values):
        """Evaluate with any number type supporting + and * (Fraction, Surd, float)."""
        total = 0
        for k, c in self.terms.items():
            t = c
            for i in k:
                t = t * values[i]
            total = total + t
        return total

    def to_json(self):
        def s(c):
            return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return [[list(k), s(c)] for k, c in sorted(self.terms.items())]

    def __repr__(self):
        parts = []
        for k, c in sorted(self.terms.items()):
            parts.append(f"{c}" + "".join(f"*x{i}" for i in k))
        return " + ".join(parts) or "0"


class CompiledSystem:
    """Dense float form of a list of quadratic polynomials for batched evaluation."""

    def __init__(self, polys, n):
        m = len(polys)
        self.n = n
        self.c = np.zeros(m)
        self.L = np.zeros((m, n))
        self.Q = np.zeros((m, n, n))
        for e, p in enumerate(polys):
            for k, v in p.terms.items():
                v = float(v)
                if len(k) == 0:
                    self.c[e] += v
                elif len(k) == 1:
                    self.L[e, k[0]] += v
                else:
                    i, j = k
                    if i == j:
                        self.Q[e, i, i] += v
                    else:
                        self.Q[e, i, j] += v / 2
                        self.Q[e, j, i] += v / 2

    def __call__(self, X):
        """Residuals for a batch ``X`` of shape (B, n) -> (B, m)."""
        X = np.atleast_2d(X)
        return self.c + X @ self.L.T + np.einsum("mij,bi,bj->bm", self.Q, X, X, optimize=True)

    def jacobian(self, X):
        X = np.atleast_2d(X)
        return self.L[None, :, :] + 2 * np.einsum("mij,bj->bmi", self.Q, X, optimize=True)
