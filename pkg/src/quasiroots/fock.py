"""Brute-force Virasoro check on the lattice Fock space.

States are finite sums of basis vectors ``|lambda; h_{-n1,i1} ... h_{-nk,ik}>``
where ``lambda`` is a lattice vector in integral-basis coordinates and the
``h_{n,i}`` are the Heisenberg modes along the basis roots, with

    [h_{m,i}, h_{n,j}] = m C_ij delta_{m+n,0},    h_{0,i} |lambda> = (C lambda)_i |lambda>.

Working along the basis roots keeps every structure constant rational, so
the Ising and ``A_n`` checks run in exact arithmetic.

Vertex operators follow the usual lattice convention

    Gamma_alpha(z) = E^-(z) E^+(z) e^alpha z^{alpha(0)},
    E^-(z) = exp(sum_{n>0} alpha(-n) z^n / n),
    E^+(z) = exp(-sum_{n>0} alpha(n) z^-n / n),
    e^alpha e^lambda = eps(alpha, lambda) e^{alpha + lambda}.

In terms of the current ``J(z) = sum_n J[n] z^{-n-1}`` (``J_v = v . i dphi``)
the ansatz reads

    L = 1/2 :J^T A J: + sum_alpha b_alpha (Gamma_alpha + Gamma_-alpha)
        + sum_beta (:J_gamma Gamma_beta: - :J_gamma Gamma_-beta:).

Mode actions are exact on any finite state, so no truncation error enters
the commutators; the grade bound only limits which input states are
tested.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .cocycle import Cocycle, epsilon
from .equations import AnsatzAssignment, PolynomialSystem
from .errors import GradeOverflow
from .surd import Surd


PRUNE = 1e-15


# ---------------------------------------------------------------------------
# states

def _level(mono) -> int:
    return sum(n for n, _ in mono)


def _is_zero(v) -> bool:
    if isinstance(v, float):
        return abs(v) < PRUNE
    return v == 0


def _axpy(out: dict, src: dict, c=1):
    """``out += c * src`` in place, dropping exact zeros."""
    get = out.get
    if c == 1:
        for k, v in src.items():
            out[k] = get(k, 0) + v
    else:
        for k, v in src.items():
            out[k] = get(k, 0) + c * v
    for k in [k for k in src if out[k] == 0]:
        del out[k]
    return out


def to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _merge(a, b):
    return tuple(sorted(a + b))


class FockState(dict):
    """Sparse vector ``{(lambda, monomial): amplitude}``.

    A monomial is a sorted tuple of ``(n, i)`` pairs, one per creation mode
    ``h_{-n,i}``; its level is the sum of the ``n``.
    """

    @classmethod
    def vacuum(cls, d: int, momentum=None):
        lam = tuple(momentum) if momentum is not None else (0,) * d
        return cls({(lam, ()): Fraction(1)})

    @classmethod
    def basis(cls, momentum, mono=(), amp=Fraction(1)):
        return cls({(tuple(momentum), tuple(sorted(mono))): amp})

    def __add__(self, other):
        return FockState(_axpy(dict(self), other))

    def __sub__(self, other):
        return FockState(_axpy(dict(self), other, -1))

    def scale(self, c):
        if _is_zero(c):
            return FockState()
        return FockState({k: v * c for k, v in self.items()})

    def pruned(self):
        return FockState({k: v for k, v in self.items() if not _is_zero(v)})

    def max_abs(self) -> float:
        return max((abs(float(v)) for v in self.values()), default=0.0)

    def grade(self) -> int:
        return max((_level(m) for (_, m) in self), default=0)

    def momenta(self) -> set:
        return {lam for (lam, _) in self}


# ---------------------------------------------------------------------------
# operator algebra

class LatticeFock:
    """Mode actions for a lattice with Gram matrix ``C`` of the basis roots.

    Actions on basis vectors are cached; they do not depend on any
    assignment, so one instance can serve many Virasoro fields.
    """

    def __init__(self, C, cocycle: Cocycle | None = None, max_level: int = 40):
        self.C = [[int(v) for v in r] for r in C]
        self.d = len(self.C)
        self.cocycle = cocycle
        self.max_level = max_level
        self._ann_cache: dict = {}
        self._plus_cache: dict = {}
        self._minus_cache: dict = {}
        self._vertex_cache: dict = {}

    def ip(self, x, y) -> int:
        C, d = self.C, self.d
        return sum(x[i] * C[i][j] * y[j] for i in range(d) if x[i] for j in range(d) if y[j])

    def _check(self, level):
        if level > self.max_level:
            raise GradeOverflow(f"level {level} exceeds {self.max_level}")

    # -- Heisenberg ------------------------------------------------------
    def _ann(self, i, n, mono):
        """``h_{n,i}`` (n > 0) on a bare monomial -> list of (monomial, coeff)."""
        key = (i, n, mono)
        hit = self._ann_cache.get(key)
        if hit is None:
            hit = []
            seen = set()
            for pos, f in enumerate(mono):
                m, j = f
                if m != n or not self.C[i][j] or f in seen:
                    continue
                seen.add(f)
                mult = mono.count(f)
                hit.append((mono[:pos] + mono[pos + 1:], n * self.C[i][j] * mult))
            self._ann_cache[key] = hit
        return hit

    def _boson_basis(self, vec, n, lam, mono, amp, out):
        if n < 0:
            for i, c in enumerate(vec):
                if c:
                    new = _merge(mono, ((-n, i),))
                    self._check(_level(new))
                    k = (lam, new)
                    out[k] = out.get(k, 0) + amp * c
        elif n == 0:
            v = sum((c * sum(self.C[i][j] * lam[j] for j in range(self.d)) for i, c in enumerate(vec) if c), 0)
            if v:
                k = (lam, mono)
                out[k] = out.get(k, 0) + amp * v
        else:
            for i, c in enumerate(vec):
                if c:
                    for rest, coef in self._ann(i, n, mono):
                        k = (lam, rest)
                        out[k] = out.get(k, 0) + amp * c * coef

    def boson(self, vec, n, state) -> FockState:
        """``v(n) = sum_i vec_i h_{n,i}`` for a coefficient vector along the basis."""
        out: dict = {}
        for (lam, mono), amp in state.items():
            self._boson_basis(vec, n, lam, mono, amp, out)
        return FockState({k: v for k, v in out.items() if v != 0})

    # -- exponentials ----------------------------------------------------
    def _exp_plus(self, x, mono):
        """``E^+(z)`` on a monomial: list over k of ``{monomial: coeff}`` for ``z^-k``."""
        key = (x, mono)
        hit = self._plus_cache.get(key)
        if hit is not None:
            return hit
        kmax = _level(mono)
        series = [{mono: mpq(1)}] + [{} for _ in range(kmax)]
        for n in range(1, kmax + 1):
            new = [{} for _ in range(kmax + 1)]
            for k0, st in enumerate(series):
                term, r = st, 0
                while term and k0 + n * r <= kmax:
                    _axpy(new[k0 + n * r], term)
                    r += 1
                    nxt: dict = {}
                    for mo, a in term.items():
                        for i, xi in enumerate(x):
                            if xi:
                                for rest, coef in self._ann(i, n, mo):
                                    nxt[rest] = nxt.get(rest, 0) + a * xi * coef * mpq(-1, n * r)
                    term = {k: v for k, v in nxt.items() if v}
            series = new
        self._plus_cache[key] = series
        return series

    def _exp_minus(self, x, j):
        """``z^j`` coefficient of ``E^-(z)`` as ``{creation monomial: coeff}``."""
        key = (x, j)
        hit = self._minus_cache.get(key)
        if hit is not None:
            return hit
        series = [{(): mpq(1)}] + [{} for _ in range(j)]
        for n in range(1, j + 1):
            new = [{} for _ in range(j + 1)]
            for j0, st in enumerate(series):
                term, r = st, 0
                while term and j0 + n * r <= j:
                    _axpy(new[j0 + n * r], term)
                    r += 1
                    nxt: dict = {}
                    for mo, a in term.items():
                        for i, xi in enumerate(x):
                            if xi:
                                k = _merge(mo, ((n, i),))
                                nxt[k] = nxt.get(k, 0) + a * xi * mpq(1, n * r)
                    term = {k: v for k, v in nxt.items() if v}
            series = new
        for jj, st in enumerate(series):
            self._minus_cache[(x, jj)] = st
        return series[j]

    def _vertex_basis(self, x, m, lam, mono) -> dict:
        key = (x, m, lam, mono)
        hit = self._vertex_cache.get(key)
        if hit is not None:
            return hit
        out: dict = {}
        g = _level(mono)
        h = self.ip(x, x) // 2
        g_out = g - m - h - self.ip(x, lam)
        if g_out >= 0:
            self._check(g_out)
            sign = epsilon(self.cocycle, x, lam) if self.cocycle is not None else 1
            new_lam = tuple(a + b for a, b in zip(lam, x))
            for k, st in enumerate(self._exp_plus(x, mono)):
                j = g_out - (g - k)
                if j < 0 or not st:
                    continue
                cre = self._exp_minus(x, j)
                get = out.get
                for mo, a in st.items():
                    sa = a if sign == 1 else -a
                    if not mo:
                        for t, b in cre.items():
                            kk = (new_lam, t)
                            out[kk] = get(kk, 0) + sa * b
                        continue
                    for t, b in cre.items():
                        kk = (new_lam, tuple(sorted(mo + t)))
                        out[kk] = get(kk, 0) + sa * b
            out = {k: v for k, v in out.items() if v}
        self._vertex_cache[key] = out
        return out

    def vertex(self, x, m: int, state) -> FockState:
        """Mode ``m`` of ``Gamma_x`` (weight ``(x,x)/2``) on ``state``."""
        x = tuple(int(v) for v in x)
        out: dict = {}
        for (lam, mono), amp in state.items():
            _axpy(out, self._vertex_basis(x, m, lam, mono), amp)
        return FockState(out)

    def current_vertex(self, cvec, x, m: int, state) -> FockState:
        """Mode ``m`` of ``:J_c Gamma_x:`` with ``J_c = sum_i cvec_i h_i``.

        ``J[k]`` for ``k < 0`` stands to the left, ``k >= 0`` to the right.
        """
        x = tuple(int(v) for v in x)
        h = self.ip(x, x) // 2
        out: dict = {}
        for (lam, mono), amp in state.items():
            g = _level(mono)
            final = g - m - h - self.ip(x, lam)
            if final < 0:
                continue
            for k in range(-final, 0):
                for (l2, mo2), a2 in self._vertex_basis(x, m - k, lam, mono).items():
                    self._boson_basis(cvec, k, l2, mo2, amp * a2, out)
            for k in range(0, g + 1):
                inner: dict = {}
                self._boson_basis(cvec, k, lam, mono, amp, inner)
                for (l2, mo2), a2 in inner.items():
                    if a2:
                        _axpy(out, self._vertex_basis(x, m - k, l2, mo2), a2)
        return FockState({k: v for k, v in out.items() if v != 0})

    def omega(self, M, m: int, state) -> FockState:
        """Mode ``m`` of ``1/2 sum_ij M_ij :h_i h_j:`` for symmetric ``M``."""
        d = self.d
        out: dict = {}
        for (lam, mono), amp in state.items():
            g = _level(mono)
            final = g - m
            if final < 0:
                continue
            # pairs (p, q), p + q = m, p <= q; q acts first, which is normal order
            for p in range(-final, m // 2 + 1):
                q = m - p
                if q < p or q > g:
                    continue
                w = mpq(1, 2) if p == q else 1
                for j in range(d):
                    first: dict = {}
                    self._boson_basis([1 if t == j else 0 for t in range(d)], q, lam, mono, amp, first)
                    for (l2, mo2), a2 in first.items():
                        if not a2:
                            continue
                        row = [M[i][j] for i in range(d)]
                        self._boson_basis(row, p, l2, mo2, a2 * w, out)
        return FockState({k: v for k, v in out.items() if v != 0})


# ---------------------------------------------------------------------------
# the Virasoro field of an assignment

@dataclass
class VirasoroField:
    fock: LatticeFock
    M: list  # C^-1 S C^-1
    longs: list  # (coords, b)
    shorts: list  # (coords, C^-1 w)
    exact: bool
    c: object
    _cache: dict = field(default_factory=dict, repr=False)

    def _mode_basis(self, m, lam, mono) -> dict:
        key = (m, lam, mono)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        s = {(lam, mono): mpq(1)}
        out = dict(self.fock.omega(self.M, m, s))
        for x, b in self.longs:
            neg = tuple(-v for v in x)
            _axpy(out, self.fock.vertex(x, m, s), b)
            _axpy(out, self.fock.vertex(neg, m, s), b)
        for x, cw in self.shorts:
            neg = tuple(-v for v in x)
            _axpy(out, self.fock.current_vertex(cw, x, m, s))
            _axpy(out, self.fock.current_vertex(cw, neg, m, s), -1)
        if not self.exact:
            out = {k: float(v) for k, v in out.items() if abs(v) >= PRUNE}
        self._cache[key] = out
        return out

    def mode(self, m: int, state) -> FockState:
        out: dict = {}
        for (lam, mono), amp in state.items():
            _axpy(out, self._mode_basis(m, lam, mono), amp)
        return FockState(out)


def _rational_or_float(v, exact: bool):
    if exact:
        if isinstance(v, Surd):
            v = v.to_fraction()
        return mpq(Fraction(v))
    return float(v)


def _all_rational(vals) -> bool:
    for v in vals:
        if isinstance(v, float):
            return False
        if isinstance(v, Surd) and not v.is_rational():
            return False
    return True


def build_field(ps: PolynomialSystem, x: AnsatzAssignment, max_level: int = 40) -> VirasoroField:
    d = ps.dim
    Ci = ps.Cinv
    flat = [v for row in x.S for v in row] + list(x.b.values()) + [c for w in x.w.values() for c in w]
    exact = _all_rational(flat)
    S = [[_rational_or_float(v, exact) for v in row] for row in x.S]
    Cf = [[mpq(Fraction(v)) for v in row] for row in Ci] if exact else [[float(v) for v in row] for row in Ci]
    SC = [[sum((S[i][k] * Cf[k][j] for k in range(d)), 0) for j in range(d)] for i in range(d)]
    M = [[sum((Cf[i][k] * SC[k][j] for k in range(d)), 0) for j in range(d)] for i in range(d)]
    longs = [(ps._coords[r], _rational_or_float(x.b[r], exact)) for r in ps.long_roots if r in x.b]
    shorts = []
    for r in ps.short_roots:
        if r not in x.w:
            continue
        w = [_rational_or_float(v, exact) for v in x.w[r]]
        cw = [sum((Cf[i][j] * w[j] for j in range(d)), 0) for i in range(d)]
        shorts.append((ps._coords[r], cw))
    c = sum((S[i][j] * Cf[j][i] for i in range(d) for j in range(d)), 0)
    fock = LatticeFock(ps.C, ps.cocycle, max_level)
    return VirasoroField(fock, M, longs, shorts, exact, c)


def apply_boson_mode(ps: PolynomialSystem, vec, n: int, s: FockState) -> FockState:
    return LatticeFock(ps.C, ps.cocycle).boson(vec, n, s)


def apply_vertex_mode(ps: PolynomialSystem, alpha, m: int, s: FockState) -> FockState:
    return LatticeFock(ps.C, ps.cocycle).vertex(alpha, m, s)


def apply_lambda_mode(ps: PolynomialSystem, beta, gamma_w, m: int, s: FockState) -> FockState:
    """``:J_gamma Gamma_beta:`` mode ``m``; ``gamma_w`` holds the products of gamma with the basis roots."""
    d = ps.dim
    cw = [sum((Fraction(ps.Cinv[i][j]) * Fraction(gamma_w[j]) for j in range(d)), Fraction(0)) for i in range(d)]
    return LatticeFock(ps.C, ps.cocycle).current_vertex(cw, beta, m, s)


def virasoro_mode(ps: PolynomialSystem, x: AnsatzAssignment, m: int, s: FockState) -> FockState:
    return build_field(ps, x).mode(m, s)


# ---------------------------------------------------------------------------
# the check

@dataclass
class OracleReport:
    pairs: list
    grade: int
    mismatch: float
    per_pair: dict
    c_extracted: object
    c_trace: object
    states_checked: int
    exact: bool
    momentum_ok: bool
    seconds: float
    notes: list = field(default_factory=list)

    @property
    def c_error(self) -> float:
        return abs(float(self.c_extracted) - float(self.c_trace))

    def passed(self, tol: float = 1e-9) -> bool:
        return self.mismatch <= tol and self.c_error <= tol and self.momentum_ok

    def to_dict(self) -> dict:
        def num(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {
            "pairs": [list(p) for p in self.pairs],
            "grade": self.grade,
            "mismatch": float(self.mismatch),
            "per_pair": {f"{m},{n}": float(v) for (m, n), v in self.per_pair.items()},
            "c_extracted": num(self.c_extracted),
            "c_trace": num(self.c_trace),
            "states_checked": self.states_checked,
            "exact": self.exact,
            "momentum_ok": self.momentum_ok,
            "seconds": self.seconds,
            "passed": self.passed(),
            "notes": list(self.notes),
        }


def _monomials(d: int, level: int):
    """All creation monomials of exactly ``level`` over ``d`` colours."""
    if level == 0:
        yield ()
        return

    def parts(n, maxpart):
        if n == 0:
            yield ()
            return
        for p in range(min(n, maxpart), 0, -1):
            for rest in parts(n - p, p):
                yield (p,) + rest

    seen = set()
    for part in parts(level, level):
        for colours in itertools.product(range(d), repeat=len(part)):
            mono = tuple(sorted(zip(part, colours)))
            if mono not in seen:
                seen.add(mono)
                yield mono


def momentum_window(ps: PolynomialSystem, bound: int = 16, max_states: int | None = None):
    """Lattice vectors ``0``, roots and sums of two roots with ``(l, l) <= bound``."""
    roots = [tuple(int(v) for v in ps._coords[r]) for r in range(len(ps._coords))]
    roots += [tuple(-v for v in r) for r in roots]
    cand = {(0,) * ps.dim}
    cand |= set(roots)
    for a, b in itertools.combinations_with_replacement(roots, 2):
        cand.add(tuple(x + y for x, y in zip(a, b)))
    C = ps.C
    d = ps.dim

    def norm(lam):
        return sum(lam[i] * C[i][j] * lam[j] for i in range(d) for j in range(d))

    out = sorted((lam for lam in cand if norm(lam) <= bound), key=lambda l: (norm(l), l))
    return out[:max_states] if max_states else out


def _reachable(ps: PolynomialSystem) -> set:
    roots = [tuple(int(v) for v in ps._coords[r]) for r in range(len(ps._coords))]
    roots += [tuple(-v for v in r) for r in roots]
    steps = {(0,) * ps.dim} | set(roots)
    out = set()
    for a in steps:
        for b in steps:
            out.add(tuple(x + y for x, y in zip(a, b)))
    return out


def extract_central_charge(fld: VirasoroField, d: int):
    """``c = 2 (<0|[L_2, L_-2]|0> - 4 <0|L_0|0>)``."""
    vac = FockState.vacuum(d)
    key = ((0,) * d, ())
    t1 = fld.mode(2, fld.mode(-2, vac)).get(key, 0)
    t2 = fld.mode(-2, fld.mode(2, vac)).get(key, 0)
    l0 = fld.mode(0, vac).get(key, 0)
    return 2 * ((t1 - t2) - 4 * l0)


def check_virasoro(ps: PolynomialSystem, x: AnsatzAssignment, pairs=((1, -1), (2, -2), (2, -1)),
                   grade: int = 4, momentum_bound: int = 16, max_momenta: int | None = None) -> OracleReport:
    """Compare ``[L_m, L_n]`` with ``(m-n) L_{m+n} + c (m^3-m)/12 delta_{m+n,0}``.

    Inputs are basis states of Heisenberg level up to ``grade - max(|m|,|n|)``
    at every momentum of :func:`momentum_window`.
    """
    t0 = time.time()
    pairs = [tuple(p) for p in pairs]
    if pairs and grade < max(max(abs(m), abs(n)) for m, n in pairs) + 1:
        raise GradeOverflow("grade must exceed the largest mode index")
    fld = build_field(ps, x)
    d = ps.dim
    c_trace = fld.c
    c_ext = extract_central_charge(fld, d)
    moms = momentum_window(ps, momentum_bound, max_momenta)
    reach = _reachable(ps)
    per_pair = {}
    count = 0
    momentum_ok = True
    for m, n in pairs:
        top = grade - max(abs(m), abs(n))
        worst = 0.0
        for lam in moms:
            for lev in range(0, top + 1):
                for mono in _monomials(d, lev):
                    s = FockState.basis(lam, mono, mpq(1) if fld.exact else 1.0)
                    a = fld.mode(m, fld.mode(n, s))
                    b = fld.mode(n, fld.mode(m, s))
                    lhs = a - b
                    rhs = fld.mode(m + n, s).scale(m - n)
                    if m + n == 0:
                        rhs = rhs + s.scale(c_trace * mpq(m ** 3 - m, 12) if fld.exact
                                            else float(c_trace) * (m ** 3 - m) / 12)
                    diff = lhs - rhs
                    worst = max(worst, diff.max_abs())
                    for mu in a.momenta() | b.momenta():
                        if tuple(p - q for p, q in zip(mu, lam)) not in reach:
                            momentum_ok = False
                    count += 1
        per_pair[(m, n)] = worst
    mismatch = max(per_pair.values(), default=0.0)
    if fld.exact:
        c_ext, c_trace = to_fraction(c_ext), to_fraction(c_trace)
    return OracleReport(pairs, grade, mismatch, per_pair, c_ext, c_trace, count, fld.exact,
                        momentum_ok, time.time() - t0)
