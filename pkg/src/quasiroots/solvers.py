"""Solvers for the ansatz equations.

Three routes are provided:

* :func:`solve_multistart` runs batched damped Newton (Levenberg-Marquardt)
  from many deterministic random starts, polishes each root in high
  precision, reconstructs rationals and quadratic surds, and upgrades the
  record to exact when the reconstructed point satisfies every equation in
  exact arithmetic;
* :func:`solve_itype` handles systems of long roots with products in
  ``{0, +-1}`` through the coordinate-free matrix equation
  ``C^-1 S C^-1 = C^-1 S C^-1 S C^-1 + B``;
* :func:`solve_an` builds the closed-form solutions of the ``A_n`` family.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import linalg
from .equations import AnsatzAssignment, PolynomialSystem, assemble, dual
from .errors import BadParams, SingularC
from .named import cartan, itype
from .poly import CompiledSystem, Poly
from .surd import Surd, squarefree_split

EXACT = "exact"
NUMERIC = "numeric"


@dataclass
class SolverConfig:
    starts: int | None = None  # default 200 per variable
    newton_tol: float = 1e-13
    dedupe_tol: float = 1e-8
    max_iter: int = 200
    seed: int = 0
    box: float = 1.5
    accept_tol: float = 1e-10
    keep_degenerate: bool = False
    exact: bool = True
    orbits: bool = True
    dps: int = 80

    def __post_init__(self):
        if self.newton_tol <= 0 or self.dedupe_tol <= 0:
            raise BadParams("tolerances must be positive")
        if self.dedupe_tol <= self.newton_tol:
            raise BadParams("dedupe_tol must exceed newton_tol")


@dataclass
class SolutionRecord:
    values: list
    assignment: AnsatzAssignment
    central_charge: object
    residual: float
    exactness: str = NUMERIC
    status: str = "accepted"
    reason: str = ""
    dual_of: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def c(self) -> float:
        return _to_float(self.central_charge)

    def float_values(self) -> np.ndarray:
        return np.array([_to_float(v) for v in self.values])

    def to_json(self, variables=None) -> dict:
        names = variables or [f"x{i}" for i in range(len(self.values))]
        out = {
            "exactness": self.exactness,
            "status": self.status,
            "central_charge": number_to_json(self.central_charge),
            "residual": float(self.residual),
            "values": {n: number_to_json(v) for n, v in zip(names, self.values)},
        }
        if self.reason:
            out["reason"] = self.reason
        if self.dual_of is not None:
            out["dual_of"] = self.dual_of
        if self.extra:
            out["extra"] = {k: _json_any(v) for k, v in self.extra.items()}
        return out


def _json_any(v):
    if isinstance(v, dict):
        return {str(k): _json_any(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_any(x) for x in v]
    if isinstance(v, (str, bool)) or v is None:
        return v
    return number_to_json(v)


def number_to_json(v):
    """Exact numbers as strings or surd objects, floats with 17 digits."""
    if isinstance(v, Surd):
        return v.to_json()
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, Fraction):
        return Surd.rational(v).to_json()
    if isinstance(v, complex):
        return {"re": float(f"{v.real:.17g}"), "im": float(f"{v.imag:.17g}")}
    return float(f"{float(v):.17g}")


def number_from_json(obj):
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict) and "re" in obj:
        return complex(obj["re"], obj["im"])
    s = Surd.from_json(obj)
    return s.rational_part() if s.is_rational() else s


def _to_float(v):
    if isinstance(v, complex):
        return v
    return float(v)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, Surd))


# ---------------------------------------------------------------------------
# numerics

def levenberg_marquardt(F: CompiledSystem, X0: np.ndarray, max_iter=200, tol=1e-13):
    """Batched damped Newton; returns final points and their max residuals."""
    X = np.array(X0, dtype=float)
    B, n = X.shape
    lam = np.full(B, 1e-3)
    R = F(X)
    cost = np.einsum("bm,bm->b", R, R)
    eye = np.eye(n)
    active = np.ones(B, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        J = F.jacobian(X[idx])
        Ri = R[idx]
        H = np.einsum("bmi,bmj->bij", J, J)
        g = np.einsum("bmi,bm->bi", J, Ri)
        D = H + lam[idx, None, None] * (np.einsum("bii->bi", H)[:, :, None] * eye + 1e-12 * eye)
        try:
            step = -np.linalg.solve(D, g[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -np.einsum("bij,bj->bi", np.linalg.pinv(D), g)
        Xt = X[idx] + step
        Rt = F(Xt)
        ct = np.einsum("bm,bm->b", Rt, Rt)
        ok = np.isfinite(ct) & (ct < cost[idx])
        good = idx[ok]
        X[good], R[good], cost[good] = Xt[ok], Rt[ok], ct[ok]
        lam[good] = np.maximum(lam[good] / 3, 1e-15)
        bad = idx[~ok]
        lam[bad] = lam[bad] * 4
        done = (np.max(np.abs(R[idx]), axis=1) < tol) | (lam[idx] > 1e12) | (np.abs(X[idx]).max(axis=1) > 1e6)
        active[idx[done]] = False
    return X, np.max(np.abs(R), axis=1) if R.shape[1] else np.zeros(B)


def newton_complex(F: CompiledSystem, Z0: np.ndarray, max_iter=200, tol=1e-13):
    """Damped Newton for square systems over the complex numbers."""
    Z = np.array(Z0, dtype=complex)
    for _ in range(max_iter):
        R = F(Z)
        res = np.max(np.abs(R), axis=1)
        if np.all(res < tol):
            break
        J = F.jacobian(Z)
        try:
            step = -np.linalg.solve(J, R[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = -np.einsum("bij,bj->bi", np.linalg.pinv(J), R)
        t = np.ones(len(Z))
        for _ in range(20):
            Zt = Z + t[:, None] * step
            rt = np.max(np.abs(F(Zt)), axis=1)
            worse = ~(rt < res) & (t > 1e-4)
            worse &= res >= tol
            if not worse.any():
                break
            t[worse] /= 2
        Z = Z + t[:, None] * step
        Z[~np.isfinite(Z).all(axis=1)] = 0
    R = F(Z)
    return Z, np.max(np.abs(R), axis=1)


def _mp_terms(polys):
    out = []
    for p in polys:
        out.append([(k, mpmath.mpf(c.numerator) / c.denominator) for k, c in p.terms.items()])
    return out


def polish(polys, n, x0, dps=80, iters=60):
    """Gauss-Newton refinement in ``dps`` digits; returns (mp vector, residual) or None."""
    with mpmath.workdps(dps):
        terms = _mp_terms(polys)
        x = [mpmath.mpmathify(v) for v in x0]
        tol = mpmath.mpf(10) ** (-(dps - 15))
        res = None
        for _ in range(iters):
            r = mpmath.matrix(len(terms), 1)
            J = mpmath.matrix(len(terms), n)
            for e, tl in enumerate(terms):
                acc = mpmath.mpf(0)
                for k, c in tl:
                    if not k:
                        acc += c
                    elif len(k) == 1:
                        acc += c * x[k[0]]
                        J[e, k[0]] += c
                    else:
                        i, j = k
                        acc += c * x[i] * x[j]
                        J[e, i] += c * x[j]
                        J[e, j] += c * x[i]
                r[e] = acc
            res = max((abs(v) for v in r), default=mpmath.mpf(0))
            if res < tol:
                break
            try:
                JT = J.T
                dx = mpmath.lu_solve(JT * J, -(JT * r))
            except ZeroDivisionError:
                return None
            x = [x[i] + dx[i] for i in range(n)]
        if res is None or res > mpmath.mpf(10) ** (-(dps // 2)):
            return None
        return x, res


# ---------------------------------------------------------------------------
# exact reconstruction

def identify(x, radicands=(), dps=80, maxcoeff=10 ** 9):
    """Exact rational or surd matching the high-precision value ``x``, or None.

    Rationals are tried first, then roots of integer quadratics, then integer
    relations with ``1`` and ``sqrt(r)`` for the square-free ``radicands``
    seen elsewhere in the same solution.
    """
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        tol = mpmath.mpf(10) ** (-(dps * 3 // 5))
        if abs(x) < tol:
            return Fraction(0)
        f = Fraction(mpmath.nstr(x, dps - 5, strip_zeros=False)).limit_denominator(10 ** 12)
        if abs(x - mpmath.mpf(f.numerator) / f.denominator) < tol:
            return f
        poly = mpmath.findpoly(x, 2, maxcoeff=maxcoeff, maxsteps=100000)
        if poly and len(poly) == 3:
            a, b, c = (int(v) for v in poly)
            disc = b * b - 4 * a * c
            if disc > 0:
                root = Surd.sqrt(disc)
                for s in (1, -1):
                    cand = (Surd.rational(-b) + root * s) / (2 * a)
                    if abs(_mp(cand) - x) < tol:
                        return cand
        rads = {squarefree_split(r)[1] for r in radicands if r > 1}
        rads |= _biquadratic_radicands(x, maxcoeff)
        rads = sorted(rads)
        if rads and len(rads) <= 8:
            basis = [x, mpmath.mpf(1)] + [mpmath.sqrt(r) for r in rads]
            rel = mpmath.pslq(basis, maxcoeff=maxcoeff, maxsteps=100000)
            if rel and rel[0] != 0:
                terms = {1: Fraction(-rel[1], rel[0])}
                for r, q in zip(rads, rel[2:]):
                    terms[r] = Fraction(-q, rel[0])
                cand = Surd(terms)
                if abs(_mp(cand) - x) < tol:
                    return cand.rational_part() if cand.is_rational() else cand
    return None


def _quadratic_radicand(x, maxcoeff):
    poly = mpmath.findpoly(x, 2, maxcoeff=maxcoeff, maxsteps=100000)
    if poly and len(poly) == 3:
        a, b, c = (int(v) for v in poly)
        disc = b * b - 4 * a * c
        if disc > 0:
            r = squarefree_split(disc)[1]
            return r if r > 1 else None
    return None


def _biquadratic_radicands(x, maxcoeff) -> set:
    """Radicands of ``Q(sqrt a, sqrt b)`` when ``x`` has a biquadratic minimal polynomial.

    Sums of two conjugates lie in the quadratic subfields, so their
    discriminants name the square roots needed to write ``x``.
    """
    poly = mpmath.findpoly(x, 4, maxcoeff=maxcoeff, maxsteps=100000)
    if not poly or len(poly) != 5:
        return set()
    try:
        roots = mpmath.polyroots(poly, maxsteps=200, extraprec=2 * mpmath.mp.prec)
    except mpmath.libmp.NoConvergence:
        return set()
    out = set()
    for i, j in itertools.combinations(range(4), 2):
        s = roots[i] + roots[j]
        if abs(mpmath.im(s)) > mpmath.mpf(10) ** (-(mpmath.mp.dps // 2)):
            continue
        r = _quadratic_radicand(mpmath.re(s), maxcoeff)
        if r:
            out.add(r)
    base = sorted(out)
    for a, b in itertools.combinations(base, 2):
        out.add(squarefree_split(a * b)[1])
    return out


def _mp(v):
    if isinstance(v, Surd):
        return mpmath.fsum(mpmath.mpf(q.numerator) / q.denominator * mpmath.sqrt(r)
                           for r, q in v.terms.items())
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def reconstruct(xmp, dps=80):
    """Identify every coordinate; returns a list of exact numbers or None."""
    out = [None] * len(xmp)
    seen = set()
    for i, v in enumerate(xmp):
        q = identify(v, (), dps)
        out[i] = q
        if isinstance(q, Surd):
            seen |= q.radicands()
    if any(v is None for v in out):
        # products of the radicands found so far cover multi-radicand entries
        rads = set(seen)
        for a, b in itertools.combinations(sorted(seen), 2):
            rads.add(squarefree_split(a * b)[1])
        for i, v in enumerate(xmp):
            if out[i] is None:
                out[i] = identify(v, rads, dps)
    if any(v is None for v in out):
        return None
    return [v.rational_part() if isinstance(v, Surd) and v.is_rational() else v for v in out]


# ---------------------------------------------------------------------------
# helpers on solution vectors

def _degenerate(ps: PolynomialSystem, x: np.ndarray, tol=1e-6) -> bool:
    for v in ps.b_index.values():
        if abs(x[v]) < tol:
            return True
    for k0, free, M in ps.w_param.values():
        if np.linalg.norm([x[v] for v in free]) < tol:
            return True
    return False


def _characters(ps: PolynomialSystem):
    """Sign changes ``root -> (-1)^(x . k)`` for ``k`` in GF(2)^d."""
    d = ps.dim
    for k in itertools.product((0, 1), repeat=d):
        if not any(k):
            continue
        flips = []
        for r, v in ps.b_index.items():
            if sum(a * b for a, b in zip(ps._coords[r], k)) % 2:
                flips.append(v)
        for r, (k0, free, M) in ps.w_param.items():
            if sum(a * b for a, b in zip(ps._coords[r], k)) % 2:
                flips.extend(free)
        yield flips


def _dual_vector(ps: PolynomialSystem, vec):
    out = list(vec)
    for (i, j), v in ps.s_index.items():
        out[v] = ps.C[i][j] - vec[v]
    for v in ps.b_index.values():
        out[v] = -vec[v]
    for k0, free, M in ps.w_param.values():
        for v in free:
            out[v] = -vec[v]
    return out


def _exact_ok(ps: PolynomialSystem, vec) -> bool:
    for p in ps.all_equations():
        r = p.evaluate(vec)
        if isinstance(r, Surd):
            if not r.is_zero():
                return False
        elif r != 0:
            return False
    return True


def make_record(ps: PolynomialSystem, vec, exactness=None) -> SolutionRecord:
    exact = all(_is_exact(v) for v in vec)
    if exactness is None:
        exactness = EXACT if exact and _exact_ok(ps, vec) else NUMERIC
    fvec = np.array([float(v) for v in vec])
    res = float(np.max(np.abs(ps.compiled()(fvec)[0]))) if ps.all_equations() else 0.0
    if exactness == EXACT:
        res = 0.0
    x = ps.to_assignment(vec)
    c = x.central_charge()
    if isinstance(c, Surd) and c.is_rational():
        c = c.rational_part()
    return SolutionRecord(list(vec), x, c, res, exactness)


class _Pool:
    """Dedupe solution vectors within a tolerance."""

    def __init__(self, tol):
        self.tol = tol
        self.items: list = []
        self.points: list = []

    def find(self, p):
        for i, q in enumerate(self.points):
            if np.max(np.abs(p - q)) < self.tol:
                return i
        return None

    def add(self, p, item) -> bool:
        if self.find(p) is not None:
            return False
        self.points.append(np.asarray(p, dtype=float))
        self.items.append(item)
        return True


def expand_orbits(ps: PolynomialSystem, records, cfg: SolverConfig | None = None, duals=True):
    """Close a list of records under sign characters and duality."""
    cfg = cfg or SolverConfig()
    pool = _Pool(cfg.dedupe_tol)
    queue = list(records)
    for r in queue:
        pool.add(r.float_values(), r)
    chars = list(_characters(ps))
    i = 0
    while i < len(queue):
        r = queue[i]
        i += 1
        cands = []
        for flips in chars:
            v = list(r.values)
            for k in flips:
                v[k] = -v[k]
            cands.append((v, None))
        if duals:
            cands.append((_dual_vector(ps, r.values), i - 1))
        for v, dual_src in cands:
            fv = np.array([float(x) for x in v])
            if pool.find(fv) is not None:
                continue
            if r.exactness == EXACT:
                if not _exact_ok(ps, v):
                    continue
                rec = make_record(ps, v, EXACT)
            else:
                if ps.residual(list(fv)) > cfg.accept_tol:
                    continue
                rec = make_record(ps, v, NUMERIC)
            rec.dual_of = dual_src
            pool.add(fv, rec)
            queue.append(rec)
    return queue


def _sort_records(records):
    return sorted(records, key=lambda r: (r.status != "accepted", round(float(np.real(r.c)), 9),
                                          tuple(np.round(np.real(r.float_values()), 9))))


def trivial_vector(ps: PolynomialSystem):
    return [Fraction(0)] * ps.n_vars


def standard_vector(ps: PolynomialSystem):
    vec = [Fraction(0)] * ps.n_vars
    for (i, j), v in ps.s_index.items():
        vec[v] = Fraction(ps.C[i][j])
    return vec


# ---------------------------------------------------------------------------
# generic multistart

def _ranks(F: CompiledSystem, X: np.ndarray, rtol=1e-7) -> np.ndarray:
    J = F.jacobian(X)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.shape[1] == 0:
        return np.zeros(len(X), dtype=int)
    return np.sum(sv > rtol * np.maximum(sv[:, :1], 1e-300), axis=1)


def _charge_vector(ps: PolynomialSystem) -> np.ndarray:
    """``c = Tr(S C^-1)`` as a linear form on the unknowns."""
    out = np.zeros(ps.n_vars)
    for (i, j), v in ps.s_index.items():
        w = float(ps.Cinv[j][i]) + (float(ps.Cinv[i][j]) if i != j else 0.0)
        out[v] += w
    return out

def _starts(ps: PolynomialSystem, count: int, box: float, rng: np.random.Generator) -> np.ndarray:
    d = ps.dim
    C = np.array(ps.C, dtype=float)
    V = np.linalg.cholesky(C).T  # C = V^T V, columns of V are basis roots
    X = np.zeros((count, ps.n_vars))
    A = rng.uniform(-box, box, size=(count, d, d))
    A = (A + np.swapaxes(A, 1, 2)) / 2
    S = np.einsum("ki,bkl,lj->bij", V, A, V)
    for (i, j), v in ps.s_index.items():
        X[:, v] = S[:, i, j]
    for v in ps.b_index.values():
        X[:, v] = rng.uniform(-box, box, size=count)
    for r, (k0, free, M) in ps.w_param.items():
        g = rng.uniform(-box, box, size=(count, d))
        w = g @ V
        ks = [k for k in range(d) if k != k0]
        for k, v in zip(ks, free):
            X[:, v] = w[:, k]
    return X


def solve_multistart(ps: PolynomialSystem | object, cfg: SolverConfig | None = None,
                     include_endpoints: bool = True) -> list[SolutionRecord]:
    """All real solutions Newton can find, deduplicated and closed under symmetries.

    By default only solutions with every ``b`` and ``gamma`` nonzero are kept;
    those with a vanishing coefficient live on a smaller system (and often on
    a continuous family).  The trivial and standard solutions are added
    exactly when ``include_endpoints`` is true.
    """
    if not isinstance(ps, PolynomialSystem):
        ps = assemble(ps)
    cfg = cfg or SolverConfig()
    rng = np.random.default_rng(cfg.seed)
    n = ps.n_vars
    count = cfg.starts or 200 * max(n, 1)
    F = ps.compiled()
    X0 = _starts(ps, count, cfg.box, rng)
    X, res = levenberg_marquardt(F, X0, cfg.max_iter, cfg.newton_tol)
    conv = np.nonzero(res < 1e-8)[0]
    if not cfg.keep_degenerate:
        conv = np.array([i for i in conv if not _degenerate(ps, X[i])], dtype=int)
    # isolated roots have a full-rank Jacobian; the others lie on families
    ranks = _ranks(F, X[conv]) if len(conv) else np.zeros(0, dtype=int)
    cvec = _charge_vector(ps)
    pool = _Pool(cfg.dedupe_tol)
    families: dict = {}
    for i, rk in zip(conv, ranks):
        if rk == n:
            pool.add(X[i], X[i])
        else:
            key = round(float(cvec @ X[i]), 7)
            families.setdefault(key, (X[i], n - rk))
    polys = ps.all_equations()
    records = []
    seen = _Pool(cfg.dedupe_tol)
    for x in pool.items:
        if seen.find(x) is not None:
            continue
        rec = None
        if cfg.exact:
            pol = polish(polys, n, list(x), cfg.dps)
            if pol is not None:
                xmp, _ = pol
                vec = reconstruct(xmp, cfg.dps)
                if vec is not None and _exact_ok(ps, vec):
                    rec = make_record(ps, vec, EXACT)
                else:
                    x = np.array([float(v) for v in xmp])
        if rec is None:
            if ps.residual(list(x)) > cfg.accept_tol:
                continue
            rec = make_record(ps, list(x), NUMERIC)
        group = expand_orbits(ps, [rec], cfg) if cfg.orbits else [rec]
        for g in group:
            if seen.add(g.float_values(), g):
                records.append(g)
    for key in sorted(families):
        x, dim = families[key]
        if ps.residual(list(x)) > cfg.accept_tol:
            continue
        rec = make_record(ps, list(x), NUMERIC)
        rec.extra = {"isolated": False, "family_dim": int(dim)}
        records.append(rec)
    if include_endpoints:
        for vec in (trivial_vector(ps), standard_vector(ps)):
            rec = make_record(ps, vec)
            if seen.add(rec.float_values(), rec):
                records.append(rec)
    return _sort_records(records)


# ---------------------------------------------------------------------------
# I-type systems

def _itype_polys(C):
    d = len(C)
    Ci = linalg.inverse([list(r) for r in C])
    index = {}
    for i in range(d):
        for j in range(i + 1, d):
            index[(i, j)] = len(index)
    S = [[Poly.const(2) if i == j else Poly.var(index[(min(i, j), max(i, j))]) for j in range(d)]
         for i in range(d)]

    def mul_const(P, M):  # Poly matrix times rational matrix
        return [[sum((P[i][k] * M[k][j] for k in range(d) if M[k][j]), Poly()) for j in range(d)]
                for i in range(d)]

    def const_mul(M, P):
        return [[sum((P[k][j] * M[i][k] for k in range(d) if M[i][k]), Poly()) for j in range(d)]
                for i in range(d)]

    CSC = mul_const(const_mul(Ci, S), Ci)  # C^-1 S C^-1
    SC = mul_const(S, Ci)
    CSCSC = [[sum((CSC[i][k] * SC[k][j] for k in range(d)), Poly()) for j in range(d)] for i in range(d)]
    M = [[CSC[i][j] - CSCSC[i][j] for j in range(d)] for i in range(d)]
    eqs = [M[i][j] for i in range(d) for j in range(i + 1, d)]
    bsq = [M[i][i] for i in range(d)]
    return index, eqs, bsq, Ci


def solve_itype(C, cfg: SolverConfig | None = None, V=None) -> list[SolutionRecord]:
    """Solutions of an I-type system from the reduced matrix equation.

    Records carry ``extra["b_squared"]`` and ``extra["S"]``.  Solutions with a
    nonpositive ``b^2`` or a complex ``S`` are returned with status
    ``"rejected"``.  When ``V`` (basis roots as columns) is given the
    Euclidean ``A`` is attached as ``extra["A"]``.
    """
    cfg = cfg or SolverConfig()
    C = [[int(v) for v in r] for r in C]
    if linalg.det(C) == 0:
        raise SingularC("Gram matrix of an I-type system must be nonsingular")
    data = itype(C)
    ps = assemble(data)
    index, eqs, bsq, Ci = _itype_polys(C)
    n = len(index)
    rng = np.random.default_rng(cfg.seed)
    count = cfg.starts or 400 * max(n, 1)
    Z0 = rng.uniform(-cfg.box, cfg.box, size=(count, n)) + 1j * rng.uniform(-cfg.box, cfg.box, size=(count, n))
    # real starts too, so real roots are reached without drifting off the axis
    Z0[: count // 2].imag = 0
    F = CompiledSystem(eqs, n)
    Z, res = newton_complex(F, Z0, cfg.max_iter, cfg.newton_tol)
    pool = _Pool(1e-7)
    for z, r in zip(Z, res):
        if r < 1e-9:
            pool.add(np.concatenate([z.real, z.imag]), z)
    records = []
    for z in pool.items:
        is_real = np.max(np.abs(z.imag)) < 1e-9 if n else True
        vals = None
        if is_real and cfg.exact:
            pol = polish(eqs, n, list(z.real), cfg.dps) if n else ([], 0)
            if pol is not None:
                vals = reconstruct(pol[0], cfg.dps) if n else []
        bsq_num = [complex(p.evaluate(list(z))) if n else complex(float(p.terms.get((), 0))) for p in bsq]
        if vals is not None and all(_exact_ok_poly(p, vals) for p in eqs):
            b2 = [_simplify(p.evaluate(vals)) for p in bsq]
        else:
            vals, b2 = None, None
        if any(abs(v) < 1e-9 for v in bsq_num):
            continue  # a vanishing b belongs to a smaller system
        rec = _itype_record(ps, C, Ci, index, z, vals, b2, bsq_num, is_real, V)
        records.append(rec)
    return _sort_records(records)


def _exact_ok_poly(p, vals):
    r = p.evaluate(vals)
    return r.is_zero() if isinstance(r, Surd) else r == 0


def _simplify(v):
    if isinstance(v, Surd) and v.is_rational():
        return v.rational_part()
    return v


def _itype_record(ps, C, Ci, index, z, vals, b2, bsq_num, is_real, V):
    d = len(C)
    if vals is not None:
        S = [[Fraction(2) if i == j else vals[index[(min(i, j), max(i, j))]] for j in range(d)] for i in range(d)]
    else:
        S = [[2.0 if i == j else complex(z[index[(min(i, j), max(i, j))]]) for j in range(d)] for i in range(d)]
        if is_real:
            S = [[float(np.real(v)) for v in row] for row in S]
    c = _simplify(sum((S[i][j] * Ci[j][i] for i in range(d) for j in range(d)), 0))
    extra = {"S": S, "b_squared": b2 if b2 is not None else [v.real if is_real else v for v in bsq_num]}
    status, reason = "accepted", ""
    if not is_real:
        status, reason = "rejected", "complex S: the Euclidean A would not be real"
        guess = [Fraction(v.real).limit_denominator(10 ** 4) for v in bsq_num]
        if all(abs(complex(g) - v) < 1e-10 for g, v in zip(guess, bsq_num)):
            extra["b_squared"] = guess
    elif any(v.real <= 0 for v in bsq_num):
        status, reason = "rejected", "nonpositive b^2"
    # b values: exact square roots when b^2 is rational
    bvals = {}
    if status == "accepted":
        for k, r in enumerate(ps.long_roots):
            sq = extra["b_squared"][k]
            if isinstance(sq, Fraction):
                bvals[r] = _simplify(Surd.sqrt(sq))
            else:
                bvals[r] = math.sqrt(float(sq))
    x = AnsatzAssignment(ps.C, S, bvals, {})
    # b is exact only when every b^2 has an exact square root (no nested radicals)
    exact = (vals is not None and b2 is not None and status == "accepted"
             and all(_is_exact(v) for v in bvals.values()))
    if status == "accepted":
        vec = ps.from_assignment(x)
        res = 0.0 if exact else ps.residual([float(v) for v in vec])
        values = vec
    else:
        res, values = float("nan"), []
    if V is not None and status == "accepted":
        extra["A"] = x.euclidean(V)[0]
    rec = SolutionRecord(values, x, c, res, EXACT if exact else NUMERIC, status, reason, extra=extra)
    return rec


def itype_sign_orbit(rec: SolutionRecord, ps: PolynomialSystem) -> list[SolutionRecord]:
    """All ``2^d`` sign choices of the ``b`` coefficients (no inter-vertex terms tie them)."""
    out = []
    longs = ps.long_roots
    for signs in itertools.product((1, -1), repeat=len(longs)):
        b = {r: rec.assignment.b[r] * s for r, s in zip(longs, signs)}
        x = AnsatzAssignment(rec.assignment.C, rec.assignment.S, b, {})
        out.append(SolutionRecord(ps.from_assignment(x), x, rec.central_charge, rec.residual,
                                  rec.exactness, rec.status, rec.reason, extra=dict(rec.extra)))
    return out


# ---------------------------------------------------------------------------
# A_n closed form

@dataclass(frozen=True)
class SigmaSequence:
    bits: tuple

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise BadParams("sigma entries must be 0 or 1")

    @classmethod
    def all(cls, n):
        return [cls(tuple(b)) for b in itertools.product((0, 1), repeat=n - 1)]


def an_values(n: int, sigma):
    """``(a_j, |b_j|, c)`` of the ``A_n`` solution labelled by ``sigma``."""
    bits = tuple(sigma.bits if isinstance(sigma, SigmaSequence) else sigma)
    if n < 1:
        raise BadParams("n must be positive")
    if len(bits) != n - 1:
        raise BadParams(f"sigma must have {n - 1} entries")
    x = [None] + [Fraction(k + 1, k + 3) for k in range(1, n + 1)]  # 1-based
    a, bmag = [], []
    for j in range(1, n + 1):
        v = x[n]
        for k in range(j, n):
            tail = sum(bits[p - 1] for p in range(k, n))
            v += x[k] * bits[k - 1] * (-1) ** tail
        a.append(v)
        parity = sum(bits[p - 1] for p in range(j, n)) % 2
        bmag.append((1 - v) / 2 if parity == 0 else v / 2)
    return a, bmag, sum(a)


def an_simple_roots(n: int):
    """Simple roots of ``A_n`` as exact coordinate rows.

    Root ``i`` (1-based) has ``-sqrt(2(i-1)/i)`` in slot ``i-1`` and
    ``sqrt(2(i+1)/i)`` in slot ``i``, which gives length 4 and neighbour
    products ``-2``.
    """
    rows = []
    for i in range(1, n + 1):
        r = [Surd() for _ in range(n)]
        if i > 1:
            r[i - 2] = -Surd.sqrt(Fraction(2 * (i - 1), i))
        r[i - 1] = Surd.sqrt(Fraction(2 * (i + 1), i))
        rows.append(r)
    return rows


def _an_chain(ps: PolynomialSystem, n: int):
    """For each positive root, the index ``j`` (1-based) of its last simple root."""
    last = {}
    for r in range(len(ps._coords)):
        x = ps._coords[r]
        nz = [k for k, v in enumerate(x) if v]
        last[r] = max(nz) + 1
    return last


def solve_an(n: int, sigma, dual_solution: bool = False,
             ps: PolynomialSystem | None = None) -> SolutionRecord:
    """Exact ``A_n`` solution for ``sigma``; all simple-root ``b`` positive.

    ``|b|`` of a root ``alpha_k + ... + alpha_j`` equals ``|b_j|`` and its sign
    follows :func:`_an_signs`.  The point is verified exactly against the
    assembled system before it is returned.
    """
    a, bmag, c = an_values(n, sigma)
    if ps is None:
        ps = assemble(cartan("A", n))
    d = n
    # basis roots are the simple roots, in order
    V = an_simple_roots(n)  # rows = roots; V^T A V with columns = roots
    S = [[sum((a[k] * V[i][k] * V[j][k] for k in range(d)), Surd()) for j in range(d)] for i in range(d)]
    S = [[_simplify(v) for v in row] for row in S]
    last = _an_chain(ps, n)
    mags = {r: bmag[last[r] - 1] for r in ps.long_roots}
    bits = tuple(getattr(sigma, "bits", sigma))
    signs = _an_signs(ps, bits, n)
    b = {r: mags[r] * signs[r] for r in ps.long_roots}
    x = AnsatzAssignment(ps.C, S, b, {})
    if dual_solution:
        x = dual(x)
    vec = ps.from_assignment(x)
    rec = make_record(ps, vec)
    if rec.exactness != EXACT:
        raise AssertionError(f"A_{n} solution for sigma={sigma} failed exact verification")
    rec.extra = {"sigma": list(getattr(sigma, "bits", sigma)), "a": a, "b_abs": bmag,
                 "dual": dual_solution}
    return rec


def _an_signs(ps, bits, n):
    """Signs with every simple-root ``b`` positive.

    The coefficient of ``alpha_k + ... + alpha_j`` carries the product of
    step signs ``t_i = -(-1)^(sigma_i + ... + sigma_{n-1})`` for ``i = k..j-1``.
    """
    t = [-((-1) ** sum(bits[i - 1:n - 1])) for i in range(1, n)]
    out = {}
    for r in ps.long_roots:
        nz = [k for k, v in enumerate(ps._coords[r]) if v]
        s = 1
        for i in range(nz[0], nz[-1]):
            s *= t[i]
        out[r] = s
    return out


def an_all_solutions(n: int, ps: PolynomialSystem | None = None) -> list[SolutionRecord]:
    """Every ``A_n`` solution: sigma sequences, duals and simple-root sign choices."""
    if ps is None:
        ps = assemble(cartan("A", n))
    base = []
    for sig in SigmaSequence.all(n):
        base.append(solve_an(n, sig, False, ps))
        base.append(solve_an(n, sig, True, ps))
    return _sort_records(expand_orbits(ps, base, duals=False))


def euclidean_from_paper_frame(A, b_by_root, V, C):
    """Convert Euclidean ``A`` and basis-root columns ``V`` to an assignment."""
    d = len(C)
    S = [[sum((V[k][i] * A[k][l] * V[l][j] for k in range(d) for l in range(d)), 0) for j in range(d)]
         for i in range(d)]
    return AnsatzAssignment(tuple(tuple(r) for r in C), S, dict(b_by_root), {})
