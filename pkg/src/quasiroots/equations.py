"""Coefficient equations of the free-boson Virasoro ansatz.

The ansatz is

    L = -1/2 A_{mu nu} :dphi_mu dphi_nu:
        + sum_{alpha long > 0} b_alpha (Gamma_alpha + Gamma_{-alpha})
        + i sum_{beta short > 0} :dphi_{gamma_beta} (Gamma_beta - Gamma_{-beta}):

Matching the third and first derivative delta-function terms of [L(z), L(w)]
against the Virasoro relation gives one matrix equation for A, one scalar
equation per long root pair and one vector equation per short root pair.

Everything is written in the frame of an integral basis ``v_1..v_d`` of
roots.  With ``V`` the matrix of basis columns and ``C = V^T V``:

* ``S = V^T A V`` replaces ``A``;
* ``w_beta = V^T gamma_beta`` replaces ``gamma_beta`` (the products of
  ``gamma_beta`` with the basis roots);
* a root ``alpha = V x`` has integer coordinates ``x`` and ``u = C x``.

All coefficients are then rational, whatever the embedding looks like.
The Euclidean ``A`` and ``gamma`` are recovered with :meth:`AnsatzAssignment.euclidean`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .cocycle import Cocycle, cocycle_for, epsilon
from .geometry import LONG, SHORT, QuasiRootSystem
from .poly import CompiledSystem, Poly
from .surd import Surd

# Symmetrised commutator tables: (length, length, product) -> list of
# (delta-derivative order, kind of the produced term).  Self pairs (alpha, -alpha)
# are handled separately since they feed the A equation.
COMMUTATOR_TABLE = {
    (LONG, LONG, -3): [(1, "lambda")],
    (LONG, LONG, -2): [(1, "gamma")],
    (LONG, SHORT, -2): [(1, "lambda")],
    (LONG, SHORT, -1): [(1, "gamma")],
    (SHORT, SHORT, -1): [(1, "lambda")],
    (SHORT, SHORT, 0): [(1, "gamma")],
}


# ---------------------------------------------------------------------------
# assignments

def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), 0) for j in range(len(B[0]))]
            for i in range(len(A))]


def _matvec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), 0) for i in range(len(A))]


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


@dataclass
class AnsatzAssignment:
    """Values of the unknowns in the root frame.

    ``S`` is the d x d matrix ``V^T A V``; ``b`` maps positive long root
    indices to coefficients; ``w`` maps positive short root indices to
    ``V^T gamma``.  Entries may be Fractions, Surds or floats.
    """

    C: tuple
    S: list
    b: dict = field(default_factory=dict)
    w: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.C)

    def Cinv(self):
        return linalg.inverse([list(r) for r in self.C])

    def central_charge(self):
        """``Tr(A) = Tr(S C^-1)``."""
        Ci = self.Cinv()
        return sum((self.S[i][j] * Ci[j][i] for i in range(self.dim) for j in range(self.dim)), 0)

    def trace_identity_rhs(self):
        """``Tr(A^2) + 4 sum b^2 + 4 sum (gamma, gamma)``."""
        Ci = self.Cinv()
        M = _matmul(self.S, Ci)
        t = sum((M[i][j] * M[j][i] for i in range(self.dim) for j in range(self.dim)), 0)
        t = t + 4 * sum((v * v for v in self.b.values()), 0)
        for w in self.w.values():
            t = t + 4 * _dot(w, _matvec(Ci, w))
        return t

    def gamma_norms(self):
        Ci = self.Cinv()
        return {k: _dot(w, _matvec(Ci, w)) for k, w in self.w.items()}

    def euclidean(self, V):
        """``(A, gamma)`` in the Euclidean frame where the basis roots are the columns of ``V``.

        ``V`` is a d x d matrix of exact numbers (Fraction/Surd) or floats.
        """
        d = self.dim
        Vinv = _inverse_generic(V)
        VinvT = [[Vinv[j][i] for j in range(d)] for i in range(d)]
        A = _matmul(_matmul(VinvT, self.S), Vinv)
        gamma = {k: _matvec(VinvT, w) for k, w in self.w.items()}
        return A, gamma

    def as_float(self) -> "AnsatzAssignment":
        f = float
        return AnsatzAssignment(self.C, [[f(x) for x in r] for r in self.S],
                                {k: f(v) for k, v in self.b.items()},
                                {k: [f(x) for x in w] for k, w in self.w.items()})


def _inverse_generic(V):
    """Gauss-Jordan inverse for Surd/Fraction/float entries."""
    d = len(V)
    M = [list(r) + [1 if i == j else 0 for j in range(d)] for i, r in enumerate(V)]
    for c in range(d):
        p = next(i for i in range(c, d) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for i in range(d):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return [r[d:] for r in M]


def dual(x: AnsatzAssignment) -> AnsatzAssignment:
    """``L_st - L``: ``A -> 1 - A`` (so ``S -> C - S``), ``b -> -b``, ``gamma -> -gamma``."""
    d = x.dim
    S = [[x.C[i][j] - x.S[i][j] for j in range(d)] for i in range(d)]
    return AnsatzAssignment(x.C, S, {k: -v for k, v in x.b.items()},
                            {k: [-c for c in w] for k, w in x.w.items()})


def central_charge(x: AnsatzAssignment):
    return x.central_charge()


def standard_assignment(C) -> AnsatzAssignment:
    C = tuple(tuple(int(v) for v in r) for r in C)
    return AnsatzAssignment(C, [[Fraction(v) for v in r] for r in C])


def trivial_assignment(C) -> AnsatzAssignment:
    C = tuple(tuple(int(v) for v in r) for r in C)
    d = len(C)
    return AnsatzAssignment(C, [[Fraction(0)] * d for _ in range(d)])


# ---------------------------------------------------------------------------
# the polynomial system

@dataclass
class _Root:
    index: int  # positive root index
    sign: int
    x: tuple  # integer coordinates in the basis
    length: int


@dataclass
class PolynomialSystem:
    system: QuasiRootSystem
    cocycle: Cocycle
    C: tuple
    Cinv: list
    variables: list
    equations: list
    labels: list
    long_roots: list
    short_roots: list
    s_index: dict  # (i, j) with i <= j -> variable
    b_index: dict  # long root -> variable
    w_param: dict  # short root -> (k0, free variable list, d x (d-1) rational matrix)
    extra_equations: list = field(default_factory=list)
    extra_labels: list = field(default_factory=list)
    delta2_bucket: list = field(default_factory=list)
    gauge_equations: list = field(default_factory=list)
    gauge_labels: list = field(default_factory=list)
    _compiled: object = None

    @property
    def dim(self):
        return len(self.C)

    @property
    def n_vars(self):
        return len(self.variables)

    def expected_equation_count(self) -> int:
        d = self.dim
        return d * (d + 1) // 2 + len(self.long_roots) + (d - 1) * len(self.short_roots)

    def all_equations(self):
        return list(self.equations) + list(self.extra_equations) + list(self.gauge_equations)

    def with_gauge(self, eigen_roots) -> "PolynomialSystem":
        """Copy with linear conditions making each listed root an eigenvector of ``A``.

        Systems with short roots carry weight-one currents whose flows move
        solutions along continuous families; fixing eigen-directions of ``A``
        (the usual symmetric-axis frame) picks isolated points on them.
        ``eigen_roots`` are positive root indices.
        """
        d = self.dim
        eqs, labels = [], []
        for r in eigen_roots:
            x = self._coords[r]
            k0 = next(k for k in range(d) if x[k])
            for k in range(d):
                if k == k0:
                    continue
                z = [0] * d
                z[k], z[k0] = x[k0], -x[k]
                cz = [sum((self.Cinv[i][j] * z[j] for j in range(d)), Fraction(0)) for i in range(d)]
                p = Poly()
                for i in range(d):
                    for j in range(d):
                        if x[i] and cz[j]:
                            v = self.s_index[(min(i, j), max(i, j))]
                            p = p + Poly.var(v, x[i] * cz[j])
                if not p.is_zero():
                    eqs.append(p)
                    labels.append(f"gauge[{r}][{k}]")
        out = PolynomialSystem(self.system, self.cocycle, self.C, self.Cinv, self.variables,
                               self.equations, self.labels, self.long_roots, self.short_roots,
                               self.s_index, self.b_index, self.w_param, self.extra_equations,
                               self.extra_labels, self.delta2_bucket,
                               list(self.gauge_equations) + eqs, list(self.gauge_labels) + labels)
        out._coords = self._coords
        return out

    def compiled(self) -> CompiledSystem:
        if self._compiled is None:
            self._compiled = CompiledSystem(self.all_equations(), self.n_vars)
        return self._compiled

    def square_compiled(self) -> CompiledSystem:
        return CompiledSystem(self.equations, self.n_vars)

    # -- conversions ------------------------------------------------------
    def to_assignment(self, vec) -> AnsatzAssignment:
        d = self.dim
        S = [[None] * d for _ in range(d)]
        for (i, j), v in self.s_index.items():
            S[i][j] = S[j][i] = vec[v]
        b = {r: vec[v] for r, v in self.b_index.items()}
        w = {}
        for r, (k0, free, M) in self.w_param.items():
            y = [vec[v] for v in free]
            w[r] = [sum((M[k][t] * y[t] for t in range(len(y))), 0 * y[0] if y else 0)
                    for k in range(d)]
        return AnsatzAssignment(self.C, S, b, w)

    def from_assignment(self, x: AnsatzAssignment) -> list:
        vec = [None] * self.n_vars
        for (i, j), v in self.s_index.items():
            vec[v] = x.S[i][j]
        for r, v in self.b_index.items():
            vec[v] = x.b.get(r, 0)
        for r, (k0, free, M) in self.w_param.items():
            w = x.w.get(r, [0] * self.dim)
            ks = [k for k in range(self.dim) if k != k0]
            for k, v in zip(ks, free):
                vec[v] = w[k]
        return vec

    def residual(self, x) -> float:
        """Max |equation| (including the vanishing constraints) at a float point."""
        vec = x if not isinstance(x, AnsatzAssignment) else self.from_assignment(x)
        vals = self.compiled()(np.array([float(v) for v in vec], dtype=float))[0]
        return float(np.max(np.abs(vals))) if len(vals) else 0.0

    def exact_residuals(self, x) -> list:
        vec = x if not isinstance(x, AnsatzAssignment) else self.from_assignment(x)
        return [p.evaluate(vec) for p in self.all_equations()]

    def is_exact_solution(self, x) -> bool:
        return all(_is_zero(r) for r in self.exact_residuals(x))

    def orthogonality_ok(self, x: AnsatzAssignment) -> bool:
        """Each ``gamma_beta`` orthogonal to its root: ``x_beta . w_beta = 0``."""
        for r, w in x.w.items():
            xs = self._coords[r]
            if not _is_zero(_dot(xs, w)):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "equations": [{"label": l, "terms": p.to_json()} for l, p in zip(self.labels, self.equations)],
            "constraints": [{"label": l, "terms": p.to_json()}
                            for l, p in zip(self.extra_labels + self.gauge_labels,
                                            self.extra_equations + self.gauge_equations)],
        }


def _is_zero(v) -> bool:
    if isinstance(v, Surd):
        return v.is_zero()
    if isinstance(v, (int, Fraction)):
        return v == 0
    return abs(v) < 1e-12


def assemble(data: QuasiRootSystem, emb=None, coc: Cocycle | None = None) -> PolynomialSystem:
    """Quadratic equations for the ansatz coefficients of ``data``.

    ``emb`` is accepted for interface symmetry; the root-frame equations do
    not depend on it.  ``coc`` defaults to the standard cocycle on the first
    integral basis found.
    """
    if coc is None:
        coc = cocycle_for(data)
    basis = coc.basis
    d = basis.dim
    C = tuple(tuple(int(v) for v in r) for r in basis.gram)
    Cinv = linalg.inverse([list(r) for r in C])
    G = data.matrix()
    longs = [i for i in range(data.size) if G[i, i] == LONG]
    shorts = [i for i in range(data.size) if G[i, i] == SHORT]
    X = basis.expansions  # P x d

    variables, s_index, b_index, w_param = [], {}, {}, {}
    for i in range(d):
        for j in range(i, d):
            s_index[(i, j)] = len(variables)
            variables.append(f"S[{i},{j}]")
    for r in longs:
        b_index[r] = len(variables)
        variables.append(f"b[{r}]")
    for r in shorts:
        xs = [int(v) for v in X[r]]
        k0 = next(k for k in range(d) if xs[k] != 0)
        free = []
        for k in range(d):
            if k != k0:
                free.append(len(variables))
                variables.append(f"w[{r}][{k}]")
        # w_k = y_k for k != k0, w_k0 = -(sum_k x_k y_k) / x_k0
        ks = [k for k in range(d) if k != k0]
        M = [[Fraction(0)] * (d - 1) for _ in range(d)]
        for t, k in enumerate(ks):
            M[k][t] = Fraction(1)
            M[k0][t] = Fraction(-xs[k], xs[k0])
        w_param[r] = (k0, free, M)

    # symbolic unknowns
    Smat = [[Poly.var(s_index[(min(i, j), max(i, j))]) for j in range(d)] for i in range(d)]
    bvar = {r: Poly.var(v) for r, v in b_index.items()}
    wvec = {}
    for r, (k0, free, M) in w_param.items():
        wvec[r] = [sum((Poly.var(free[t], M[k][t]) for t in range(d - 1)), Poly()) for k in range(d)]

    def coords(r, s=1):
        return tuple(s * int(v) for v in X[r])

    def u_of(x):
        return [sum(C[i][j] * x[j] for j in range(d)) for i in range(d)]

    def quad_S(x):  # x^T S x
        return sum((Smat[i][j] * (x[i] * x[j]) for i in range(d) for j in range(d) if x[i] and x[j]), Poly())

    def xdotw(x, w):
        return sum((w[k] * x[k] for k in range(d) if x[k]), Poly())

    def wCw(w1, w2):
        return sum((w1[i] * w2[j] * Cinv[i][j] for i in range(d) for j in range(d) if Cinv[i][j]), Poly())

    SCi = [[sum((Smat[i][k] * Cinv[k][j] for k in range(d) if Cinv[k][j]), Poly()) for j in range(d)]
           for i in range(d)]

    def SCi_w(w):
        return [sum((SCi[i][j] * w[j] for j in range(d)), Poly()) for i in range(d)]

    # every signed root with its coordinates
    roots = []
    lookup = {}
    for r in range(data.size):
        for s in (1, -1):
            rt = _Root(r, s, coords(r, s), int(G[r, r]))
            roots.append(rt)
            lookup[rt.x] = rt

    def b_of(rt):
        return bvar[rt.index]

    def w_of(rt):
        return [c * rt.sign for c in wvec[rt.index]]

    def eps(a, b):
        return epsilon(coc, a.x, b.x)

    def prod(a, b):
        return a.sign * b.sign * int(G[a.index, b.index])

    # pairs grouped by their sum
    pairs_by_sum: dict = {}
    for i, a in enumerate(roots):
        for bq in roots[i + 1:]:
            if a.index == bq.index:
                continue
            p = prod(a, bq)
            key = (a.length, bq.length, p) if a.length >= bq.length else (bq.length, a.length, p)
            rows = COMMUTATOR_TABLE.get(key)
            if not rows:
                continue
            ssum = tuple(x + y for x, y in zip(a.x, bq.x))
            la, lb = (a, bq) if a.length >= bq.length else (bq, a)
            pairs_by_sum.setdefault(ssum, []).append((key, la, lb, rows))

    delta2 = []
    equations, labels = [], []
    extra, extra_labels = [], []

    # A equation: S = S C^-1 S + sum b^2 u u^T + 2 sum w w^T + sum (w C^-1 w) u u^T
    rhs = [[sum((SCi[i][k] * Smat[k][j] for k in range(d)), Poly()) for j in range(d)] for i in range(d)]
    for r in longs:
        u = u_of(coords(r))
        bb = bvar[r] * bvar[r]
        for i in range(d):
            for j in range(i, d):
                if u[i] * u[j]:
                    rhs[i][j] = rhs[i][j] + bb * (u[i] * u[j])
    for r in shorts:
        u = u_of(coords(r))
        w = wvec[r]
        nrm = wCw(w, w)
        for i in range(d):
            for j in range(i, d):
                rhs[i][j] = rhs[i][j] + (w[i] * w[j]) * 2 + nrm * (u[i] * u[j])
    for i in range(d):
        for j in range(i, d):
            equations.append(Smat[i][j] - rhs[i][j])
            labels.append(f"phi[{i},{j}]")

    def harvest(target: _Root, kind: str):
        """Inter-vertex terms at the first derivative of delta for ``target``."""
        scalar = Poly()
        vec = [Poly() for _ in range(d)]
        for key, a, bq, rows in pairs_by_sum.get(target.x, []):
            for order, produced in rows:
                if order == 2:
                    delta2.append((key, a, bq))
                if produced != kind:
                    raise AssertionError(f"table row {key} produced {produced} for a {kind} target")
            e = eps(a, bq)
            if key == (LONG, LONG, -2):
                scalar = scalar + b_of(a) * b_of(bq) * (2 * e)
            elif key == (LONG, SHORT, -1):
                scalar = scalar - b_of(a) * xdotw(a.x, w_of(bq)) * (2 * e)
            elif key == (SHORT, SHORT, 0):
                wa, wb = w_of(a), w_of(bq)
                scalar = scalar - (xdotw(a.x, wb) * xdotw(bq.x, wa) - wCw(wa, wb)) * (2 * e)
            elif key == (LONG, LONG, -3):
                diff = u_of([p - q for p, q in zip(a.x, bq.x)])
                coef = b_of(a) * b_of(bq) * e
                vec = [vec[k] + coef * diff[k] for k in range(d)]
            elif key == (LONG, SHORT, -2):
                wb = w_of(bq)
                diff = u_of([p - q for p, q in zip(a.x, bq.x)])
                half = xdotw(a.x, wb) * Fraction(1, 2)
                vec = [vec[k] + b_of(a) * (wb[k] - half * diff[k]) * (2 * e) for k in range(d)]
            elif key == (SHORT, SHORT, -1):
                wa, wb = w_of(a), w_of(bq)
                diff = u_of([p - q for p, q in zip(a.x, bq.x)])
                pa, pb = xdotw(a.x, wb), xdotw(bq.x, wa)
                scal = pa * pb - wCw(wa, wb)
                vec = [vec[k] - (scal * diff[k] + pa * wa[k] * 2 - pb * wb[k] * 2) * e for k in range(d)]
        return scalar if kind == "gamma" else vec

    for r in longs:
        tgt = lookup[coords(r)]
        x = tgt.x
        eq = bvar[r] * 2 - quad_S(x) * bvar[r] - harvest(tgt, "gamma")
        equations.append(eq)
        labels.append(f"gamma[{r}]")

    for r in shorts:
        tgt = lookup[coords(r)]
        x = tgt.x
        u = u_of(x)
        w = wvec[r]
        k0 = w_param[r][0]
        lin = SCi_w(w)
        xSCw = sum((lin[k] * x[k] for k in range(d) if x[k]), Poly())
        qS = quad_S(x)
        inter = harvest(tgt, "lambda")
        for k in range(d):
            if k == k0:
                continue
            rhs_k = qS * w[k] - xSCw * u[k] + lin[k] * 2 + inter[k]
            equations.append(w[k] * 2 - rhs_k)
            labels.append(f"lambda[{r}][{k}]")

    # short pairs with product 0 whose (long) sum is not a root: the
    # produced vertex operator has nothing to match and must vanish
    for s in list(pairs_by_sum):
        if s in lookup:
            continue
        for key, a, bq, rows in pairs_by_sum[s]:
            if key != (SHORT, SHORT, 0):
                raise AssertionError(f"closure violated: pair {key} sums outside the system")
            wa, wb = w_of(a), w_of(bq)
            eq = xdotw(a.x, wb) * xdotw(bq.x, wa) - wCw(wa, wb)
            if not eq.is_zero() and not any(eq == e or eq == -e for e in extra):
                extra.append(eq)
                extra_labels.append(f"vanish[{a.sign * (a.index + 1)},{bq.sign * (bq.index + 1)}]")

    ps = PolynomialSystem(data, coc, C, Cinv, variables, equations, labels, longs, shorts,
                          s_index, b_index, w_param, extra, extra_labels, delta2, [], [])
    ps._coords = {r: coords(r) for r in range(data.size)}
    return ps


def residual(sys_: PolynomialSystem, x) -> float:
    """Frame-independent residual of ``x``.

    The quadratic-term equations form a symmetric matrix ``R`` in the root
    frame; its Euclidean counterpart has the eigenvalues of ``R C^-1``, so the
    spectral radius of that product is used.  Vertex equations and linear
    constraints contribute their absolute values.
    """
    vec = x if not isinstance(x, AnsatzAssignment) else sys_.from_assignment(x)
    fvec = np.array([float(v) for v in vec], dtype=float)
    vals = sys_.compiled()(fvec)[0] if sys_.all_equations() else np.zeros(0)
    d = sys_.dim
    R = np.zeros((d, d))
    rest = []
    for k, label in enumerate(sys_.labels):
        if label.startswith("phi["):
            i, j = (int(t) for t in label[4:-1].split(","))
            R[i, j] = R[j, i] = vals[k]
        else:
            rest.append(abs(vals[k]))
    rest.extend(abs(v) for v in vals[len(sys_.labels):])
    Ci = np.array([[float(v) for v in row] for row in sys_.Cinv])
    quad = float(np.max(np.abs(np.linalg.eigvals(R @ Ci)))) if d else 0.0
    return max([quad] + rest)


def check_duality(sys_: PolynomialSystem, x: AnsatzAssignment, tol: float = 1e-10) -> dict:
    """Report whether ``x`` and its dual both solve ``sys_`` and charges add to ``d``."""
    y = dual(x)
    exact = all(not isinstance(v, float) for v in sys_.from_assignment(x))
    if exact:
        ok_x, ok_y = sys_.is_exact_solution(x), sys_.is_exact_solution(y)
        total = Surd.coerce(x.central_charge()) + Surd.coerce(y.central_charge())
        sum_ok = total == sys_.dim
    else:
        ok_x, ok_y = sys_.residual(x) <= tol, sys_.residual(y) <= tol
        sum_ok = abs(float(x.central_charge()) + float(y.central_charge()) - sys_.dim) <= tol
    return {"solution_ok": ok_x, "dual_ok": ok_y, "charge_sum_ok": bool(sum_ok), "exact": exact,
            "c": x.central_charge(), "c_dual": y.central_charge()}
