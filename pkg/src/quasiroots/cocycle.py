"""Sign cocycle on the root lattice.

For an ordered integral basis ``a_1..a_d`` with Gram matrix ``C`` the basis
values are

* ``eps(a_i, a_j) = 1`` for ``i < j``,
* ``eps(a_i, a_i) = (-1)^(C_ii (C_ii + 1) / 2)``,
* ``eps(a_i, a_j) = (-1)^(C_ij + C_ii C_jj)`` for ``i > j``,

and ``eps`` is extended bimultiplicatively:
``eps(u, v) = prod eps(a_i, a_j)^(u_i v_j)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BadParams, BudgetExceeded, NoIntegralBasis
from .geometry import QuasiRootSystem, RootId

MAX_SUBSETS = 1_000_000


@dataclass(frozen=True)
class IntegralBasis:
    basis: tuple  # RootIds (all positive)
    expansions: np.ndarray  # P x d integer coordinates of every positive root
    gram: np.ndarray  # d x d Gram matrix of the basis

    @property
    def dim(self):
        return len(self.basis)

    def coords(self, root: RootId) -> np.ndarray:
        return root.sign * self.expansions[root.index]


def _expansions(G: np.ndarray, subset) -> np.ndarray | None:
    GB = G[np.ix_(subset, subset)].tolist()
    try:
        inv = linalg.inverse(GB)
    except ZeroDivisionError:
        return None
    X = linalg.matmul(inv, G[subset, :].tolist())  # d x P
    if any(x.denominator != 1 for row in X for x in row):
        return None
    return np.array([[int(x) for x in row] for row in X], dtype=np.int64).T


def integral_basis(data: QuasiRootSystem, prefer=None, max_subsets: int = MAX_SUBSETS) -> IntegralBasis:
    """Basis of positive roots generating every root with integer coefficients.

    ``prefer`` is tried first when given.  Otherwise ``dim``-subsets are tried
    in lexicographic order; the named constructors list simple roots first,
    so Cartan systems succeed on the first subset.
    """
    G = data.matrix()
    d = data.dim
    if prefer is not None:
        X = _expansions(G, list(prefer))
        if X is None or len(prefer) != d:
            raise BadParams("preferred roots do not form an integral basis")
        return IntegralBasis(tuple(RootId(i) for i in prefer), X, G[np.ix_(prefer, prefer)])
    # quick rejection of dependent subsets with a float rank test
    Gf = G.astype(float)
    tried = 0
    for subset in itertools.combinations(range(data.size), d):
        tried += 1
        if tried > max_subsets:
            raise BudgetExceeded(f"integral basis search exceeded {max_subsets} subsets")
        sub = list(subset)
        if abs(np.linalg.det(Gf[np.ix_(sub, sub)])) < 0.5:
            continue
        X = _expansions(G, sub)
        if X is not None:
            return IntegralBasis(tuple(RootId(i) for i in sub), X, G[np.ix_(sub, sub)])
    raise NoIntegralBasis(f"no {d} roots generate all {data.size} positive roots over the integers")


def standard_eps_basis(C) -> np.ndarray:
    C = np.asarray(C, dtype=np.int64)
    d = len(C)
    E = np.ones((d, d), dtype=np.int64)
    for i in range(d):
        E[i, i] = -1 if (C[i, i] * (C[i, i] + 1) // 2) % 2 else 1
        for j in range(i):
            E[i, j] = -1 if (C[i, j] + C[i, i] * C[j, j]) % 2 else 1
    return E


@dataclass(frozen=True)
class Cocycle:
    basis: IntegralBasis
    eps_basis: np.ndarray

    @property
    def _odd(self) -> np.ndarray:
        return (self.eps_basis == -1).astype(np.int64)

    def __call__(self, u, v) -> int:
        return epsilon(self, u, v)

    def roots(self, a: RootId, b: RootId) -> int:
        return epsilon(self, self.basis.coords(a), self.basis.coords(b))

    def to_dict(self):
        return {
            "basis": [r.index for r in self.basis.basis],
            "eps_basis": self.eps_basis.tolist(),
        }


def make_cocycle(basis: IntegralBasis, eps_basis=None) -> Cocycle:
    """Standard cocycle on ``basis``, or a caller-supplied basis table.

    A supplied table must satisfy ``eps(a_i,a_j) eps(a_j,a_i) = (-1)^C_ij`` and
    ``eps(a_i,a_i) = (-1)^(C_ii/2)``; bimultiplicativity then gives all the
    cocycle identities on the whole lattice.
    """
    C = np.asarray(basis.gram, dtype=np.int64)
    if eps_basis is None:
        return Cocycle(basis, standard_eps_basis(C))
    E = np.asarray(eps_basis, dtype=np.int64)
    d = len(C)
    if E.shape != (d, d) or not np.isin(E, (1, -1)).all():
        raise BadParams("eps_basis must be a d x d table of ±1")
    for i in range(d):
        if E[i, i] != (-1) ** ((C[i, i] * (C[i, i] + 1) // 2) % 2):
            raise BadParams(f"eps_basis diagonal entry {i} violates the self-product identity")
        for j in range(i):
            if E[i, j] * E[j, i] != (-1) ** ((C[i, j] + C[i, i] * C[j, j]) % 2):
                raise BadParams(f"eps_basis entries ({i},{j}) violate the exchange identity")
    return Cocycle(basis, E)


def cocycle_for(data: QuasiRootSystem, prefer=None, eps_basis=None) -> Cocycle:
    return make_cocycle(integral_basis(data, prefer), eps_basis)


def epsilon(c: Cocycle, u, v) -> int:
    """``eps(u, v)`` for integer coordinate vectors (also batched along axis 0)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    par = np.einsum("...i,ij,...j->...", u, c._odd, v) % 2
    out = 1 - 2 * par
    return int(out) if np.ndim(out) == 0 else out


def lattice_product(c: Cocycle, u, v):
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    return np.einsum("...i,ij,...j->...", u, np.asarray(c.basis.gram, dtype=np.int64), v)

