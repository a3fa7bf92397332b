"""Exhaustive generation of simple quasi root systems.

Every simple system Q can be grown from one of its long roots: while the
current closed subsystem S is smaller than Q, some root of Q outside S is
non-orthogonal to S; add it and close under the sum rules.  Closure never
leaves Q because Q itself is closed.  So the set of all closed, connected
systems that contain a long root and have rank at most d is reachable from
A1 by the two steps

* :func:`extend` - add one admissible root non-orthogonal to the system;
* :func:`saturate` - add required sums until nothing changes;

and the rank-d members of that set are exactly the catalog.  Isomorphic
intermediate systems have isomorphic extensions (an isometry between spans
extends to the whole space), so the search deduplicates as it goes.

Internally a root is stored by its integer products ``p`` with a fixed basis
``B`` of roots.  With ``adj``/``det`` the adjugate and determinant of the
basis Gram matrix, the product of two roots is ``p_u adj p_v / det`` and the
sum of two roots is the sum of their ``p`` vectors.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .axioms import is_simple
from .errors import BudgetExceeded
from .geometry import LONG, SHORT, QuasiRootSystem, canonicalize, invariant_key, isomorphic

DEFAULT_MAX_ROOTS = 60
DEFAULT_BUDGET_NODES = 10_000_000


def _bounds(la, lb):
    """Largest allowed |product| between distinct roots of lengths la, lb (vectorised)."""
    return np.where((la == LONG) & (lb == LONG), 3, np.where((la == SHORT) & (lb == SHORT), 1, 2))


def _normalise(P: np.ndarray) -> np.ndarray:
    """Flip rows so their first nonzero entry is positive."""
    nz = P != 0
    first = P[np.arange(len(P)), np.argmax(nz, axis=1)]
    return P * np.where(first < 0, -1, 1)[:, None]


def _adjugate(GB) -> tuple[np.ndarray, int]:
    d = linalg.det(GB)
    inv = linalg.inverse(GB)
    adj = [[x * d for x in row] for row in inv]
    assert all(x.denominator == 1 for row in adj for x in row)
    return np.array([[int(x) for x in row] for row in adj], dtype=np.int64), int(d)


@dataclass
class _Frame:
    """Roots as integer product vectors against a basis."""

    P: np.ndarray  # n x r
    adj: np.ndarray  # r x r
    det: int

    @property
    def rank(self):
        return self.P.shape[1]

    def gram(self, A=None, B=None):
        A = self.P if A is None else A
        B = self.P if B is None else B
        num = A @ self.adj @ B.T
        return num // self.det, num % self.det

    @classmethod
    def from_system(cls, data: QuasiRootSystem) -> "_Frame":
        ok, _, D, piv = linalg.pivoted_ldl(data.gram)
        piv = sorted(piv)
        G = data.matrix()
        GB = G[np.ix_(piv, piv)]
        adj, det = _adjugate(GB.tolist())
        return cls(G[:, piv].copy(), adj, det)


class _Dead(Exception):
    pass


def _close(frame: _Frame, max_roots: int) -> np.ndarray:
    """Saturate the sum rules.  Returns the closed integer Gram matrix.

    Raises ``_Dead`` when a forced root clashes with the system and
    ``BudgetExceeded`` when the system grows past ``max_roots``.
    """
    P = _normalise(frame.P)
    seen = {tuple(r) for r in P.tolist()}
    while True:
        G, rem = frame.gram(P, P)
        if rem.any():
            raise _Dead
        n = len(P)
        L = np.diag(G)
        if not np.isin(L, (SHORT, LONG)).all():
            raise _Dead
        off = np.abs(G) * (1 - np.eye(n, dtype=np.int64))
        if (off > _bounds(L[:, None], L[None, :])).any():
            raise _Dead
        iu, ju = np.triu_indices(n, 1)
        g = G[iu, ju]
        li, lj = L[iu], L[ju]
        ag = np.abs(g)
        ll = (li == LONG) & (lj == LONG)
        ss = (li == SHORT) & (lj == SHORT)
        ls = ~ll & ~ss
        need = (ll & (ag >= 2)) | (ls & (ag >= 1)) | (ss & (ag == 1))
        s = -np.sign(g)
        new = [P[iu[need]] + s[need, None] * P[ju[need]]]
        dbl = ls & (ag == 2)
        if dbl.any():
            i, j, sd = iu[dbl], ju[dbl], s[dbl]
            j_short = lj[dbl] == SHORT
            long_ = np.where(j_short[:, None], P[i], P[j])
            short = np.where(j_short[:, None], P[j], P[i])
            new.append(long_ + 2 * sd[:, None] * short)
        cand = _normalise(np.concatenate(new)) if sum(len(x) for x in new) else np.zeros((0, P.shape[1]), np.int64)
        added = []
        for row in cand.tolist():
            t = tuple(row)
            if t not in seen:
                seen.add(t)
                added.append(row)
        if not added:
            return G
        if n + len(added) > max_roots:
            raise BudgetExceeded(f"closure exceeded {max_roots} positive roots")
        P = np.concatenate([P, np.array(added, dtype=np.int64)])


def saturate(data: QuasiRootSystem, max_roots: int = DEFAULT_MAX_ROOTS) -> QuasiRootSystem | None:
    """Close a root set under the required-sum rules.

    Returns ``None`` when a forced sum is incompatible with the existing roots
    (no quasi root system contains the input).
    """
    frame = _Frame.from_system(data)
    try:
        G = _close(frame, max_roots)
    except _Dead:
        return None
    return QuasiRootSystem.from_matrix(G, frame.rank, data.name)


def _candidates(frame: _Frame, max_dim: int):
    """Yield ``(p, length, new_dim)`` for every admissible one-root extension."""
    r = frame.rank
    P = frame.P
    G, _ = frame.gram()
    Ls = np.diag(G)
    XB = frame.adj @ P.T  # r x n
    # entries of p are products with basis roots, bounded by their lengths
    GB_diag = np.diag(_basis_gram(frame))
    for length in (LONG, SHORT):
        ranges = [range(-int(b), int(b) + 1) for b in _bounds(np.full(r, length), GB_diag)]
        C = np.array(list(itertools.product(*ranges)), dtype=np.int64)
        C = C[np.any(C != 0, axis=1)]
        # one of each ± pair
        C = C[(C == _normalise(C)).all(axis=1)]
        num = C @ XB
        ok = (num % frame.det == 0).all(axis=1)
        C, num = C[ok], num[ok]
        prods = num // frame.det
        ok = (np.abs(prods) <= _bounds(np.full_like(Ls, length), Ls)[None, :]).all(axis=1)
        ok &= (prods != 0).any(axis=1)
        C, prods = C[ok], prods[ok]
        qnum = np.einsum("ij,jk,ik->i", C, frame.adj, C)
        target = length * frame.det
        in_span = qnum == target
        for p in C[in_span]:
            yield p, length, False
        if r < max_dim:
            # positive definite basis Gram: q < length means a genuinely new direction
            for p in C[qnum < target]:
                yield p, length, True


def _basis_gram(frame: _Frame) -> np.ndarray:
    # GB = det * adj^{-1}; recover it exactly
    inv = linalg.inverse(frame.adj.tolist())
    return np.array([[int(x * frame.det) for x in row] for row in inv], dtype=np.int64)


def _grow(frame: _Frame, p: np.ndarray, length: int, new_dim: bool) -> _Frame:
    if not new_dim:
        return _Frame(np.concatenate([frame.P, p[None, :]]), frame.adj, frame.det)
    GB = _basis_gram(frame)
    extra = (frame.P @ frame.adj @ p) // frame.det
    P = np.concatenate([frame.P, extra[:, None]], axis=1)
    P = np.concatenate([P, np.append(p, length)[None, :]])
    GB2 = np.block([[GB, p[:, None]], [p[None, :], np.array([[length]])]])
    adj, det = _adjugate(GB2.tolist())
    return _Frame(P, adj, det)


def _extend_frame(frame: _Frame, max_dim: int, max_roots: int, stats: dict):
    for p, length, new_dim in _candidates(frame, max_dim):
        stats["nodes"] = stats.get("nodes", 0) + 1
        if stats["nodes"] > stats.get("budget", DEFAULT_BUDGET_NODES):
            raise BudgetExceeded("enumeration exceeded its node budget")
        f2 = _grow(frame, p, length, new_dim)
        try:
            G = _close(f2, max_roots)
        except _Dead:
            continue
        except BudgetExceeded:
            stats["truncated"] = stats.get("truncated", 0) + 1
            continue
        yield QuasiRootSystem.from_matrix(G, f2.rank)


class _Registry:
    """Isomorphism classes, bucketed by an exact invariant."""

    def __init__(self):
        self.buckets: dict = {}
        self.items: list = []

    def add(self, sys_: QuasiRootSystem) -> bool:
        bucket = self.buckets.setdefault(invariant_key(sys_), [])
        if any(isomorphic(sys_, other) for other in bucket):
            return False
        bucket.append(sys_)
        self.items.append(sys_)
        return True


def extend(data: QuasiRootSystem, max_dim: int | None = None,
           max_roots: int = DEFAULT_MAX_ROOTS, budget: int = DEFAULT_BUDGET_NODES) -> list[QuasiRootSystem]:
    """All closed one-root extensions of ``data``, up to isomorphism.

    The new root must be non-orthogonal to some existing root; it may raise
    the rank by one as long as the rank stays within ``max_dim`` (default: one
    more than the current rank).
    """
    frame = _Frame.from_system(data)
    if max_dim is None:
        max_dim = frame.rank + 1
    reg = _Registry()
    stats = {"budget": budget}
    out = []
    for s in _extend_frame(frame, max_dim, max_roots, stats):
        if reg.add(s):
            out.append(_canonical(s))
    return sorted(out, key=_sort_key)


def _canonical(s: QuasiRootSystem) -> QuasiRootSystem:
    return QuasiRootSystem(s.dim, canonicalize(s).gram_min, s.name)


def _sort_key(s: QuasiRootSystem):
    return (s.dim, s.size, s.gram)


@dataclass
class Catalog:
    dim: int
    systems: list
    complete: bool = True
    max_roots: int = DEFAULT_MAX_ROOTS
    budget_nodes: int = DEFAULT_BUDGET_NODES
    nodes: int = 0
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        out: dict = {}
        for s in self.systems:
            k = (s.n_long, s.n_short)
            out[k] = out.get(k, 0) + 1
        return out

    def __len__(self):
        return len(self.systems)


A1 = QuasiRootSystem(1, ((4,),), "A1")


def enumerate_all(d: int, max_roots: int = DEFAULT_MAX_ROOTS,
                  budget_nodes: int = DEFAULT_BUDGET_NODES) -> tuple[dict, dict]:
    """Every closed connected system of rank ``<= d`` containing a long root.

    Returns ``(by_rank, stats)`` where ``by_rank[r]`` lists canonical systems.
    """
    reg = _Registry()
    reg.add(A1)
    queue = [A1]
    stats = {"budget": budget_nodes, "nodes": 0}
    while queue:
        cur = queue.pop()
        for s in _extend_frame(_Frame.from_system(cur), d, max_roots, stats):
            if reg.add(s):
                queue.append(s)
    by_rank: dict = {r: [] for r in range(1, d + 1)}
    for s in reg.items:
        by_rank[s.dim].append(s)
    return by_rank, stats


def enumerate_simple(d: int, max_roots: int = DEFAULT_MAX_ROOTS,
                     budget_nodes: int = DEFAULT_BUDGET_NODES) -> Catalog:
    """All simple quasi root systems of dimension ``d`` up to isometry."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    t0 = time.perf_counter()
    try:
        by_rank, stats = enumerate_all(d, max_roots, budget_nodes)
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), partial=Catalog(d, [], complete=False)) from exc
    systems = sorted((_canonical(s) for s in by_rank[d] if is_simple(s)), key=_sort_key)
    cat = Catalog(d, systems, complete=not stats.get("truncated"), max_roots=max_roots,
                  budget_nodes=budget_nodes, nodes=stats["nodes"], seconds=time.perf_counter() - t0)
    if stats.get("truncated"):
        cat.notes.append(f"{stats['truncated']} branches exceeded {max_roots} positive roots")
    return cat


def gram_from_simple_data(products, coefficients) -> list[list[int]]:
    """Gram matrix of roots given as integer combinations of generators.

    ``products`` is the generator Gram matrix, ``coefficients`` one row per root.
    """
    X = np.asarray(coefficients, dtype=np.int64)
    C = np.asarray(products, dtype=np.int64)
    return (X @ C @ X.T).tolist()

