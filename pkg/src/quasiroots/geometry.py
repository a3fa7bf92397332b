"""Root sets as integer Gram matrices: validation, embedding, canonical forms.

Only one root of each ``±`` pair is stored.  The Gram matrix between those
positive representatives is the whole geometric datum; coordinates are
derived on demand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg
from .errors import BudgetExceeded, DegenerateGram, SchemaError
from .surd import Surd

LONG = 4
SHORT = 2

# largest |product| allowed between distinct roots, keyed by sorted lengths
MAX_PRODUCT = {(4, 4): 3, (2, 4): 2, (2, 2): 1}


@dataclass(frozen=True, order=True)
class RootId:
    index: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.index < 0:
            raise ValueError("index must be non-negative")

    def __neg__(self):
        return RootId(self.index, -self.sign)


@dataclass(frozen=True)
class QuasiRootSystem:
    """Positive roots of a (candidate) quasi root system."""

    dim: int
    gram: tuple
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_matrix(cls, gram, dim=None, name=None):
        g = np.asarray(gram)
        if dim is None:
            dim = linalg.rank(g.tolist()) if g.size else 0
        return cls(int(dim), tuple(map(tuple, g.tolist())), name)

    @property
    def size(self) -> int:
        """Number of positive roots."""
        return len(self.gram)

    @property
    def lengths(self) -> tuple:
        return tuple(self.gram[i][i] for i in range(self.size))

    @property
    def n_long(self) -> int:
        return sum(1 for x in self.lengths if x == LONG)

    @property
    def n_short(self) -> int:
        return sum(1 for x in self.lengths if x == SHORT)

    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64).reshape(self.size, self.size)

    def product(self, a: RootId, b: RootId) -> int:
        return a.sign * b.sign * self.gram[a.index][b.index]

    def roots(self):
        """All root ids, positive ones first."""
        return [RootId(i, 1) for i in range(self.size)] + [RootId(i, -1) for i in range(self.size)]

    def subsystem(self, indices) -> "QuasiRootSystem":
        idx = list(indices)
        g = [[self.gram[i][j] for j in idx] for i in idx]
        return QuasiRootSystem.from_matrix(g)

    # -- json -------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "gram": [list(r) for r in self.gram],
            "lengths": ["long" if x == LONG else "short" for x in self.lengths],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "QuasiRootSystem":
        try:
            dim = int(obj["dim"])
            gram = obj["gram"]
            if not all(isinstance(x, int) for row in gram for x in row):
                raise SchemaError("gram entries must be integers")
            sys_ = cls(dim, tuple(tuple(r) for r in gram), obj.get("name"))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad system object: {exc}") from exc
        if "lengths" in obj:
            want = ["long" if x == LONG else "short" for x in sys_.lengths]
            if list(obj["lengths"]) != want:
                raise SchemaError("lengths disagree with the gram diagonal")
        return sys_

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QuasiRootSystem":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: Optional[str] = None
    detail: Optional[str] = None

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"ok": self.ok, "reason": self.reason, "detail": self.detail}


def validate_gram(data) -> ValidationResult:
    """Check the structural invariants of a positive-root Gram matrix.

    Reports the first failure among: shape/symmetry, integrality, diagonal in
    {2, 4}, strict Cauchy-Schwarz (no proportional pairs), positive
    semidefiniteness and rank equal to ``dim``.
    """
    dim, gram = (data.dim, data.gram) if isinstance(data, QuasiRootSystem) else data
    rows = [list(r) for r in gram]
    n = len(rows)
    if any(len(r) != n for r in rows):
        return ValidationResult(False, "not_square")
    for i in range(n):
        for j in range(n):
            x = rows[i][j]
            if isinstance(x, float) and not x.is_integer():
                return ValidationResult(False, "non_integer", f"entry ({i},{j}) = {x}")
            if isinstance(x, Fraction) and x.denominator != 1:
                return ValidationResult(False, "non_integer", f"entry ({i},{j}) = {x}")
    rows = [[int(x) for x in r] for r in rows]
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                return ValidationResult(False, "not_symmetric", f"entries ({i},{j}) and ({j},{i})")
    for i in range(n):
        if rows[i][i] not in (SHORT, LONG):
            return ValidationResult(False, "bad_diagonal", f"root {i} has squared length {rows[i][i]}")
    for i in range(n):
        for j in range(i):
            key = tuple(sorted((rows[i][i], rows[j][j])))
            if abs(rows[i][j]) > MAX_PRODUCT[key]:
                return ValidationResult(False, "proportional_pair",
                                        f"roots {j},{i} have product {rows[i][j]}")
    ok, _, D, _ = linalg.pivoted_ldl(rows)
    if not ok:
        return ValidationResult(False, "not_psd")
    if len(D) != dim:
        return ValidationResult(False, "wrong_rank", f"rank {len(D)} but dim {dim}")
    return ValidationResult(True)


# ---------------------------------------------------------------------------
# embedding

@dataclass(frozen=True)
class Embedding:
    """Exact coordinates: one row per positive root, ``dim`` columns.

    Column ``k`` is a rational vector times ``sqrt(D_k)``, so every entry is a
    single-radicand :class:`Surd`.
    """

    coords: tuple  # tuple of tuples of Surd
    basis_rows: tuple  # rows whose coordinates span the space (pivot order)

    @property
    def dim(self):
        return len(self.coords[0]) if self.coords else 0

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.coords], dtype=float)

    def gram(self):
        """Exact Gram matrix rebuilt from the coordinates."""
        n = len(self.coords)
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                s = Surd()
                for a, b in zip(self.coords[i], self.coords[j]):
                    s = s + a * b
                out[i][j] = out[j][i] = s
        return out

    def reconstruction_error(self, gram) -> float:
        X = self.as_float()
        return float(np.max(np.abs(X @ X.T - np.asarray(gram, dtype=float)))) if len(X) else 0.0


def embed(data: QuasiRootSystem) -> Embedding:
    """Exact rank-``dim`` factorisation ``gram = X X^T``."""
    ok, L, D, piv = linalg.pivoted_ldl(data.gram)
    if not ok:
        raise DegenerateGram("gram matrix is not positive semidefinite")
    if len(D) != data.dim:
        raise DegenerateGram(f"rank {len(D)} is smaller than claimed dimension {data.dim}"
                             if len(D) < data.dim else
                             f"rank {len(D)} exceeds claimed dimension {data.dim}")
    roots = [Surd.sqrt(d) for d in D]
    coords = tuple(tuple(roots[k] * L[i][k] for k in range(len(D))) for i in range(data.size))
    return Embedding(coords, tuple(piv))


# ---------------------------------------------------------------------------
# canonical form

@dataclass(frozen=True)
class CanonicalForm:
    gram_min: tuple
    order: tuple = field(compare=False, default=())  # RootIds realising gram_min

    def system(self, dim) -> QuasiRootSystem:
        return QuasiRootSystem(dim, self.gram_min)


DEFAULT_CANON_BUDGET = 10_000_000
_canon_cache: dict = {}


def _invariant_classes(G: np.ndarray) -> np.ndarray:
    """Integer class label per root, stable under signed permutations.

    Starts from (length, sorted |products|) and refines once by the multiset
    of neighbour classes weighted by |product|.
    """
    n = len(G)
    A = np.abs(G)

    def relabel(keys):
        uniq = sorted(set(keys))
        pos = {k: i for i, k in enumerate(uniq)}
        return np.array([pos[k] for k in keys], dtype=np.int64)

    keys = [(int(G[i, i]), tuple(sorted(A[i].tolist()))) for i in range(n)]
    cls = relabel(keys)
    for _ in range(3):
        keys = [(int(cls[i]), tuple(sorted((int(cls[j]), int(A[i, j])) for j in range(n) if j != i)))
                for i in range(n)]
        new = relabel(keys)
        if len(set(new.tolist())) == len(set(cls.tolist())):
            cls = new
            break
        cls = new
    return cls


def canonicalize(data: QuasiRootSystem, budget: int = DEFAULT_CANON_BUDGET) -> CanonicalForm:
    """Lexicographically minimal Gram under invariant-respecting signed permutations.

    Roots are first grouped into classes by isometry invariants; only orderings
    that list classes in increasing label order are considered.  Within that
    constraint the search returns the minimum of the row-by-row key
    ``(g[k,0], ..., g[k,k-1], g[k,k])``, so the result is a complete invariant
    for signed relabelings.
    """
    G = data.matrix()
    key = G.tobytes() + bytes([G.shape[0] % 256])
    hit = _canon_cache.get(key)
    if hit is not None:
        return hit
    res = _canonical_search(G, budget)
    if len(_canon_cache) > 20000:
        _canon_cache.clear()
    _canon_cache[key] = res
    return res


def _canonical_search(G: np.ndarray, budget: int) -> CanonicalForm:
    n = len(G)
    if n == 0:
        return CanonicalForm((), ())
    cls = _invariant_classes(G)
    class_seq = np.sort(cls)  # class required at each position

    best_rows: list = []  # list of tuples, best key found so far
    best_order: list = []
    order: list[int] = []
    signs: list[int] = []
    used = np.zeros(n, dtype=bool)
    nodes = 0

    def rows_for(k, cand):
        # candidate rows at position k: products with already placed roots
        if k == 0:
            return np.zeros((len(cand), 0), dtype=np.int64)
        P = G[np.ix_(cand, order)] * np.array(signs, dtype=np.int64)[None, :]
        return P

    def worse_than_best(k, row_t):
        if not best_rows:
            return False
        return tuple(cur_rows) + (row_t,) > tuple(best_rows[:k + 1])

    def dfs(k):
        nonlocal nodes, best_rows, best_order
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"canonical search exceeded {budget} nodes")
        if k == n:
            if not best_rows or tuple(cur_rows) < tuple(best_rows):
                best_rows = list(cur_rows)
                best_order = list(zip(order, signs))
            return
        cand = np.nonzero((~used) & (cls == class_seq[k]))[0]
        P = rows_for(k, cand)
        # the sign making the first nonzero entry negative always wins
        sgn = np.ones(len(cand), dtype=np.int64)
        has = np.zeros(len(cand), dtype=bool)
        if k > 0:
            nz = P != 0
            has = nz.any(axis=1)
            fv = P[np.arange(len(cand)), np.argmax(nz, axis=1)]
            sgn = np.where(has & (fv > 0), -1, 1)
            P = P * sgn[:, None]
        full = np.concatenate([P, G[cand, cand][:, None]], axis=1)
        ranked = np.lexsort(full.T[::-1])
        minrow = full[ranked[0]]
        row_t = tuple(int(x) for x in minrow)
        for t in ranked:
            if not np.array_equal(full[t], minrow):
                break
            c = int(cand[t])
            # roots orthogonal to everything placed so far keep both signs
            for s in ((1, -1) if k > 0 and not has[t] else (int(sgn[t]),)):
                if worse_than_best(k, row_t):
                    return
                used[c] = True
                order.append(c)
                signs.append(s)
                cur_rows.append(row_t)
                dfs(k + 1)
                cur_rows.pop()
                order.pop()
                signs.pop()
                used[c] = False

    cur_rows: list = []
    dfs(0)
    idx = [i for i, _ in best_order]
    sg = np.array([s for _, s in best_order], dtype=np.int64)
    M = G[np.ix_(idx, idx)] * sg[:, None] * sg[None, :]
    return CanonicalForm(tuple(map(tuple, M.tolist())),
                         tuple(RootId(i, s) for i, s in best_order))


def relabel(data: QuasiRootSystem, perm, signs) -> QuasiRootSystem:
    """Apply a signed permutation: new root k is ``signs[k] * old root perm[k]``."""
    G = data.matrix()
    s = np.asarray(signs, dtype=np.int64)
    M = G[np.ix_(perm, perm)] * s[:, None] * s[None, :]
    return QuasiRootSystem.from_matrix(M, data.dim, data.name)


def gram_from_vectors(vectors) -> list[list[int]]:
    """Integer Gram matrix of rational (or integer) coordinate vectors."""
    V = [[Fraction(x) for x in v] for v in vectors]
    out = []
    for a in V:
        row = []
        for b in V:
            p = sum((x * y for x, y in zip(a, b)), Fraction(0))
            if p.denominator != 1:
                raise ValueError("non-integer scalar product")
            row.append(int(p))
        out.append(row)
    return out


def positive_representatives(vectors):
    """Keep one vector from each ± pair (the one whose first nonzero entry is positive)."""
    out = []
    seen = set()
    for v in vectors:
        t = tuple(Fraction(x) for x in v)
        first = next((x for x in t if x != 0), None)
        if first is None:
            continue
        if first < 0:
            t = tuple(-x for x in t)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def isclose_gram(a, b) -> bool:
    return np.array_equal(np.asarray(a), np.asarray(b))


def cauchy_schwarz_bound(la: int, lb: int) -> int:
    return MAX_PRODUCT[tuple(sorted((la, lb)))]



# ---------------------------------------------------------------------------
# isomorphism testing

def invariant_key(data: QuasiRootSystem) -> tuple:
    """Exact isometry invariant used to bucket systems before a full test.

    Traces of powers of ``G`` and ``|G|`` are unchanged by signed
    permutations; so is the multiset of (length, sorted |row|) labels.
    """
    G = data.matrix().astype(object)
    A = np.abs(G)
    tr = []
    Gk, Ak = G, A
    for _ in range(5):
        Gk, Ak = Gk.dot(G), Ak.dot(A)
        tr.append((int(np.trace(Gk)), int(np.trace(Ak))))
    rows = sorted((int(G[i, i]), tuple(sorted(int(x) for x in A[i]))) for i in range(data.size))
    return (data.dim, data.size, tuple(tr), tuple(rows))


def _joint_colors(GA: np.ndarray, GB: np.ndarray):
    """Colour refinement run on both matrices at once so labels are comparable."""
    n = len(GA)
    mats = (np.abs(GA), np.abs(GB))
    cols = [[(int(M[i, i]), tuple(sorted(M[i].tolist()))) for i in range(n)] for M in mats]
    for _ in range(n):
        keys = [[(cols[t][i], tuple(sorted((cols[t][j], int(mats[t][i, j]))
                                           for j in range(n) if j != i and mats[t][i, j])))
                 for i in range(n)] for t in (0, 1)]
        uniq = {k: c for c, k in enumerate(sorted(set(keys[0]) | set(keys[1])))}
        new = [[uniq[k] for k in keys[t]] for t in (0, 1)]
        stable = len(set(new[0]) | set(new[1])) == len(set(cols[0]) | set(cols[1]))
        cols = new
        if stable:
            break
    return np.array(cols[0]), np.array(cols[1])


def find_isomorphism(a: QuasiRootSystem, b: QuasiRootSystem, budget: int = DEFAULT_CANON_BUDGET):
    """Signed permutation carrying ``a`` onto ``b``, or ``None``.

    Returns ``(perm, signs)`` with ``sign[k]*root_b[perm[k]]`` the image of
    ``root_a[k]``.
    """
    if a.size != b.size or a.dim != b.dim:
        return None
    GA, GB = a.matrix(), b.matrix()
    n = len(GA)
    if n == 0:
        return (), ()
    ca, cb = _joint_colors(GA, GB)
    if sorted(ca.tolist()) != sorted(cb.tolist()):
        return None
    # placement order: rarest colour first, then stay connected to placed roots
    freq = {c: int((ca == c).sum()) for c in set(ca.tolist())}
    order = []
    placed = np.zeros(n, dtype=bool)
    while len(order) < n:
        free = np.nonzero(~placed)[0]
        if order:
            touch = free[np.any(GA[np.ix_(free, order)] != 0, axis=1)]
            pool = touch if len(touch) else free
        else:
            pool = free
        k = min(pool, key=lambda i: (freq[int(ca[i])], i))
        order.append(int(k))
        placed[k] = True
    img = np.full(n, -1, dtype=np.int64)
    sgn = np.zeros(n, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    nodes = 0

    def dfs(k):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("isomorphism search exceeded its budget")
        if k == n:
            return True
        x = order[k]
        prev = order[:k]
        cand = np.nonzero((~used) & (cb == ca[x]))[0]
        if not len(cand):
            return False
        want = GA[x, prev]
        if k:
            got = GB[np.ix_(cand, img[prev])] * sgn[prev][None, :]
            nz = np.nonzero(want)[0]
            if len(nz):
                j = nz[0]
                s = np.sign(want[j]) * np.sign(got[:, j])
                s[s == 0] = 1
                opts = [(c, (int(si),)) for c, si in zip(cand, s)
                        if si != 0 and np.array_equal(got[list(cand).index(c)] * si, want)]
            else:
                opts = [(c, (1, -1)) for c in cand if not got[list(cand).index(c)].any()]
        else:
            opts = [(c, (1,)) for c in cand]
        for c, signs in opts:
            for s in signs:
                img[x], sgn[x], used[c] = c, s, True
                if dfs(k + 1):
                    return True
                used[c] = False
        img[x] = -1
        return False

    if not dfs(0):
        return None
    return tuple(int(i) for i in img), tuple(int(s) for s in sgn)


def isomorphic(a: QuasiRootSystem, b: QuasiRootSystem) -> bool:
    return find_isomorphism(a, b) is not None
