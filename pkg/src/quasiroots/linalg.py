"""Small exact linear algebra over :class:`fractions.Fraction`.

Matrices are lists of lists.  Sizes here are tiny (tens of rows), so clarity
wins over speed.
"""

from __future__ import annotations

from fractions import Fraction


def to_frac(M) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in M]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def pivoted_ldl(G):
    """Symmetric pivoted LDL^T of a rational matrix.

    Returns ``(psd, L, D, pivots)`` where ``G == L diag(D) L^T`` when ``psd`` is
    true.  ``L`` is ``n x r`` (``r`` = rank), ``D`` holds the ``r`` positive
    pivots and ``pivots`` the row indices used, in order.  If ``G`` is not
    positive semidefinite ``psd`` is false and the other values are partial.
    """
    n = len(G)
    R = to_frac(G)  # running Schur complement
    L_cols: list[list[Fraction]] = []
    D: list[Fraction] = []
    pivots: list[int] = []
    active = list(range(n))
    while active:
        k = max(active, key=lambda i: (R[i][i], -i))
        if R[k][k] <= 0:
            # remaining block must be exactly zero
            for i in active:
                if R[i][i] < 0:
                    return False, L_cols, D, pivots
                for j in active:
                    if R[i][j] != 0:
                        return False, L_cols, D, pivots
            break
        d = R[k][k]
        col = [Fraction(0)] * n
        for i in range(n):
            col[i] = R[i][k] / d if i in active else Fraction(0)
        for i in active:
            if R[i][k] == 0:
                continue
            for j in active:
                R[i][j] -= col[i] * d * col[j]
        active.remove(k)
        L_cols.append(col)
        D.append(d)
        pivots.append(k)
    L = [[L_cols[c][i] for c in range(len(L_cols))] for i in range(n)]
    return True, L, D, pivots


def is_psd(G) -> bool:
    return pivoted_ldl(G)[0]


def rank(M) -> int:
    return len(row_echelon(M)[1])


def row_echelon(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = to_frac(M)
    rows = len(R)
    cols = len(R[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return R, piv


def inverse(M):
    n = len(M)
    aug = [list(row) + e for row, e in zip(to_frac(M), identity(n))]
    R, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def solve(M, b):
    """Solve ``M x = b`` for square non-singular ``M``."""
    return matvec(inverse(M), b)


def det(M) -> Fraction:
    R = to_frac(M)
    n = len(R)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if R[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            R[c], R[p] = R[p], R[c]
            out = -out
        out *= R[c][c]
        for i in range(c + 1, n):
            f = R[i][c] / R[c][c]
            if f:
                R[i] = [a - f * b for a, b in zip(R[i], R[c])]
    return out


def nullspace(M):
    """Basis of ``{x : M x = 0}`` as a list of rational vectors."""
    R, piv = row_echelon(M)
    cols = len(M[0])
    free = [c for c in range(cols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -R[r][f]
        out.append(v)
    return out
