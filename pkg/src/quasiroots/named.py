"""Constructors for the named families of quasi root systems.

All Gram matrices use the normalisation long = 4, short = 2.  Cartan
systems are built from their textbook coordinates and ordered with the
simple roots first, then by height.
"""

from __future__ import annotations

import itertools
import json
import re
from fractions import Fraction
from importlib import resources

import numpy as np

from . import linalg
from .errors import BadParams, UnknownName
from .geometry import QuasiRootSystem, validate_gram


def _unit(n, i, scale=1):
    v = [0] * n
    v[i] = scale
    return v


def _pm_pairs(n):
    """±e_i ± e_j for i < j."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * n
            v[i], v[j] = si, sj
            out.append(v)
    return out


def _from_vectors(vectors, scale, name, dim=None):
    """Positive roots of a Cartan-type root set, simple roots first.

    ``scale`` multiplies the Euclidean products so that long roots get 4.
    """
    vecs = [tuple(Fraction(x) for x in v) for v in vectors]
    n = len(vecs[0])
    weights = [Fraction(3) ** (n - i) + Fraction(1, 7 + i) for i in range(n)]
    f = lambda v: sum(w * x for w, x in zip(weights, v))  # noqa: E731
    pos = sorted({v for v in vecs if f(v) > 0}, key=f)
    pos_set = set(pos)
    simple = [v for v in pos
              if not any(tuple(a - b for a, b in zip(v, u)) in pos_set for u in pos if u != v)]
    # coefficients in the simple basis
    S = [list(s) for s in simple]
    M = linalg.transpose(S)
    _, piv = linalg.row_echelon(M)

    def coeffs(v):
        aug = [row + [x] for row, x in zip(M, v)]
        R, _ = linalg.row_echelon(aug)
        return tuple(R[k][-1] for k in range(len(simple)))

    ordered = sorted(pos, key=lambda v: (sum(coeffs(v)), tuple(-c for c in coeffs(v))))
    G = [[int(scale * sum(a * b for a, b in zip(u, v))) for v in ordered] for u in ordered]
    return QuasiRootSystem(dim if dim is not None else len(simple), tuple(map(tuple, G)), name)


def cartan(kind: str, n: int) -> QuasiRootSystem:
    kind = kind.upper()
    name = f"{kind}{n}"
    if kind == "A":
        if n < 1:
            raise BadParams("A_n needs n >= 1")
        vecs = [[(1 if k == i else -1 if k == j else 0) for k in range(n + 1)]
                for i in range(n + 1) for j in range(n + 1) if i != j]
        return _from_vectors(vecs, 2, name, n)
    if kind == "B":
        if n < 2:
            raise BadParams("B_n needs n >= 2")
        vecs = _pm_pairs(n) + [_unit(n, i, s) for i in range(n) for s in (1, -1)]
        return _from_vectors(vecs, 2, name)
    if kind == "C":
        if n < 2:
            raise BadParams("C_n needs n >= 2")
        vecs = _pm_pairs(n) + [_unit(n, i, 2 * s) for i in range(n) for s in (1, -1)]
        return _from_vectors(vecs, 1, name)
    if kind == "D":
        if n < 3:
            raise BadParams("D_n needs n >= 3")
        return _from_vectors(_pm_pairs(n), 2, name)
    raise UnknownName(kind)


def f4() -> QuasiRootSystem:
    vecs = _pm_pairs(4) + [_unit(4, i, s) for i in range(4) for s in (1, -1)]
    vecs += [[Fraction(s, 2) for s in signs] for signs in itertools.product((1, -1), repeat=4)]
    return _from_vectors(vecs, 2, "F4")


def _e8_vectors():
    vecs = [[2 * x for x in v] for v in _pm_pairs(8)]
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            vecs.append(list(signs))
    return vecs  # doubled coordinates, squared length 8


def e_series(n: int) -> QuasiRootSystem:
    vecs = _e8_vectors()
    if n == 8:
        keep = vecs
    elif n == 7:
        theta = [0] * 6 + [2, 2]
        keep = [v for v in vecs if np.dot(v, theta) == 0]
    elif n == 6:
        t1 = [0] * 6 + [2, 2]
        t2 = [0] * 5 + [2, -2, 0]
        keep = [v for v in vecs if np.dot(v, t1) == 0 and np.dot(v, t2) == 0]
    else:
        raise BadParams("E_n exists for n = 6, 7, 8")
    # doubled coordinates: real product = dot/4, long normalisation doubles it
    return _from_vectors(keep, Fraction(1, 2), f"E{n}", n)


I2 = ((4, -1), (-1, 4))
# alpha1, alpha2 long with product -3 and beta = alpha1 + alpha2 short
T2 = ((4, -3, 1), (-3, 4, 1), (1, 1, 2))


def itype(C) -> QuasiRootSystem:
    C = np.asarray(C, dtype=np.int64)
    n = len(C)
    if C.shape != (n, n) or not np.array_equal(C, C.T):
        raise BadParams("I-type matrix must be square and symmetric")
    if not (np.diag(C) == 4).all():
        raise BadParams("I-type matrix needs 4 on the diagonal")
    off = C[~np.eye(n, dtype=bool)]
    if not np.isin(off, (-1, 0, 1)).all():
        raise BadParams("I-type off-diagonal entries must be 0 or ±1")
    rank = linalg.rank(C.tolist())
    sys_ = QuasiRootSystem(rank, tuple(map(tuple, C.tolist())), "I-type")
    if not validate_gram(sys_):
        raise BadParams("I-type matrix is not positive semidefinite")
    return sys_


def product(d1, d2) -> QuasiRootSystem:
    """Pairs {a, b} of ADE roots modulo {a, b} = {-a, -b}.

    The product of {a, b} and {c, d} is (a, c)(b, d) with both factors
    normalised to squared length 2, so every pair is a long root.
    """
    s1, s2 = (named_system(x) if isinstance(x, str) else x for x in (d1, d2))
    for s in (s1, s2):
        if any(x != 4 for x in s.lengths):
            raise BadParams("product construction needs simply-laced factors")
    # (a,c)(b,d) with squared length 2 is G1/2 * G2/2
    G = np.kron(s1.matrix(), s2.matrix()) // 4
    return QuasiRootSystem(s1.dim * s2.dim, tuple(map(tuple, G.tolist())),
                           f"Product({s1.name},{s2.name})")


def joseph21() -> QuasiRootSystem:
    """Seven orthogonal chains a-b-c (products +1) plus one root meeting all with +1."""
    block = np.array([[4, 1, 0], [1, 4, 1], [0, 1, 4]])
    G = np.zeros((22, 22), dtype=np.int64)
    for k in range(7):
        G[3 * k:3 * k + 3, 3 * k:3 * k + 3] = block
    G[21, :] = 1
    G[:, 21] = 1
    G[21, 21] = 4
    return QuasiRootSystem(21, tuple(map(tuple, G.tolist())), "Joseph21")


def appendix_b() -> list[dict]:
    """Golden data for the fifteen simple systems of dimension three."""
    text = resources.files("quasiroots").joinpath("data/appendix_b.json").read_text()
    return json.loads(text)


def appendix_b_system(item: int) -> QuasiRootSystem:
    for entry in appendix_b():
        if entry["item"] == item:
            X = np.array(entry["roots"], dtype=np.int64)
            C = np.array(entry["generator_gram"], dtype=np.int64)
            G = X @ C @ X.T
            return QuasiRootSystem(3, tuple(map(tuple, G.tolist())), entry["name"] or f"QR{item}")
    raise BadParams(f"no three-dimensional item {item}")


_CARTAN = re.compile(r"^([ABCD])_?(\d+)$")


def named_system(name: str, *params) -> QuasiRootSystem:
    """Gram data for a named family.

    Accepts ``"A3"``/``"A_n", 3``, ``"B_n"``, ``"C_n"``, ``"D_n"``, ``"F4"``,
    ``"E6"``..``"E8"``, ``"A2"``, ``"I2"``, ``"T2"``, ``"B2"``,
    ``"I-type", C``, ``"Product", d1, d2``, ``"Joseph21"`` and ``"QR<k>"``
    for the three-dimensional catalogue items.
    """
    key = name.strip()
    upper = key.upper().replace(" ", "")
    if upper in ("I2",):
        return QuasiRootSystem(2, I2, "I2")
    if upper == "T2":
        return QuasiRootSystem(2, T2, "T2")
    if upper in ("F4", "F_4"):
        return f4()
    if upper in ("E6", "E7", "E8", "E_6", "E_7", "E_8"):
        return e_series(int(upper[-1]))
    if upper in ("E_N", "E"):
        if len(params) != 1:
            raise BadParams("E_n needs n")
        return e_series(int(params[0]))
    if upper in ("I-TYPE", "ITYPE", "I_TYPE"):
        if len(params) != 1:
            raise BadParams("I-type needs a matrix")
        return itype(params[0])
    if upper == "PRODUCT":
        if len(params) != 2:
            raise BadParams("Product needs two factors")
        return product(*params)
    if upper == "JOSEPH21":
        return joseph21()
    if upper.startswith("QR") and upper[2:].isdigit():
        return appendix_b_system(int(upper[2:]))
    m = _CARTAN.match(upper)
    if m:
        return cartan(m.group(1), int(m.group(2)))
    if upper in ("A_N", "B_N", "C_N", "D_N", "A", "B", "C", "D"):
        if len(params) != 1:
            raise BadParams(f"{name} needs a rank")
        try:
            n = int(params[0])
        except (TypeError, ValueError) as exc:
            raise BadParams(f"bad rank {params[0]!r}") from exc
        return cartan(upper[0], n)
    raise UnknownName(name)
