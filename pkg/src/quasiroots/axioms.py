"""Decide whether a set of roots is a quasi root system.

Besides the structural checks of :func:`geometry.validate_gram`, a quasi root
system must be closed under the sum rules below and contain a long root.
Everything is done with Gram rows: the vector ``s*a + t*b`` is represented by
its products with every positive root, which pins it down because the roots
span the space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleProduct
from .geometry import LONG, MAX_PRODUCT, SHORT, QuasiRootSystem, RootId, ValidationResult, validate_gram


class RuleOutcome(enum.Enum):
    NO_CONDITION = "NoCondition"
    SUM_REQUIRED = "SumRequired"
    SUM_AND_DOUBLE_REQUIRED = "SumAndDoubleRequired"
    SUM_OPTIONAL = "SumOptional"


_RULES = {
    (LONG, LONG, -2): RuleOutcome.SUM_REQUIRED,
    (LONG, LONG, -3): RuleOutcome.SUM_REQUIRED,
    (LONG, SHORT, -1): RuleOutcome.SUM_REQUIRED,
    (LONG, SHORT, -2): RuleOutcome.SUM_AND_DOUBLE_REQUIRED,
    (SHORT, SHORT, -1): RuleOutcome.SUM_REQUIRED,
    (SHORT, SHORT, 0): RuleOutcome.SUM_OPTIONAL,
}


def rule_for(len_a: int, len_b: int, product: int) -> RuleOutcome:
    """Closure rule for two distinct, non-opposite roots.

    The order of the lengths does not matter; for the long/short double rule
    the doubled root is always the short one.
    """
    if len_a not in (LONG, SHORT) or len_b not in (LONG, SHORT):
        raise InadmissibleProduct(f"lengths must be 2 or 4, got {len_a}, {len_b}")
    if product != int(product) or abs(product) > MAX_PRODUCT[tuple(sorted((len_a, len_b)))]:
        raise InadmissibleProduct(f"product {product} impossible for lengths {len_a}, {len_b}")
    hi, lo = max(len_a, len_b), min(len_a, len_b)
    return _RULES.get((hi, lo, int(product)), RuleOutcome.NO_CONDITION)


@dataclass(frozen=True)
class RuleViolation:
    pair: tuple  # (RootId, RootId)
    product: int
    required_sums: tuple  # Gram rows of the missing roots

    def to_dict(self):
        return {
            "pair": [[r.index, r.sign] for r in self.pair],
            "product": self.product,
            "required_sums": [list(r) for r in self.required_sums],
        }


@dataclass(frozen=True)
class ValidationReport:
    structural: ValidationResult
    rule_violations: tuple = ()
    has_long_root: bool = True

    @property
    def ok(self) -> bool:
        return bool(self.structural) and not self.rule_violations and self.has_long_root

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            "ok": self.ok,
            "structural": self.structural.to_dict(),
            "rule_violations": [v.to_dict() for v in self.rule_violations],
            "has_long_root": self.has_long_root,
        }


def required_sums(G: np.ndarray, i: int, si: int, j: int, sj: int):
    """Gram rows of the roots that the pair (si*r_i, sj*r_j) forces into the system."""
    p = si * sj * int(G[i, j])
    li, lj = int(G[i, i]), int(G[j, j])
    rule = rule_for(li, lj, p)
    a, b = si * G[i], sj * G[j]
    if rule is RuleOutcome.SUM_REQUIRED:
        return [a + b]
    if rule is RuleOutcome.SUM_AND_DOUBLE_REQUIRED:
        # double the short member
        return [a + b, a + 2 * b] if lj == SHORT else [a + b, 2 * a + b]
    return []


def row_index(G: np.ndarray, row: np.ndarray):
    """Index of the positive root matching ``±row`` or ``None``."""
    hit = np.nonzero(np.all(G == row, axis=1) | np.all(G == -row, axis=1))[0]
    return int(hit[0]) if len(hit) else None


def check_axioms(data: QuasiRootSystem) -> ValidationReport:
    structural = validate_gram(data)
    has_long = any(x == LONG for x in data.lengths)
    if not structural:
        return ValidationReport(structural, (), has_long)
    G = data.matrix()
    n = data.size
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            # attach the rule to the sign choice with non-positive product
            sj = -1 if G[i, j] > 0 else 1
            choices = [sj] if G[i, j] != 0 else [1, -1]
            for s in choices:
                need = required_sums(G, i, 1, j, s)
                missing = tuple(tuple(int(x) for x in r) for r in need if row_index(G, r) is None)
                if missing:
                    out.append(RuleViolation((RootId(i, 1), RootId(j, s)), int(s * G[i, j]), missing))
    return ValidationReport(structural, tuple(out), has_long)


def components(data: QuasiRootSystem) -> list[list[int]]:
    """Connected components of the non-orthogonality graph on positive roots."""
    G = data.matrix()
    n = data.size
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in np.nonzero(G[v])[0]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        comps.append(sorted(comp))
    return comps


def is_simple(data: QuasiRootSystem) -> bool:
    return len(components(data)) <= 1


def decompose(data: QuasiRootSystem) -> list[QuasiRootSystem]:
    return [data.subsystem(c) for c in components(data)]


def direct_sum(*systems: QuasiRootSystem) -> QuasiRootSystem:
    """Orthogonal union of systems."""
    n = sum(s.size for s in systems)
    M = np.zeros((n, n), dtype=np.int64)
    k = 0
    for s in systems:
        M[k:k + s.size, k:k + s.size] = s.matrix()
        k += s.size
    return QuasiRootSystem.from_matrix(M, sum(s.dim for s in systems))
