"""Versioned JSON persistence for systems, solutions and oracle reports.

A catalog file looks like::

    {"schema": "qrs/1",
     "entries": [{"key": ..., "system": {...}, "provenance": {...},
                  "cocycle": {...}, "gauge": [...], "variables": [...],
                  "solutions": [...], "oracle": {...} | null}]}

Keys are sorted and exact numbers are strings (or surd objects), so a
write/read/write cycle is byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cocycle import Cocycle, integral_basis, make_cocycle
from .equations import PolynomialSystem, assemble
from .errors import SchemaError
from .geometry import QuasiRootSystem, canonicalize
from .solvers import SolutionRecord, number_from_json

SCHEMA = "qrs/1"


@dataclass
class CatalogEntry:
    system: QuasiRootSystem
    provenance: dict = field(default_factory=lambda: {"kind": "imported"})
    solutions: list = field(default_factory=list)  # JSON dicts
    oracle: dict | None = None
    cocycle: dict | None = None  # {"basis": [...], "eps_basis": [[...]]}
    gauge: list = field(default_factory=list)
    variables: list = field(default_factory=list)
    key: str = ""

    def __post_init__(self):
        if not self.key:
            self.key = canonical_key(self.system)

    @property
    def name(self) -> str:
        return self.system.name or self.provenance.get("family") or self.key[:12]

    # -- algebra ----------------------------------------------------------
    def make_cocycle(self) -> Cocycle:
        if self.cocycle is None:
            basis = integral_basis(self.system)
            coc = make_cocycle(basis)
            self.cocycle = coc.to_dict()
            return coc
        basis = integral_basis(self.system, prefer=self.cocycle["basis"])
        return make_cocycle(basis, self.cocycle.get("eps_basis"))

    def polynomial_system(self) -> PolynomialSystem:
        ps = assemble(self.system, coc=self.make_cocycle())
        if self.gauge:
            ps = ps.with_gauge(self.gauge)
        return ps

    def add_solutions(self, records, ps: PolynomialSystem, tol: float = 1e-8) -> int:
        """Append records not already present; returns the number added."""
        self.variables = list(ps.variables)
        added = 0
        for rec in records:
            obj = rec.to_json(ps.variables) if isinstance(rec, SolutionRecord) else rec
            if not any(_same_solution(obj, old, tol) for old in self.solutions):
                self.solutions.append(obj)
                added += 1
        return added

    def solution_vector(self, index: int) -> list:
        try:
            sol = self.solutions[index]
        except IndexError as exc:
            raise SchemaError(f"no solution with index {index}") from exc
        vals = sol.get("values", {})
        missing = [v for v in self.variables if v not in vals]
        if missing or not self.variables:
            raise SchemaError(f"solution {index} lacks values for {missing or 'all variables'}")
        return [number_from_json(vals[v]) for v in self.variables]

    # -- json -------------------------------------------------------------
    def to_dict(self) -> dict:
        sys_ = self.system.to_dict()
        if self.system.name:
            sys_["name"] = self.system.name
        return {
            "key": self.key,
            "system": sys_,
            "provenance": dict(self.provenance),
            "cocycle": self.cocycle,
            "gauge": list(self.gauge),
            "variables": list(self.variables),
            "solutions": list(self.solutions),
            "oracle": self.oracle,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CatalogEntry":
        if not isinstance(obj, dict) or "system" not in obj:
            raise SchemaError("entry needs a 'system' object")
        system = QuasiRootSystem.from_dict(obj["system"])
        prov = obj.get("provenance") or {"kind": "imported"}
        if prov.get("kind") not in ("enumerated", "named", "imported"):
            raise SchemaError(f"unknown provenance {prov.get('kind')!r}")
        entry = cls(system, prov, list(obj.get("solutions") or []), obj.get("oracle"),
                    obj.get("cocycle"), list(obj.get("gauge") or []), list(obj.get("variables") or []))
        if obj.get("key") and obj["key"] != entry.key:
            raise SchemaError("entry key does not match the canonical form of its system")
        return entry


def _same_solution(a: dict, b: dict, tol: float) -> bool:
    va, vb = a.get("values", {}), b.get("values", {})
    if va.keys() != vb.keys():
        return False
    if json.dumps(va, sort_keys=True) == json.dumps(vb, sort_keys=True):
        return True
    try:
        fa = np.array([complex(_as_float(number_from_json(va[k]))) for k in sorted(va)])
        fb = np.array([complex(_as_float(number_from_json(vb[k]))) for k in sorted(vb)])
    except (TypeError, ValueError):
        return False
    return bool(np.max(np.abs(fa - fb), initial=0.0) <= tol)


def _as_float(v):
    return v if isinstance(v, complex) else float(v)


def canonical_key(system: QuasiRootSystem) -> str:
    cf = canonicalize(system)
    return f"d{system.dim}:" + ";".join(",".join(str(v) for v in row) for row in cf.gram_min)


def known_labels(dim: int) -> dict:
    """Canonical key -> familiar name for the named systems of dimension ``dim``."""
    from .named import appendix_b, appendix_b_system, named_system

    names = []
    if dim == 1:
        names = ["A1"]
    elif dim == 2:
        names = ["A2", "I2", "T2", "B2"]
    elif dim == 3:
        names = [f"QR{e['item']}" for e in appendix_b()]
    else:
        names = [f"{k}{dim}" for k in "ABCD" if not (k == "D" and dim < 3)]
        names += ["F4"] if dim == 4 else []
    out = {}
    for n in names:
        s = appendix_b_system(int(n[2:])) if n.startswith("QR") else named_system(n)
        label = s.name or n
        if n.startswith("QR") and label != n:
            label = f"{n} {label}"
        out.setdefault(canonical_key(s), label)
    return out


@dataclass
class CatalogFile:
    entries: list = field(default_factory=list)

    def find(self, key: str):
        return next((e for e in self.entries if e.key == key), None)

    def add(self, entry: CatalogEntry) -> CatalogEntry:
        """Insert ``entry``, merging solutions into an existing entry with the same key."""
        old = self.find(entry.key)
        if old is None:
            self.entries.append(entry)
            return entry
        for sol in entry.solutions:
            if not any(_same_solution(sol, s, 1e-8) for s in old.solutions):
                old.solutions.append(sol)
        if entry.variables and not old.variables:
            old.variables = entry.variables
        return old

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, obj) -> "CatalogFile":
        if not isinstance(obj, dict):
            raise SchemaError("catalog must be a JSON object")
        if obj.get("schema") != SCHEMA:
            raise SchemaError(f"expected schema {SCHEMA!r}, found {obj.get('schema')!r}")
        if "entries" in obj:
            raw = obj["entries"]
        elif "system" in obj:
            raw = [obj]
        else:
            raise SchemaError("catalog needs 'entries' or a single 'system'")
        out = cls()
        for e in raw:
            entry = CatalogEntry.from_dict(e)
            if out.find(entry.key) is not None:
                raise SchemaError(f"duplicate canonical key {entry.key}")
            out.entries.append(entry)
        return out


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps(obj))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def write_catalog(path, cat: CatalogFile) -> None:
    write_json(path, cat.to_dict())


def read_catalog(path) -> CatalogFile:
    return CatalogFile.from_dict(read_json(path))
