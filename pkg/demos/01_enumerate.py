"""Enumerate small quasi root systems and look at what comes out.

Run: python3 demos/01_enumerate.py
"""

from quasiroots.axioms import check_axioms
from quasiroots.catalog import canonical_key, known_labels
from quasiroots.enumeration import enumerate_simple

for d in (1, 2, 3):
    cat = enumerate_simple(d)
    labels = known_labels(d)
    print(f"dimension {d}: {len(cat)} simple systems ({cat.nodes} search nodes, {cat.seconds:.2f} s)")
    for s in cat.systems:
        name = labels.get(canonical_key(s), "?")
        assert check_axioms(s).ok
        print(f"  {name:10s} {2 * s.size:3d} roots  ({2 * s.n_long} long, {2 * s.n_short} short)")
