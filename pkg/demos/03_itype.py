"""Irrational central charges from long-root systems with products 0 and ±1.

Run: python3 demos/03_itype.py
"""

from quasiroots import solve_itype

systems = {
    "I2": [[4, -1], [-1, 4]],
    "triangle (-1,-1,-1)": [[4, -1, -1], [-1, 4, -1], [-1, -1, 4]],
    "triangle (-1,-1,+1)": [[4, -1, -1], [-1, 4, 1], [-1, 1, 4]],
    "chain": [[4, -1, 0], [-1, 4, -1], [0, -1, 4]],
}

for name, C in systems.items():
    print(name)
    for rec in solve_itype(C):
        b2 = ", ".join(str(v) for v in rec.extra["b_squared"])
        tag = "" if rec.status == "accepted" else f"  [rejected: {rec.reason}]"
        print(f"  c = {rec.central_charge}  ({rec.c:.12f})  b^2 = {b2}{tag}")
