"""From the one-root Ising solution to the A2 table, checked in Fock space.

Run: python3 demos/02_ising_and_a2.py   (the A2 oracle check takes a couple of minutes)
"""

import sys
from fractions import Fraction

from quasiroots import assemble, check_virasoro, named_system, solve_an, solve_multistart

ps = assemble(named_system("A1"))
print("A1 variables:", ps.variables)
for rec in solve_multistart(ps):
    S, b = rec.values
    print(f"  a = {Fraction(S) / 4}, b = {b}, c = {rec.central_charge}")

ising = ps.to_assignment([Fraction(2), Fraction(1, 4)])
rep = check_virasoro(ps, ising, pairs=[(1, -1), (2, -2), (2, -1)], grade=4)
print(f"Ising in Fock space: mismatch {rep.mismatch}, c = {rep.c_extracted}, {rep.seconds:.1f} s")

ps2 = assemble(named_system("A2"))
charges = sorted({rec.central_charge for rec in solve_multistart(ps2)})
print("A2 central charges:", ", ".join(str(c) for c in charges))

if "--skip-oracle" not in sys.argv:
    rec = solve_an(2, (0,), dual_solution=True, ps=ps2)
    rep = check_virasoro(ps2, rec.assignment, grade=4)
    print(f"A2 c={rec.central_charge} in Fock space: mismatch {rep.mismatch}, "
          f"c = {rep.c_extracted}, {rep.seconds:.1f} s")
