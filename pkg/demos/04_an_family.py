"""The A_n closed form: sigma sequences, duals and the parafermion/minimal-model ends.

Run: python3 demos/04_an_family.py
"""

from quasiroots.solvers import SigmaSequence, an_all_solutions, an_values

for n in range(2, 6):
    print(f"A{n}")
    for sig in SigmaSequence.all(n):
        a, b, c = an_values(n, sig)
        print(f"  sigma={sig.bits}  c={c}  dual c={n - c}  a={[str(v) for v in a]}")
    print(f"  total solutions with signs and duals: {len(an_all_solutions(n))} = 2^{2 * n}")
