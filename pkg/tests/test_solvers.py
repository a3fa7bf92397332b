from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiroots.equations import assemble, check_duality
from quasiroots.errors import BadParams, SingularC
from quasiroots.named import named_system
from quasiroots.solvers import (EXACT, SigmaSequence, SolverConfig, an_all_solutions, an_values,
                                identify, number_from_json, number_to_json, solve_an,
                                solve_itype, solve_multistart)
from quasiroots.surd import Surd


def test_a1_full_solution_set():
    recs = solve_multistart(assemble(named_system("A1")))
    assert sorted(F(r.central_charge) for r in recs) == [0, F(1, 2), F(1, 2), 1]
    assert all(r.exactness == EXACT and r.residual == 0 for r in recs)


def test_a2_charges_and_closure():
    ps = assemble(named_system("A2"))
    recs = solve_multistart(ps)
    cs = sorted({F(r.central_charge) for r in recs})
    assert cs == [0, F(7, 10), F(4, 5), F(6, 5), F(13, 10), 2]
    for r in recs:
        rep = check_duality(ps, r.assignment)
        assert rep["dual_ok"] and rep["charge_sum_ok"]


def test_b2_magnitudes():
    ps = assemble(named_system("B2")).with_gauge([0])
    recs = [r for r in solve_multistart(ps) if r.assignment.b[1] != 0]
    assert {F(r.central_charge) for r in recs} == {F(1, 2), F(3, 2)}
    for r in recs:
        assert all(abs(Surd.coerce(r.assignment.b[i])) == Surd.rational(F(1, 8)) for i in ps.long_roots)
        norms = r.assignment.gamma_norms()
        assert all(Surd.coerce(v) == Surd.rational(F(1, 32)) for v in norms.values())


def test_reproducible_with_seed():
    ps = assemble(named_system("I2"))
    a = solve_multistart(ps, SolverConfig(seed=3, starts=200))
    b = solve_multistart(ps, SolverConfig(seed=3, starts=200))
    assert [r.values for r in a] == [r.values for r in b]


def test_config_validation():
    with pytest.raises(BadParams):
        SolverConfig(newton_tol=1e-6, dedupe_tol=1e-8)
    with pytest.raises(BadParams):
        SolverConfig(newton_tol=-1)


def test_itype_i2():
    recs = solve_itype([[4, -1], [-1, 4]])
    assert sorted(F(r.central_charge) for r in recs) == [F(6, 7), F(8, 7)]
    assert all(r.extra["b_squared"] == [F(2, 49)] * 2 for r in recs)


def test_itype_singular():
    with pytest.raises((SingularC, BadParams)):
        solve_itype([[4, 4], [4, 4]])


def test_itype_agrees_with_multistart_on_i2():
    ps = assemble(named_system("I2"))
    multi = [r for r in solve_multistart(ps) if r.assignment.b[0] != 0]
    for r in solve_itype([[4, -1], [-1, 4]]):
        assert any(abs(m.c - r.c) <= 1e-10 for m in multi)


def test_an_examples():
    rec = solve_an(3, (0, 1))
    a, b, c = an_values(3, (0, 1))
    assert c == F(4, 5) and a == [F(1, 15), F(1, 15), F(2, 3)] and b == [F(1, 30), F(1, 30), F(1, 6)]
    assert rec.exactness == EXACT
    with pytest.raises(BadParams):
        solve_an(2, (0, 1))
    with pytest.raises(BadParams):
        SigmaSequence((2,))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_an_solution_count(n):
    recs = an_all_solutions(n)
    assert len(recs) == 2 ** (2 * n)
    assert len({tuple(map(str, r.values)) for r in recs}) == len(recs)


def test_a1_count_includes_endpoints():
    assert len(an_all_solutions(1)) == 2
    assert len(solve_multistart(assemble(named_system("A1")))) == 4


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.data())
def test_an_closed_forms(n, data):
    bits = tuple(data.draw(st.lists(st.sampled_from((0, 1)), min_size=n - 1, max_size=n - 1)))
    c = an_values(n, bits)[2]
    flipped = (1 - bits[0],) + bits[1:]
    assert abs(c - an_values(n, flipped)[2]) == F(1, 2)
    if bits == (0,) * (n - 2) + (1,):
        assert c == 1 - F(6, (n + 2) * (n + 3))
    if not any(bits):
        assert n - c == F(2 * n, n + 3)


def test_identify_quadratic_surd():
    with mpmath.workdps(80):
        x = mpmath.mpf(3) / 2 - 11 * mpmath.sqrt(mpmath.mpf(11) / 4799) / 2
        got = identify(x, radicands=(52789,))
    assert got == Surd.rational(F(3, 2)) - Surd({52789: F(11, 9598)})
    with mpmath.workdps(80):
        assert identify(mpmath.mpf(4) / 5) == F(4, 5)


def test_number_json_roundtrip():
    for v in (F(3, 7), Surd({2: F(1, 8)}), 0.1):
        back = number_from_json(number_to_json(v))
        assert float(back) == float(v)


def test_complex_points_are_rejected():
    recs = solve_itype([[4, -1, 0], [-1, 4, -1], [0, -1, 4]])
    rejected = [r for r in recs if r.status == "rejected"]
    assert len(rejected) == 2 and all(not r.values for r in rejected)


def test_numeric_records_meet_residual_bound():
    ps = assemble(named_system("T2"))
    for r in solve_multistart(ps):
        assert r.residual <= 1e-10
