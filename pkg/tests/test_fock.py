from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiroots.cocycle import epsilon
from quasiroots.equations import assemble, standard_assignment, trivial_assignment
from quasiroots.errors import GradeOverflow
from quasiroots.fock import (FockState, apply_boson_mode, apply_lambda_mode,
                             apply_vertex_mode, build_field, check_virasoro, virasoro_mode)
from quasiroots.named import named_system
from quasiroots.solvers import solve_multistart


@pytest.fixture(scope="module")
def a1():
    return assemble(named_system("A1"))


def ising(ps):
    return ps.to_assignment([F(2), F(1, 4)])


def test_heisenberg_on_vacuum(a1):
    vac = FockState.vacuum(1)
    half = [F(1, 2)]  # unit vector along the root of squared length 4
    out = apply_boson_mode(a1, half, 1, apply_boson_mode(a1, half, -1, vac))
    assert out == vac
    two = apply_boson_mode(a1, half, -1, apply_boson_mode(a1, half, -1, vac))
    assert two.grade() == 2


def test_zero_mode_measures_momentum():
    ps = assemble(named_system("A2"))
    lam = (1, -2)
    state = FockState.basis(lam)
    for i in range(2):
        e = [int(i == k) for k in range(2)]
        got = apply_boson_mode(ps, e, 0, state)
        assert got == state.scale(sum(ps.C[i][k] * lam[k] for k in range(2)))


def test_vertex_lowest_mode(a1):
    vac = FockState.vacuum(1)
    out = apply_vertex_mode(a1, (1,), -2, vac)
    assert out[((1,), ())] == 1
    assert apply_vertex_mode(a1, (1,), -1, vac) == FockState()


def test_vertex_pair_on_vacuum(a1):
    vac = FockState.vacuum(1)
    up = apply_vertex_mode(a1, (1,), -2, vac)
    back = apply_vertex_mode(a1, (-1,), 2, up)
    assert back.get(((0,), ()), 0) == epsilon(a1.cocycle, (-1,), (1,))


def test_lambda_mode_on_vacuum():
    ps = assemble(named_system("T2"))
    beta = ps.short_roots[0]
    coords = tuple(int(v) for v in ps._coords[beta])
    # gamma orthogonal to beta: products with the two basis roots (1, -1)
    out = apply_lambda_mode(ps, coords, (1, -1), -2, FockState.vacuum(2))
    assert out and out.momenta() == {coords}
    assert out.grade() == 1


def test_standard_l0_counts_level(a1):
    fld = build_field(a1, standard_assignment(a1.C))
    state = FockState.basis((0,), ((1, 0),))
    assert fld.mode(0, state) == state
    lam = FockState.basis((1,))
    assert fld.mode(0, lam) == lam.scale(2)


def test_ising_vacuum_expectations(a1):
    x = ising(a1)
    vac = FockState.vacuum(1)
    assert virasoro_mode(a1, x, 0, vac) == FockState()
    two = virasoro_mode(a1, x, 2, virasoro_mode(a1, x, -2, vac))
    assert two.get(((0,), ()), 0) == F(1, 4)


def test_ising_passes(a1):
    rep = check_virasoro(a1, ising(a1), grade=4)
    assert rep.exact and rep.mismatch == 0 and rep.passed()
    assert rep.c_extracted == F(1, 2)


def test_trivial_and_standard(a1):
    rep = check_virasoro(a1, trivial_assignment(a1.C), grade=4)
    assert rep.mismatch == 0 and rep.c_extracted == 0
    ps = assemble(named_system("A2"))
    rep = check_virasoro(ps, standard_assignment(ps.C), pairs=((1, -1), (2, -2)), grade=3, max_momenta=7)
    assert rep.mismatch == 0 and rep.c_extracted == 2


def test_perturbed_ising_fails(a1):
    rep = check_virasoro(a1, a1.to_assignment([2.0, 0.3]), grade=4)
    assert rep.mismatch > 1e-3 and not rep.passed()


def test_grade_must_exceed_modes(a1):
    with pytest.raises(GradeOverflow):
        check_virasoro(a1, ising(a1), pairs=((3, -3),), grade=3)


@pytest.mark.parametrize("name,gauge", [("B2", [0]), ("T2", [2]), ("I2", None)])
def test_solutions_with_vertex_terms(name, gauge):
    ps = assemble(named_system(name))
    if gauge:
        ps = ps.with_gauge(gauge)
    rec = next(r for r in solve_multistart(ps) if 0 < r.c < ps.dim)
    rep = check_virasoro(ps, rec.assignment, pairs=((1, -1), (2, -1)), grade=3, max_momenta=7)
    assert rep.mismatch <= 1e-9 and rep.c_error <= 1e-9 and rep.momentum_ok


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=7),
       st.fractions(min_value=-2, max_value=2, max_denominator=7))
def test_commutator_of_free_field_modes(s, b):
    ps = assemble(named_system("A1"))
    x = ps.to_assignment([s, b])
    fld = build_field(ps, x)
    state = FockState.basis((1,), ((1, 0),), F(1))
    lhs = fld.mode(1, fld.mode(-1, state)) - fld.mode(-1, fld.mode(1, state))
    rhs = fld.mode(0, state).scale(2)
    is_solution = ps.residual([s, b]) == 0
    if is_solution:
        assert lhs == rhs
    assert (lhs - rhs).momenta() <= {(-1,), (0,), (1,), (2,), (3,)}
