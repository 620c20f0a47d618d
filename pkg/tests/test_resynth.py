import math
from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qspdc.circuit import CX, Ry, angles_equal
from qspdc.dontcare import Care, ControlDC, ObservDC, RotationTable, build_rotation_table
from qspdc.resynth import (
    AngleSystem,
    CnotTemplate,
    build_system,
    enumerate_templates,
    evaluate_template,
    resynthesize_segment,
    search_templates,
    solve_system,
)
from qspdc.simulator import SparseState, apply_gates, states_equal
from strategies import angles, real_states

PI = math.pi
FOUR_PI = 4 * PI
R = math.sqrt
PSI2P = SparseState(3, {0b000: 0.5, 0b010: 0.5, 0b100: 0.5, 0b110: 0.5})
PSI5 = SparseState(3, {0b000: R(2 / 8), 0b100: -R(1 / 8), 0b010: R(1 / 8), 0b101: R(1 / 8), 0b011: R(1 / 8), 0b111: R(2 / 8)})
EXAMPLE_TEMPLATE = CnotTemplate(2, ((1, True), (0, True)))


def example_table():
    return build_rotation_table(PSI2P, PSI5, 2)


def lattice_feasible(sys: AngleSystem, tol=1e-7, bound=2) -> bool:
    """Independent check: b lies in image(A) + 4pi Z^m iff y.b is in 4pi Z for all integer y with y.A = 0."""
    pats, inv = np.unique(sys.coeffs, axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    for i in range(len(inv)):
        for j in range(len(inv)):
            if inv[i] == inv[j]:
                d = (sys.rhs[i] - sys.rhs[j]) / FOUR_PI
                if abs(d - round(d)) * FOUR_PI > tol:
                    return False
    rep = np.array([sys.rhs[np.flatnonzero(inv == g)[0]] for g in range(len(pats))])
    for y in product(range(-bound, bound + 1), repeat=len(pats)):
        y = np.array(y)
        if np.any(y @ pats):
            continue
        v = (y @ rep) / FOUR_PI
        if abs(v - round(v)) * FOUR_PI > tol * np.abs(y).sum():
            return False
    return True


def test_example_system_coefficients():
    s = build_system(example_table(), EXAMPLE_TEMPLATE)
    assert s.index == (0b000, 0b010, 0b100, 0b110)
    assert s.coeffs.tolist() == [[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]]
    assert np.allclose(s.rhs / PI, [0, -0.5, 0.5, 1])


def test_example_solution():
    sol = solve_system(build_system(example_table(), EXAMPLE_TEMPLATE))
    assert sol is not None
    for got, want in zip(sol, [PI / 4, -PI / 2, PI / 4]):
        assert angles_equal(got, want, 1e-9)
    assert np.all(evaluate_template(example_table(), EXAMPLE_TEMPLATE, [PI / 4, -PI / 2, PI / 4]) < 1e-9)


def test_example_needs_two_cnots():
    t = example_table()
    for K in (0, 1):
        for tmpl in enumerate_templates(3, 2, K):
            assert solve_system(build_system(t, tmpl)) is None
    r = search_templates(t, k_max=2)
    assert r.K == 2
    assert r.gates == (Ry(2, PI / 4), CX(1, 2), Ry(2, -PI / 2), CX(0, 2), Ry(2, PI / 4))
    assert states_equal(apply_gates(PSI2P, r.gates), PSI5)


def test_template_enumeration_order():
    ts = enumerate_templates(3, 2, 1)
    assert [t.slots for t in ts] == [((0, True),), ((0, False),), ((1, True),), ((1, False),)]
    for n, K in [(3, 2), (4, 2), (5, 1)]:
        assert len(enumerate_templates(n, 0, K)) == (2 * (n - 1)) ** K


def test_constraint_free_tables():
    t = RotationTable(0, 2, {0b00: ControlDC(), 0b01: ObservDC(Care(0.0, 1.0))})
    r = search_templates(t)
    assert r.K == 0 and r.gates == ()


def test_bad_kmax():
    with pytest.raises(ValueError):
        search_templates(example_table(), k_max=5)


@st.composite
def template_tables(draw, max_n=4, max_k=3):
    """Table realized by a random template, so a solution with at most K CNOTs exists."""
    s = draw(real_states(min_n=2, max_n=max_n))
    n = s.n_qubits
    q = draw(st.integers(0, n - 1))
    K = draw(st.integers(0, max_k))
    choices = [(c, p) for c in range(n) if c != q for p in (True, False)]
    tmpl = CnotTemplate(q, tuple(draw(st.sampled_from(choices)) for _ in range(K)))
    thetas = draw(st.lists(angles, min_size=K + 1, max_size=K + 1))
    t = apply_gates(s, tmpl.gates(thetas))
    return s, t, build_rotation_table(s, t, q), K


@settings(max_examples=150)
@given(template_tables())
def test_search_is_minimal_and_correct(case):
    s, t, table, K = case
    r = search_templates(table, k_max=K)
    assert r is not None and r.K <= K
    assert states_equal(apply_gates(s, r.gates), t, 1e-8)
    # every template with fewer CNOTs is infeasible per the lattice oracle
    for k in range(r.K):
        for tmpl in enumerate_templates(table.n_qubits, table.target, k):
            assert not lattice_feasible(build_system(table, tmpl))


@settings(max_examples=100)
@given(template_tables(max_n=4, max_k=2), st.data())
def test_solver_agrees_with_lattice_oracle(case, data):
    _, _, table, _ = case
    K = data.draw(st.integers(0, 2))
    tmpl = data.draw(st.sampled_from(enumerate_templates(table.n_qubits, table.target, K)))
    sys = build_system(table, tmpl)
    verdict = lattice_feasible(sys, tol=1e-10)
    assume(verdict == lattice_feasible(sys, tol=1e-8))  # skip cases sitting on the tolerance edge
    sol = solve_system(sys)
    assert (sol is not None) == verdict
    if sol is not None:
        assert np.all(evaluate_template(table, tmpl, sol) <= 1e-9)


def test_fallbacks():
    # a random 3-control table needs more than 2 CNOTs; the multiplexed form is used
    rng = np.random.default_rng(3)
    n, q = 4, 3
    src = SparseState.from_dict(n, {x: 1.0 for x in range(0, 16, 2)}, normalize=True)
    gates = [Ry(q, float(a)) if i % 2 == 0 else CX(i % 3, q) for i, a in enumerate(rng.uniform(-3, 3, 9))]
    dst = apply_gates(src, gates)
    table = build_rotation_table(src, dst, q)
    r = resynthesize_segment(table, k_max=1)
    assert r.method == "multiplexed"
    assert states_equal(apply_gates(src, r.gates), dst, 1e-9)
    r = resynthesize_segment(table, k_max=1, original=gates)
    assert r.cnots <= min(sum(isinstance(g, CX) for g in gates), 8)
