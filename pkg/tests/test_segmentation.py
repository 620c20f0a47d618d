import math

import numpy as np
import pytest
from hypothesis import given, settings

from dense import unitary
from qspdc.circuit import CX, Circuit, Ry, X
from qspdc.fixtures import example_initial_circuit
from qspdc.segmentation import _gate_matrix, commutes, early_exit_check, extract_segments
from qspdc.simulator import SparseState, simulate, states_equal
from strategies import circuits

R = math.sqrt


@settings(max_examples=200)
@given(circuits(min_n=1, max_n=5, max_gates=25))
def test_reordering_preserves_unitary(c):
    sc = extract_segments(c)
    flat = sc.gates()
    assert sorted(map(repr, flat)) == sorted(map(repr, c.gates))
    assert np.allclose(unitary(flat, c.n_qubits), unitary(c.gates, c.n_qubits), atol=1e-10)
    for s in sc.segments:
        assert len({g.target for g in s.gates}) == 1
        assert states_equal(simulate(Circuit(c.n_qubits, s.gates), s.psi_s), s.psi_t, 1e-12)
    for a, b in zip(sc.segments, sc.segments[1:]):
        assert a.psi_t is b.psi_s


def test_example_segments():
    sc = extract_segments(example_initial_circuit())
    assert [s.target for s in sc.segments] == [0, 1, 2, 1, 2]
    psi1 = SparseState(3, {0b000: R(0.5), 0b100: R(0.5)})
    psi2 = SparseState(3, {0b000: R(2 / 4), 0b100: R(1 / 4), 0b110: R(1 / 4)})
    psi5 = SparseState(3, {0b000: R(2 / 8), 0b100: -R(1 / 8), 0b010: R(1 / 8), 0b101: R(1 / 8), 0b011: R(1 / 8), 0b111: R(2 / 8)})
    assert states_equal(sc.segments[0].psi_t, psi1)
    assert states_equal(sc.segments[1].psi_t, psi2)
    assert states_equal(sc.segments[-1].psi_t, psi5)
    assert sum(s.cnots for s in sc.segments) == 8


def test_commuting_ry_joins_earlier_segment():
    c = Circuit(3, [Ry(2, 0.3), Ry(1, 0.2), Ry(2, 0.4)])
    sc = extract_segments(c)
    assert [len(s.gates) for s in sc.segments] == [2, 1]


def test_stops_at_gate_controlled_by_target():
    c = Circuit(2, [Ry(1, 0.3), CX(1, 0), Ry(1, 0.4)])
    sc = extract_segments(c)
    assert [s.target for s in sc.segments] == [1, 0, 1]
    assert early_exit_check(1, [CX(1, 0)])
    assert not early_exit_check(0, [CX(1, 0)])


def test_commutes_dense_fallback_and_rules():
    assert commutes(CX(0, 2), [CX(1, 2)])
    assert not commutes(Ry(1, 0.3), [CX(0, 1)])
    assert commutes(CX(0, 1), [X(1)])
    assert not commutes(CX(0, 1), [Ry(1, 0.5)])


@pytest.mark.parametrize("g", [Ry(1, 0.7), X(0), CX(0, 2), CX(2, 1, positive=False)])
def test_gate_matrix_matches_oracle(g):
    assert np.allclose(_gate_matrix(g, [0, 1, 2]), unitary([g], 3))


def test_x_gates_refused():
    with pytest.raises(ValueError):
        extract_segments(Circuit(1, [X(0)]))
