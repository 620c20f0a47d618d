import math

import numpy as np
import pytest
from hypothesis import given

from dense import dense_state
from qspdc.circuit import count_cnots
from qspdc.fixtures import example_target_state
from qspdc.frontend import mux_angles, synthesize_and_clean, synthesize_initial
from qspdc.simulator import SparseState, simulate, states_equal, to_dense
from qspdc.states import b_state, dicke_state
from strategies import real_states


@given(real_states(max_n=6))
def test_prepares_target_exactly(t):
    for reduce in (True, False):
        c = synthesize_initial(t, reduce_controls=reduce)
        assert states_equal(simulate(c), t, 1e-9)
        assert np.allclose(dense_state(c.gates, t.n_qubits), to_dense(t), atol=1e-9)


@given(real_states(min_n=2, max_n=6, sparse=False))
def test_full_cascade_cost(t):
    # each stage i has 2^i CNOTs when it keeps all of its controls
    assert count_cnots(synthesize_initial(t, reduce_controls=False)) <= (1 << t.n_qubits) - 2


@pytest.mark.parametrize("n", range(3, 9))
def test_b_state_cost_with_control_dropping(n):
    t = b_state(n, 1 << (n - 1))
    c = synthesize_initial(t)
    assert count_cnots(c) == 2 * (n - 1)
    assert states_equal(simulate(c), t)


def test_b_state_without_dropping():
    c = synthesize_initial(b_state(4, 8), reduce_controls=False)
    assert count_cnots(c) == 14


def test_example_state():
    t = example_target_state()
    c = synthesize_and_clean(t)
    assert count_cnots(c) == 4
    assert states_equal(simulate(c), t)


def test_last_stage_carries_signs():
    t = SparseState(2, {0b00: math.sqrt(0.5), 0b01: -math.sqrt(0.5)})
    assert mux_angles(t, 1)[0] == pytest.approx(-math.pi / 2)
    assert mux_angles(t, 0) == {0: 0.0}


def test_rejects_unnormalized():
    with pytest.raises(ValueError):
        synthesize_initial(SparseState(1, {0: 0.5}))


def test_dicke_exact():
    t = dicke_state(5, 2)
    assert states_equal(simulate(synthesize_initial(t)), t)
