"""Hand-built reference circuit used by tests, the CLI demo and the README.

The target is the real three-qubit state
``(2|000> - |100> + |010> + |101> + |011> + 2|111>) / sqrt(8)``
(amplitudes of weight 1/2 where the coefficient is 2), prepared by a
five-segment Ry/CX circuit with eight CNOTs.
"""
from __future__ import annotations

import math

from .circuit import CX, Circuit, Ry
from .simulator import SparseState, simulate

Q = math.pi / 4


def example_initial_circuit() -> Circuit:
    """Eight-CNOT, five-segment preparation circuit (targets q0, q1, q2, q1, q2)."""
    g = [
        Ry(0, 2 * Q),
        Ry(1, Q), CX(0, 1), Ry(1, -Q), CX(0, 1),
        Ry(2, Q), CX(0, 2), Ry(2, -Q), CX(1, 2), Ry(2, -Q), CX(0, 2), Ry(2, Q), CX(1, 2),
        Ry(1, 2 * Q),
        Ry(2, Q), CX(1, 2), Ry(2, -Q), CX(1, 2),
    ]
    return Circuit(3, g)


def example_target_state() -> SparseState:
    return simulate(example_initial_circuit())
