"""Single-target segment extraction with commutation-based boundary extension."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .circuit import CX, Circuit, Gate, Ry, X
from .simulator import SparseState, apply_gates, ground_state

#: joint support limit for the dense commutation fallback
DENSE_QUBITS = 6
#: longest skipped-gate list the dense fallback will multiply out
DENSE_GATES = 24


@dataclass(frozen=True, eq=False)
class Segment:
    target: int
    gates: tuple[Gate, ...]
    psi_s: SparseState
    psi_t: SparseState
    position: int

    @property
    def cnots(self) -> int:
        return sum(isinstance(g, CX) for g in self.gates)


@dataclass(frozen=True, eq=False)
class SegmentedCircuit:
    n_qubits: int
    segments: tuple[Segment, ...]

    def gates(self) -> list[Gate]:
        return [g for s in self.segments for g in s.gates]

    def to_circuit(self) -> Circuit:
        return Circuit(self.n_qubits, self.gates())


def target_of(g: Gate) -> int:
    return g.target


def early_exit_check(target: int, ext: Sequence[Gate]) -> bool:
    """True iff some skipped gate uses ``target`` as its control."""
    return any(isinstance(g, CX) and g.control == target for g in ext)


def _pair_commutes(a: Gate, b: Gate) -> bool | None:
    """Rule-based commutation; ``None`` when the rules cannot decide."""
    if not set(a.qubits) & set(b.qubits):
        return True
    if isinstance(a, Ry) and isinstance(b, Ry):
        return True
    if isinstance(a, CX) and isinstance(b, CX):
        if a.target == b.target or a.control == b.control:
            return True
        return None
    return None


def _gate_matrix(g: Gate, qubits: Sequence[int]) -> np.ndarray:
    """Dense matrix of ``g`` on the ordered qubit list (first = MSB)."""
    k = len(qubits)
    pos = {q: k - 1 - i for i, q in enumerate(qubits)}
    dim = 1 << k
    m = np.zeros((dim, dim))
    if isinstance(g, Ry):
        c, s = np.cos(g.angle / 2), np.sin(g.angle / 2)
        t = 1 << pos[g.target]
        for x in range(dim):
            if x & t:
                continue
            m[x, x], m[x, x | t] = c, -s
            m[x | t, x], m[x | t, x | t] = s, c
        return m
    if isinstance(g, X):
        t = 1 << pos[g.target]
        for x in range(dim):
            m[x ^ t, x] = 1
        return m
    cm, t = 1 << pos[g.control], 1 << pos[g.target]
    want = cm if g.positive else 0
    for x in range(dim):
        m[x ^ t if (x & cm) == want else x, x] = 1
    return m


def commutes(g: Gate, ext: Sequence[Gate]) -> bool:
    """Conservative test that moving ``g`` before ``ext`` keeps the unitary."""
    undecided = []
    for e in ext:
        r = _pair_commutes(g, e)
        if r is None:
            undecided.append(e)
    if not undecided:
        return True
    support = sorted(set(g.qubits).union(*(e.qubits for e in ext)))
    if len(support) > DENSE_QUBITS or len(ext) > DENSE_GATES:
        return False
    # ext as an operator: later gates multiply on the left
    u = reduce(lambda acc, e: _gate_matrix(e, support) @ acc, ext, np.eye(1 << len(support)))
    a = _gate_matrix(g, support)
    return bool(np.allclose(a @ u, u @ a, atol=1e-12, rtol=0))


def extract_segments(c: Circuit, s0: SparseState | None = None) -> SegmentedCircuit:
    """Partition ``c`` into single-target segments.

    Gates are scanned in order; a later gate with the same target joins the
    open segment when it commutes with every skipped gate in between.  Each
    gate lands in exactly one segment.
    """
    for g in c.gates:
        if isinstance(g, X):
            raise ValueError("X gates are not accepted by the optimizer; express them as Ry/CX first")
    gates = c.gates
    consumed = [False] * len(gates)
    state = s0 if s0 is not None else ground_state(c.n_qubits)
    segments = []
    for i, gi in enumerate(gates):
        if consumed[i]:
            continue
        t = target_of(gi)
        members: list[Gate] = []
        ext: list[Gate] = []
        for j in range(i, len(gates)):
            if consumed[j]:
                continue
            gj = gates[j]
            if target_of(gj) == t and commutes(gj, ext):
                members.append(gj)
                consumed[j] = True
            else:
                if isinstance(gj, CX) and gj.control == t:
                    break
                ext.append(gj)
        psi_t = apply_gates(state, members)
        segments.append(Segment(t, tuple(members), state, psi_t, len(segments)))
        state = psi_t
    return SegmentedCircuit(c.n_qubits, tuple(segments))
