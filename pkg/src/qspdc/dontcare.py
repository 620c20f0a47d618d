"""Rotation tables of single-target segments and don't-care marking.

A control index is a basis index with the target bit cleared.  For each one
the table records how the segment moves the target qubit's branch pair
``(alpha, beta)``, written as the angle ``2*atan2(beta, alpha)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence, Union

import numpy as np

from .circuit import (
    ANGLE_TOL,
    CX,
    Gate,
    Ry,
    angle_distance,
    canonicalize_angle,
    mask,
    multiplexed_ry,
)
from .simulator import SparseState

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Care:
    """Constrained entry: the branch at angle ``source`` must reach ``result``."""

    source: float
    result: float

    @property
    def angle(self) -> float:
        return canonicalize_angle(self.result - self.source)


@dataclass(frozen=True)
class ControlDC:
    """The control index carries no amplitude on entry."""


@dataclass(frozen=True)
class ObservDC:
    """Care entry whose value cannot reach the final state."""

    original: Care

    @property
    def angle(self) -> float:
        return self.original.angle


@dataclass(frozen=True)
class FixedBlock:
    """Zero-mass entry pinned to the original 2x2 block (CDC disabled).

    ``result0``/``result1`` are the angles of the block's images of ``|0>``
    and ``|1>``.
    """

    result0: float
    result1: float

    @property
    def is_rotation(self) -> bool:
        return angle_distance(self.result1 - self.result0, math.pi) <= ANGLE_TOL


Entry = Union[Care, ControlDC, ObservDC, FixedBlock]
CONTROL_DC = ControlDC()


@dataclass(frozen=True, eq=False)
class RotationTable:
    target: int
    n_qubits: int
    entries: Mapping[int, Entry] = field(default_factory=dict)

    @property
    def n_controls(self) -> int:
        return self.n_qubits - 1

    def controls(self) -> list[int]:
        return [q for q in range(self.n_qubits) if q != self.target]

    def care(self) -> dict[int, Care]:
        return {x: e for x, e in self.entries.items() if isinstance(e, Care)}

    def count(self, kind: type) -> int:
        return sum(isinstance(e, kind) for e in self.entries.values())

    def label(self, x: int) -> str:
        s = f"{x:0{self.n_qubits}b}"
        return s[: self.target] + "*" + s[self.target + 1 :]

    def replace(self, updates: Mapping[int, Entry]) -> "RotationTable":
        entries = dict(self.entries)
        entries.update(updates)
        return RotationTable(self.target, self.n_qubits, entries)

    def without_odc(self) -> "RotationTable":
        return self.replace({x: e.original for x, e in self.entries.items() if isinstance(e, ObservDC)})

    def dump(self) -> str:
        lines = [f"rotation table, target q{self.target}"]
        for x in sorted(self.entries):
            e = self.entries[x]
            if isinstance(e, Care):
                v = f"{e.angle:+.6f}  ({e.source:+.6f} -> {e.result:+.6f})"
            elif isinstance(e, ObservDC):
                v = f"X*  (was {e.angle:+.6f})"
            elif isinstance(e, FixedBlock):
                v = f"block ({e.result0:+.6f}, {e.result1:+.6f})"
            else:
                v = "X"
            lines.append(f"  |{self.label(x)}>  {v}")
        return "\n".join(lines)


def pair_angle(alpha: float, beta: float) -> float:
    return canonicalize_angle(2.0 * math.atan2(beta, alpha))


def branch_pairs(s: SparseState, target: int) -> dict[int, tuple[float, float]]:
    """Target-qubit amplitude pair for every supported control index."""
    m = mask(target, s.n_qubits)
    pairs: dict[int, list[float]] = {}
    for x, a in s.items():
        p = pairs.setdefault(x & ~m, [0.0, 0.0])
        p[1 if x & m else 0] = a
    return {x: (p[0], p[1]) for x, p in pairs.items()}


def reachable(s: SparseState, t: SparseState, target: int, tol: float = ANGLE_TOL) -> bool:
    """Whether some ``target``-only operator maps ``s`` onto ``t``."""
    ps, pt = branch_pairs(s, target), branch_pairs(t, target)
    for x in ps.keys() | pt.keys():
        a0, a1 = ps.get(x, (0.0, 0.0))
        b0, b1 = pt.get(x, (0.0, 0.0))
        if abs(math.hypot(a0, a1) - math.hypot(b0, b1)) > tol:
            return False
    return True


def build_rotation_table(psi_s: SparseState, psi_t: SparseState, target: int, tol: float = ANGLE_TOL) -> RotationTable:
    if psi_s.n_qubits != psi_t.n_qubits:
        raise ValueError("boundary states have different qubit counts")
    n = psi_s.n_qubits
    ps, pt = branch_pairs(psi_s, target), branch_pairs(psi_t, target)
    entries: dict[int, Entry] = {}
    m = mask(target, n)
    for x in range(1 << n):
        if x & m:
            continue
        a0, a1 = ps.get(x, (0.0, 0.0))
        b0, b1 = pt.get(x, (0.0, 0.0))
        ra, rb = math.hypot(a0, a1), math.hypot(b0, b1)
        if abs(ra - rb) > tol:
            raise ValueError(
                f"branch |{x:0{n}b}> changes norm {ra:.3g} -> {rb:.3g}: not a single-target transition on q{target}"
            )
        if ra <= MASS_TOL:
            entries[x] = CONTROL_DC
        else:
            entries[x] = Care(pair_angle(a0, a1), pair_angle(b0, b1))
    return RotationTable(target, n, entries)


def segment_block(gates: Sequence[Gate], target: int, n: int, x: int) -> np.ndarray:
    """2x2 action of a single-target gate list on the target for control index ``x``."""
    u = np.eye(2)
    for g in gates:
        if isinstance(g, Ry):
            c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
            u = np.array([[c, -s], [s, c]]) @ u
        elif isinstance(g, CX):
            on = bool(x & mask(g.control, n))
            if on == g.positive:
                u = u[::-1].copy()
        else:
            u = u[::-1].copy()  # X
    return u


def pin_control_dc(table: RotationTable, gates: Sequence[Gate]) -> RotationTable:
    """Replace CDC entries by the original gates' blocks (CDC disabled)."""
    updates = {}
    for x, e in table.entries.items():
        if isinstance(e, ControlDC):
            u = segment_block(gates, table.target, table.n_qubits, x)
            updates[x] = FixedBlock(pair_angle(u[0, 0], u[1, 0]), pair_angle(u[0, 1], u[1, 1]))
    return table.replace(updates)


def observability_dc(table: RotationTable, next_gates: Sequence[Gate], next_target: int, tol: float = ANGLE_TOL) -> dict[int, ObservDC]:
    """Care entries of ``table`` that the following segment cannot observe.

    Entry ``x`` (target ``a``) is free when the next segment (target ``b``)
    applies the same block to the two control indices obtained from ``x`` by
    dropping bit ``b`` and setting bit ``a`` to 0 and to 1.
    """
    n = table.n_qubits
    ma, mb = mask(table.target, n), mask(next_target, n)
    cache: dict[int, bool] = {}
    marks = {}
    for x, e in table.entries.items():
        if not isinstance(e, Care):
            continue
        y0 = x & ~mb & ~ma
        if y0 not in cache:
            b0 = segment_block(next_gates, next_target, n, y0)
            b1 = segment_block(next_gates, next_target, n, y0 | ma)
            cache[y0] = bool(np.allclose(b0, b1, atol=tol, rtol=0))
        if cache[y0]:
            marks[x] = ObservDC(e)
    return marks


def mark_odc(tables: Sequence[RotationTable], segments: Sequence) -> list[RotationTable]:
    """Mark ODC on ``W_{j-1}`` wherever ``W_{j-1}, W_j, W_{j+1}`` target ``(a, b, a)``."""
    out = list(tables)
    for j in range(1, len(segments) - 1):
        a, b = segments[j - 1].target, segments[j].target
        if b == a or segments[j + 1].target != a:
            continue
        marks = observability_dc(out[j - 1], segments[j].gates, b)
        if marks:
            out[j - 1] = out[j - 1].replace(marks)
    return out


def _rotation_constraints(table: RotationTable) -> list[tuple[int, float]]:
    rows = []
    for x, e in table.entries.items():
        if isinstance(e, Care):
            rows.append((x, e.angle))
        elif isinstance(e, FixedBlock):
            if not e.is_rotation:
                raise ValueError(f"entry |{table.label(x)}> is a reflection; no multiplexed Ry realizes it")
            rows.append((x, e.result0))
    return rows


def minimal_controls(table: RotationTable, exhaustive_limit: int = 10) -> list[int]:
    """Smallest control subset the constrained rotation angles depend on."""
    rows = _rotation_constraints(table)
    n = table.n_qubits
    controls = table.controls()

    def consistent(subset) -> bool:
        keep = sum(mask(q, n) for q in subset)
        seen: dict[int, float] = {}
        for x, a in rows:
            k = x & keep
            if k in seen:
                if angle_distance(seen[k], a) > ANGLE_TOL:
                    return False
            else:
                seen[k] = a
        return True

    if len(controls) <= exhaustive_limit:
        for size in range(len(controls) + 1):
            for subset in combinations(controls, size):
                if consistent(subset):
                    return list(subset)
    subset = list(controls)
    for q in controls:
        trial = [c for c in subset if c != q]
        if consistent(trial):
            subset = trial
    return subset


def table_to_multiplexed_circuit(table: RotationTable, fill: float | None = None) -> list[Gate]:
    """Uniformly controlled Ry over the fewest controls the table needs.

    Don't-care slots of the reduced table copy the previous slot in Gray
    order (or take ``fill`` when given).
    """
    n, t = table.n_qubits, table.target
    rows = _rotation_constraints(table)
    subset = minimal_controls(table)
    k = len(subset)
    size = 1 << k
    values: list[float | None] = [None] * size
    for x, a in rows:
        c = sum(1 << j for j, q in enumerate(subset) if x & mask(q, n))
        values[c] = a
    prev = 0.0 if fill is None else fill
    for i in range(size):
        c = i ^ (i >> 1)
        if values[c] is None:
            values[c] = prev if fill is None else fill
        prev = values[c]
    gates = multiplexed_ry(subset, t, values)
    return [g for g in gates if not (isinstance(g, Ry) and abs(canonicalize_angle(g.angle)) < 1e-12)]
