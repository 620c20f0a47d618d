"""Gate and circuit representation over {Ry, X, CX}.

Basis index ``x`` of an ``n``-qubit register encodes ``|q_0 q_1 ... q_{n-1}>``
with ``q_0`` as the most significant bit.  Every module shares this order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi

#: absolute tolerance for angle equality after mod-4pi reduction
ANGLE_TOL = 1e-9
#: Ry gates with |angle| below this are dropped by cleanup passes
ZERO_ANGLE = 1e-12


def canonicalize_angle(a: float) -> float:
    """Reduce ``a`` modulo 4pi into ``[-2pi, 2pi)``.

    Ry is 4pi-periodic, and ``Ry(a + 2pi) = -Ry(a)``, so the reduction keeps
    the sign information a mod-2pi reduction would lose.
    """
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.fmod(a + TWO_PI, FOUR_PI)
    if r < 0:
        r += FOUR_PI
    r -= TWO_PI
    if r >= TWO_PI:  # fmod rounding at the upper edge
        r -= FOUR_PI
    return r


def angle_distance(a: float, b: float) -> float:
    """Distance between two angles on the 4pi circle."""
    d = math.fmod(a - b, FOUR_PI)
    if d < 0:
        d += FOUR_PI
    return min(d, FOUR_PI - d)


def angles_equal(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return angle_distance(a, b) <= tol


def bit(x: int, q: int, n: int) -> int:
    """Value of qubit ``q`` in basis index ``x``."""
    return (x >> (n - 1 - q)) & 1


def mask(q: int, n: int) -> int:
    return 1 << (n - 1 - q)


@dataclass(frozen=True)
class Ry:
    target: int
    angle: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class X:
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class CX:
    """CNOT; ``positive=False`` is an open control firing on ``|0>``."""

    control: int
    target: int
    positive: bool = True

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("CX control and target must differ")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


Gate = Union[Ry, X, CX]


@dataclass(frozen=True)
class MCRy:
    """Multi-controlled Ry; ``controls`` holds ``(qubit, positive)`` pairs."""

    controls: tuple[tuple[int, bool], ...]
    target: int
    angle: float

    def __post_init__(self):
        qs = [q for q, _ in self.controls]
        if len(set(qs)) != len(qs) or self.target in qs:
            raise ValueError("MCRy controls must be distinct and exclude the target")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"{g} addresses qubit outside 0..{self.n_qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def count_cnots(gates: Circuit | Iterable[Gate]) -> int:
    return sum(1 for g in gates if isinstance(g, CX))


def count_single_qubit(gates: Circuit | Iterable[Gate]) -> int:
    return sum(1 for g in gates if not isinstance(g, CX))


def multiplexed_ry(controls: Sequence[int], target: int, angles: Sequence[float]) -> list[Gate]:
    """Gray-code uniformly controlled Ry.

    ``angles[c]`` is the rotation applied when the controls read ``c``, where
    bit ``j`` of ``c`` (LSB first) is the value of ``controls[j]``.  Emits
    ``2^k`` Ry and ``2^k`` positive CX for ``k >= 1`` controls; zero angles are
    kept so the structure is fixed.
    """
    k = len(controls)
    size = 1 << k
    if len(angles) != size:
        raise ValueError(f"need {size} angles for {k} controls, got {len(angles)}")
    if k == 0:
        return [Ry(target, float(angles[0]))]
    gates: list[Gate] = []
    for i in range(size):
        g = i ^ (i >> 1)
        alpha = 0.0
        for c in range(size):
            alpha += -angles[c] if bin(c & g).count("1") & 1 else angles[c]
        gates.append(Ry(target, alpha / size))
        flip = g ^ ((i + 1) % size ^ (((i + 1) % size) >> 1))
        gates.append(CX(controls[flip.bit_length() - 1], target))
    return gates


def decompose_mcry(g: MCRy) -> list[Gate]:
    """Decompose into Ry/CX with ``2^k`` CX for ``k >= 1`` controls."""
    if not g.controls:
        return [Ry(g.target, g.angle)]
    qs = [q for q, _ in g.controls]
    active = sum(1 << j for j, (_, pos) in enumerate(g.controls) if pos)
    table = [0.0] * (1 << len(qs))
    table[active] = g.angle
    return multiplexed_ry(qs, g.target, table)


def expand_negative_controls(c: Circuit) -> Circuit:
    """Rewrite open-control CX as X-CX-X so only positive controls remain."""
    out: list[Gate] = []
    for g in c.gates:
        if isinstance(g, CX) and not g.positive:
            out += [X(g.control), CX(g.control, g.target), X(g.control)]
        else:
            out.append(g)
    return Circuit(c.n_qubits, out)


def cleanup(gates: Sequence[Gate], n_qubits: int) -> list[Gate]:
    """Local peephole cleanup.

    Drops zero-angle Ry, fuses Ry on the same qubit and cancels identical CX
    pairs when nothing touching their qubits sits between them.
    """
    out: list[Gate | None] = []
    last: list[int | None] = [None] * n_qubits  # index in out of last gate per qubit
    for g in gates:
        if isinstance(g, Ry) and abs(canonicalize_angle(g.angle)) < ZERO_ANGLE:
            continue
        prev_idx = {last[q] for q in g.qubits}
        if len(prev_idx) == 1 and None not in prev_idx:
            idx = prev_idx.pop()
            prev = out[idx]
            if isinstance(g, Ry) and isinstance(prev, Ry) and prev.target == g.target:
                merged = canonicalize_angle(prev.angle + g.angle)
                if abs(merged) < ZERO_ANGLE:
                    out[idx] = None
                    _rewind(out, last, g.qubits)
                else:
                    out[idx] = Ry(g.target, merged)
                continue
            if isinstance(g, CX) and prev == g:
                out[idx] = None
                _rewind(out, last, g.qubits)
                continue
        out.append(g)
        for q in g.qubits:
            last[q] = len(out) - 1
    return [g for g in out if g is not None]


def _rewind(out, last, qubits):
    for q in qubits:
        j = last[q]
        while j is not None and j >= 0 and (out[j] is None or q not in out[j].qubits):
            j -= 1
        last[q] = j if j is not None and j >= 0 else None
