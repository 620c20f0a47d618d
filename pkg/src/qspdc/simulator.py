"""Sparse real-amplitude statevector simulation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from .circuit import CX, Circuit, Gate, Ry, X, mask

#: amplitudes below this are dropped after every gate
PRUNE = 1e-14
NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SparseState:
    """Map basis-index -> real amplitude; only nonzero entries are stored."""

    n_qubits: int
    amplitudes: Mapping[int, float]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("state needs at least one qubit")
        amps = {}
        dim = 1 << self.n_qubits
        for x, a in self.amplitudes.items():
            if isinstance(a, complex):
                raise TypeError("only real amplitudes are supported")
            a = float(a)
            if not 0 <= x < dim:
                raise ValueError(f"basis index {x} out of range for {self.n_qubits} qubits")
            if abs(a) >= PRUNE:
                amps[int(x)] = a
        object.__setattr__(self, "amplitudes", MappingProxyType(dict(sorted(amps.items()))))

    @classmethod
    def from_dict(cls, n: int, amps: Mapping[int, float], normalize: bool = False) -> "SparseState":
        if normalize:
            norm = math.sqrt(sum(a * a for a in amps.values()))
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = {x: a / norm for x, a in amps.items()}
        return cls(n, amps)

    def __getitem__(self, x: int) -> float:
        return self.amplitudes.get(x, 0.0)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def items(self):
        return self.amplitudes.items()

    def support(self) -> frozenset[int]:
        return frozenset(self.amplitudes)

    def norm(self) -> float:
        return math.sqrt(sum(a * a for a in self.amplitudes.values()))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def __neg__(self) -> "SparseState":
        return SparseState(self.n_qubits, {x: -a for x, a in self.amplitudes.items()})

    def __repr__(self) -> str:
        w = self.n_qubits
        terms = " + ".join(f"{a:+.6g}|{x:0{w}b}>" for x, a in self.amplitudes.items())
        return f"SparseState({terms or '0'})"


def ground_state(n: int) -> SparseState:
    if n < 1:
        raise ValueError("n must be >= 1")
    return SparseState(n, {0: 1.0})


def _apply(amps: dict[int, float], n: int, g: Gate) -> dict[int, float]:
    if isinstance(g, Ry):
        m = mask(g.target, n)
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        out: dict[int, float] = {}
        for x, a in amps.items():
            if x & m:
                lo, hi = x ^ m, x
                if lo in amps:
                    continue  # handled with its partner
                a0, a1 = 0.0, a
            else:
                lo, hi = x, x | m
                a0, a1 = a, amps.get(hi, 0.0)
            b0 = c * a0 - s * a1
            b1 = s * a0 + c * a1
            if abs(b0) >= PRUNE:
                out[lo] = b0
            if abs(b1) >= PRUNE:
                out[hi] = b1
        return out
    if isinstance(g, X):
        m = mask(g.target, n)
        return {x ^ m: a for x, a in amps.items()}
    if isinstance(g, CX):
        cm, tm = mask(g.control, n), mask(g.target, n)
        want = cm if g.positive else 0
        return {(x ^ tm if (x & cm) == want else x): a for x, a in amps.items()}
    raise TypeError(f"unsupported gate {g!r}")


def apply_gate(s: SparseState, g: Gate) -> SparseState:
    return SparseState(s.n_qubits, _apply(dict(s.amplitudes), s.n_qubits, g))


def apply_gates(s: SparseState, gates: Iterable[Gate]) -> SparseState:
    amps = dict(s.amplitudes)
    for g in gates:
        amps = _apply(amps, s.n_qubits, g)
    return SparseState(s.n_qubits, amps)


def simulate(c: Circuit, s0: SparseState | None = None) -> SparseState:
    if s0 is None:
        s0 = ground_state(c.n_qubits)
    if s0.n_qubits != c.n_qubits:
        raise ValueError(f"circuit has {c.n_qubits} qubits, state has {s0.n_qubits}")
    return apply_gates(s0, c.gates)


def distance(a: SparseState, b: SparseState) -> float:
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    keys = a.amplitudes.keys() | b.amplitudes.keys()
    return math.sqrt(sum((a[x] - b[x]) ** 2 for x in keys))


def states_equal(a: SparseState, b: SparseState, tol: float = 1e-9) -> bool:
    return distance(a, b) <= tol


def states_equal_up_to_sign(a: SparseState, b: SparseState, tol: float = 1e-9) -> bool:
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit counts differ")
    return min(distance(a, b), distance(a, -b)) <= tol


def to_dense(s: SparseState):
    import numpy as np

    v = np.zeros(1 << s.n_qubits)
    for x, a in s.items():
        v[x] = a
    return v


# -- JSON state file: {"n": int, "amplitudes": {"<bitstring q0 first>": float}}

def state_to_json(s: SparseState) -> dict:
    w = s.n_qubits
    return {"n": w, "amplitudes": {f"{x:0{w}b}": a for x, a in s.items()}}


def state_from_json(obj: dict, tol: float = 1e-6) -> SparseState:
    try:
        n = int(obj["n"])
        raw = obj["amplitudes"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"malformed state file: {e}") from None
    amps = {}
    for key, a in raw.items():
        if len(key) != n or set(key) - {"0", "1"}:
            raise ValueError(f"bad bitstring {key!r} for n={n}")
        amps[int(key, 2)] = float(a)
    norm = math.sqrt(sum(a * a for a in amps.values()))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm:.9g} deviates from 1 by more than {tol}")
    return SparseState.from_dict(n, amps, normalize=True)


def save_state(s: SparseState, path) -> None:
    with open(path, "w") as f:
        json.dump(state_to_json(s), f, indent=2)
        f.write("\n")


def load_state(path) -> SparseState:
    with open(path) as f:
        return state_from_json(json.load(f))
