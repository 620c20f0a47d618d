"""Initial circuit synthesis: a per-qubit cascade of multiplexed Ry stages.

Stage ``i`` rotates qubit ``i`` conditioned on the prefix ``q_0..q_{i-1}``.
Intermediate stages split the l2 mass of each prefix, so their angles lie in
``[0, pi]``; the last stage uses the signed leaf amplitudes, which lets real
targets with negative entries come out exactly with no phase gates.
"""
from __future__ import annotations

import math
from collections import defaultdict

from .circuit import Circuit, Gate, Ry, canonicalize_angle, cleanup, multiplexed_ry
from .simulator import SparseState


def mux_angles(t: SparseState, i: int) -> dict[int, float]:
    """Angle table of stage ``i``, keyed by the prefix value of ``q_0..q_{i-1}``.

    Prefixes with no mass are absent (they read as angle 0).
    """
    n = t.n_qubits
    if not 0 <= i < n:
        raise ValueError(f"stage {i} out of range for {n} qubits")
    last = i == n - 1
    shift = n - 1 - i
    branch = defaultdict(lambda: [0.0, 0.0])
    for x, a in t.items():
        b = branch[x >> (shift + 1)]
        if last:
            b[x & 1] += a
        else:
            b[(x >> shift) & 1] += a * a
    table = {}
    for prefix, (r0, r1) in branch.items():
        if not last:
            r0, r1 = math.sqrt(r0), math.sqrt(r1)
        table[prefix] = canonicalize_angle(2.0 * math.atan2(r1, r0))
    return table


def _needed_controls(table: list[float], k: int, tol: float = 1e-12) -> list[int]:
    """Bits of the prefix the table actually depends on (bit 0 = q_0)."""
    keep = []
    size = 1 << k
    for j in range(k):
        # prefix bit for q_j sits at position k-1-j of the prefix integer
        m = 1 << (k - 1 - j)
        if any(abs(table[p] - table[p | m]) > tol for p in range(size) if not p & m):
            keep.append(j)
    return keep


def synthesize_initial(t: SparseState, reduce_controls: bool = True) -> Circuit:
    """Cascade circuit preparing ``t`` from ``|0...0>`` exactly.

    With ``reduce_controls`` a stage drops every control its angle table is
    constant over, halving the CNOT cost per dropped control.
    """
    if not t.is_normalized(1e-9):
        raise ValueError(f"target state is not normalized (norm {t.norm():.12g})")
    n = t.n_qubits
    gates: list[Gate] = []
    for i in range(n):
        sparse = mux_angles(t, i)
        if all(abs(a) < 1e-12 for a in sparse.values()):
            continue
        table = [sparse.get(p, 0.0) for p in range(1 << i)]
        controls = _needed_controls(table, i) if reduce_controls else list(range(i))
        # re-index the table over the kept controls (LSB = controls[0])
        sub = [0.0] * (1 << len(controls))
        for c in range(len(sub)):
            p = sum(1 << (i - 1 - q) for j, q in enumerate(controls) if c >> j & 1)
            sub[c] = table[p]
        gates += multiplexed_ry(controls, i, sub)
    return Circuit(n, [g for g in gates if not (isinstance(g, Ry) and abs(g.angle) < 1e-12)])


def synthesize_and_clean(t: SparseState, reduce_controls: bool = True) -> Circuit:
    c = synthesize_initial(t, reduce_controls)
    return Circuit(c.n_qubits, cleanup(c.gates, c.n_qubits))
