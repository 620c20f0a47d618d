"""Minimal-CNOT resynthesis of a rotation table over fixed-target templates.

A template with ``K`` CNOTs is ``Ry(t0) CX_1 Ry(t1) ... CX_K Ry(tK)`` on the
target.  Per control index the branch angle evolves as ``phi -> phi + t_k``
when CX_k is idle and ``phi -> pi - phi + t_k`` when it fires, so every care
entry gives one affine equation over ``t0..tK`` with +-1 coefficients, to be
met modulo 4pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .circuit import ANGLE_TOL, CX, FOUR_PI, Gate, Ry, canonicalize_angle, mask
from .dontcare import Care, FixedBlock, RotationTable, table_to_multiplexed_circuit

K_MAX_LIMIT = 4


@dataclass(frozen=True)
class CnotTemplate:
    target: int
    slots: tuple[tuple[int, bool], ...]  # (control, positive)

    @property
    def K(self) -> int:
        return len(self.slots)

    def gates(self, thetas: Sequence[float]) -> list[Gate]:
        out: list[Gate] = []
        for k in range(self.K + 1):
            if k:
                c, pos = self.slots[k - 1]
                out.append(CX(c, self.target, pos))
            th = canonicalize_angle(float(thetas[k]))
            if abs(th) >= 1e-12:
                out.append(Ry(self.target, th))
        return out


@dataclass(frozen=True, eq=False)
class AngleSystem:
    """Rows ``coeffs @ theta = rhs (mod 4pi)``, one per constraint."""

    coeffs: np.ndarray  # (m, K+1) ints in {-1, +1}
    rhs: np.ndarray  # (m,)
    index: tuple[int, ...] = ()  # control index of each row

    @property
    def n_unknowns(self) -> int:
        return self.coeffs.shape[1]


def enumerate_templates(n: int, target: int, K: int) -> list[CnotTemplate]:
    choices = [(q, pos) for q in range(n) if q != target for pos in (True, False)]
    return [CnotTemplate(target, slots) for slots in product(choices, repeat=K)]


def _rows(table: RotationTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(control index, source angle, target angle) for every constrained entry."""
    xs, src, dst = [], [], []
    for x, e in table.entries.items():
        if isinstance(e, Care):
            xs.append(x), src.append(e.source), dst.append(e.result)
        elif isinstance(e, FixedBlock):
            xs += [x, x]
            src += [0.0, math.pi]
            dst += [e.result0, e.result1]
    return np.array(xs, dtype=np.int64), np.array(src, dtype=float), np.array(dst, dtype=float)


def _system(n: int, tmpl: CnotTemplate, xs, src, dst) -> AngleSystem:
    m, K = len(xs), tmpl.K
    coeffs = np.zeros((m, K + 1), dtype=np.int64)
    coeffs[:, 0] = 1
    sign = np.ones(m)
    const = np.zeros(m)
    for k, (c, pos) in enumerate(tmpl.slots, start=1):
        on = (xs & mask(c, n)) != 0
        fire = on if pos else ~on
        sign[fire] = -sign[fire]
        const[fire] = math.pi - const[fire]
        coeffs[fire, :k] = -coeffs[fire, :k]
        coeffs[:, k] = 1
    return AngleSystem(coeffs, dst - sign * src - const, tuple(int(x) for x in xs))


def build_system(table: RotationTable, tmpl: CnotTemplate) -> AngleSystem:
    if tmpl.target != table.target:
        raise ValueError("template and table target different qubits")
    return _system(table.n_qubits, tmpl, *_rows(table))


def _mod_residual(v: np.ndarray) -> np.ndarray:
    r = np.mod(v, FOUR_PI)
    return np.minimum(r, FOUR_PI - r)


@lru_cache(maxsize=4096)
def _pivot_plan(shape: tuple[int, int], flat: tuple[int, ...]):
    """Independent rows/columns, exact inverse and lattice exponent."""
    u, cols = shape
    a = [[Fraction(flat[i * cols + j]) for j in range(cols)] for i in range(u)]
    rows, pcols = [], []
    basis: list[list[Fraction]] = []  # reduced copies of chosen rows
    for i in range(u):
        v = a[i][:]
        for b, pc in zip(basis, pcols):
            if v[pc]:
                f = v[pc] / b[pc]
                v = [vi - f * bi for vi, bi in zip(v, b)]
        nz = next((j for j in range(cols) if v[j]), None)
        if nz is not None:
            rows.append(i)
            pcols.append(nz)
            basis.append(v)
    r = len(rows)
    sub = [[a[i][j] for j in pcols] for i in rows]
    inv = _fraction_inverse(sub)
    e = 1
    for row in inv:
        for q in row:
            e = e * q.denominator // math.gcd(e, q.denominator)
    return tuple(rows), tuple(pcols), np.array([[float(q) for q in row] for row in inv]).reshape(r, r), e


def _fraction_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    r = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(r)] for i, row in enumerate(m)]
    for c in range(r):
        p = next(i for i in range(c, r) if aug[i][c])
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for i in range(r):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [vi - f * vc for vi, vc in zip(aug[i], aug[c])]
    return [row[r:] for row in aug]


def solve_system(sys: AngleSystem, tol: float = ANGLE_TOL) -> np.ndarray | None:
    """Exact feasibility modulo 4pi; returns angles in [-2pi, 2pi) or None.

    Rows sharing a coefficient pattern must agree on their right-hand side.
    The distinct patterns are solved on a maximal independent subset, trying
    every 4pi offset class of the pivot rows, and each candidate is checked
    against all rows.
    """
    cols = sys.n_unknowns
    if len(sys.rhs) == 0:
        return np.zeros(cols)
    # +-1 rows packed into integers make the grouping a 1-D unique
    keys = (sys.coeffs > 0) @ (1 << np.arange(cols, dtype=np.int64))
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    pats = sys.coeffs[first]
    rep = sys.rhs[first]
    if np.any(_mod_residual(sys.rhs - rep[inverse]) > tol):
        return None
    rows, pcols, inv, e = _pivot_plan(pats.shape, tuple(int(v) for v in pats.ravel()))
    b = rep[list(rows)]
    for shift in product(range(e), repeat=len(rows)):
        theta = np.zeros(cols)
        theta[list(pcols)] = inv @ (b + FOUR_PI * np.array(shift, dtype=float))
        if np.all(_mod_residual(pats @ theta - rep) <= tol):
            return np.array([canonicalize_angle(t) for t in theta])
    return None


def evaluate_template(table: RotationTable, tmpl: CnotTemplate, thetas: Sequence[float]) -> np.ndarray:
    """Residual of every constrained row under concrete angles (mod 4pi)."""
    s = build_system(table, tmpl)
    return _mod_residual(s.coeffs @ np.asarray(thetas, dtype=float) - s.rhs)


@dataclass(frozen=True)
class Resynthesis:
    gates: tuple[Gate, ...]
    K: int | None  # CNOTs of the template used; None for a fallback
    template: CnotTemplate | None = None
    thetas: tuple[float, ...] = ()
    method: str = "template"

    @property
    def cnots(self) -> int:
        return sum(isinstance(g, CX) for g in self.gates)


def _groups_consistent(n: int, controls: frozenset, xs, src, dst, tol: float) -> bool:
    """Necessary condition shared by every template over ``controls``.

    Rows agreeing on those control bits fire the same CNOTs, so they get one
    coefficient row and one sign; their targets must then agree on
    ``dst - src`` or on ``dst + src``.
    """
    if len(xs) < 2:
        return True
    keys = xs & sum(mask(c, n) for c in controls)
    for k in np.unique(keys):
        sel = keys == k
        if sel.sum() < 2:
            continue
        d, a = dst[sel] - src[sel], dst[sel] + src[sel]
        if np.any(_mod_residual(d - d[0]) > tol) and np.any(_mod_residual(a - a[0]) > tol):
            return False
    return True


def search_templates(table: RotationTable, k_max: int = 2, tol: float = ANGLE_TOL) -> Resynthesis | None:
    if not 0 <= k_max <= K_MAX_LIMIT:
        raise ValueError(f"k_max must be in 0..{K_MAX_LIMIT}")
    n, t = table.n_qubits, table.target
    xs, src, dst = _rows(table)
    viable: dict[frozenset, bool] = {}
    for K in range(k_max + 1):
        for tmpl in enumerate_templates(n, t, K):
            used = frozenset(c for c, _ in tmpl.slots)
            if used not in viable:
                viable[used] = _groups_consistent(n, used, xs, src, dst, tol)
            if not viable[used]:
                continue
            sol = solve_system(_system(n, tmpl, xs, src, dst), tol)
            if sol is not None:
                return Resynthesis(tuple(tmpl.gates(sol)), K, tmpl, tuple(float(v) for v in sol))
    return None


def resynthesize_segment(
    table: RotationTable,
    k_max: int = 2,
    original: Sequence[Gate] | None = None,
    tol: float = ANGLE_TOL,
) -> Resynthesis:
    """Fewest-CNOT replacement meeting every constrained entry of ``table``.

    Falls back to the cheaper of the multiplexed realization and
    ``original`` (when the caller vouches that it is valid) if no template
    with at most ``k_max`` CNOTs is feasible.
    """
    found = search_templates(table, k_max, tol)
    if found is not None:
        if original is not None and sum(isinstance(g, CX) for g in original) < found.cnots:
            return Resynthesis(tuple(original), None, method="original")
        return found
    options = []
    try:
        options.append(Resynthesis(tuple(table_to_multiplexed_circuit(table)), None, method="multiplexed"))
    except ValueError:
        pass
    if original is not None:
        options.append(Resynthesis(tuple(original), None, method="original"))
    if not options:
        raise ValueError("no realization available for this table")
    return min(options, key=lambda r: (r.cnots, len(r.gates)))
