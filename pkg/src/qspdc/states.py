"""Benchmark target states.

Random families draw from ``numpy.random.default_rng(seed)`` (PCG64), so a
given seed produces the same state on every platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .simulator import SparseState

FAMILIES = ("b", "dicke", "w", "rand-sparse", "rand-dense")


def b_state(n: int, k: int) -> SparseState:
    """Uniform superposition of the first ``k + 1`` basis states."""
    if not 0 <= k < (1 << n):
        raise ValueError(f"k={k} out of range for n={n}")
    a = 1.0 / math.sqrt(k + 1)
    return SparseState(n, {x: a for x in range(k + 1)})


def dicke_state(n: int, k: int) -> SparseState:
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    idx = [sum(1 << (n - 1 - q) for q in ones) for ones in combinations(range(n), k)]
    a = 1.0 / math.sqrt(len(idx))
    return SparseState(n, {x: a for x in idx})


def w_state(n: int) -> SparseState:
    return dicke_state(n, 1)


def random_state(n: int, m: int, seed: int, uniform: bool = False) -> SparseState:
    """``m`` distinct random basis states with normal (or equal) amplitudes."""
    if not 1 <= m <= (1 << n):
        raise ValueError(f"m={m} out of range for n={n}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(1 << n, size=m, replace=False)
    amps = np.ones(m) if uniform else rng.standard_normal(m)
    amps = amps / np.linalg.norm(amps)
    return SparseState(n, {int(x): float(a) for x, a in zip(idx, amps)})


@dataclass(frozen=True)
class StateSpec:
    family: str
    n: int
    k: int | None = None
    seed: int = 0
    uniform: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def resolved_k(self) -> int | None:
        """Family parameter with the benchmark defaults filled in."""
        if self.k is not None:
            return self.k
        if self.family == "b":
            # 2^(n-1) + 1 nonzero amplitudes
            return 1 << (self.n - 1)
        if self.family == "dicke":
            return math.ceil(self.n / 2)
        if self.family == "rand-sparse":
            return self.n
        if self.family == "rand-dense":
            return 1 << (self.n - 1)
        return None

    def build(self) -> SparseState:
        k = self.resolved_k()
        if self.family == "b":
            return b_state(self.n, k)
        if self.family == "dicke":
            return dicke_state(self.n, k)
        if self.family == "w":
            return w_state(self.n)
        return random_state(self.n, k, self.seed, self.uniform)

    @property
    def label(self) -> str:
        name = self.family + ("-uniform" if self.uniform else "")
        return name

    def as_dict(self) -> dict:
        return {"family": self.label, "n": self.n, "k": self.resolved_k(), "seed": self.seed}
