"""Optimization driver: segment, derive don't-cares, resynthesize, verify."""
from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .circuit import CX, Circuit, Gate, cleanup, count_cnots, count_single_qubit, expand_negative_controls
from .dontcare import (
    ControlDC,
    ObservDC,
    build_rotation_table,
    observability_dc,
    pin_control_dc,
    reachable,
)
from .frontend import synthesize_initial
from .resynth import K_MAX_LIMIT, Resynthesis, resynthesize_segment
from .segmentation import Segment, SegmentedCircuit, extract_segments
from .simulator import SparseState, apply_gates, ground_state, simulate, states_equal, states_equal_up_to_sign
from .states import StateSpec

log = logging.getLogger(__name__)

SCHEMA = 1


class VerificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class OptimizeConfig:
    k_max: int = 2
    use_cdc: bool = True
    use_odc: bool = True
    tolerance: float = 1e-9
    seed: int = 0
    iterations: int = 1

    def __post_init__(self):
        if not 0 <= self.k_max <= K_MAX_LIMIT:
            raise ValueError(f"k_max must be in 0..{K_MAX_LIMIT}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class SegmentRecord:
    position: int
    target: int
    method: str
    K: int | None
    cnots_before: int
    cnots_after: int
    care: int
    cdc: int
    odc: int
    absorbed: int = 0


@dataclass
class Report:
    cnot_before: int
    cnot_after: int
    singleq_before: int
    singleq_after: int
    verified: bool
    wall_time: float
    state: dict | None = None
    segments: list[SegmentRecord] = field(default_factory=list)
    reverted_odc: int = 0

    @property
    def reduction_pct(self) -> float:
        if self.cnot_before == 0:
            return 0.0
        return 100.0 * (1.0 - self.cnot_after / self.cnot_before)

    def to_json(self) -> dict:
        d = {"schema": SCHEMA}
        d["state"] = self.state
        d["cnot_before"] = self.cnot_before
        d["cnot_after"] = self.cnot_after
        d["singleq_before"] = self.singleq_before
        d["singleq_after"] = self.singleq_after
        d["reduction_pct"] = round(self.reduction_pct, 6)
        d["verified"] = self.verified
        d["wall_time"] = self.wall_time
        d["reverted_odc"] = self.reverted_odc
        d["segments"] = [asdict(s) for s in self.segments]
        return d


def _pattern_ok(segs: Sequence[Segment], j: int) -> bool:
    return j + 2 < len(segs) and segs[j + 1].target != segs[j].target == segs[j + 2].target


def _try_resynth(table, k_max, original, tol) -> Resynthesis | None:
    try:
        return resynthesize_segment(table, k_max, original, tol)
    except ValueError:
        return None


def _pass(
    segs: Sequence[Segment],
    n: int,
    cfg: OptimizeConfig,
    banned: set[int],
    sink: Callable[[str], None] | None,
) -> tuple[list[Gate], list[SegmentRecord], set[int]]:
    """One forward greedy pass; returns gates, records and unresolved drift origins."""
    tol = cfg.tolerance
    cur = ground_state(n)
    out: list[Gate] = []
    records: list[SegmentRecord] = []
    drift_from: int | None = None
    j = 0
    while j < len(segs):
        seg = segs[j]
        q = seg.target
        in_sync = states_equal(cur, seg.psi_s, tol)
        if in_sync or reachable(cur, seg.psi_t, q, tol):
            desired = seg.psi_t
        else:
            desired = apply_gates(cur, seg.gates)
        table = build_rotation_table(cur, desired, q, tol)
        # in sync the original gates reach psi_t by construction
        original_ok = in_sync or states_equal(apply_gates(cur, seg.gates), desired, tol)
        fallback = seg.gates if original_ok else None
        choice = None
        if not cfg.use_cdc:
            pinned = pin_control_dc(table, seg.gates)
            choice = _try_resynth(pinned, cfg.k_max, fallback, tol)
            # a drifted input can leave a pinned reflection with no realization
            if choice is not None:
                table = pinned
        if choice is None:
            choice = resynthesize_segment(table, cfg.k_max, fallback, tol)
        if sink is not None:
            sink(f"segment {seg.position}\n{table.dump()}")
        goal = desired
        absorbed = 0
        odc_count = 0

        if cfg.use_odc:
            # jump straight to a later boundary state when a q-only operator reaches it
            for k in range(len(segs) - 1, j, -1):
                if not reachable(cur, segs[k].psi_t, q, tol):
                    continue
                far = build_rotation_table(cur, segs[k].psi_t, q, tol)
                r = resynthesize_segment(far, cfg.k_max, None, tol)
                if r.cnots <= choice.cnots:
                    choice, goal, absorbed, table = r, segs[k].psi_t, k - j, far
                    break
            if not absorbed and in_sync and j not in banned and _pattern_ok(segs, j):
                marks = observability_dc(table, segs[j + 1].gates, segs[j + 1].target, tol)
                if marks:
                    freed = table.replace(marks)
                    r = _try_resynth(freed, cfg.k_max, None, tol)
                    if r is not None and r.cnots < choice.cnots:
                        after = apply_gates(cur, r.gates)
                        if states_equal(after, seg.psi_t, tol):
                            choice, odc_count, table = r, len(marks), freed
                        else:
                            probe = apply_gates(after, segs[j + 1].gates)
                            if reachable(probe, segs[j + 2].psi_t, q, tol):
                                choice, odc_count, table = r, len(marks), freed
                                goal = None
                                drift_from = j
                                if sink is not None:
                                    sink(f"segment {seg.position}: ODC applied\n{freed.dump()}")

        nxt = apply_gates(cur, choice.gates)
        if goal is not None and not states_equal(nxt, goal, tol):
            # numerical miss: keep the segment as it was when that is valid
            if original_ok:
                choice = Resynthesis(tuple(seg.gates), None, method="original")
                goal, absorbed = desired, 0
                nxt = apply_gates(cur, seg.gates)
            log.warning("segment %d missed its boundary state", seg.position)
        if goal is not None and drift_from is not None and states_equal(nxt, goal, tol):
            if goal is segs[j + absorbed].psi_t:
                drift_from = None
        out += choice.gates
        cur = nxt
        records.append(
            SegmentRecord(
                position=seg.position,
                target=q,
                method=choice.method,
                K=choice.K,
                cnots_before=sum(s.cnots for s in segs[j : j + absorbed + 1]),
                cnots_after=choice.cnots,
                care=len(table.care()),
                cdc=table.count(ControlDC),
                odc=odc_count or table.count(ObservDC),
                absorbed=absorbed,
            )
        )
        j += 1 + absorbed
    unresolved = {drift_from} if drift_from is not None else set()
    return out, records, unresolved


def _optimize_once(c: Circuit, sc: SegmentedCircuit, cfg: OptimizeConfig, target: SparseState, sink) -> tuple[Circuit, list[SegmentRecord], int]:
    banned: set[int] = set()
    while True:
        gates, records, unresolved = _pass(sc.segments, c.n_qubits, cfg, banned, sink)
        result = Circuit(c.n_qubits, cleanup(gates, c.n_qubits))
        if states_equal_up_to_sign(simulate(result), target, cfg.tolerance):
            return result, records, len(banned)
        # ban the drift source (or every ODC use if none is known) and retry
        used = {r.position for r in records if r.odc}
        new = (unresolved or used) - banned
        if not new:
            log.warning("optimized circuit failed verification; keeping the input circuit")
            return c, [], len(banned)
        banned |= new


def optimize(
    c: Circuit,
    cfg: OptimizeConfig = OptimizeConfig(),
    target: SparseState | None = None,
    sink: Callable[[str], None] | None = None,
) -> tuple[Circuit, Report]:
    """Reduce the CNOT count of a Ry/CX state-preparation circuit.

    The output prepares the same state as ``c`` from ``|0...0>`` (up to
    global sign) and never has more CNOTs than ``c``.
    """
    start = time.perf_counter()
    sc = extract_segments(c)
    # segmentation simulates the whole circuit; reuse its final state
    reference = sc.segments[-1].psi_t if sc.segments else ground_state(c.n_qubits)
    if target is not None and not states_equal_up_to_sign(reference, target, cfg.tolerance):
        raise VerificationError("input circuit does not prepare the given target state")
    best, records, reverted = c, [], 0
    for it in range(cfg.iterations):
        if it:
            sc = extract_segments(best)
        nxt, recs, rev = _optimize_once(best, sc, cfg, reference, sink)
        reverted += rev
        if it == 0:
            records = recs
        if count_cnots(nxt) > count_cnots(best):
            break
        improved = count_cnots(nxt) < count_cnots(best) or len(nxt.gates) < len(best.gates)
        best = nxt
        if not improved:
            break
    verified = verify(best, reference, cfg.tolerance)
    if not verified:
        raise VerificationError("internal error: optimized circuit does not prepare the target state")
    report = Report(
        cnot_before=count_cnots(c),
        cnot_after=count_cnots(best),
        singleq_before=count_single_qubit(c),
        singleq_after=count_single_qubit(best),
        verified=verified,
        wall_time=time.perf_counter() - start,
        segments=records,
        reverted_odc=reverted,
    )
    return best, report


def verify(c: Circuit, t: SparseState, tol: float = 1e-9) -> bool:
    if c.n_qubits != t.n_qubits:
        raise ValueError("circuit and target differ in qubit count")
    return states_equal_up_to_sign(simulate(expand_negative_controls(c)), t, tol)


# -- benchmark harness

def expand_suite(suite: dict) -> list[StateSpec]:
    """Instances of a suite description.

    ``{"families": [{"family": "w", "n": [3, 4], "seeds": 1, "uniform": false,
    "k": null}, ...]}``; ``seeds`` is a count or an explicit list, ``n`` an
    int, a list, or ``{"min": a, "max": b}``.
    """
    specs = []
    for fam in suite.get("families", []):
        ns = fam["n"]
        if isinstance(ns, int):
            ns = [ns]
        elif isinstance(ns, dict):
            ns = list(range(ns["min"], ns["max"] + 1))
        seeds = fam.get("seeds", 1)
        seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
        if not fam["family"].startswith("rand"):
            seeds = seeds[:1] or [0]
        for n in ns:
            for s in seeds:
                specs.append(StateSpec(fam["family"], n, fam.get("k"), s, bool(fam.get("uniform", False))))
    return specs


def run_instance(spec: StateSpec, cfg: OptimizeConfig) -> Report:
    t = spec.build()
    init = synthesize_initial(t)
    out, report = optimize(init, cfg, target=t)
    report.state = spec.as_dict()
    report.verified = report.verified and verify(out, t, cfg.tolerance)
    return report


def run_benchmark(suite: dict | Iterable[StateSpec], cfg: OptimizeConfig = OptimizeConfig()) -> dict:
    specs = expand_suite(suite) if isinstance(suite, dict) else list(suite)
    reports = [run_instance(s, cfg) for s in specs]
    families: dict[str, dict] = {}
    for r in reports:
        f = families.setdefault(r.state["family"], {"count": 0, "reduction": 0.0, "wall_time": 0.0})
        f["count"] += 1
        f["reduction"] += r.reduction_pct
        f["wall_time"] += r.wall_time
    agg = {
        name: {
            "count": f["count"],
            "mean_reduction_pct": round(f["reduction"] / f["count"], 6),
            "mean_wall_time": f["wall_time"] / f["count"],
        }
        for name, f in families.items()
    }
    return {"schema": SCHEMA, "instances": [r.to_json() for r in reports], "families": agg}


CSV_FIELDS = ["family", "n", "k", "seed", "cnot_before", "cnot_after", "singleq_before", "singleq_after", "reduction_pct", "verified", "wall_time"]


def benchmark_csv(results: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for inst in results["instances"]:
        row = dict(inst["state"] or {})
        row.update({k: inst[k] for k in CSV_FIELDS if k in inst})
        w.writerow({k: row.get(k) for k in CSV_FIELDS})
    return buf.getvalue()
