"""
Correctness oracles: brute-force optimum, invariant checker and the
reference engines whose counters are recomputed on every query.
"""
import bisect
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from dynamic_cover.config import FLOAT_TOLERANCE, ORACLE_MAX_SETS
from dynamic_cover.core.counters import CounterBank
from dynamic_cover.core.ds import DominatingSetEngine
from dynamic_cover.core.engine import LeveledEngine, SetCoverEngine
from dynamic_cover.core.errors import OracleScaleError
from dynamic_cover.core.instance import DynGraph, SetSystem
from dynamic_cover.core.levels import Params
from dynamic_cover.data_structures.schemas import UpdateOp

logger = logging.getLogger(__name__)


# ------------------------------------------------------
# BRUTE FORCE OPTIMUM
# ------------------------------------------------------
class BruteForceOracle:
    """
    Coverage table of every sub-family of a static set system.
    Element masks are rows of uint64 words, built by doubling: the table for
    sets 0..i is the table for 0..i-1 followed by the same rows OR-ed with set i.
    """

    def __init__(self, sets: Mapping[int, Tuple[float, Sequence[int]]]):
        if len(sets) > ORACLE_MAX_SETS:
            raise OracleScaleError(f"oracle scale exceeded: {len(sets)} sets > {ORACLE_MAX_SETS}")
        self.set_ids = sorted(sets)
        elements = sorted({e for sid in self.set_ids for e in sets[sid][1]})
        self.bit_of = {e: i for i, e in enumerate(elements)}
        self.words = max(1, (len(elements) + 63) // 64)

        cover = np.zeros((1, self.words), dtype=np.uint64)
        cost = np.zeros(1, dtype=np.float64)
        for sid in self.set_ids:
            set_cost, members = sets[sid]
            mask = self._mask(members)
            cover = np.concatenate([cover, cover | mask])
            cost = np.concatenate([cost, cost + set_cost])
        self.cover = cover
        self.cost = cost
        logger.debug(f"oracle table: {len(cost)} sub-families over {len(elements)} elements")

    def _mask(self, elements: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.words, dtype=np.uint64)
        for e in elements:
            bit = self.bit_of.get(e)
            if bit is None:
                raise OracleScaleError(f"element {e} is not in the oracle's set system")
            mask[bit // 64] |= np.uint64(1) << np.uint64(bit % 64)
        return mask

    def optimum(self, active: Iterable[int]) -> Tuple[float, List[int]]:
        """Minimum cost sub-family covering `active`; (inf, []) when infeasible."""
        target = self._mask(active)
        feasible = np.all((self.cover & target) == target, axis=1)
        if not feasible.any():
            return math.inf, []
        costs = np.where(feasible, self.cost, np.inf)
        best = int(np.argmin(costs))
        chosen = [sid for bit, sid in enumerate(self.set_ids) if best >> bit & 1]
        return float(costs[best]), chosen


def brute_force_opt(active: Iterable[int], sets: Mapping[int, Tuple[float, Sequence[int]]]) -> float:
    return BruteForceOracle(sets).optimum(active)[0]


@dataclass
class ApproxVerdict:
    passed: bool
    cover_cost: float
    opt: float
    bound: float
    headline_ratio: Optional[float] = None  # cost / (OPT ln n), only when ln n >= 1/eps


def approx_verdict(cover_cost: float, opt: float, n_active: int, beta: float) -> ApproxVerdict:
    if n_active == 0:
        return ApproxVerdict(True, cover_cost, opt, 0.0)
    log_n = math.log(n_active)
    bound = opt * beta ** 4 * (log_n + 1)
    verdict = ApproxVerdict(cover_cost < bound + FLOAT_TOLERANCE, cover_cost, opt, bound)
    eps = beta - 1
    if log_n >= 1 / eps and opt > 0:
        verdict.headline_ratio = cover_cost / (opt * log_n)
    return verdict


# ------------------------------------------------------
# INVARIANT CHECKER
# ------------------------------------------------------
class ViolationKind(str, Enum):
    INV1 = "INV1"
    INV2 = "INV2"
    INV3 = "INV3"
    COVER = "COVER"
    CLEANDOM = "CLEANDOM"
    PAIR_UPPER = "PAIR_UPPER"
    COUNTER_STALENESS = "COUNTER_STALENESS"
    LEDGER_DRIFT = "LEDGER_DRIFT"


@dataclass
class Violation:
    kind: ViolationKind
    detail: str

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.detail}"


@dataclass
class ViolationReport:
    step: int
    violations: List[Violation] = field(default_factory=list)
    dirt_initial: float = 0.0   # dirt rebuilt from initial-member departures
    dirt_all: float = 0.0       # same, charging every departure

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return sorted({v.kind.value for v in self.violations})

    def add(self, kind: ViolationKind, detail: str) -> None:
        self.violations.append(Violation(kind, detail))


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= FLOAT_TOLERANCE * max(1.0, abs(a), abs(b))


def _check_cover(engine: LeveledEngine, report: ViolationReport) -> None:
    state = engine.state
    provider = engine.provider
    for item in provider.active_items():
        sid = state.owner.get(item)
        if sid is None:
            report.add(ViolationKind.COVER, f"item {item} is not covered")
            continue
        if sid not in provider.coverers(item):
            report.add(ViolationKind.COVER, f"item {item} owned by {sid}, which cannot cover it")
        if state.item_level.get(item) != state.level_of(sid):
            report.add(ViolationKind.COVER, f"item {item} level {state.item_level.get(item)} "
                                            f"differs from its pair level {state.level_of(sid)}")
    for item in state.owner:
        if not provider.is_active(item):
            report.add(ViolationKind.COVER, f"inactive item {item} still owned")
    for sid, members in state.cov_members.items():
        for item in members:
            if state.owner.get(item) != sid:
                report.add(ViolationKind.COVER, f"Cov({sid}) lists {item} owned by {state.owner.get(item)}")


def _check_levels(engine: LeveledEngine, report: ViolationReport, strict: bool) -> None:
    state = engine.state
    table = engine.table
    eps = engine.params.eps
    for sid in engine.provider.coverer_ids():
        cost = engine.provider.cost(sid)
        l_cov = state.level_of(sid)
        levels = sorted(state.item_level[e] for e in engine.provider.coverable(sid) if e in state.item_level)

        # no PD: N_j(S)/c(S) < beta^{j+1} for every j above l_cov
        checked = set()
        for lv in levels:
            j = max(lv + 1, l_cov + 1)
            if j in checked or j + 1 > table.max_level:
                continue
            checked.add(j)
            n_j = bisect.bisect_left(levels, j)
            if strict:
                dirty = table.reaches(n_j, cost, j + 1)
            else:
                dirty = n_j >= cost * table.pow(j + 1) + eps * table.pow(j)
            if dirty:
                report.add(ViolationKind.INV1, f"set {sid} (level {l_cov}) has N_{j}={n_j} at cost {cost}")

        # counters
        counters = engine.bank.counters[sid]
        for j in range(counters.j_min, counters.j_max + 1):
            exact = bisect.bisect_left(levels, j)
            stale = abs(engine.bank.cumulative(sid, j) - exact)
            if stale > (0 if strict else eps * table.pow(j) + FLOAT_TOLERANCE):
                report.add(ViolationKind.COUNTER_STALENESS,
                           f"set {sid}: N~_{j}={engine.bank.cumulative(sid, j)} vs N_{j}={exact}")

    for sid, level in state.cov_level.items():
        cost = engine.provider.cost(sid)
        size = len(state.cov_members[sid])
        if level + 2 > table.max_level:
            continue
        if strict:
            crowded = table.reaches(size, cost, level + 2)
        else:
            crowded = size >= cost * table.pow(level + 2) + eps * table.pow(level + 1)
        if crowded:
            report.add(ViolationKind.PAIR_UPPER, f"pair {sid} at level {level} holds {size} items")

    for sid, (level, size) in engine.fresh_pairs.items():
        if state.level_of(sid) != level or len(state.cov_members.get(sid, ())) != size:
            continue
        if not table.reaches(size, engine.provider.cost(sid), level):
            report.add(ViolationKind.CLEANDOM, f"fresh pair {sid} at level {level} with only {size} items")


def _check_inv3(engine: LeveledEngine, report: ViolationReport) -> None:
    """No coverer of an active item sits above the item's level (l_dom for vertices)."""
    state = engine.state
    provider = engine.provider
    for item in provider.active_items():
        level = state.item_level.get(item)
        if level is None:
            continue
        for sid in provider.coverers(item):
            if state.level_of(sid) > level:
                report.add(ViolationKind.INV3, f"item {item} at level {level} below coverer {sid} at {state.level_of(sid)}")


def _check_ledger(engine: LeveledEngine, report: ViolationReport) -> None:
    ledger = engine.ledger
    state = engine.state
    table = engine.table

    cost: Dict[int, float] = {}
    sets: Dict[int, int] = {}
    for sid, level in state.cov_level.items():
        cost[level] = cost.get(level, 0.0) + engine.provider.cost(sid)
        sets[level] = sets.get(level, 0) + 1
    for level in set(cost) | {lv for lv, c in ledger.sets.items() if c}:
        if ledger.sets.get(level, 0) != sets.get(level, 0):
            report.add(ViolationKind.LEDGER_DRIFT, f"S_{level}: ledger {ledger.sets.get(level, 0)}, state {sets.get(level, 0)}")
        if not _close(ledger.cost.get(level, 0.0), cost.get(level, 0.0)):
            report.add(ViolationKind.LEDGER_DRIFT, f"C_{level}: ledger {ledger.cost.get(level, 0.0)}, state {cost.get(level, 0.0)}")
    if not _close(ledger.total_cost, math.fsum(cost.values())):
        report.add(ViolationKind.LEDGER_DRIFT, f"C: ledger {ledger.total_cost}, state {math.fsum(cost.values())}")

    for level in set(state.items_at) | {lv for lv, c in ledger.covered.items() if c}:
        expected = len(state.items_at.get(level, ()))
        if ledger.covered.get(level, 0) != expected:
            report.add(ViolationKind.LEDGER_DRIFT, f"L_{level}: ledger {ledger.covered.get(level, 0)}, state {expected}")

    dirt: Dict[int, List[float]] = {}
    every: List[float] = []
    for level, initial in ledger.departure_log:
        weight = 1.0 / table.pow(level)
        every.append(weight)
        if initial:
            dirt.setdefault(level, []).append(weight)
    for level in set(dirt) | {lv for lv, d in ledger.dirt.items() if d} | {lv for lv, e in ledger.departures.items() if e}:
        rebuilt = math.fsum(dirt.get(level, ()))
        if not _close(ledger.dirt.get(level, 0.0), rebuilt):
            report.add(ViolationKind.LEDGER_DRIFT, f"D_{level}: ledger {ledger.dirt.get(level, 0.0)}, rebuilt {rebuilt}")
        # E_j = D_j * beta^j
        departures = ledger.departures.get(level, 0)
        if departures != len(dirt.get(level, ())):
            report.add(ViolationKind.LEDGER_DRIFT, f"E_{level}: ledger {departures}, rebuilt {len(dirt.get(level, ()))}")
        elif departures != round(ledger.dirt.get(level, 0.0) * table.pow(level)):
            report.add(ViolationKind.LEDGER_DRIFT, f"E_{level}={departures} but D_{level}*beta^{level}="
                                                   f"{ledger.dirt.get(level, 0.0) * table.pow(level)}")
    report.dirt_initial = math.fsum(w for ws in dirt.values() for w in ws)
    report.dirt_all = math.fsum(every)
    if not _close(ledger.total_dirt, report.dirt_initial):
        report.add(ViolationKind.LEDGER_DRIFT, f"D: ledger {ledger.total_dirt}, rebuilt {report.dirt_initial}")


def check_all(engine: LeveledEngine) -> ViolationReport:
    """Every invariant of the current state; strict thresholds when the counters are exact."""
    strict = engine.bank.exact
    report = ViolationReport(step=engine.step_clock)
    _check_cover(engine, report)
    _check_levels(engine, report, strict)
    _check_inv3(engine, report)
    if engine.ledger.is_dirty(engine.params.eps, engine.params.beta):
        report.add(ViolationKind.INV2, f"D={engine.ledger.total_dirt} >= (eps/beta) C with C={engine.ledger.total_cost}")
    _check_ledger(engine, report)
    return report


# ------------------------------------------------------
# REFERENCE ENGINES
# ------------------------------------------------------
class ExactCounterBank(CounterBank):
    """Counter bank that answers N_j(S) straight from the member bookkeeping."""

    def __init__(self, table, exact: bool = True):
        super().__init__(table, exact=True)

    def record_change(self, sid: int, item: int, old: Optional[int], new: Optional[int]) -> Optional[int]:
        if old is None and new is None:
            return None
        c = self.counters[sid]
        c.move(item, old, new)
        c.change_count += 1
        self.changes += 1
        return c.j_max

    def refresh_all(self, sid: int) -> int:
        return self.counters[sid].j_max

    def cumulative(self, sid: int, j: int) -> int:
        return self.counters[sid].exact_below(j)


class ReferenceSetCoverEngine(SetCoverEngine):
    def __init__(self, system: SetSystem, params: Params, global_resets: bool = True):
        super().__init__(system, params, bank_factory=ExactCounterBank, global_resets=global_resets)


class ReferenceDominatingSetEngine(DominatingSetEngine):
    def __init__(self, graph: DynGraph, params: Params, initial_edges: Iterable[Tuple[int, int]] = (),
                 global_resets: bool = True):
        super().__init__(graph, params, initial_edges, bank_factory=ExactCounterBank,
                         global_resets=global_resets)


def compare_trajectories(first: LeveledEngine, second: LeveledEngine, ops: Iterable[UpdateOp]) -> Optional[int]:
    """Replay `ops` on both engines; first step whose cover or reset points differ, else None."""
    for op in ops:
        a = first.apply(op)
        b = second.apply(op)
        if [r.label for r in a.resets] != [r.label for r in b.resets] or first.cover() != second.cover():
            logger.info(f"trajectories diverge at step {a.step} ({op})")
            return a.step
    return None
