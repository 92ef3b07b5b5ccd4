from __future__ import annotations

import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

from dynamic_cover.config import FLOAT_TOLERANCE, HALF_CRITICAL_SPAN, MAX_RESETS_PER_STEP
from dynamic_cover.core.counters import CounterBank
from dynamic_cover.core.errors import InvariantFault, UpdateError
from dynamic_cover.core.greedy import greedy_cover
from dynamic_cover.core.instance import SetSystem
from dynamic_cover.core.ledger import LevelLedger
from dynamic_cover.core.levels import BetaTable, Params
from dynamic_cover.core.models import CoverEntry, EngineTotals, ResetKind, ResetReport, StepReport
from dynamic_cover.core.state import SolutionState
from dynamic_cover.data_structures.schemas import OpKind, ProblemKind, UpdateOp

logger = logging.getLogger(__name__)

BankFactory = Callable[[BetaTable], CounterBank]


class LeveledEngine:
    """
    Leveled greedy maintenance shared by set cover and dominating set.

    The provider supplies coverers(item), cost(sid), coverer_ids() and
    active_items(); everything else (levels, counters, dirt, resets) lives here.
    All mutation goes through the public update methods of the subclasses;
    every update ends with the cascade settled, the dirt bound restored and the
    global reset schedule honoured.
    """

    problem: ProblemKind = ProblemKind.SC
    # local rises one update may trigger before the reset check
    rise_limit = 1

    def __init__(self, provider, params: Params, exact_counters: bool = False,
                 bank_factory: Optional[BankFactory] = None, global_resets: bool = True):
        self.provider = provider
        self.params = params
        self.table = BetaTable(params)
        self.state = SolutionState()
        self.ledger = LevelLedger(self.table)
        if bank_factory is not None:
            self.bank = bank_factory(self.table)
        else:
            self.bank = CounterBank(self.table, exact=exact_counters)
        for sid in provider.coverer_ids():
            self.bank.register(sid, provider.cost(sid))

        self.global_resets = global_resets
        self.step_clock = 0
        self.next_global_reset_at = 1
        self.totals = EngineTotals()
        self.fresh_pairs: Dict[int, Tuple[int, int]] = {}
        self._events: Dict[int, int] = {}
        self._report: Optional[StepReport] = None

    @property
    def exact_counters(self) -> bool:
        return self.bank.exact

    # ------------------------------------------------------
    # STEP LIFECYCLE
    # ------------------------------------------------------
    def _begin(self, op_label: str) -> StepReport:
        self.step_clock += 1
        self._events = {}
        self.fresh_pairs = {}
        self._report = StepReport(step=self.step_clock, op=op_label)
        return self._report

    def _finish(self) -> StepReport:
        report = self._report
        self._stabilize(after_reset=False)
        if self.maybe_global_reset() is not None:
            self._stabilize(after_reset=True)

        if report.rises > self.rise_limit:
            self.totals.extra_rise_steps += 1
            log = logger.warning if self.exact_counters else logger.debug
            log(f"step {report.step}: {report.rises} local rises before the reset check")

        self._seal(report)
        self.totals.absorb(report)
        return report

    def _seal(self, report: StepReport) -> None:
        report.cover_cost = self.ledger.total_cost
        report.cover_size = self.state.cover_size()
        report.peak_level = self.state.peak_level()

    def _stabilize(self, after_reset: bool) -> None:
        self._settle(after_reset)
        resets = 0
        while True:
            reset = self.maybe_partial_reset()
            if reset is None:
                break
            resets += 1
            if resets > MAX_RESETS_PER_STEP:
                raise InvariantFault(f"more than {MAX_RESETS_PER_STEP} resets in step {self.step_clock}")
            self._settle(after_reset=True)
        if resets > 1:
            logger.warning(f"step {self.step_clock}: {resets} partial resets were needed")

    # ------------------------------------------------------
    # PRIMITIVES
    # ------------------------------------------------------
    def _note(self, sid: int, refreshed: Optional[int]) -> None:
        if refreshed is None:
            return
        current = self._events.get(sid)
        if current is None or refreshed > current:
            self._events[sid] = refreshed

    def _propagate(self, item: int, old: Optional[int], new: Optional[int]) -> None:
        self._report.level_changes += 1
        for sid in self.provider.coverers(item):
            self._note(sid, self.bank.record_change(sid, item, old, new))

    def _open_pair(self, sid: int, level: int) -> None:
        self.state.open_pair(sid, level)
        self.ledger.set_enters(level, self.provider.cost(sid))
        self._report.recourse += 1

    def _shift_item(self, item: int, sid: int, initial: bool) -> Tuple[Optional[int], int]:
        """Move `item` into Cov(sid); dirt is charged on the way out of its old pair."""
        old = self.state.item_level.get(item)
        if old is not None:
            _, _, was_initial = self.state.detach(item)
            self.ledger.departure(old, was_initial)
        new = self.state.attach(item, sid, initial)
        self.ledger.arrival(new)
        return old, new

    def change_level_cascade(self, item: int, old: Optional[int], new: Optional[int]) -> None:
        self._propagate(item, old, new)
        self._settle(after_reset=False)

    def _settle(self, after_reset: bool = False) -> None:
        limit = (len(self.bank.counters) + len(self.state.owner) + 1) * (2 * self.table.radius + 2)
        rounds = 0
        while True:
            candidate = self.bank.highest_pd_candidate(self._events, self.state.level_of)
            if candidate is None:
                return
            sid, j = candidate
            if self.local_rise(sid, j):
                if after_reset:
                    self._report.reset_rises += 1
                else:
                    self._report.rises += 1
            rounds += 1
            if rounds > limit:
                raise InvariantFault(f"rise cascade did not settle in step {self.step_clock}")

    # ------------------------------------------------------
    # LOCAL RISE
    # ------------------------------------------------------
    def local_rise(self, sid: int, j: int) -> bool:
        new_level = j + 1
        cost = self.provider.cost(sid)
        members = self.bank.members_below(sid, new_level)
        if not members or not self.table.reaches(len(members), cost, new_level):
            # counter slack flagged a set that is no longer PD
            log = logger.warning if self.exact_counters else logger.debug
            log(f"stale PD skipped: set {sid} at level {j} ({len(members)} members below {new_level})")
            self._report.skipped_rises += 1
            self._note(sid, self.bank.refresh_all(sid))
            return False

        if self.state.is_covering(sid):
            old_level = self.state.move_pair(sid, new_level)
            self.ledger.set_leaves(old_level, cost)
            self.ledger.set_enters(new_level, cost)
        else:
            self._open_pair(sid, new_level)

        for item in members:
            old, new = self._shift_item(item, sid, initial=True)
            self._propagate(item, old, new)
        self.fresh_pairs[sid] = (new_level, len(members))
        logger.debug(f"local rise: set {sid} -> level {new_level} with {len(members)} items")
        return True

    # ------------------------------------------------------
    # RESETS
    # ------------------------------------------------------
    def maybe_partial_reset(self) -> Optional[ResetReport]:
        params = self.params
        if not self.ledger.is_dirty(params.eps, params.beta):
            return None
        b = self.ledger.lowest_set_level()
        if b is None:
            logger.debug("dirt with no covering set discarded")
            self.ledger.discard_dirt()
            return None
        i_crit = self.find_highest_half_critical(b)
        if i_crit is None:
            raise InvariantFault(
                f"dirty system (D={self.ledger.total_dirt}, C={self.ledger.total_cost}) "
                f"without a half-critical level")
        return self.partial_reset(i_crit)

    def find_highest_half_critical(self, b: int) -> Optional[int]:
        threshold = self.params.eps / (2 * self.params.beta)
        span = HALF_CRITICAL_SPAN * max(self.table.ceil_log(self.params.n_cap), 1)
        top = min(b + span, self.table.max_level)
        found = self._scan_half_critical(b, top, threshold)
        if found is None:
            levels = list(self.ledger.dirt) + list(self.ledger.sets)
            highest = max(levels) if levels else b
            if highest > top:
                logger.warning(f"no half-critical level in [{b}, {top}]; widening the scan to {highest}")
                found = self._scan_half_critical(b, highest, threshold)
        return found

    def _scan_half_critical(self, b: int, top: int, threshold: float) -> Optional[int]:
        ledger = self.ledger
        below = math.fsum(d for lv, d in ledger.dirt.items() if lv < b)

        def dirt_at(j: int) -> float:
            return ledger.dirt.get(j, 0.0) + (below if j == b else 0.0)

        def cost_at(j: int) -> float:
            return ledger.cost.get(j, 0.0)

        def short(d: float, c: float) -> bool:
            return d < threshold * c * (1 - FLOAT_TOLERANCE)

        half_dirty = [i for i in range(b, top + 1) if dirt_at(i) > 0 and not short(dirt_at(i), cost_at(i))]
        # dirty ranges keyed by their upper bound: upper -> (lower, D_{lower+1}^upper, C_{lower+1}^upper)
        ranges: Dict[int, Tuple[int, float, float]] = {}
        best: Optional[int] = None
        for i in half_dirty:
            d = c = 0.0
            j = i
            failed = False
            while j >= b:
                if j in ranges:
                    lower, rd, rc = ranges.pop(j)
                    d += rd
                    c += rc
                    j = lower
                    continue
                d += dirt_at(j)
                c += cost_at(j)
                if short(d, c):
                    ranges[i] = (j, d - dirt_at(j), c - cost_at(j))
                    failed = True
                    break
                j -= 1
            if not failed:
                ranges[i] = (b - 1, d, c)
                best = i
        return best

    def partial_reset(self, i_crit: Optional[int]) -> ResetReport:
        """Evict every pair at level <= i_crit and re-cover its items greedily (all levels when None)."""
        kind = ResetKind.GLOBAL if i_crit is None else ResetKind.PARTIAL
        if i_crit is None:
            items = sorted(self.provider.active_items())
        else:
            items = self.state.items_upto(i_crit)
        evicted = self.state.sets_upto(i_crit)

        candidates: Dict[int, float] = {}
        for item in items:
            for sid in self.provider.coverers(item):
                if sid not in candidates and (i_crit is None or self.state.level_of(sid) <= i_crit):
                    candidates[sid] = self.provider.cost(sid)

        old_levels: Dict[int, int] = {}
        for item in items:
            if item in self.state.owner:
                _, level, _ = self.state.detach(item)
                self.ledger.vacate(level)
                old_levels[item] = level
        for sid in evicted:
            level = self.state.close_pair(sid)
            self.ledger.set_leaves(level, self.provider.cost(sid))
            self._report.recourse += 1
        self.ledger.reset_dirt(i_crit)

        report = ResetReport(kind, i_crit, u_tilde_size=len(items), f_tilde_size=len(candidates),
                             sets_evicted=list(evicted))
        try:
            picks = greedy_cover(self.table, items, candidates, self.provider.coverers)
        except Exception as exc:
            raise InvariantFault(f"reset at {i_crit} could not re-cover its elements: {exc}") from exc

        for pick in picks:
            if i_crit is not None and pick.level > i_crit + 1:
                logger.warning(f"reset at {i_crit} placed set {pick.set_id} at level {pick.level}")
            self._open_pair(pick.set_id, pick.level)
            for item in pick.members:
                level = self.state.attach(item, pick.set_id, True)
                self.ledger.arrival(level)
                self._propagate(item, old_levels.get(item), level)
            self.fresh_pairs[pick.set_id] = (pick.level, len(pick.members))
            report.pairs_created.append((pick.set_id, pick.level, len(pick.members)))

        for sid in sorted(set(candidates).union(evicted)):
            self._note(sid, self.bank.refresh_all(sid))

        self._report.resets.append(report)
        logger.debug(f"{kind.value} reset up to {'ALL' if i_crit is None else i_crit}: "
                     f"|U~|={len(items)} |F~|={len(candidates)} created={len(picks)}")
        return report

    def maybe_global_reset(self) -> Optional[ResetReport]:
        if not self.global_resets or self.step_clock < self.next_global_reset_at:
            return None
        report = self.partial_reset(None)
        self.next_global_reset_at = self.step_clock + max(len(self.provider.active_items()), 1)
        return report

    # ------------------------------------------------------
    # SNAPSHOTS
    # ------------------------------------------------------
    def cover(self) -> List[CoverEntry]:
        return [
            CoverEntry(sid, self.provider.cost(sid), level, tuple(sorted(self.state.cov_members[sid])))
            for sid, level in sorted(self.state.cov_level.items())
        ]

    def cover_cost(self) -> float:
        return self.ledger.total_cost

    def dump_state(self) -> dict:
        return {
            "problem": self.problem.value,
            "step": self.step_clock,
            "next_global_reset_at": self.next_global_reset_at,
            "cover": [
                {"set_id": e.set_id, "cost": e.cost, "level": e.level, "members": list(e.members)}
                for e in self.cover()
            ],
            "ledger": self.ledger.snapshot(),
            "totals": vars(self.totals).copy(),
        }

    def apply(self, op: UpdateOp) -> StepReport:
        raise NotImplementedError


class SetCoverEngine(LeveledEngine):
    """Dynamic weighted set cover under element insertions and deletions."""

    problem = ProblemKind.SC

    def __init__(self, system: SetSystem, params: Params, exact_counters: bool = False,
                 bank_factory: Optional[BankFactory] = None, global_resets: bool = True):
        super().__init__(system, params, exact_counters, bank_factory, global_resets)
        self.system = system

    def insert(self, element: int) -> StepReport:
        self.system.activate(element)
        self._begin(f"+ {element}")
        coverers = self.system.coverers(element)
        covering = [sid for sid in coverers if self.state.is_covering(sid)]
        if covering:
            host = max(covering, key=lambda sid: (self.state.level_of(sid), -sid))
            old, new = self._shift_item(element, host, initial=False)
        else:
            host = min(coverers, key=lambda sid: (self.system.cost(sid), sid))
            self._open_pair(host, self.table.level_of_ratio(1, self.system.cost(host)))
            old, new = self._shift_item(element, host, initial=True)
            self.fresh_pairs[host] = (new, 1)
        self.change_level_cascade(element, old, new)
        return self._finish()

    def delete(self, element: int) -> StepReport:
        self.system.deactivate(element)
        self._begin(f"- {element}")
        _, level, initial = self.state.detach(element)
        self.ledger.departure(level, initial)
        self.change_level_cascade(element, level, None)
        return self._finish()

    def apply(self, op: UpdateOp) -> StepReport:
        if len(op.items) != 1:
            raise UpdateError(f"set cover updates take one element, got {op}")
        if op.kind is OpKind.INSERT:
            return self.insert(op.items[0])
        return self.delete(op.items[0])
