from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional

from dynamic_cover.core.errors import InfeasibleInstanceError, InvariantFault
from dynamic_cover.core.levels import BetaTable

logger = logging.getLogger(__name__)

CovererLookup = Callable[[int], Iterable[int]]


@dataclass
class GreedyPick:
    set_id: int
    members: List[int] = field(default_factory=list)
    level: int = 0


class GreedyArena:
    """
    Static weighted greedy over a residual universe, bucketed by ratio level.
    Each candidate sits in the heap of level floor(log_b(|S n U|/c(S)));
    stale heap entries are dropped on pop. The top pointer only moves down.
    """

    def __init__(self, table: BetaTable, universe: Iterable[int],
                 candidates: Mapping[int, float], coverers: CovererLookup):
        self.table = table
        self.costs = dict(candidates)
        self.coverers = coverers
        self.uncovered: Dict[int, None] = dict.fromkeys(sorted(universe))
        self.live: Dict[int, Dict[int, None]] = {sid: {} for sid in self.costs}
        for e in self.uncovered:
            found = False
            for sid in coverers(e):
                if sid in self.live:
                    self.live[sid][e] = None
                    found = True
            if not found:
                raise InfeasibleInstanceError(f"infeasible residual instance: element {e} has no candidate")

        self.level_of: Dict[int, Optional[int]] = {}
        self.buckets: Dict[int, List[int]] = {}
        self.top: Optional[int] = None
        self.bottom: Optional[int] = None
        for sid, members in self.live.items():
            if members:
                self._push(sid, self.table.level_of_ratio(len(members), self.costs[sid]))
            else:
                self.level_of[sid] = None
        self.top = max(self.buckets) if self.buckets else None

    def _push(self, sid: int, level: int) -> None:
        self.level_of[sid] = level
        heapq.heappush(self.buckets.setdefault(level, []), sid)
        if self.bottom is None or level < self.bottom:
            self.bottom = level

    def _pop_top(self) -> Optional[int]:
        while self.top is not None and self.bottom is not None and self.top >= self.bottom:
            heap = self.buckets.get(self.top)
            while heap:
                sid = heapq.heappop(heap)
                if self.level_of.get(sid) == self.top:
                    return sid
            self.top -= 1
        return None

    def run(self) -> List[GreedyPick]:
        picks: List[GreedyPick] = []
        while self.uncovered:
            previous_top = self.top
            sid = self._pop_top()
            if sid is None:
                raise InfeasibleInstanceError(
                    f"infeasible residual instance: {len(self.uncovered)} elements left")
            if previous_top is not None and self.top > previous_top:
                raise InvariantFault("greedy level pointer moved up")
            level = self.level_of[sid]
            members = sorted(self.live[sid])
            picks.append(GreedyPick(sid, members, level))
            self.level_of[sid] = None
            for e in members:
                del self.uncovered[e]
                for other in self.coverers(e):
                    if other == sid or other not in self.live:
                        continue
                    bucket = self.live[other]
                    if e not in bucket:
                        continue
                    del bucket[e]
                    old_level = self.level_of.get(other)
                    if old_level is None:
                        continue
                    if bucket:
                        new_level = self.table.level_of_ratio(len(bucket), self.costs[other])
                        if new_level != old_level:
                            self._push(other, new_level)
                    else:
                        self.level_of[other] = None
            self.live[sid] = {}
        return picks


def greedy_cover(table: BetaTable, universe: Iterable[int], candidates: Mapping[int, float],
                 coverers: CovererLookup) -> List[GreedyPick]:
    """Re-cover `universe` from `candidates` with the bucketed greedy."""
    return GreedyArena(table, universe, candidates, coverers).run()


def _live_sets(universe: Iterable[int], candidates: Mapping[int, float],
               coverers: CovererLookup) -> Dict[int, Dict[int, None]]:
    live: Dict[int, Dict[int, None]] = {sid: {} for sid in sorted(candidates)}
    for e in sorted(universe):
        found = False
        for sid in coverers(e):
            if sid in live:
                live[sid][e] = None
                found = True
        if not found:
            raise InfeasibleInstanceError(f"infeasible residual instance: element {e} has no candidate")
    return live


def _strip(live: Dict[int, Dict[int, None]], chosen: int) -> List[int]:
    members = sorted(live.pop(chosen))
    taken = set(members)
    for other in live.values():
        for e in taken.intersection(other):
            del other[e]
    return members


def naive_bucket_cover(table: BetaTable, universe: Iterable[int], candidates: Mapping[int, float],
                       coverers: CovererLookup) -> List[GreedyPick]:
    """Reference for the bucket queue: every round recompute levels, take max level then lowest id."""
    live = _live_sets(universe, candidates, coverers)
    picks: List[GreedyPick] = []
    while any(live.values()):
        best = None
        for sid, members in live.items():
            if not members:
                continue
            level = table.level_of_ratio(len(members), candidates[sid])
            if best is None or level > best[1]:
                best = (sid, level)
        sid, level = best
        picks.append(GreedyPick(sid, _strip(live, sid), level))
    return picks


def exact_ratio_cover(table: BetaTable, universe: Iterable[int], candidates: Mapping[int, float],
                      coverers: CovererLookup) -> List[GreedyPick]:
    """Classical greedy: maximum exact |S n U|/c(S), ties to the lowest id."""
    live = _live_sets(universe, candidates, coverers)
    picks: List[GreedyPick] = []
    while any(live.values()):
        best = None
        for sid, members in live.items():
            if not members:
                continue
            # compare count/cost without dividing: a/ca > b/cb  <=>  a*cb > b*ca
            if best is None or len(members) * candidates[best] > len(live[best]) * candidates[sid]:
                best = sid
        count = len(live[best])
        picks.append(GreedyPick(best, _strip(live, best), table.level_of_ratio(count, candidates[best])))
    return picks
