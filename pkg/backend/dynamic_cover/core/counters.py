from __future__ import annotations

import logging
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from dynamic_cover.core.errors import InvariantFault
from dynamic_cover.core.levels import BetaTable

logger = logging.getLogger(__name__)


def zone_partition(window_size: int, eps: float, table: BetaTable, shift: int = 0) -> List[range]:
    """
    Split relative window levels into zones Z_1, Z_2, ...
    Z_1 = 0..floor(log_b(2/eps)); Z_i = floor(log_b(2^(i-1)/eps))+1 .. floor(log_b(2^i/eps)).
    Levels of Z_i are refreshed every 2^(i-1) increments of the change counter.
    `shift` moves every boundary up (used when the window starts at level -1).
    Empty zones stay in the list so that zone i always matches bit i.
    """
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    zones: List[range] = []
    start = 0
    i = 1
    while start < window_size:
        end = min(table.floor_log((2 ** i) / eps) + shift, window_size - 1)
        zones.append(range(start, end + 1))
        start = max(start, end + 1)
        i += 1
        if i > 64:
            zones.append(range(start, window_size))
            break
    return zones


class ZonePlan:
    """Zone boundaries for one window shape; shared by all sets with the same window."""

    def __init__(self, window_size: int, eps: float, table: BetaTable, shift: int):
        self.zones = zone_partition(window_size, eps, table, shift)
        self.window_size = window_size
        self._ends: List[int] = []
        last = -1
        for zone in self.zones:
            if len(zone):
                last = zone[-1]
            self._ends.append(last)

    def refresh_end(self, q: int) -> int:
        """Highest relative index refreshed when zones Z_1..Z_q are due."""
        if q > len(self._ends):
            return self.window_size - 1
        return self._ends[q - 1]


class SetCounters:
    """
    Counters of one coverer S over its relevant window [j_min, j_max]:
    exact per-level counts N^j(S), lazily refreshed cumulative counts
    N~_j(S) (elements of S below level j), and the change counter C_S.
    """

    __slots__ = ("set_id", "cost", "j_min", "j_max", "exact", "below", "overflow",
                 "cumulative", "change_count", "members", "plan")

    def __init__(self, set_id: int, cost: float, j_min: int, j_max: int, plan: ZonePlan):
        self.set_id = set_id
        self.cost = cost
        self.j_min = j_min
        self.j_max = j_max
        size = j_max - j_min + 1
        self.exact = [0] * size
        self.below = 0
        self.overflow = 0
        # cumulative[k] = N~ at level j_min + k
        self.cumulative = [0] * size
        self.change_count = 0
        self.members: Dict[int, Dict[int, None]] = {}
        self.plan = plan

    def _bump(self, level: int, delta: int) -> None:
        if level < self.j_min:
            self.below += delta
            value = self.below
        elif level > self.j_max:
            self.overflow += delta
            value = self.overflow
        else:
            idx = level - self.j_min
            self.exact[idx] += delta
            value = self.exact[idx]
        if value < 0:
            raise InvariantFault(f"counter underflow for set {self.set_id} at level {level}")

    def move(self, item: int, old: Optional[int], new: Optional[int]) -> None:
        if old is not None:
            self._bump(old, -1)
            bucket = self.members.get(old)
            if bucket is None or item not in bucket:
                raise InvariantFault(f"item {item} not tracked by set {self.set_id} at level {old}")
            del bucket[item]
            if not bucket:
                del self.members[old]
        if new is not None:
            self._bump(new, 1)
            self.members.setdefault(new, {})[item] = None

    def refresh(self, end: int) -> int:
        """Recurrence N~_j = N~_{j-1} + N^{j-1} up to relative index `end`."""
        cumulative = self.cumulative
        cumulative[0] = self.below
        for k in range(1, end + 1):
            cumulative[k] = cumulative[k - 1] + self.exact[k - 1]
        return end + 1

    def exact_below(self, level: int) -> int:
        return sum(len(bucket) for lv, bucket in self.members.items() if lv < level)

    def members_below(self, level: int) -> List[int]:
        out: List[int] = []
        for lv in sorted(self.members):
            if lv >= level:
                break
            out.extend(self.members[lv])
        return sorted(out)


class CounterBank:
    """
    All SetCounters of an engine. In exact mode every change refreshes the
    whole window, so N~_j(S) = N_j(S) at all times.
    """

    def __init__(self, table: BetaTable, exact: bool = False):
        self.table = table
        self.eps = table.params.eps
        self.exact = exact
        self.counters: Dict[int, SetCounters] = {}
        self.refreshed_entries = 0
        self.changes = 0
        self._plans: Dict[Tuple[int, int], ZonePlan] = {}

    def register(self, sid: int, cost: float) -> SetCounters:
        j_min, j_max = self.table.relevant_window(cost)
        size = j_max - j_min + 1
        shift = 1 if j_min < 0 else 0
        key = (size, shift)
        plan = self._plans.get(key)
        if plan is None:
            plan = ZonePlan(size, self.eps, self.table, shift)
            self._plans[key] = plan
        counters = SetCounters(sid, cost, j_min, j_max, plan)
        self.counters[sid] = counters
        return counters

    def window(self, sid: int) -> Tuple[int, int]:
        c = self.counters[sid]
        return c.j_min, c.j_max

    def record_change(self, sid: int, item: int, old: Optional[int], new: Optional[int]) -> Optional[int]:
        """Apply one level change of `item` as seen by set `sid`; returns the highest refreshed level."""
        if old is None and new is None:
            return None
        c = self.counters[sid]
        c.move(item, old, new)
        previous = c.change_count
        c.change_count = previous + 1
        self.changes += 1
        if self.exact:
            end = len(c.exact) - 1
        else:
            q = (previous ^ (previous + 1)).bit_length()
            end = c.plan.refresh_end(q)
        self.refreshed_entries += c.refresh(end)
        return c.j_min + end

    def refresh_all(self, sid: int) -> int:
        c = self.counters[sid]
        end = len(c.exact) - 1
        self.refreshed_entries += c.refresh(end)
        return c.j_max

    def cumulative(self, sid: int, j: int) -> int:
        c = self.counters[sid]
        if j < c.j_min or j > c.j_max:
            raise InvariantFault(f"level {j} outside window of set {sid}")
        return c.cumulative[j - c.j_min]

    def exact_below(self, sid: int, level: int) -> int:
        return self.counters[sid].exact_below(level)

    def members_below(self, sid: int, level: int) -> List[int]:
        return self.counters[sid].members_below(level)

    def is_j_pd(self, sid: int, j: int, l_cov: int) -> bool:
        c = self.counters[sid]
        if j <= l_cov or not c.j_min <= j <= c.j_max:
            return False
        return self.table.reaches(self.cumulative(sid, j), c.cost, j + 1)

    def highest_pd_candidate(self, events: Mapping[int, int],
                             level_of: Callable[[int], int]) -> Optional[Tuple[int, int]]:
        """Highest (j, lowest set id) PD pair among levels refreshed this step."""
        best: Optional[Tuple[int, int]] = None
        for sid, top in events.items():
            c = self.counters[sid]
            l_cov = level_of(sid)
            floor = max(l_cov + 1, c.j_min)
            if best is not None:
                floor = max(floor, best[1])
            for j in range(min(top, c.j_max), floor - 1, -1):
                if self.is_j_pd(sid, j, l_cov):
                    if best is None or j > best[1] or (j == best[1] and sid < best[0]):
                        best = (sid, j)
                    break
        return best
