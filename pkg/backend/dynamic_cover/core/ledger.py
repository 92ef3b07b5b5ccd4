from __future__ import annotations

import math
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from dynamic_cover.core.errors import InvariantFault
from dynamic_cover.core.levels import BetaTable


class LevelLedger:
    """
    Per-level bookkeeping: dirt D_j, departures E_j, cost C_j, covered
    elements L_j and covering sets S_j, plus the global sums D and C.
    Every non-reset departure is also appended to a log (level, initial)
    so the oracle can rebuild the dirt counters from scratch.
    """

    def __init__(self, table: BetaTable):
        self.table = table
        self.dirt: Dict[int, float] = defaultdict(float)
        self.departures: Dict[int, int] = defaultdict(int)
        self.cost: Dict[int, float] = defaultdict(float)
        self.covered: Dict[int, int] = defaultdict(int)
        self.sets: Dict[int, int] = defaultdict(int)
        self.total_dirt = 0.0
        self.total_cost = 0.0
        self.departure_log: List[Tuple[int, bool]] = []

    # ------------------------------------------------------
    # EVENTS
    # ------------------------------------------------------
    def departure(self, level: int, initial: bool) -> None:
        self._drop_covered(level)
        self.departure_log.append((level, initial))
        if initial:
            weight = 1.0 / self.table.pow(level)
            self.dirt[level] += weight
            self.departures[level] += 1
            self.total_dirt += weight

    def vacate(self, level: int) -> None:
        """Departure caused by a reset: the dirt at that level is being cleared anyway."""
        self._drop_covered(level)

    def arrival(self, level: int) -> None:
        self.covered[level] += 1

    def set_enters(self, level: int, cost: float) -> None:
        self.cost[level] += cost
        self.sets[level] += 1
        self.total_cost += cost

    def set_leaves(self, level: int, cost: float) -> None:
        if self.sets[level] <= 0:
            raise InvariantFault(f"no covering set left at level {level}")
        self.sets[level] -= 1
        if self.sets[level] == 0:
            # snap to zero and re-sum so floating residue never lingers on empty levels
            del self.sets[level]
            self.cost.pop(level, None)
            self.total_cost = math.fsum(self.cost.values())
        else:
            self.cost[level] -= cost
            self.total_cost -= cost

    def reset_dirt(self, upto: Optional[int]) -> None:
        """Zero D_i and E_i for every i <= upto (all levels when upto is None)."""
        for level in [lv for lv in self.dirt if upto is None or lv <= upto]:
            del self.dirt[level]
            self.departures.pop(level, None)
        if upto is None:
            self.departure_log.clear()
        else:
            self.departure_log = [entry for entry in self.departure_log if entry[0] > upto]
        self.total_dirt = math.fsum(self.dirt.values())

    def discard_dirt(self) -> None:
        self.reset_dirt(None)

    def _drop_covered(self, level: int) -> None:
        if self.covered[level] <= 0:
            raise InvariantFault(f"covered count underflow at level {level}")
        self.covered[level] -= 1
        if self.covered[level] == 0:
            del self.covered[level]

    # ------------------------------------------------------
    # QUERIES
    # ------------------------------------------------------
    def is_dirty(self, eps: float, beta: float) -> bool:
        return self.total_dirt > 0 and self.total_dirt >= (eps / beta) * self.total_cost

    def set_count(self) -> int:
        return sum(self.sets.values())

    def lowest_set_level(self) -> Optional[int]:
        levels = [lv for lv, count in self.sets.items() if count > 0]
        return min(levels) if levels else None

    def snapshot(self) -> dict:
        return {
            "D": self.total_dirt,
            "C": self.total_cost,
            "dirt": {str(k): v for k, v in sorted(self.dirt.items())},
            "departures": {str(k): v for k, v in sorted(self.departures.items())},
            "cost": {str(k): v for k, v in sorted(self.cost.items())},
            "covered": {str(k): v for k, v in sorted(self.covered.items())},
            "sets": {str(k): v for k, v in sorted(self.sets.items())},
        }
