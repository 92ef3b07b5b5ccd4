from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple


class ResetKind(str, Enum):
    PARTIAL = "partial"
    GLOBAL = "global"


# ------------------------------------------------------
# RESETS
# ------------------------------------------------------
@dataclass
class ResetReport:
    kind: ResetKind
    i_crit: Optional[int]  # None means every level (global reset)
    u_tilde_size: int = 0
    f_tilde_size: int = 0
    pairs_created: List[Tuple[int, int, int]] = field(default_factory=list)  # (set_id, level, |Cov|)
    sets_evicted: List[int] = field(default_factory=list)

    @property
    def label(self) -> str:
        level = "ALL" if self.i_crit is None else str(self.i_crit)
        return f"{self.kind.value}:{level}:{self.u_tilde_size}"


# ------------------------------------------------------
# STEP
# ------------------------------------------------------
@dataclass
class StepReport:
    """Instrumentation of one public update."""
    step: int
    op: str
    level_changes: int = 0
    recourse: int = 0
    rises: int = 0
    reset_rises: int = 0
    skipped_rises: int = 0
    domination_moves: int = 0
    resets: List[ResetReport] = field(default_factory=list)
    cover_cost: float = 0.0
    cover_size: int = 0
    peak_level: int = -1


@dataclass
class EngineTotals:
    ops: int = 0
    level_changes: int = 0
    recourse: int = 0
    rises: int = 0
    reset_rises: int = 0
    skipped_rises: int = 0
    extra_rise_steps: int = 0
    partial_resets: int = 0
    global_resets: int = 0
    max_cover_size: int = 0
    peak_level: int = -1

    def absorb(self, report: StepReport) -> None:
        self.ops += 1
        self.level_changes += report.level_changes
        self.recourse += report.recourse
        self.rises += report.rises
        self.reset_rises += report.reset_rises
        self.skipped_rises += report.skipped_rises
        for reset in report.resets:
            if reset.kind is ResetKind.GLOBAL:
                self.global_resets += 1
            else:
                self.partial_resets += 1
        self.max_cover_size = max(self.max_cover_size, report.cover_size)
        self.peak_level = max(self.peak_level, report.peak_level)


@dataclass(frozen=True)
class CoverEntry:
    set_id: int
    cost: float
    level: int
    members: Tuple[int, ...]
