from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from dynamic_cover.core.errors import InvariantFault


class SolutionState:
    """
    The extended solution: covering pairs (S, Cov(S)) with their levels and
    the level of every covered item. Items are elements (set cover) or
    vertices (dominating set); coverers are sets or vertices.

    Registries are dicts used as ordered sets: O(1) insert and keyed removal.
    """

    def __init__(self):
        self.cov_level: Dict[int, int] = {}
        self.cov_members: Dict[int, Dict[int, bool]] = {}
        self.item_level: Dict[int, int] = {}
        self.owner: Dict[int, int] = {}
        self.sets_at: Dict[int, Dict[int, None]] = defaultdict(dict)
        self.items_at: Dict[int, Dict[int, None]] = defaultdict(dict)

    # ------------------------------------------------------
    # PAIRS
    # ------------------------------------------------------
    def level_of(self, sid: int) -> int:
        return self.cov_level.get(sid, -1)

    def is_covering(self, sid: int) -> bool:
        return sid in self.cov_level

    def open_pair(self, sid: int, level: int) -> None:
        if sid in self.cov_level:
            raise InvariantFault(f"set {sid} is already covering")
        self.cov_level[sid] = level
        self.cov_members[sid] = {}
        self.sets_at[level][sid] = None

    def move_pair(self, sid: int, level: int) -> int:
        """Relevel a covering pair; its members keep their own levels until moved."""
        old = self.cov_level[sid]
        self._unregister_set(sid, old)
        self.cov_level[sid] = level
        self.sets_at[level][sid] = None
        return old

    def close_pair(self, sid: int) -> int:
        if self.cov_members.get(sid):
            raise InvariantFault(f"set {sid} closed with members still attached")
        level = self.cov_level.pop(sid)
        del self.cov_members[sid]
        self._unregister_set(sid, level)
        return level

    def _unregister_set(self, sid: int, level: int) -> None:
        del self.sets_at[level][sid]
        if not self.sets_at[level]:
            del self.sets_at[level]

    # ------------------------------------------------------
    # ITEMS
    # ------------------------------------------------------
    def attach(self, item: int, sid: int, initial: bool) -> int:
        if item in self.owner:
            raise InvariantFault(f"item {item} attached twice")
        level = self.cov_level[sid]
        self.cov_members[sid][item] = initial
        self.owner[item] = sid
        self.item_level[item] = level
        self.items_at[level][item] = None
        return level

    def detach(self, item: int) -> Tuple[int, int, bool]:
        sid = self.owner.pop(item)
        level = self.item_level.pop(item)
        initial = self.cov_members[sid].pop(item)
        del self.items_at[level][item]
        if not self.items_at[level]:
            del self.items_at[level]
        return sid, level, initial

    # ------------------------------------------------------
    # QUERIES
    # ------------------------------------------------------
    def items_upto(self, level: Optional[int]) -> List[int]:
        out: List[int] = []
        for lv in sorted(self.items_at):
            if level is not None and lv > level:
                break
            out.extend(self.items_at[lv])
        return out

    def sets_upto(self, level: Optional[int]) -> List[int]:
        out: List[int] = []
        for lv in sorted(self.sets_at):
            if level is not None and lv > level:
                break
            out.extend(self.sets_at[lv])
        return out

    def peak_level(self) -> int:
        return max(self.sets_at) if self.sets_at else -1

    def cover_size(self) -> int:
        return len(self.cov_level)
