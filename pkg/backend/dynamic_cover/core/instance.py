from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from dynamic_cover.config import FLOAT_TOLERANCE
from dynamic_cover.core.errors import InfeasibleInstanceError, UpdateError


def _check_cost(owner: str, ident: int, cost: float, c_ratio: float) -> None:
    low = 1.0 / c_ratio
    if not low * (1 - FLOAT_TOLERANCE) <= cost <= 1.0 + FLOAT_TOLERANCE:
        raise InfeasibleInstanceError(f"{owner} {ident} cost {cost} outside [1/{c_ratio}, 1]")


class SetSystem:
    """
    Static family of weighted sets over a dynamic set of active elements.
    Acts as the coverer provider of the set cover engine: coverers(e) = F_e.
    """

    def __init__(self, sets: Mapping[int, Tuple[float, Sequence[int]]], c_ratio: float = 1.0,
                 max_frequency: int = 0):
        self.c_ratio = c_ratio
        self.costs: Dict[int, float] = {}
        self.members: Dict[int, Tuple[int, ...]] = {}
        containing: Dict[int, List[int]] = {}
        for sid in sorted(sets):
            cost, members = sets[sid]
            _check_cost("set", sid, cost, c_ratio)
            self.costs[sid] = float(cost)
            self.members[sid] = tuple(dict.fromkeys(members))
            for e in self.members[sid]:
                containing.setdefault(e, []).append(sid)
        self.containing: Dict[int, Tuple[int, ...]] = {e: tuple(s) for e, s in containing.items()}
        self.frequency = max((len(s) for s in self.containing.values()), default=0)
        if max_frequency and self.frequency > max_frequency:
            raise InfeasibleInstanceError(
                f"element frequency {self.frequency} exceeds declared f={max_frequency}")
        self.active: Dict[int, None] = {}

    @property
    def elements(self) -> List[int]:
        return sorted(self.containing)

    def cost(self, sid: int) -> float:
        return self.costs[sid]

    def coverer_ids(self) -> List[int]:
        return list(self.costs)

    def coverers(self, element: int) -> Tuple[int, ...]:
        return self.containing[element]

    def coverable(self, sid: int) -> Iterable[int]:
        return (e for e in self.members[sid] if e in self.active)

    def is_active(self, element: int) -> bool:
        return element in self.active

    def active_items(self) -> List[int]:
        return list(self.active)

    def activate(self, element: int) -> None:
        if element not in self.containing:
            raise UpdateError(f"unknown element {element}")
        if element in self.active:
            raise UpdateError(f"element {element} is already active")
        self.active[element] = None

    def deactivate(self, element: int) -> None:
        if element not in self.active:
            raise UpdateError(f"element {element} is not active")
        del self.active[element]


class DynGraph:
    """
    Undirected graph with fixed weighted vertices and dynamic edges.
    As a coverer provider every vertex is both item and coverer: coverers(v) = N[v].
    """

    def __init__(self, costs: Mapping[int, float], c_ratio: float = 1.0, max_degree: int = 0):
        self.c_ratio = c_ratio
        self.max_degree = max_degree
        self.costs: Dict[int, float] = {}
        for vid in sorted(costs):
            _check_cost("vertex", vid, costs[vid], c_ratio)
            self.costs[vid] = float(costs[vid])
        self.adjacency: Dict[int, Dict[int, None]] = {vid: {} for vid in self.costs}
        self.edge_count = 0

    def cost(self, vid: int) -> float:
        return self.costs[vid]

    def coverer_ids(self) -> List[int]:
        return list(self.costs)

    def neighbors(self, vid: int) -> List[int]:
        return list(self.adjacency[vid])

    def coverers(self, vid: int) -> List[int]:
        return [vid, *self.adjacency[vid]]

    def coverable(self, vid: int) -> List[int]:
        return self.coverers(vid)

    def is_active(self, vid: int) -> bool:
        return vid in self.costs

    def active_items(self) -> List[int]:
        return list(self.costs)

    def has_edge(self, u: int, v: int) -> bool:
        return u in self.adjacency and v in self.adjacency[u]

    def degree(self, vid: int) -> int:
        return len(self.adjacency[vid])

    def add_edge(self, u: int, v: int) -> None:
        for vid in (u, v):
            if vid not in self.costs:
                raise UpdateError(f"unknown vertex {vid}")
        if u == v:
            raise UpdateError(f"self-loop on vertex {u}")
        if v in self.adjacency[u]:
            raise UpdateError(f"edge ({u}, {v}) already present")
        if self.max_degree:
            for vid in (u, v):
                if self.degree(vid) >= self.max_degree:
                    raise UpdateError(f"vertex {vid} would exceed degree cap {self.max_degree}")
        self.adjacency[u][v] = None
        self.adjacency[v][u] = None
        self.edge_count += 1

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise UpdateError(f"edge ({u}, {v}) is absent")
        del self.adjacency[u][v]
        del self.adjacency[v][u]
        self.edge_count -= 1
