from __future__ import annotations

import logging
from typing import Iterable, Optional, Tuple

from dynamic_cover.core.engine import BankFactory, LeveledEngine
from dynamic_cover.core.errors import InvariantFault, UpdateError
from dynamic_cover.core.instance import DynGraph
from dynamic_cover.core.levels import Params
from dynamic_cover.core.models import StepReport
from dynamic_cover.data_structures.schemas import OpKind, ProblemKind, UpdateOp

logger = logging.getLogger(__name__)


class DominatingSetEngine(LeveledEngine):
    """
    Dynamic weighted dominating set under edge insertions and deletions.
    Every vertex is an item to dominate and a coverer of its closed neighbourhood.
    """

    problem = ProblemKind.DS
    rise_limit = 2

    def __init__(self, graph: DynGraph, params: Params, initial_edges: Iterable[Tuple[int, int]] = (),
                 exact_counters: bool = False, bank_factory: Optional[BankFactory] = None,
                 global_resets: bool = True):
        super().__init__(graph, params, exact_counters, bank_factory, global_resets)
        self.graph = graph
        for u, v in initial_edges:
            graph.add_edge(u, v)
        self.bootstrap = self._bootstrap()

    def _bootstrap(self) -> StepReport:
        # step 0: a global reset over the initial graph
        self._events = {}
        self.fresh_pairs = {}
        self._report = StepReport(step=0, op="init")
        self.partial_reset(None)
        self._stabilize(after_reset=True)
        self.next_global_reset_at = max(len(self.graph.costs), 1)
        self._seal(self._report)
        logger.debug(f"initial dominating set: {self._report.cover_size} vertices, cost {self._report.cover_cost}")
        return self._report

    # ------------------------------------------------------
    # UPDATES
    # ------------------------------------------------------
    def insert_edge(self, u: int, v: int) -> StepReport:
        self.graph.add_edge(u, v)
        self._begin(f"+ {u} {v}")
        item_u = self.state.item_level[u]
        item_v = self.state.item_level[v]
        self._note(u, self.bank.record_change(u, v, None, item_v))
        self._note(v, self.bank.record_change(v, u, None, item_u))

        dom_u = self.state.level_of(u)
        dom_v = self.state.level_of(v)
        if dom_u > item_v and dom_v > item_u:
            raise InvariantFault(f"edge ({u}, {v}) breaks the domination order at both endpoints")
        if dom_u > item_v:
            self._dominate(v, u)
        elif dom_v > item_u:
            self._dominate(u, v)
        self._settle()
        return self._finish()

    def delete_edge(self, u: int, v: int) -> StepReport:
        if not self.graph.has_edge(u, v):
            raise UpdateError(f"edge ({u}, {v}) is absent")
        self._begin(f"- {u} {v}")
        orphans = [(x, y) for x, y in ((u, v), (v, u)) if self.state.owner.get(x) == y]
        self.graph.remove_edge(u, v)
        self._note(u, self.bank.record_change(u, v, self.state.item_level[v], None))
        self._note(v, self.bank.record_change(v, u, self.state.item_level[u], None))

        for vertex, former in orphans:
            self._reassign(vertex, former)
        self._settle()
        return self._finish()

    def _dominate(self, vertex: int, dominator: int) -> None:
        old, new = self._shift_item(vertex, dominator, initial=False)
        self._report.domination_moves += 1
        self.change_level_cascade(vertex, old, new)

    def _reassign(self, vertex: int, former: int) -> None:
        covering = [z for z in self.graph.coverers(vertex) if self.state.is_covering(z)]
        if covering:
            target = max(covering, key=lambda z: (self.state.level_of(z), -z))
            old, new = self._shift_item(vertex, target, initial=False)
        else:
            level = self.table.level_of_ratio(1, self.graph.cost(vertex))
            self._open_pair(vertex, level)
            old, new = self._shift_item(vertex, vertex, initial=True)
            self.fresh_pairs[vertex] = (level, 1)
        self._report.domination_moves += 1
        self._note(former, self.bank.refresh_all(former))
        self.change_level_cascade(vertex, old, new)

    def _finish(self) -> StepReport:
        report = super()._finish()
        if report.domination_moves > 1:
            logger.warning(f"step {report.step}: {report.domination_moves} dominated-level moves in one update")
        return report

    def apply(self, op: UpdateOp) -> StepReport:
        if len(op.items) != 2:
            raise UpdateError(f"dominating set updates take an edge, got {op}")
        u, v = op.items
        if op.kind is OpKind.INSERT:
            return self.insert_edge(u, v)
        return self.delete_edge(u, v)
