import logging
from typing import Optional

from dynamic_cover.config import DEFAULT_EPS, FLOAT_TOLERANCE
from dynamic_cover.core.ds import DominatingSetEngine
from dynamic_cover.core.engine import BankFactory, LeveledEngine, SetCoverEngine
from dynamic_cover.core.instance import DynGraph, SetSystem
from dynamic_cover.core.levels import Params
from dynamic_cover.data_structures.schemas import ProblemKind, Workload

logger = logging.getLogger(__name__)


def resolve_params(workload: Workload, eps: Optional[float] = None) -> Params:
    """
    eps from the caller wins; otherwise the workload's hint, otherwise DEFAULT_EPS.
    Only a lower-bound hint may leave the strict eps range (beta = sqrt 2).
    """
    strict = True
    if eps is None:
        if workload.eps_hint > 0:
            eps = workload.eps_hint
            strict = not workload.is_lower_bound
        else:
            eps = DEFAULT_EPS
    elif workload.is_lower_bound and workload.eps_hint > 0 and abs(eps - workload.eps_hint) > FLOAT_TOLERANCE:
        logger.warning(f"{workload.tag} is tuned for beta={1 + workload.eps_hint:.6f}; "
                       f"replaying with beta={1 + eps:.6f}")
    return Params(eps=eps, n_cap=max(workload.n, 1), c_ratio=workload.c_ratio, strict=strict)


def build_engine(workload: Workload, eps: Optional[float] = None, exact_counters: bool = False,
                 global_resets: bool = True, bank_factory: Optional[BankFactory] = None) -> LeveledEngine:
    params = resolve_params(workload, eps)
    if workload.problem is ProblemKind.SC:
        system = SetSystem(workload.set_map(), c_ratio=workload.c_ratio, max_frequency=workload.f)
        engine: LeveledEngine = SetCoverEngine(system, params, exact_counters, bank_factory, global_resets)
    else:
        graph = DynGraph(workload.cost_map(), c_ratio=workload.c_ratio, max_degree=workload.delta)
        engine = DominatingSetEngine(graph, params, workload.edges, exact_counters, bank_factory, global_resets)
    logger.debug(f"engine for {workload.tag or workload.problem.value}: eps={params.eps} "
                 f"n_cap={params.n_cap} C={params.c_ratio} levels=+-{engine.table.radius}")
    return engine

