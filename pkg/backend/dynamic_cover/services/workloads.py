"""
Deterministic workload generators.

All randomness comes from numpy's default_rng (PCG64) seeded with the caller's
seed, so the same parameters always produce byte-identical workload files.
"""
import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from dynamic_cover.config import LOWER_BOUND_EPS
from dynamic_cover.core.errors import ConfigError
from dynamic_cover.data_structures.schemas import (
    OpKind, ProblemKind, SetRecord, UpdateOp, VertexRecord, Workload,
)

logger = logging.getLogger(__name__)


def _log_uniform_costs(rng: np.random.Generator, count: int, c_ratio: float) -> List[float]:
    if c_ratio == 1.0:
        return [1.0] * count
    exponents = rng.uniform(-math.log(c_ratio), 0.0, size=count)
    # clip keeps exp() rounding inside [1/C, 1]
    return [float(x) for x in np.clip(np.exp(exponents), 1.0 / c_ratio, 1.0)]


def _take(rng: np.random.Generator, pool: List[int]) -> int:
    """Remove and return a uniformly chosen entry (swap-pop keeps it O(1))."""
    idx = int(rng.integers(len(pool)))
    pool[idx], pool[-1] = pool[-1], pool[idx]
    return pool.pop()


# ------------------------------------------------------
# RANDOM CHURN
# ------------------------------------------------------
def random_sc(n: int, m: int, f: int, c_ratio: float, op_count: int, churn: float, seed: int) -> Workload:
    """
    Random set system: every element joins 1..f distinct sets chosen uniformly,
    costs log-uniform in [1/C, 1]. Ops insert an inactive element or, with
    probability `churn`, delete an active one. With churn 0 the sequence is
    pure insertion and stops once every element is active.
    """
    if n < 1 or m < 1 or f < 1:
        raise ConfigError(f"random_sc needs positive n, m, f (got n={n}, m={m}, f={f})")
    if f > m:
        raise ConfigError(f"frequency f={f} exceeds the number of sets m={m}")
    if m * f < n:
        raise ConfigError(f"m*f={m * f} < n={n}: too few set slots for the elements")
    if not 0.0 <= churn <= 1.0:
        raise ConfigError(f"churn must lie in [0, 1], got {churn}")
    if c_ratio < 1.0:
        raise ConfigError(f"cost ratio must be >= 1, got {c_ratio}")

    rng = np.random.default_rng(seed)
    costs = _log_uniform_costs(rng, m, c_ratio)
    members: Dict[int, List[int]] = {sid: [] for sid in range(1, m + 1)}
    for e in range(1, n + 1):
        k = int(rng.integers(1, f + 1))
        for sid in sorted(int(s) + 1 for s in rng.choice(m, size=k, replace=False)):
            members[sid].append(e)

    if churn == 0.0:
        op_count = min(op_count, n)
    inactive = list(range(1, n + 1))
    active: List[int] = []
    ops: List[UpdateOp] = []
    for _ in range(op_count):
        delete = bool(active) and (not inactive or rng.random() < churn)
        if delete:
            e = _take(rng, active)
            inactive.append(e)
            ops.append(UpdateOp(OpKind.DELETE, (e,)))
        else:
            e = _take(rng, inactive)
            active.append(e)
            ops.append(UpdateOp(OpKind.INSERT, (e,)))

    sets = [SetRecord(sid, costs[sid - 1], members[sid]) for sid in range(1, m + 1)]
    tag = f"random_sc n={n} m={m} f={f} C={c_ratio!r} ops={op_count} churn={churn!r}"
    logger.debug(f"generated {tag} seed={seed}")
    return Workload(ProblemKind.SC, n=n, c_ratio=c_ratio, m=m, f=f, sets=sets, ops=ops, tag=tag, seed=seed)


def random_ds(n: int, delta: int, c_ratio: float, op_count: int, churn: float, seed: int) -> Workload:
    """Edge churn over an initially edgeless graph of n vertices with degree cap delta."""
    if n < 2:
        raise ConfigError(f"random_ds needs at least two vertices, got {n}")
    if delta < 1:
        raise ConfigError(f"degree cap must be positive, got {delta}")
    if not 0.0 <= churn <= 1.0:
        raise ConfigError(f"churn must lie in [0, 1], got {churn}")

    rng = np.random.default_rng(seed)
    costs = _log_uniform_costs(rng, n, c_ratio)
    degree = [0] * (n + 1)
    present: Dict[Tuple[int, int], None] = {}
    edges: List[Tuple[int, int]] = []
    ops: List[UpdateOp] = []
    for _ in range(op_count):
        if edges and rng.random() < churn:
            u, v = _take(rng, edges)
            del present[(u, v)]
            degree[u] -= 1
            degree[v] -= 1
            ops.append(UpdateOp(OpKind.DELETE, (u, v)))
            continue
        pair = None
        for _attempt in range(32):
            u, v = (int(x) + 1 for x in rng.choice(n, size=2, replace=False))
            u, v = min(u, v), max(u, v)
            if (u, v) not in present and degree[u] < delta and degree[v] < delta:
                pair = (u, v)
                break
        if pair is None:
            if not edges:
                break
            u, v = _take(rng, edges)
            del present[(u, v)]
            degree[u] -= 1
            degree[v] -= 1
            ops.append(UpdateOp(OpKind.DELETE, (u, v)))
            continue
        u, v = pair
        present[pair] = None
        edges.append(pair)
        degree[u] += 1
        degree[v] += 1
        ops.append(UpdateOp(OpKind.INSERT, pair))

    vertices = [VertexRecord(vid, costs[vid - 1]) for vid in range(1, n + 1)]
    tag = f"random_ds n={n} delta={delta} C={c_ratio!r} ops={len(ops)} churn={churn!r}"
    return Workload(ProblemKind.DS, n=n, c_ratio=c_ratio, delta=delta, vertices=vertices, ops=ops,
                    tag=tag, seed=seed)


# ------------------------------------------------------
# LOWER-BOUND CONSTRUCTIONS
# ------------------------------------------------------
def lb_setcover_coverers(q: int, batch: int) -> List[int]:
    """Sets able to cover batch i: i, n/4 + floor((i+1)/2), 3n/8 + floor((i+3)/4), ..., n/2 - 1."""
    half = 2 ** (q - 1)
    return [half - half // 2 ** k + (batch + 2 ** k - 1) // 2 ** k for k in range(q - 1)]


def lb_setcover(q: int) -> Workload:
    """Insertion-only instance forcing (n/2)(log2 n - 1) level changes at beta = sqrt(2)."""
    if q < 2:
        raise ConfigError(f"lb_setcover needs q >= 2, got {q}")
    n = 2 ** q
    members: Dict[int, List[int]] = {sid: [] for sid in range(1, n // 2)}
    for batch in range(1, n // 4 + 1):
        elements = list(range(4 * batch - 3, 4 * batch + 1))
        for sid in lb_setcover_coverers(q, batch):
            members[sid].extend(elements)
    sets = [SetRecord(sid, 1.0, members[sid]) for sid in sorted(members)]
    ops = [UpdateOp(OpKind.INSERT, (e,)) for e in range(1, n + 1)]
    return Workload(ProblemKind.SC, n=n, c_ratio=1.0, eps_hint=LOWER_BOUND_EPS, m=len(sets), f=max(q - 1, 1),
                    sets=sets, ops=ops, tag=f"lb_setcover q={q}")


def lb_domset_hubs(q: int, batch: int) -> List[int]:
    """Hubs adjacent to batch i, from tree level 0 (v_i) up to the root v_{2^{q+1}-1}."""
    top = 2 ** (q + 1)
    return [top - top // 2 ** k + (batch + 2 ** k - 1) // 2 ** k for k in range(q + 1)]


def _lowest_set_bit(i: int) -> int:
    return (i & -i).bit_length() - 1


def lb_domset(q: int) -> Workload:
    """
    Decremental dominating set instance: 2^q batches against 2^{q+1}-1 hubs.
    Deletions peel the root's edges batch by batch, then the two half-roots
    (lower-indexed first), down to the level-0 hubs.
    """
    if q < 2:
        raise ConfigError(f"lb_domset needs q >= 2, got {q}")
    hub_count = 2 ** (q + 1) - 1
    batches: Dict[int, List[int]] = {}
    next_id = hub_count + 1
    for batch in range(1, 2 ** q + 1):
        size = _lowest_set_bit(batch) + 3
        batches[batch] = list(range(next_id, next_id + size))
        next_id += size

    edges: List[Tuple[int, int]] = []
    for batch, vertices in batches.items():
        for hub in lb_domset_hubs(q, batch):
            edges.extend((hub, v) for v in vertices)

    ops: List[UpdateOp] = []
    for level in range(q, -1, -1):
        by_hub: Dict[int, List[int]] = {}
        for batch in batches:
            by_hub.setdefault(lb_domset_hubs(q, batch)[level], []).append(batch)
        for hub in sorted(by_hub):
            for batch in by_hub[hub]:
                ops.extend(UpdateOp(OpKind.DELETE, (hub, v)) for v in batches[batch])

    vertices = [VertexRecord(vid, 1.0) for vid in range(1, next_id)]
    return Workload(ProblemKind.DS, n=len(vertices), c_ratio=1.0, eps_hint=LOWER_BOUND_EPS,
                    delta=2 ** (q + 2) - 1, vertices=vertices, edges=edges, ops=ops,
                    tag=f"lb_domset q={q} order=lower-root-first")
