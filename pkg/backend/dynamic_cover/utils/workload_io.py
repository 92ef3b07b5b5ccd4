"""
Line-oriented workload text format.

    # tag <free text>            (optional, before the header)
    # seed <int>                 (optional, before the header)
    SC <n> <m> <f> <C> <eps_hint>   |   DS <n> <Delta> <C> <eps_hint>
    S <id> <cost> <elem...>      (SC)
    V <id> <cost>                (DS)
    E <u> <v>                    (DS, initial edges)
    + <e> / - <e>                (SC)
    + <u> <v> / - <u> <v>        (DS)

Floats are written with repr() so gen -> parse -> serialize is byte-identical.
"""
import logging
from typing import Dict, List, Optional, Set, Tuple

from dynamic_cover.config import FLOAT_TOLERANCE
from dynamic_cover.core.errors import WorkloadParseError
from dynamic_cover.data_structures.schemas import (
    OpKind, ProblemKind, SetRecord, UpdateOp, VertexRecord, Workload,
)

logger = logging.getLogger(__name__)


def _ints(line_no: int, tokens: List[str]) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise WorkloadParseError(line_no, f"expected integers, got {' '.join(tokens)!r}")


def _float(line_no: int, token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise WorkloadParseError(line_no, f"expected a number, got {token!r}")


def _ratio(line_no: int, token: str) -> float:
    c_ratio = _float(line_no, token)
    if c_ratio < 1.0:
        raise WorkloadParseError(line_no, f"cost ratio C={c_ratio} must be >= 1")
    return c_ratio


def _cost(line_no: int, token: str, c_ratio: float) -> float:
    cost = _float(line_no, token)
    if not (1.0 / c_ratio) * (1 - FLOAT_TOLERANCE) <= cost <= 1.0 + FLOAT_TOLERANCE:
        raise WorkloadParseError(line_no, f"cost {cost} outside [1/{c_ratio}, 1]")
    return cost


def _parse_header(line_no: int, tokens: List[str]) -> Workload:
    kind = tokens[0]
    if kind == "SC":
        if len(tokens) != 6:
            raise WorkloadParseError(line_no, "SC header is 'SC n m f C eps_hint'")
        n, m, f = _ints(line_no, tokens[1:4])
        return Workload(ProblemKind.SC, n=n, m=m, f=f,
                        c_ratio=_ratio(line_no, tokens[4]), eps_hint=_float(line_no, tokens[5]))
    if kind == "DS":
        if len(tokens) != 5:
            raise WorkloadParseError(line_no, "DS header is 'DS n Delta C eps_hint'")
        n, delta = _ints(line_no, tokens[1:3])
        return Workload(ProblemKind.DS, n=n, delta=delta,
                        c_ratio=_ratio(line_no, tokens[3]), eps_hint=_float(line_no, tokens[4]))
    raise WorkloadParseError(line_no, f"unknown problem kind {kind!r}")


class _Replay:
    """Activation state used to validate the op sequence while parsing."""

    def __init__(self, workload: Workload):
        self.workload = workload
        self.known: Set[int] = set()
        self.active: Set[int] = set()
        self.edges: Set[Tuple[int, int]] = set()
        self.degree: Dict[int, int] = {}

    def add_edge(self, line_no: int, u: int, v: int) -> None:
        if u not in self.known or v not in self.known:
            raise WorkloadParseError(line_no, f"edge ({u}, {v}) uses an unknown vertex")
        if u == v:
            raise WorkloadParseError(line_no, f"self-loop on vertex {u}")
        key = (min(u, v), max(u, v))
        if key in self.edges:
            raise WorkloadParseError(line_no, f"edge ({u}, {v}) already present")
        for vid in (u, v):
            if self.workload.delta and self.degree.get(vid, 0) >= self.workload.delta:
                raise WorkloadParseError(line_no, f"vertex {vid} exceeds Delta={self.workload.delta}")
        self.edges.add(key)
        self.degree[u] = self.degree.get(u, 0) + 1
        self.degree[v] = self.degree.get(v, 0) + 1

    def remove_edge(self, line_no: int, u: int, v: int) -> None:
        key = (min(u, v), max(u, v))
        if key not in self.edges:
            raise WorkloadParseError(line_no, f"edge ({u}, {v}) is absent")
        self.edges.remove(key)
        self.degree[u] -= 1
        self.degree[v] -= 1

    def apply(self, line_no: int, op: UpdateOp) -> None:
        if self.workload.problem is ProblemKind.SC:
            if len(op.items) != 1:
                raise WorkloadParseError(line_no, "set cover ops take exactly one element")
            (e,) = op.items
            if e not in self.known:
                raise WorkloadParseError(line_no, f"element {e} belongs to no set")
            if op.kind is OpKind.INSERT:
                if e in self.active:
                    raise WorkloadParseError(line_no, f"element {e} inserted twice")
                self.active.add(e)
            else:
                if e not in self.active:
                    raise WorkloadParseError(line_no, f"element {e} deleted while inactive")
                self.active.remove(e)
            return
        if len(op.items) != 2:
            raise WorkloadParseError(line_no, "dominating set ops take exactly two vertices")
        if op.kind is OpKind.INSERT:
            self.add_edge(line_no, *op.items)
        else:
            self.remove_edge(line_no, *op.items)


def parse_workload(text: str) -> Workload:
    workload: Optional[Workload] = None
    tag: Optional[str] = None
    seed: Optional[int] = None
    replay: Optional[_Replay] = None
    set_ids: Set[int] = set()
    frequency: Dict[int, int] = {}
    ops_started = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if workload is None and body.startswith("tag "):
                tag = body[4:].strip()
            elif workload is None and body.startswith("seed "):
                seed = _ints(line_no, [body[5:].strip()])[0]
            continue

        tokens = line.split()
        if workload is None:
            workload = _parse_header(line_no, tokens)
            workload.tag = tag
            workload.seed = seed
            replay = _Replay(workload)
            continue

        head = tokens[0]
        if head in ("+", "-"):
            ops_started = True
            op = UpdateOp(OpKind(head), tuple(_ints(line_no, tokens[1:])))
            replay.apply(line_no, op)
            workload.ops.append(op)
            continue
        if ops_started:
            raise WorkloadParseError(line_no, f"{head!r} line after the first op")

        if head == "S" and workload.problem is ProblemKind.SC:
            if len(tokens) < 3:
                raise WorkloadParseError(line_no, "set line is 'S id cost elem...'")
            sid = _ints(line_no, tokens[1:2])[0]
            if sid in set_ids:
                raise WorkloadParseError(line_no, f"duplicate set id {sid}")
            set_ids.add(sid)
            elements = _ints(line_no, tokens[3:])
            for e in elements:
                frequency[e] = frequency.get(e, 0) + 1
                if workload.f and frequency[e] > workload.f:
                    raise WorkloadParseError(line_no, f"element {e} exceeds frequency f={workload.f}")
                replay.known.add(e)
            workload.sets.append(SetRecord(sid, _cost(line_no, tokens[2], workload.c_ratio), elements))
        elif head == "V" and workload.problem is ProblemKind.DS:
            if len(tokens) != 3:
                raise WorkloadParseError(line_no, "vertex line is 'V id cost'")
            vid = _ints(line_no, tokens[1:2])[0]
            if vid in replay.known:
                raise WorkloadParseError(line_no, f"duplicate vertex id {vid}")
            replay.known.add(vid)
            workload.vertices.append(VertexRecord(vid, _cost(line_no, tokens[2], workload.c_ratio)))
        elif head == "E" and workload.problem is ProblemKind.DS:
            if len(tokens) != 3:
                raise WorkloadParseError(line_no, "edge line is 'E u v'")
            u, v = _ints(line_no, tokens[1:])
            replay.add_edge(line_no, u, v)
            workload.edges.append((u, v))
        else:
            raise WorkloadParseError(line_no, f"unexpected {head!r} line in a {workload.problem.value} workload")

    if workload is None:
        raise WorkloadParseError(0, "missing header line")
    if workload.problem is ProblemKind.SC:
        if workload.m and len(workload.sets) != workload.m:
            raise WorkloadParseError(0, f"header declares m={workload.m} but {len(workload.sets)} sets follow")
        if len(replay.known) > workload.n:
            raise WorkloadParseError(0, f"{len(replay.known)} distinct elements exceed n={workload.n}")
    elif len(workload.vertices) != workload.n:
        raise WorkloadParseError(0, f"header declares n={workload.n} but {len(workload.vertices)} vertices follow")
    return workload


def serialize_workload(workload: Workload) -> str:
    lines: List[str] = []
    if workload.tag:
        lines.append(f"# tag {workload.tag}")
    if workload.seed is not None:
        lines.append(f"# seed {workload.seed}")
    if workload.problem is ProblemKind.SC:
        lines.append(f"SC {workload.n} {workload.m} {workload.f} {workload.c_ratio!r} {workload.eps_hint!r}")
        for s in workload.sets:
            lines.append(" ".join(["S", str(s.set_id), repr(s.cost), *map(str, s.elements)]))
    else:
        lines.append(f"DS {workload.n} {workload.delta} {workload.c_ratio!r} {workload.eps_hint!r}")
        for vertex in workload.vertices:
            lines.append(f"V {vertex.vertex_id} {vertex.cost!r}")
        for u, v in workload.edges:
            lines.append(f"E {u} {v}")
    lines.extend(str(op) for op in workload.ops)
    return "\n".join(lines) + "\n"


def read_workload(path: str) -> Workload:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_workload(handle.read())


def write_workload(workload: Workload, path: str) -> None:
    text = serialize_workload(workload)
    if path == "-":
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.info(f"Workload written to {path} ({len(workload.ops)} ops)")
