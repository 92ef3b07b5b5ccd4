from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from dynamic_cover.config import MAX_EPS_STRICT

# ==============================================================================
# 1. ENUMS (Vocabulario Controlado)
# ==============================================================================

class ProblemKind(str, Enum):
    SC = "SC"   # set cover: actualizaciones de elementos
    DS = "DS"   # dominating set: actualizaciones de aristas


class OpKind(str, Enum):
    INSERT = "+"
    DELETE = "-"


class RunMode(str, Enum):
    RUN = "run"
    VERIFY = "verify"
    GEN = "gen"
    BENCH = "bench"


class Generator(str, Enum):
    RANDOM_SC = "random_sc"
    RANDOM_DS = "random_ds"
    LB_SETCOVER = "lb_setcover"
    LB_DOMSET = "lb_domset"

# ==============================================================================
# 2. DATACLASSES (Estructura de Datos)
# ==============================================================================

@dataclass(frozen=True)
class UpdateOp:
    kind: OpKind
    items: Tuple[int, ...]  # (e,) para SC, (u, v) para DS

    def __str__(self) -> str:
        return " ".join([self.kind.value, *map(str, self.items)])


@dataclass
class SetRecord:
    set_id: int
    cost: float
    elements: List[int] = field(default_factory=list)


@dataclass
class VertexRecord:
    vertex_id: int
    cost: float


@dataclass
class Workload:
    """Instancia estatica + secuencia de actualizaciones, tal como vive en el archivo de texto."""
    problem: ProblemKind
    n: int                                   # n_cap (SC) o numero de vertices (DS)
    c_ratio: float
    eps_hint: float = 0.0                    # 0 = sin recomendacion
    m: int = 0                               # solo SC
    f: int = 0                               # solo SC
    delta: int = 0                           # solo DS
    sets: List[SetRecord] = field(default_factory=list)
    vertices: List[VertexRecord] = field(default_factory=list)
    edges: List[Tuple[int, int]] = field(default_factory=list)  # aristas iniciales (DS)
    ops: List[UpdateOp] = field(default_factory=list)
    tag: Optional[str] = None                # p.ej. "lb_setcover q=4"
    seed: Optional[int] = None

    @property
    def is_lower_bound(self) -> bool:
        return bool(self.tag) and self.tag.startswith("lb_")

    def set_map(self) -> Dict[int, Tuple[float, List[int]]]:
        return {s.set_id: (s.cost, s.elements) for s in self.sets}

    def cost_map(self) -> Dict[int, float]:
        return {v.vertex_id: v.cost for v in self.vertices}


@dataclass
class MetricsRecord:
    """Una linea key=value del archivo de metricas (un paso)."""
    step: int
    op: str
    level_changes: int = 0
    recourse: int = 0
    rises: int = 0
    reset_rises: int = 0
    skipped_rises: int = 0
    domination_moves: int = 0
    resets: List[str] = field(default_factory=list)
    refreshes: int = 0
    cover_cost: float = 0.0
    cover_size: int = 0
    peak_level: int = -1
    violations: int = 0
    wall_ns: Optional[int] = None


@dataclass
class RunSummary:
    problem: ProblemKind
    tag: str
    eps: float
    ops: int = 0
    level_changes: int = 0
    recourse: int = 0
    rises: int = 0
    reset_rises: int = 0
    skipped_rises: int = 0
    extra_rise_steps: int = 0
    partial_resets: int = 0
    global_resets: int = 0
    refreshes: int = 0
    final_cover_cost: float = 0.0
    max_cover_size: int = 0
    peak_level: int = -1
    violations: int = 0
    approx_failures: int = 0
    wall_ns: Optional[int] = None

# ==============================================================================
# 3. CONFIGURACION DE EJECUCION (validada con pydantic)
# ==============================================================================

class RunConfig(BaseModel):
    mode: RunMode
    eps: Optional[float] = None              # None = eps_hint del workload o DEFAULT_EPS
    workload: Optional[str] = None
    output: str = "-"
    verify_every: int = Field(default=1, ge=1)
    debug_exact_counters: bool = False
    no_timing: bool = False
    global_resets: bool = True
    # gen
    generator: Optional[Generator] = None
    seed: int = 0
    n: int = Field(default=64, ge=1)
    m: int = Field(default=32, ge=1)
    f: int = Field(default=3, ge=1)
    delta: int = Field(default=4, ge=1)
    c_ratio: float = Field(default=4.0, ge=1.0)
    ops: int = Field(default=0, ge=0)        # 0 = 2n
    churn: float = Field(default=0.3, ge=0.0, le=1.0)
    q: int = Field(default=3, ge=2)
    # bench
    ladder: List[int] = Field(default_factory=list)

    @field_validator("eps")
    @classmethod
    def eps_in_range(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value < MAX_EPS_STRICT:
            raise ValueError(f"eps must lie in (0, {MAX_EPS_STRICT})")
        return value
