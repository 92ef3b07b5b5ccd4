from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from dynamic_cover.config import FLOAT_TOLERANCE, MAX_EPS_STRICT
from dynamic_cover.core.errors import ConfigError, InvariantFault

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Params:
    """
    Parametros del esquema de niveles.
    - eps: precision, beta = 1 + eps.
    - n_cap: maximo de elementos activos simultaneos.
    - c_ratio: razon entre el costo maximo y el minimo (costos en [1/C, 1]).
    strict=False admite eps en (0, 1) para las construcciones de cota inferior (beta = sqrt 2).
    """
    eps: float
    n_cap: int
    c_ratio: float = 1.0
    strict: bool = True
    beta: float = field(init=False)

    def __post_init__(self):
        upper = MAX_EPS_STRICT if self.strict else 1.0
        if not 0.0 < self.eps < upper:
            raise ConfigError(f"eps must lie in (0, {upper}), got {self.eps}")
        if self.n_cap < 1:
            raise ConfigError(f"n_cap must be positive, got {self.n_cap}")
        if self.c_ratio < 1.0:
            raise ConfigError(f"cost ratio must be >= 1, got {self.c_ratio}")
        object.__setattr__(self, "beta", 1.0 + self.eps)


def _snap(value: float) -> float:
    nearest = round(value)
    if nearest >= 1 and abs(value - nearest) <= FLOAT_TOLERANCE * value:
        return float(nearest)
    if value < 1.0:
        inverse = 1.0 / value
        nearest = round(inverse)
        if abs(inverse - nearest) <= FLOAT_TOLERANCE * inverse:
            return 1.0 / nearest
    return value


class BetaTable:
    """
    Single table of beta powers shared by every level comparison.
    Built once by repeated multiplication; integral entries are snapped so
    that, e.g., sqrt(2)**6 compares equal to 8.
    """

    def __init__(self, params: Params):
        self.params = params
        beta = params.beta
        target = params.n_cap * params.c_ratio

        positive = [1.0]
        while positive[-1] < target:
            positive.append(_snap(positive[-1] * beta))
        self.radius = (len(positive) - 1) + 4
        while len(positive) <= self.radius:
            positive.append(_snap(positive[-1] * beta))

        negative = [1.0]
        while len(negative) <= self.radius:
            negative.append(_snap(negative[-1] / beta))

        # values[k] = beta ** (k - radius)
        self._values: List[float] = list(reversed(negative[1:])) + positive
        self.min_level = -self.radius
        self.max_level = self.radius

    def pow(self, j: int) -> float:
        if not self.min_level <= j <= self.max_level:
            raise InvariantFault(f"level {j} outside the beta table (+-{self.radius})")
        return self._values[j + self.radius]

    def floor_log(self, x: float) -> int:
        """Largest level l with beta**l <= x (saturating at the table ends)."""
        idx = bisect.bisect_right(self._values, x) - 1
        return max(idx, 0) - self.radius

    def ceil_log(self, x: float) -> int:
        """Smallest level l with beta**l >= x (saturating at the table ends)."""
        idx = bisect.bisect_left(self._values, x)
        return min(idx, len(self._values) - 1) - self.radius

    def level_of_ratio(self, count: int, cost: float) -> int:
        if count <= 0:
            raise ValueError("empty pair has no level")
        if cost <= 0:
            raise ValueError(f"cost must be positive, got {cost}")
        ratio = count / cost
        level = self.floor_log(ratio)
        if not self.pow(level) <= ratio < self.pow(level + 1):
            raise InvariantFault(f"ratio {ratio} outside the beta table")
        return level

    def relevant_window(self, cost: float) -> Tuple[int, int]:
        j_min = self.floor_log(1.0 / cost) - 1
        j_max = self.ceil_log(self.params.n_cap / cost) - 1
        return j_min, max(j_max, j_min)

    def reaches(self, count: int, cost: float, j: int) -> bool:
        """count / cost >= beta**j, the comparison behind every PD and NC test."""
        return count / cost >= self.pow(j)
