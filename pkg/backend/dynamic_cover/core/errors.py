class CoverError(Exception):
    """Base error for the dynamic cover engine."""


class InvariantFault(CoverError):
    """Internal consistency broken: level arithmetic, counters or ledger."""


class UpdateError(CoverError):
    """A public update that does not apply to the current state."""


class InfeasibleInstanceError(CoverError):
    """Some element (or residual element) has no coverer."""


class OracleScaleError(CoverError):
    """Brute force requested on more sets than the oracle enumerates."""


class ConfigError(CoverError):
    """Invalid run or generator parameters."""


class WorkloadParseError(CoverError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message
