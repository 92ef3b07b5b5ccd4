from dotenv import load_dotenv
import math
import os

# Cargar variables desde .env en la raíz del backend
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
ENV_PATH = os.path.join(BASE_DIR, ".env")
load_dotenv(ENV_PATH)

DEFAULT_EPS = float(os.getenv("DYNCOVER_EPS", "0.2"))
VERIFY_EVERY = int(os.getenv("DYNCOVER_VERIFY_EVERY", "1"))
LOG_FILE = os.getenv("DYNCOVER_LOG_FILE", "dynamic_cover.log")
ORACLE_MAX_SETS = int(os.getenv("DYNCOVER_ORACLE_MAX_SETS", "22"))
WRITER_QUEUE_SIZE = int(os.getenv("DYNCOVER_WRITER_QUEUE", "1024"))
WRITER_PUT_TIMEOUT = 0.5  # seconds between writer health checks while the queue is full


def _parse_ladder(raw: str) -> tuple:
    low, _, high = raw.partition(":")
    return int(low), int(high or low)


BENCH_LADDER = _parse_ladder(os.getenv("DYNCOVER_BENCH_LADDER", "10:14"))

if ORACLE_MAX_SETS > 26:
    raise RuntimeError("DYNCOVER_ORACLE_MAX_SETS above 26 does not fit in memory")

# ------------------------------------------------------
# THRESHOLDS & CONSTANTS (Centralized)
# ------------------------------------------------------
FLOAT_TOLERANCE = 1e-9
MAX_EPS_STRICT = 0.4
LOWER_BOUND_EPS = math.sqrt(2) - 1

# Half-critical search spans [b, b + HALF_CRITICAL_SPAN * log_beta(n)]
HALF_CRITICAL_SPAN = 4
MAX_RESETS_PER_STEP = 8

# Bench ladder defaults
BENCH_FREQUENCY = 3
BENCH_CHURN = 0.3
BENCH_COST_RATIO = 16.0
BENCH_OPS_PER_ELEMENT = 2

# Telemetry constants for amortized bounds
AMORTIZED_CONSTANT = 50.0
