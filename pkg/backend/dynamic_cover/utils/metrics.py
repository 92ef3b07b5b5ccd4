"""
Metrics output: one `key=value` line per step, then a `# summary` block.
Lines go through a bounded queue drained by a single writer thread, so
replay and file IO overlap while records keep their order.
"""
import logging
import queue
import sys
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import asdict
from typing import Dict, List, Optional, TextIO

from dynamic_cover.config import WRITER_PUT_TIMEOUT, WRITER_QUEUE_SIZE
from dynamic_cover.core.models import StepReport
from dynamic_cover.data_structures.schemas import MetricsRecord, RunSummary

logger = logging.getLogger(__name__)

_CLOSE = object()


def _value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(map(str, value))
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def record_from_step(report: StepReport, refreshes: int = 0, violations: int = 0,
                     wall_ns: Optional[int] = None) -> MetricsRecord:
    return MetricsRecord(
        step=report.step,
        op=report.op.replace(" ", ":"),
        level_changes=report.level_changes,
        recourse=report.recourse,
        rises=report.rises,
        reset_rises=report.reset_rises,
        skipped_rises=report.skipped_rises,
        domination_moves=report.domination_moves,
        resets=[r.label for r in report.resets],
        refreshes=refreshes,
        cover_cost=report.cover_cost,
        cover_size=report.cover_size,
        peak_level=report.peak_level,
        violations=violations,
        wall_ns=wall_ns,
    )


def format_record(record: MetricsRecord) -> str:
    return " ".join(f"{key}={_value(value)}" for key, value in asdict(record).items() if value is not None)


def format_summary(summary: RunSummary) -> List[str]:
    lines = ["# summary"]
    for key, value in asdict(summary).items():
        if value is not None:
            lines.append(f"{key}={_value(value)}")
    ops = max(summary.ops, 1)
    lines.append(f"level_changes_per_op={summary.level_changes / ops!r}")
    lines.append(f"recourse_per_op={summary.recourse / ops!r}")
    if summary.wall_ns is not None:
        lines.append(f"wall_ns_per_op={summary.wall_ns // ops}")
    return lines


def parse_record(line: str) -> Dict[str, str]:
    """Inverse of format_record at the string level (values are not converted)."""
    out: Dict[str, str] = {}
    for token in line.split():
        key, _, value = token.partition("=")
        out[key] = value
    return out


class MetricsWriter:
    """
    Bounded-queue line writer; put() blocks while the queue is full.
    The output is opened on the caller's thread so a bad path fails before
    replay starts; a writer that died is reported by the next put().
    """

    def __init__(self, path: str = "-", maxsize: int = WRITER_QUEUE_SIZE):
        self.path = path
        self.lines: "queue.Queue[object]" = queue.Queue(maxsize=maxsize)
        self._executor = ThreadPoolExecutor(max_workers=1)
        self._future: Optional[Future] = None
        self._handle: Optional[TextIO] = None
        self.written = 0

    def __enter__(self) -> "MetricsWriter":
        self._handle = sys.stdout if self.path == "-" else open(self.path, "w", encoding="utf-8")
        self._future = self._executor.submit(self._drain, self._handle)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def put(self, line: str) -> None:
        while True:
            self._raise_if_dead()
            try:
                self.lines.put(line, timeout=WRITER_PUT_TIMEOUT)
                return
            except queue.Full:
                continue

    def _raise_if_dead(self) -> None:
        if self._future is None:
            raise RuntimeError("metrics writer is not open")
        if self._future.done():
            error = self._future.exception()
            raise error if error is not None else RuntimeError("metrics writer stopped early")

    def _drain(self, handle: TextIO) -> int:
        try:
            while True:
                line = self.lines.get()
                if line is _CLOSE:
                    break
                handle.write(line + "\n")
                self.written += 1
        finally:
            if handle is sys.stdout:
                handle.flush()
            else:
                handle.close()
        return self.written

    def close(self) -> None:
        if self._future is None:
            return
        future, self._future = self._future, None
        try:
            if not future.done():
                self.lines.put(_CLOSE)
            future.result()
        finally:
            self._executor.shutdown(wait=True)
            if self._handle is not None and self._handle is not sys.stdout and not self._handle.closed:
                self._handle.close()
            self._handle = None
        logger.debug(f"metrics writer closed after {self.written} lines")
