from __future__ import annotations

import json
import logging
import math
import time
from typing import List, Optional

import numpy as np

from dynamic_cover.config import (
    AMORTIZED_CONSTANT, BENCH_CHURN, BENCH_COST_RATIO, BENCH_FREQUENCY, BENCH_LADDER, BENCH_OPS_PER_ELEMENT,
)
from dynamic_cover.core.engine import LeveledEngine
from dynamic_cover.core.errors import (
    ConfigError, CoverError, InfeasibleInstanceError, InvariantFault, OracleScaleError, UpdateError,
    WorkloadParseError,
)
from dynamic_cover.core.factory import build_engine
from dynamic_cover.data_structures.schemas import (
    Generator, ProblemKind, RunConfig, RunMode, RunSummary, Workload,
)
from dynamic_cover.services.oracle import BruteForceOracle, approx_verdict, check_all
from dynamic_cover.services.workloads import lb_domset, lb_setcover, random_ds, random_sc
from dynamic_cover.utils.metrics import MetricsWriter, format_record, format_summary, record_from_step
from dynamic_cover.utils.workload_io import read_workload, write_workload

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BAD_INPUT = 2
EXIT_FAULT = 3


class RunManager:
    """
    Orquestador de las cuatro operaciones del CLI:
    1. run: reproduce un workload y emite metricas por paso.
    2. verify: igual que run, mas el chequeo de invariantes y de aproximacion.
    3. gen: escribe un workload determinista.
    4. bench: escalera de tamanos con tiempos y conteo de refrescos.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.engine: Optional[LeveledEngine] = None
        self.summary: Optional[RunSummary] = None
        self.first_failing_step: Optional[int] = None

        # Estadisticas
        self.stats = {
            "steps": 0,
            "checks": 0,
            "violations": 0,
            "approx_checks": 0,
            "approx_failures": 0,
        }

    def execute(self) -> int:
        mode = self.config.mode
        try:
            if mode is RunMode.GEN:
                return self.generate()
            if mode is RunMode.BENCH:
                return self.bench()
            return self.replay(verify=mode is RunMode.VERIFY)
        except WorkloadParseError as e:
            logger.error(f"Workload parse error at {e}")
            return EXIT_BAD_INPUT
        except (ConfigError, UpdateError, InfeasibleInstanceError, OSError) as e:
            logger.error(f"Invalid input: {e}")
            return EXIT_BAD_INPUT
        except InvariantFault as e:
            path = self._dump_state()
            logger.critical(f"Internal fault: {e} (state dump: {path})", exc_info=True)
            return EXIT_FAULT
        except CoverError as e:
            logger.critical(f"Unrecoverable engine error: {e}", exc_info=True)
            return EXIT_FAULT

    # ------------------------------------------------------
    # RUN / VERIFY
    # ------------------------------------------------------
    def replay(self, verify: bool = False) -> int:
        config = self.config
        if not config.workload:
            raise ConfigError("a workload file is required")
        workload = read_workload(config.workload)
        logger.info(f"Replaying {workload.tag or config.workload}: {len(workload.ops)} ops")

        engine = build_engine(workload, config.eps, config.debug_exact_counters, config.global_resets)
        self.engine = engine
        oracle = self._approx_oracle(workload) if verify else None
        refreshed_at_start = engine.bank.refreshed_entries
        wall_total = 0

        with MetricsWriter(config.output) as writer:
            for op in workload.ops:
                before = engine.bank.refreshed_entries
                started = time.perf_counter_ns()
                report = engine.apply(op)
                elapsed = time.perf_counter_ns() - started
                wall_total += elapsed
                self.stats["steps"] += 1

                violations = 0
                if verify and report.step % config.verify_every == 0:
                    violations = self._check_step(engine, oracle)
                record = record_from_step(report, engine.bank.refreshed_entries - before, violations,
                                          None if config.no_timing else elapsed)
                writer.put(format_record(record))

            self.summary = self._summarize(engine, workload, engine.bank.refreshed_entries - refreshed_at_start,
                                           None if config.no_timing else wall_total)
            for line in format_summary(self.summary):
                writer.put(line)

        self._report_lower_bound(workload)
        self._check_amortized(engine)
        self._print_summary()
        if verify:
            if self.stats["violations"] or self.stats["approx_failures"]:
                logger.error(f"VERIFY FAIL: first failing step {self.first_failing_step}")
                return EXIT_VIOLATION
            logger.info(f"VERIFY PASS: {self.stats['checks']} checkpoints, {self.stats['approx_checks']} approx checks")
        return EXIT_OK

    def _approx_oracle(self, workload: Workload) -> Optional[BruteForceOracle]:
        if workload.problem is ProblemKind.DS:
            logger.info("Approximation check disabled for dominating set workloads")
            return None
        try:
            return BruteForceOracle(workload.set_map())
        except OracleScaleError as e:
            logger.warning(f"Approximation check disabled: {e}")
            return None

    def _check_step(self, engine: LeveledEngine, oracle: Optional[BruteForceOracle]) -> int:
        self.stats["checks"] += 1
        report = check_all(engine)
        failed = not report.ok
        for violation in report.violations:
            logger.error(f"step {report.step}: {violation}")
        self.stats["violations"] += len(report.violations)

        if oracle is not None:
            active = engine.provider.active_items()
            opt, _ = oracle.optimum(active)
            verdict = approx_verdict(engine.cover_cost(), opt, len(active), engine.params.beta)
            self.stats["approx_checks"] += 1
            if not verdict.passed:
                failed = True
                self.stats["approx_failures"] += 1
                logger.error(f"step {report.step}: cover cost {verdict.cover_cost} >= bound {verdict.bound} (OPT {opt})")
        if failed and self.first_failing_step is None:
            self.first_failing_step = report.step
        return len(report.violations)

    def _summarize(self, engine: LeveledEngine, workload: Workload, refreshes: int,
                   wall_ns: Optional[int]) -> RunSummary:
        totals = engine.totals
        return RunSummary(
            problem=workload.problem,
            tag=workload.tag or "",
            eps=engine.params.eps,
            ops=totals.ops,
            level_changes=totals.level_changes,
            recourse=totals.recourse,
            rises=totals.rises,
            reset_rises=totals.reset_rises,
            skipped_rises=totals.skipped_rises,
            extra_rise_steps=totals.extra_rise_steps,
            partial_resets=totals.partial_resets,
            global_resets=totals.global_resets,
            refreshes=refreshes,
            final_cover_cost=engine.cover_cost(),
            max_cover_size=totals.max_cover_size,
            peak_level=totals.peak_level,
            violations=self.stats["violations"],
            approx_failures=self.stats["approx_failures"],
            wall_ns=wall_ns,
        )

    def _report_lower_bound(self, workload: Workload) -> None:
        if not workload.is_lower_bound or self.summary is None:
            return
        if workload.problem is ProblemKind.SC:
            n = workload.n
            bound = (n // 2) * (int(math.log2(n)) - 1)
            logger.info(f"{workload.tag}: {self.summary.level_changes} level changes (closed form >= {bound})")
        else:
            rate = self.summary.level_changes / max(self.summary.ops, 1)
            logger.info(f"{workload.tag}: {rate:.3f} level changes per deletion")

    def _check_amortized(self, engine: LeveledEngine) -> None:
        if self.summary is None or not self.summary.ops:
            return
        params = engine.params
        budget = AMORTIZED_CONSTANT * params.eps ** -3 * math.log(max(params.n_cap, 2))
        rate = self.summary.level_changes / self.summary.ops
        if rate > budget:
            logger.warning(f"{rate:.2f} level changes per op exceed the amortized budget {budget:.1f}")
        else:
            logger.debug(f"{rate:.2f} level changes per op (amortized budget {budget:.1f})")

    def _dump_state(self) -> Optional[str]:
        if self.engine is None:
            return None
        output = self.config.output
        path = ("dynamic_cover" if output == "-" else output) + ".dump.json"
        try:
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(self.engine.dump_state(), handle, indent=2)
        except OSError as e:
            logger.error(f"Could not write state dump {path}: {e}")
            return None
        return path

    # ------------------------------------------------------
    # GEN
    # ------------------------------------------------------
    def generate(self) -> int:
        workload = self.build_workload()
        write_workload(workload, self.config.output)
        return EXIT_OK

    def build_workload(self) -> Workload:
        c = self.config
        if c.generator is None:
            raise ConfigError("gen needs a generator")
        ops = c.ops or 2 * c.n
        if c.generator is Generator.RANDOM_SC:
            return random_sc(c.n, c.m, c.f, c.c_ratio, ops, c.churn, c.seed)
        if c.generator is Generator.RANDOM_DS:
            return random_ds(c.n, c.delta, c.c_ratio, ops, c.churn, c.seed)
        if c.generator is Generator.LB_SETCOVER:
            return lb_setcover(c.q)
        return lb_domset(c.q)

    # ------------------------------------------------------
    # BENCH
    # ------------------------------------------------------
    def bench(self) -> int:
        if __debug__:
            logger.warning("Assertions are enabled; run with python -O for representative timings")
        ladder = self.config.ladder or list(range(BENCH_LADDER[0], BENCH_LADDER[1] + 1))
        xs: List[float] = []
        ys: List[float] = []
        with MetricsWriter(self.config.output) as writer:
            for exponent in ladder:
                n = 2 ** exponent
                ops = self.config.ops or BENCH_OPS_PER_ELEMENT * n
                workload = random_sc(n, n // 2, BENCH_FREQUENCY, BENCH_COST_RATIO, ops, BENCH_CHURN, self.config.seed)
                if not workload.ops:
                    continue
                lazy = build_engine(workload, self.config.eps)
                started = time.perf_counter_ns()
                for op in workload.ops:
                    lazy.apply(op)
                elapsed = time.perf_counter_ns() - started

                exact = build_engine(workload, self.config.eps, exact_counters=True)
                for op in workload.ops:
                    exact.apply(op)

                count = len(workload.ops)
                writer.put(
                    f"n={n} ops={count} ns_per_op={elapsed // count} "
                    f"level_changes={lazy.totals.level_changes} "
                    f"refreshes_lazy={lazy.bank.refreshed_entries} refreshes_exact={exact.bank.refreshed_entries}")
                xs.append(math.log(count * BENCH_FREQUENCY * math.log(n)))
                ys.append(math.log(elapsed))
                logger.info(f"bench n={n}: {elapsed // count} ns/op")
            if len(xs) >= 2:
                slope = float(np.polyfit(xs, ys, 1)[0])
                writer.put(f"# fitted exponent of time vs ops*f*log n: {slope!r}")
        return EXIT_OK

    def _print_summary(self) -> None:
        if self.summary is None:
            return
        s = self.summary
        logger.info("=== Run summary ===")
        logger.info(f"Ops: {s.ops}  level changes: {s.level_changes}  recourse: {s.recourse}")
        logger.info(f"Rises: {s.rises} (+{s.reset_rises} after resets)  resets: {s.partial_resets} partial, {s.global_resets} global")
        logger.info(f"Final cover cost: {s.final_cover_cost}  max size: {s.max_cover_size}  peak level: {s.peak_level}")
        if self.stats["checks"]:
            logger.info(f"Checks: {self.stats['checks']}  violations: {s.violations}  approx failures: {s.approx_failures}")
        logger.info("===================")
