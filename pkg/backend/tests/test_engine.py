import math
import unittest

from dynamic_cover.config import AMORTIZED_CONSTANT
from dynamic_cover.core.engine import SetCoverEngine
from dynamic_cover.core.errors import UpdateError
from dynamic_cover.core.factory import build_engine, resolve_params
from dynamic_cover.core.instance import SetSystem
from dynamic_cover.core.levels import Params
from dynamic_cover.core.models import CoverEntry, ResetKind
from dynamic_cover.data_structures.schemas import OpKind, UpdateOp
from dynamic_cover.services.oracle import (
    BruteForceOracle, ReferenceSetCoverEngine, approx_verdict, check_all, compare_trajectories,
)
from dynamic_cover.services.workloads import lb_setcover, random_sc


class TestSetCoverSteps(unittest.TestCase):
    """Small instance traced by hand at eps = 0.2."""

    def setUp(self):
        system = SetSystem({1: (1.0, [1, 2]), 2: (0.5, [2])}, c_ratio=2.0)
        self.engine = SetCoverEngine(system, Params(eps=0.2, n_cap=2, c_ratio=2.0))

    def test_first_insert_opens_its_set(self):
        report = self.engine.insert(1)
        self.assertEqual(self.engine.cover(), [CoverEntry(1, 1.0, 0, (1,))])
        self.assertEqual(report.cover_cost, 1.0)
        self.assertEqual([r.kind for r in report.resets], [ResetKind.GLOBAL])

    def test_second_insert_lifts_the_shared_set(self):
        self.engine.insert(1)
        report = self.engine.insert(2)
        # 2 items at cost 1 reach beta^3 ~ 1.73
        self.assertEqual(self.engine.cover(), [CoverEntry(1, 1.0, 3, (1, 2))])
        self.assertEqual(report.rises, 1)
        self.assertTrue(check_all(self.engine).ok)

    def test_delete_hands_survivor_to_cheaper_set(self):
        self.engine.insert(1)
        self.engine.insert(2)
        report = self.engine.delete(1)
        self.assertEqual(self.engine.cover(), [CoverEntry(2, 0.5, 3, (2,))])
        self.assertEqual(self.engine.cover_cost(), 0.5)
        self.assertEqual([r.kind for r in report.resets], [ResetKind.PARTIAL])
        self.assertTrue(check_all(self.engine).ok)

    def test_bad_updates(self):
        self.engine.insert(1)
        with self.assertRaises(UpdateError):
            self.engine.insert(1)
        with self.assertRaises(UpdateError):
            self.engine.delete(2)
        with self.assertRaises(UpdateError):
            self.engine.insert(9)
        with self.assertRaises(UpdateError):
            self.engine.apply(UpdateOp(OpKind.INSERT, (1, 2)))
        # rejected updates leave the clock alone
        self.assertEqual(self.engine.step_clock, 1)


class TestSetCoverInvariants(unittest.TestCase):
    def replay_checked(self, workload, **kwargs):
        engine = build_engine(workload, **kwargs)
        for op in workload.ops:
            engine.apply(op)
            report = check_all(engine)
            self.assertTrue(report.ok, f"step {engine.step_clock}: {[str(v) for v in report.violations]}")
        return engine

    def test_lazy_counters_keep_invariants(self):
        for seed in range(3):
            self.replay_checked(random_sc(40, 20, 3, 8.0, 120, 0.3, seed))

    def test_exact_counters_keep_invariants(self):
        for seed in (7, 8, 9):
            engine = self.replay_checked(random_sc(40, 20, 3, 8.0, 120, 0.3, seed), exact_counters=True)
            # one insertion makes at most one set rise
            self.assertEqual(engine.totals.extra_rise_steps, 0)

    def test_without_global_resets(self):
        engine = self.replay_checked(random_sc(40, 20, 3, 8.0, 120, 0.3, 2), global_resets=False)
        self.assertEqual(engine.totals.global_resets, 0)

    def test_matches_reference_engine(self):
        workload = random_sc(30, 12, 3, 4.0, 90, 0.3, 5)
        params = resolve_params(workload)
        fast = SetCoverEngine(SetSystem(workload.set_map(), c_ratio=4.0), params, exact_counters=True)
        slow = ReferenceSetCoverEngine(SetSystem(workload.set_map(), c_ratio=4.0), params)
        self.assertIsNone(compare_trajectories(fast, slow, workload.ops))


class TestApproximation(unittest.TestCase):
    def test_cover_is_near_optimal_at_every_step(self):
        for eps in (0.1, 0.3):
            for seed in range(10):
                workload = random_sc(40, 12, 4, 4.0, 2000, 0.3, seed)
                oracle = BruteForceOracle(workload.set_map())
                engine = build_engine(workload, eps)
                for op in workload.ops:
                    report = engine.apply(op)
                    active = engine.provider.active_items()
                    opt, _ = oracle.optimum(active)
                    verdict = approx_verdict(engine.cover_cost(), opt, len(active), engine.params.beta)
                    self.assertTrue(verdict.passed, f"eps {eps} seed {seed} step {report.step}: {verdict}")


class TestLowerBound(unittest.TestCase):
    def test_batches_climb_through_shared_sets(self):
        workload = lb_setcover(5)
        engine = build_engine(workload)
        for op in workload.ops[:4]:
            engine.apply(op)
        # four unit-cost elements reach beta^4 = 4
        self.assertIn(CoverEntry(1, 1.0, 4, (1, 2, 3, 4)), engine.cover())
        for op in workload.ops[4:8]:
            engine.apply(op)
        # eight elements reach beta^6 = 8 in the set shared by batches 1 and 2
        self.assertIn(CoverEntry(9, 1.0, 6, tuple(range(1, 9))), engine.cover())
        self.assertTrue(check_all(engine).ok)

    def test_insertion_sequence_forces_level_changes(self):
        for q in (4, 5, 6):
            workload = lb_setcover(q)
            engine = build_engine(workload)
            self.assertAlmostEqual(engine.params.beta, math.sqrt(2))
            for op in workload.ops:
                engine.apply(op)
            n = 2 ** q
            self.assertGreaterEqual(engine.totals.level_changes, (n // 2) * (q - 1))
            self.assertTrue(check_all(engine).ok)


class TestTelemetry(unittest.TestCase):
    def test_lazy_refreshes_fewer_entries(self):
        workload = random_sc(128, 64, 3, 16.0, 256, 0.3, 1)
        lazy = build_engine(workload)
        exact = build_engine(workload, exact_counters=True)
        for op in workload.ops:
            lazy.apply(op)
            exact.apply(op)
        self.assertLess(lazy.bank.refreshed_entries, exact.bank.refreshed_entries)

    def test_amortized_counts_stay_bounded(self):
        workload = random_sc(128, 64, 3, 16.0, 256, 0.3, 4)
        engine = build_engine(workload)
        for op in workload.ops:
            engine.apply(op)
        eps = engine.params.eps
        totals = engine.totals
        self.assertEqual(totals.ops, len(workload.ops))
        self.assertLessEqual(totals.level_changes / totals.ops, AMORTIZED_CONSTANT * eps ** -3 * math.log(128))
        self.assertLessEqual(engine.bank.refreshed_entries / max(totals.level_changes, 1), AMORTIZED_CONSTANT * eps ** -2)
        self.assertLessEqual(totals.recourse / totals.ops, AMORTIZED_CONSTANT * eps ** -4 * (1 + math.log2(16)))


if __name__ == '__main__':
    unittest.main()
