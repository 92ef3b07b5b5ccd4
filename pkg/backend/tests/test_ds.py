import unittest

from dynamic_cover.core.ds import DominatingSetEngine
from dynamic_cover.core.errors import UpdateError
from dynamic_cover.core.factory import build_engine, resolve_params
from dynamic_cover.core.instance import DynGraph
from dynamic_cover.core.levels import Params
from dynamic_cover.core.models import CoverEntry
from dynamic_cover.data_structures.schemas import OpKind, UpdateOp
from dynamic_cover.services.oracle import ReferenceDominatingSetEngine, check_all, compare_trajectories
from dynamic_cover.services.workloads import lb_domset, random_ds


def star(leaves=4):
    graph = DynGraph({vid: 1.0 for vid in range(1, leaves + 2)})
    edges = [(1, leaf) for leaf in range(2, leaves + 2)]
    return DominatingSetEngine(graph, Params(eps=0.2, n_cap=leaves + 1), edges)


class TestBootstrap(unittest.TestCase):
    def test_edgeless_graph_dominates_itself(self):
        graph = DynGraph({1: 1.0, 2: 1.0, 3: 0.5}, c_ratio=2.0)
        engine = DominatingSetEngine(graph, Params(eps=0.2, n_cap=3, c_ratio=2.0))
        self.assertEqual([(e.set_id, e.members) for e in engine.cover()], [(1, (1,)), (2, (2,)), (3, (3,))])
        self.assertEqual(engine.bootstrap.step, 0)
        self.assertEqual(engine.totals.ops, 0)
        self.assertTrue(check_all(engine).ok)

    def test_star_centre_takes_everything(self):
        engine = star()
        # 5 vertices at cost 1: 1.2^8 ~ 4.3 <= 5 < 1.2^9
        self.assertEqual(engine.cover(), [CoverEntry(1, 1.0, 8, (1, 2, 3, 4, 5))])
        self.assertEqual(engine.next_global_reset_at, 5)
        self.assertTrue(check_all(engine).ok)

    def test_lower_bound_root_dominates_all_batches(self):
        for q in (2, 3):
            workload = lb_domset(q)
            engine = build_engine(workload)
            root = 2 ** (q + 1) - 1
            entries = {e.set_id: e for e in engine.cover()}
            self.assertIn(root, entries)
            self.assertEqual(len(entries[root].members), workload.n - root + 1)
            self.assertTrue(check_all(engine).ok)


class TestEdgeUpdates(unittest.TestCase):
    def setUp(self):
        self.engine = star()

    def test_orphan_opens_its_own_pair(self):
        report = self.engine.delete_edge(1, 2)
        self.assertEqual(report.domination_moves, 1)
        self.assertEqual(self.engine.cover(), [CoverEntry(1, 1.0, 8, (1, 3, 4, 5)), CoverEntry(2, 1.0, 0, (2,))])
        self.assertTrue(check_all(self.engine).ok)

    def test_insert_restores_domination_order(self):
        self.engine.delete_edge(1, 2)
        self.engine.insert_edge(2, 3)
        self.assertTrue(check_all(self.engine).ok)
        self.engine.insert_edge(1, 2)
        self.assertTrue(check_all(self.engine).ok)

    def test_bad_edges(self):
        with self.assertRaises(UpdateError):
            self.engine.delete_edge(2, 3)
        with self.assertRaises(UpdateError):
            self.engine.insert_edge(1, 2)
        with self.assertRaises(UpdateError):
            self.engine.insert_edge(3, 3)
        with self.assertRaises(UpdateError):
            self.engine.insert_edge(1, 42)
        with self.assertRaises(UpdateError):
            self.engine.apply(UpdateOp(OpKind.DELETE, (1,)))
        self.assertEqual(self.engine.step_clock, 0)


class TestRandomChurn(unittest.TestCase):
    def replay_checked(self, workload, **kwargs):
        engine = build_engine(workload, **kwargs)
        for op in workload.ops:
            step = engine.apply(op)
            self.assertLessEqual(step.domination_moves, 1, f"step {step.step}")
            self.assertLessEqual(step.rises, 2, f"step {step.step}")
            report = check_all(engine)
            self.assertTrue(report.ok, f"step {engine.step_clock}: {[str(v) for v in report.violations]}")
        self.assertEqual(engine.totals.extra_rise_steps, 0)
        return engine

    def test_lazy_counters_keep_invariants(self):
        for seed in range(3):
            self.replay_checked(random_ds(30, 4, 4.0, 150, 0.3, seed))

    def test_exact_counters_keep_invariants(self):
        self.replay_checked(random_ds(30, 4, 4.0, 150, 0.3, 9), exact_counters=True)

    def test_matches_reference_engine(self):
        workload = random_ds(20, 3, 4.0, 100, 0.3, 6)
        params = resolve_params(workload)
        fast = DominatingSetEngine(DynGraph(workload.cost_map(), c_ratio=4.0), params, exact_counters=True)
        slow = ReferenceDominatingSetEngine(DynGraph(workload.cost_map(), c_ratio=4.0), params)
        self.assertIsNone(compare_trajectories(fast, slow, workload.ops))

    def test_decremental_lower_bound_replays_cleanly(self):
        workload = lb_domset(3)
        engine = self.replay_checked(workload)
        self.assertEqual(engine.totals.ops, len(workload.ops))
        self.assertGreater(engine.totals.level_changes, 0)

    def test_lower_bound_rate_grows_with_q(self):
        rates = []
        for q in (3, 4, 5):
            workload = lb_domset(q)
            engine = build_engine(workload)
            for op in workload.ops:
                engine.apply(op)
            rates.append(engine.totals.level_changes / len(workload.ops))
        self.assertLess(rates[0], rates[1])
        self.assertLess(rates[1], rates[2])


if __name__ == '__main__':
    unittest.main()
