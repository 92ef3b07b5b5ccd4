import unittest

from dynamic_cover.core.errors import ConfigError
from dynamic_cover.data_structures.schemas import OpKind, ProblemKind, UpdateOp
from dynamic_cover.services.workloads import (
    lb_domset, lb_domset_hubs, lb_setcover, lb_setcover_coverers, random_ds, random_sc,
)
from dynamic_cover.utils.workload_io import serialize_workload


class TestRandomSetCover(unittest.TestCase):
    def test_same_seed_same_file(self):
        first = serialize_workload(random_sc(50, 20, 3, 8.0, 100, 0.3, 42))
        second = serialize_workload(random_sc(50, 20, 3, 8.0, 100, 0.3, 42))
        other = serialize_workload(random_sc(50, 20, 3, 8.0, 100, 0.3, 43))
        self.assertEqual(first, second)
        self.assertNotEqual(first, other)

    def test_instance_shape(self):
        workload = random_sc(50, 20, 3, 8.0, 100, 0.3, 1)
        self.assertEqual(workload.problem, ProblemKind.SC)
        self.assertEqual(len(workload.sets), 20)
        frequency = {}
        for s in workload.sets:
            self.assertTrue(1 / 8.0 <= s.cost <= 1.0)
            for e in s.elements:
                frequency[e] = frequency.get(e, 0) + 1
        self.assertEqual(sorted(frequency), list(range(1, 51)))
        self.assertLessEqual(max(frequency.values()), 3)

    def test_ops_respect_activation(self):
        workload = random_sc(30, 15, 2, 4.0, 200, 0.5, 3)
        active = set()
        for op in workload.ops:
            (e,) = op.items
            if op.kind is OpKind.INSERT:
                self.assertNotIn(e, active)
                active.add(e)
            else:
                self.assertIn(e, active)
                active.remove(e)
        self.assertEqual(len(workload.ops), 200)

    def test_no_churn_is_insertion_only(self):
        workload = random_sc(30, 15, 2, 4.0, 200, 0.0, 3)
        self.assertEqual(len(workload.ops), 30)
        self.assertEqual(sorted(op.items[0] for op in workload.ops), list(range(1, 31)))

    def test_bad_parameters(self):
        with self.assertRaises(ConfigError):
            random_sc(0, 10, 2, 4.0, 10, 0.3, 0)
        with self.assertRaises(ConfigError):
            random_sc(10, 2, 3, 4.0, 10, 0.3, 0)
        with self.assertRaises(ConfigError):
            random_sc(100, 10, 2, 4.0, 10, 0.3, 0)
        with self.assertRaises(ConfigError):
            random_sc(10, 10, 2, 0.5, 10, 0.3, 0)
        with self.assertRaises(ConfigError):
            random_sc(10, 10, 2, 4.0, 10, 1.5, 0)


class TestRandomDominatingSet(unittest.TestCase):
    def test_degree_cap_and_edge_validity(self):
        workload = random_ds(25, 3, 4.0, 300, 0.3, 8)
        edges = set()
        degree = {}
        for op in workload.ops:
            u, v = op.items
            self.assertLess(u, v)
            if op.kind is OpKind.INSERT:
                self.assertNotIn((u, v), edges)
                edges.add((u, v))
                degree[u] = degree.get(u, 0) + 1
                degree[v] = degree.get(v, 0) + 1
                self.assertLessEqual(max(degree[u], degree[v]), 3)
            else:
                edges.remove((u, v))
                degree[u] -= 1
                degree[v] -= 1
        self.assertEqual(len(workload.vertices), 25)
        self.assertEqual(workload.edges, [])

    def test_bad_parameters(self):
        with self.assertRaises(ConfigError):
            random_ds(1, 3, 4.0, 10, 0.3, 0)
        with self.assertRaises(ConfigError):
            random_ds(10, 0, 4.0, 10, 0.3, 0)


class TestSetCoverLowerBound(unittest.TestCase):
    def test_batch_coverers(self):
        self.assertEqual(lb_setcover_coverers(5, 1), [1, 9, 13, 15])
        self.assertEqual(lb_setcover_coverers(3, 1), [1, 3])
        self.assertEqual(lb_setcover_coverers(3, 2), [2, 3])

    def test_instance_shape(self):
        for q in (3, 4, 5):
            n = 2 ** q
            workload = lb_setcover(q)
            self.assertEqual(workload.tag, f"lb_setcover q={q}")
            self.assertTrue(workload.is_lower_bound)
            self.assertEqual(len(workload.sets), n // 2 - 1)
            self.assertEqual(workload.f, q - 1)
            frequency = {}
            for s in workload.sets:
                self.assertEqual(s.cost, 1.0)
                for e in s.elements:
                    frequency[e] = frequency.get(e, 0) + 1
            self.assertEqual(set(frequency.values()), {q - 1})
            self.assertEqual(workload.ops, [UpdateOp(OpKind.INSERT, (e,)) for e in range(1, n + 1)])

    def test_q_too_small(self):
        with self.assertRaises(ConfigError):
            lb_setcover(1)


class TestDominatingSetLowerBound(unittest.TestCase):
    def test_hubs_per_batch(self):
        self.assertEqual(lb_domset_hubs(2, 1), [1, 5, 7])
        self.assertEqual(lb_domset_hubs(2, 4), [4, 6, 7])

    def test_instance_shape(self):
        workload = lb_domset(2)
        self.assertEqual(workload.n, 22)
        self.assertEqual(len(workload.edges), 45)
        self.assertEqual(workload.delta, 15)
        # batches of 3, 4, 3, 5 vertices after the 7 hubs
        root_edges = [v for u, v in workload.edges if u == 7]
        self.assertEqual(root_edges, list(range(8, 23)))

    def test_deletions_peel_from_the_root(self):
        workload = lb_domset(2)
        self.assertEqual(workload.ops[0], UpdateOp(OpKind.DELETE, (7, 8)))
        self.assertEqual(len(workload.ops), len(workload.edges))
        self.assertTrue(all(op.kind is OpKind.DELETE for op in workload.ops))
        self.assertEqual({op.items[0] for op in workload.ops[:15]}, {7})
        self.assertEqual(sorted(op.items for op in workload.ops), sorted(workload.edges))


if __name__ == '__main__':
    unittest.main()
