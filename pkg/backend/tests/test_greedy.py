import math
import unittest

import numpy as np

from dynamic_cover.core.errors import InfeasibleInstanceError
from dynamic_cover.core.greedy import exact_ratio_cover, greedy_cover, naive_bucket_cover
from dynamic_cover.core.instance import SetSystem
from dynamic_cover.core.levels import BetaTable, Params
from dynamic_cover.services.oracle import BruteForceOracle


def random_system(seed, n=30, m=12, c_ratio=8.0):
    rng = np.random.default_rng(seed)
    sets = {sid: (float(np.exp(-rng.uniform(0, np.log(c_ratio)))), []) for sid in range(1, m + 1)}
    for e in range(1, n + 1):
        for sid in rng.choice(np.arange(1, m + 1), size=int(rng.integers(1, 4)), replace=False):
            sets[int(sid)][1].append(e)
    return SetSystem(sets, c_ratio=c_ratio)


class TestGreedyCover(unittest.TestCase):
    def setUp(self):
        self.table = BetaTable(Params(eps=0.2, n_cap=30, c_ratio=8.0))

    def assertIsCover(self, picks, universe, system):
        covered = set()
        for pick in picks:
            self.assertTrue(set(pick.members) <= set(system.members[pick.set_id]))
            self.assertFalse(covered & set(pick.members))
            covered.update(pick.members)
        self.assertEqual(covered, set(universe))

    def test_bucket_queue_matches_naive_rounds(self):
        for seed in range(8):
            system = random_system(seed)
            universe = system.elements
            fast = greedy_cover(self.table, universe, system.costs, system.coverers)
            slow = naive_bucket_cover(self.table, universe, system.costs, system.coverers)
            self.assertEqual([(p.set_id, p.members, p.level) for p in fast],
                             [(p.set_id, p.members, p.level) for p in slow])
            self.assertIsCover(fast, universe, system)

    def test_pick_levels_never_increase(self):
        system = random_system(11, n=60, m=20)
        picks = greedy_cover(self.table, system.elements, system.costs, system.coverers)
        levels = [p.level for p in picks]
        self.assertEqual(levels, sorted(levels, reverse=True))

    def test_exact_ratio_cover_is_a_cover(self):
        system = random_system(5)
        picks = exact_ratio_cover(self.table, system.elements, system.costs, system.coverers)
        self.assertIsCover(picks, system.elements, system)

    def test_cost_within_greedy_guarantee(self):
        for seed in range(6):
            system = random_system(seed, n=24, m=12)
            universe = system.elements
            oracle = BruteForceOracle({sid: (system.costs[sid], system.members[sid]) for sid in system.costs})
            opt, _ = oracle.optimum(universe)
            bound = (math.log(len(universe)) + 1) * opt
            for cover in (greedy_cover, exact_ratio_cover):
                cost = sum(system.costs[p.set_id] for p in cover(self.table, universe, system.costs, system.coverers))
                self.assertGreaterEqual(cost, opt - 1e-9)
                self.assertLessEqual(cost, bound + 1e-9, f"{cover.__name__} seed {seed}")

    def test_ratio_rule_on_small_family(self):
        system = SetSystem({1: (1 / 3, [1, 2]), 2: (1 / 3, [3]), 3: (1.0, [1, 2, 3])}, c_ratio=3.0)
        for cover in (greedy_cover, exact_ratio_cover):
            picks = cover(self.table, [1, 2, 3], system.costs, system.coverers)
            self.assertEqual([p.set_id for p in picks], [1, 2])
            self.assertAlmostEqual(sum(system.costs[p.set_id] for p in picks), 2 / 3)

    def test_subset_of_candidates(self):
        system = SetSystem({1: (1.0, [1, 2, 3]), 2: (0.5, [3, 4]), 3: (0.25, [4])}, c_ratio=4.0)
        picks = greedy_cover(self.table, [3, 4], {2: 0.5, 3: 0.25}, system.coverers)
        self.assertEqual([p.set_id for p in picks], [2])
        self.assertEqual(picks[0].members, [3, 4])

    def test_missing_candidate_is_infeasible(self):
        system = SetSystem({1: (1.0, [1, 2]), 2: (1.0, [3])})
        with self.assertRaises(InfeasibleInstanceError):
            greedy_cover(self.table, [1, 3], {1: 1.0}, system.coverers)
        with self.assertRaises(InfeasibleInstanceError):
            naive_bucket_cover(self.table, [1, 3], {1: 1.0}, system.coverers)

    def test_empty_universe(self):
        system = SetSystem({1: (1.0, [1])})
        self.assertEqual(greedy_cover(self.table, [], system.costs, system.coverers), [])


if __name__ == '__main__':
    unittest.main()
