import unittest

from dynamic_cover.config import LOWER_BOUND_EPS
from dynamic_cover.core.errors import InvariantFault
from dynamic_cover.core.ledger import LevelLedger
from dynamic_cover.core.levels import BetaTable, Params
from dynamic_cover.core.state import SolutionState


class TestLevelLedger(unittest.TestCase):
    def setUp(self):
        self.params = Params(eps=LOWER_BOUND_EPS, n_cap=32, strict=False)
        self.ledger = LevelLedger(BetaTable(self.params))

    def test_initial_departure_adds_dirt(self):
        self.ledger.arrival(2)
        self.ledger.arrival(2)
        self.ledger.departure(2, initial=True)
        self.ledger.departure(2, initial=False)
        self.assertAlmostEqual(self.ledger.dirt[2], 0.5)
        self.assertEqual(self.ledger.departures[2], 1)
        self.assertAlmostEqual(self.ledger.total_dirt, 0.5)
        self.assertEqual(self.ledger.departure_log, [(2, True), (2, False)])
        self.assertNotIn(2, self.ledger.covered)

    def test_vacate_adds_no_dirt(self):
        self.ledger.arrival(0)
        self.ledger.vacate(0)
        self.assertEqual(self.ledger.total_dirt, 0.0)
        self.assertEqual(self.ledger.departure_log, [])

    def test_covered_underflow(self):
        with self.assertRaises(InvariantFault):
            self.ledger.departure(3, initial=True)

    def test_cost_snaps_to_zero(self):
        self.ledger.set_enters(1, 0.1)
        self.ledger.set_enters(1, 0.2)
        self.ledger.set_enters(4, 0.7)
        self.ledger.set_leaves(1, 0.1)
        self.ledger.set_leaves(1, 0.2)
        self.assertNotIn(1, self.ledger.cost)
        self.assertNotIn(1, self.ledger.sets)
        self.assertEqual(self.ledger.total_cost, 0.7)
        with self.assertRaises(InvariantFault):
            self.ledger.set_leaves(1, 0.1)

    def test_reset_dirt_up_to_level(self):
        for level in (0, 2, 4):
            self.ledger.arrival(level)
            self.ledger.departure(level, initial=True)
        self.ledger.reset_dirt(2)
        self.assertEqual(sorted(self.ledger.dirt), [4])
        self.assertAlmostEqual(self.ledger.total_dirt, 0.25)
        self.assertEqual(self.ledger.departure_log, [(4, True)])
        self.ledger.reset_dirt(None)
        self.assertEqual(self.ledger.total_dirt, 0.0)

    def test_is_dirty_threshold(self):
        # eps/beta = 1 - 1/sqrt(2) ~ 0.293
        self.ledger.set_enters(0, 1.0)
        self.assertFalse(self.ledger.is_dirty(self.params.eps, self.params.beta))
        self.ledger.arrival(2)
        self.ledger.departure(2, initial=True)
        self.assertTrue(self.ledger.is_dirty(self.params.eps, self.params.beta))
        self.ledger.set_enters(0, 1.0)
        self.assertFalse(self.ledger.is_dirty(self.params.eps, self.params.beta))

    def test_lowest_set_level(self):
        self.assertIsNone(self.ledger.lowest_set_level())
        self.ledger.set_enters(3, 1.0)
        self.ledger.set_enters(1, 1.0)
        self.assertEqual(self.ledger.lowest_set_level(), 1)
        self.assertEqual(self.ledger.set_count(), 2)


class TestSolutionState(unittest.TestCase):
    def setUp(self):
        self.state = SolutionState()

    def test_attach_and_detach(self):
        self.state.open_pair(7, 3)
        self.assertEqual(self.state.attach(1, 7, True), 3)
        self.assertEqual(self.state.attach(2, 7, False), 3)
        self.assertEqual(self.state.items_upto(3), [1, 2])
        self.assertEqual(self.state.detach(1), (7, 3, True))
        self.assertEqual(self.state.items_upto(None), [2])

    def test_close_pair_requires_empty(self):
        self.state.open_pair(1, 0)
        self.state.attach(5, 1, True)
        with self.assertRaises(InvariantFault):
            self.state.close_pair(1)
        self.state.detach(5)
        self.assertEqual(self.state.close_pair(1), 0)
        self.assertEqual(self.state.level_of(1), -1)

    def test_registries_by_level(self):
        self.state.open_pair(1, 0)
        self.state.open_pair(2, 4)
        self.state.open_pair(3, 2)
        self.assertEqual(self.state.sets_upto(2), [1, 3])
        self.assertEqual(self.state.peak_level(), 4)
        self.assertEqual(self.state.move_pair(1, 5), 0)
        self.assertEqual(self.state.sets_upto(None), [3, 2, 1])
        self.assertEqual(self.state.cover_size(), 3)


if __name__ == '__main__':
    unittest.main()
