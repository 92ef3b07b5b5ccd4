import os
import tempfile
import unittest
from unittest.mock import MagicMock, patch

from dynamic_cover.utils.metrics import MetricsWriter


class TestMetricsWriter(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_lines_keep_their_order(self):
        path = os.path.join(self.tmp.name, "m.txt")
        with MetricsWriter(path, maxsize=4) as writer:
            for k in range(50):
                writer.put(f"step={k}")
        with open(path, encoding="utf-8") as handle:
            self.assertEqual(handle.read().splitlines(), [f"step={k}" for k in range(50)])
        self.assertEqual(writer.written, 50)

    def test_missing_directory_fails_on_enter(self):
        writer = MetricsWriter(os.path.join(self.tmp.name, "nodir", "m.txt"), maxsize=1)
        with self.assertRaises(OSError):
            writer.__enter__()

    def test_dead_writer_surfaces_on_put(self):
        broken = MagicMock()
        broken.write.side_effect = OSError("disk full")
        writer = MetricsWriter(os.path.join(self.tmp.name, "m.txt"), maxsize=1)
        with patch('dynamic_cover.utils.metrics.open', create=True, return_value=broken):
            writer.__enter__()
        with self.assertRaises(OSError):
            for k in range(10):
                writer.put(f"step={k}")
        with self.assertRaises(OSError):
            writer.close()


if __name__ == '__main__':
    unittest.main()
