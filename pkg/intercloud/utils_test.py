# -*- coding: utf-8 -*-
# Copyright 2012 Harald Schilly <harald.schilly@univie.ac.at>
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import doctest
import logging
import os
import unittest

import numpy as np
from intercloud.utils import (ColoredFormatter, SimRandom, create_logger, data_file,
                              expected_failure)


class TestSimRandom(unittest.TestCase):

    def test_known_value(self):
        # state 1 after seeding 0, four warm-up steps
        self.assertEqual(SimRandom(0).next_u64(), pow(SimRandom.MULTIPLIER, 5, 2 ** 64))

    def test_same_seed(self):
        a, b = SimRandom(123), SimRandom(123)
        self.assertEqual([a.next_u64() for _ in range(50)], [b.next_u64() for _ in range(50)])
        self.assertEqual(SimRandom(9).randbytes(64), SimRandom(9).randbytes(64))

    def test_neighbouring_seeds(self):
        firsts = set(SimRandom(s).next_u32() for s in range(100))
        self.assertEqual(len(firsts), 100)

    def test_state_stays_odd(self):
        r = SimRandom(4)
        for _ in range(100):
            self.assertEqual(r.next_u64() % 2, 1)

    def test_ranges(self):
        r = SimRandom(1)
        xs = np.array([r.randint(-3, 3) for _ in range(2000)])
        self.assertEqual(xs.min(), -3)
        self.assertEqual(xs.max(), 3)
        # roughly uniform
        counts = np.bincount(xs + 3)
        self.assertTrue(np.all(counts > 200))
        fs = np.array([r.random() for _ in range(1000)])
        self.assertTrue(np.all((fs >= 0) & (fs < 1)))
        self.assertRaises(ValueError, r.randbelow, 0)

    def test_wide_ranges(self):
        r = SimRandom(1)
        xs = [r.randint(-2 ** 40, 2 ** 40) for _ in range(500)]
        self.assertTrue(all(-2 ** 40 <= x <= 2 ** 40 for x in xs))
        self.assertTrue(any(x < -2 ** 32 for x in xs))
        self.assertTrue(any(x > 2 ** 32 for x in xs))
        big = [r.randbelow(3 ** 90) for _ in range(100)]
        self.assertTrue(all(0 <= x < 3 ** 90 for x in big))
        self.assertGreater(max(big), 3 ** 89)
        # the 32-bit path consumes one draw per value
        a, b = SimRandom(5), SimRandom(5)
        a.randbelow(2 ** 32)
        b.next_u32()
        self.assertEqual(a.next_u64(), b.next_u64())

    def test_shuffle_sample(self):
        r = SimRandom(2)
        lst = r.shuffle(list(range(20)))
        self.assertEqual(sorted(lst), list(range(20)))
        s = r.sample("abcdef", 3)
        self.assertEqual(len(set(s)), 3)
        self.assertTrue(set(s) <= set("abcdef"))
        self.assertIn(r.choice([7, 8]), (7, 8))


class TestLogging(unittest.TestCase):

    def test_formatter_leaves_record(self):
        rec = logging.LogRecord("intercloud.TRUST", logging.WARNING, "trust.py", 7,
                                "level %s", ("full",), None)
        rec.runtime, rec.where = 0.5, "trust:7"
        out = ColoredFormatter().format(rec)
        self.assertIn("level full", out)
        self.assertIn(ColoredFormatter.RESET_SEQ, out)
        self.assertEqual(rec.msg, "level %s")
        self.assertEqual(rec.name, "intercloud.TRUST")

    def test_single_handler(self):
        l1 = create_logger("UTEST", logging.ERROR)
        l2 = create_logger("UTEST", logging.DEBUG)
        self.assertIs(l1, l2)
        self.assertEqual(len(l2.handlers), 1)
        self.assertEqual(l2.handlers[0].level, logging.DEBUG)
        self.assertFalse(l2.propagate)


class TestHelpers(unittest.TestCase):

    def test_data_file(self):
        self.assertTrue(os.path.exists(data_file("fig2.topo")))

    def test_expected_failure_reason(self):
        class E(Exception):
            reason = "A"

        @expected_failure(E, "B")
        def wrong_reason():
            raise E()

        @expected_failure(E)
        def nothing():
            pass

        self.assertRaises(AssertionError, wrong_reason)
        self.assertRaises(AssertionError, nothing)


def load_tests(loader, tests, pattern):
    flags = doctest.ELLIPSIS | doctest.NORMALIZE_WHITESPACE
    tests.addTests(doctest.DocTestSuite('intercloud.utils', optionflags=flags))
    return tests


if __name__ == '__main__':
    unittest.main()
