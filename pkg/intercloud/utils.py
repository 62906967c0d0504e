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

r"""
Utilities
---------

Logging, the simulator's random number generator and testing helpers.
"""

import logging
import os


class ColoredFormatter(logging.Formatter):

    BLACK, RED, GREEN, YELLOW, BLUE, MAGENTA, CYAN, WHITE = list(range(8))

    RESET_SEQ = "\033[0m"
    COLOR_SEQ = "\033[0;%dm"
    COLOR_SEQ_BOLD = "\033[1;%dm"
    BOLD_SEQ = "\033[1m"

    COLORS = {
        'DEBUG': BLUE,
        'INFO': WHITE,
        'WARNING': YELLOW,
        'CRITICAL': MAGENTA,
        'ERROR': RED
    }

    def __init__(self):
        msg = '%(runtime)f %(where)-15s $BOLD%(name)-5s$RESET %(levelname)-9s %(message)s'
        msg = msg.replace("$RESET", ColoredFormatter.RESET_SEQ).replace(
            "$BOLD", ColoredFormatter.BOLD_SEQ)
        logging.Formatter.__init__(self, fmt=msg)

    @staticmethod
    def colorize(string, color, bold=False):
        cs = ColoredFormatter.COLOR_SEQ_BOLD if bold else ColoredFormatter.COLOR_SEQ
        string = '%s%s%s' % (
            cs % (30 + color), string, ColoredFormatter.RESET_SEQ)
        string = "%-20s" % string
        return string

    def format(self, record):
        # the record is shared with other handlers, don't colorize it in place
        record = logging.makeLogRecord(record.__dict__)
        levelname = record.levelname
        if levelname in ColoredFormatter.COLORS:
            col = ColoredFormatter.COLORS[levelname]
            record.name = self.colorize(record.name, col, True)
            record.levelname = self.colorize(levelname, col, True)
            record.msg = self.colorize(record.getMessage(), col)
            record.args = None
        return logging.Formatter.format(self, record)


class IntercloudContext(logging.Filter):

    """
    Adds ``runtime`` (seconds since logging started) and ``where``
    (``file:line``) to each record.
    """

    def filter(self, record):
        record.runtime = record.relativeCreated / 1000.
        record.where = "%s:%s" % (os.path.splitext(record.filename)[0], record.lineno)
        return True


def create_logger(name, level=logging.INFO):
    """
    Creates logger with ``name`` and given ``level`` logging level.
    Calling it again for the same name only adjusts the level.
    """
    logger = logging.getLogger("intercloud.%s" % name.strip())
    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    if not logger.handlers:
        logger.addFilter(IntercloudContext())
        log_stream_handler = logging.StreamHandler()
        log_stream_handler.setFormatter(ColoredFormatter())
        logger.addHandler(log_stream_handler)
    for h in logger.handlers:
        h.setLevel(level)
    return logger


def info():
    """
    Shows a bit of info about the libraries and other environment information.
    """
    import subprocess
    v = {}

    def version(what):
        m = __import__(what)
        v[what] = m.__version__

    version("numpy")
    version("cryptography")
    version("scipy")
    version("pandas")
    try:
        git = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        head = git.stdout.decode('ascii', 'replace').strip()
    except OSError:
        head = ""
    v['git HEAD'] = head or "unknown"
    return v


class SimRandom:

    """
    64-bit multiplicative congruential generator,
    :math:`x_{n+1} = a \\cdot x_n \\bmod 2^{64}` with an odd state.
    Same seed, same numbers, on every platform.

    >>> r = SimRandom(42)
    >>> r.randint(0, 9) == SimRandom(42).randint(0, 9)
    True
    """

    MULTIPLIER = 0xd1342543de82ef95
    MASK = (1 << 64) - 1

    def __init__(self, seed=0):
        self.seed = int(seed)
        self._state = ((self.seed << 1) | 1) & SimRandom.MASK
        # decorrelate neighbouring seeds
        for _ in range(4):
            self.next_u64()

    def next_u64(self):
        self._state = (self._state * SimRandom.MULTIPLIER) & SimRandom.MASK
        return self._state

    def next_u32(self):
        return self.next_u64() >> 32

    def randbelow(self, n):
        """
        Uniform integer in ``[0, n)``, by rejection sampling on the upper
        32 bits of the state. Ranges wider than ``2**32`` concatenate draws.
        """
        if n <= 0:
            raise ValueError("n out of range: %s" % n)
        # low bits of the state are weak, only the upper half is used
        words = max(1, ((n - 1).bit_length() + 31) // 32)
        span = 1 << (32 * words)
        limit = span - (span % n)
        while True:
            x = 0
            for _ in range(words):
                x = (x << 32) | self.next_u32()
            if x < limit:
                return x % n

    def randint(self, lo, hi):
        """
        Inclusive on both ends.
        """
        return lo + self.randbelow(hi - lo + 1)

    def random(self):
        return (self.next_u64() >> 11) / float(1 << 53)

    def randbytes(self, n):
        return bytes(self.next_u32() & 0xFF for _ in range(n))

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, lst):
        for i in range(len(lst) - 1, 0, -1):
            j = self.randbelow(i + 1)
            lst[i], lst[j] = lst[j], lst[i]
        return lst

    def sample(self, seq, k):
        pool = list(seq)
        self.shuffle(pool)
        return pool[:k]


# Testing

import unittest
import functools


def expected_failure(exptn, reason=None):
    """
    Wrapper for a test function, which expects a certain Exception.

    Example::

        @expected_failure(AdmissionRejected, "WrongDomain")
        def test_wrong_domain(self):
            root.admit_cloud(b1, evidence)

    @param Exception exptn: exception class
    @param str reason: expected ``reason`` attribute of the exception
    """
    def wrapper(testfn):
        @functools.wraps(testfn)
        def inner(*args, **kwargs):
            try:
                testfn(*args, **kwargs)
            except exptn as ex:
                if reason is not None:
                    assert getattr(ex, 'reason', None) == reason, \
                        "reason: '%s'" % getattr(ex, 'reason', None)
            else:
                raise AssertionError("No Exception '%s' raised in '%s'" %
                                     (exptn.__name__, testfn.__name__))
        return inner
    return wrapper


def data_file(name):
    """
    Path of a bundled topology or scenario.
    """
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', name)


class IntercloudTestCase(unittest.TestCase):

    """
    Provides a testing :class:`~intercloud.config.Config` and the bundled
    topologies.
    """

    def __init__(self, name):
        unittest.TestCase.__init__(self, name)
        from intercloud.config import Config
        self.config = Config(testing_mode=True)

    def load_topology(self, name):
        from intercloud.topology import load_topology
        return load_topology(data_file(name), self.config)

    def federation(self):
        return self.load_topology('fig2.topo')

    def simulator(self, topology, seed=0):
        from intercloud.core import Simulator
        return Simulator(topology, config=self.config, seed=seed)

    def random_files(self, rnd, max_files=16, max_size=4096):
        """
        A random file set as ``(path, mode, modified_at, payload)`` tuples.
        """
        names = ["a", "b", "c", "docs", "img", "x.txt", "z-1"]
        files = {}
        for _ in range(rnd.randint(0, max_files)):
            depth = rnd.randint(1, 3)
            path = "/".join(rnd.choice(names) for _ in range(depth))
            path += "-%d" % rnd.randint(0, 99)
            files[path] = (path, rnd.randint(0, 0o7777), rnd.randint(-2 ** 40, 2 ** 40),
                           rnd.randbytes(rnd.randint(0, max_size)))
        return list(files.values())
