# -*- coding: utf8 -*-
# Copyright 2012 -- 2013 Harald Schilly <harald.schilly@univie.ac.at>
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
Exchange Root
=============

The exchange root sits in front of several :class:`storage engines <.StorageEngine>`
and balances the requests: a new object goes to the alive engine with enough
free space and the smallest load ratio ``used / capacity``
(:func:`.select_engine`). Ties go to the smallest engine id.

Objects are :mod:`UDF <intercloud_lib.udf>` archives. There is no replication,
reading from a dead engine fails with ``EngineDown``.

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""
# ATTN: this module must not depend on the config or the simulator.
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .udf import digest


class ExchangeError(Exception):

    """
    ``reason`` is ``NoCapacity``, ``DuplicateKey``, ``UnknownKey``,
    ``EngineDown`` or ``UnknownEngine``.
    """

    def __init__(self, reason, msg):
        Exception.__init__(self, "%s: %s" % (reason, msg))
        self.reason = reason


class StorageEngine:

    """
    One storage back-end.
    """

    def __init__(self, engine_id, capacity_bytes, host=None):
        if capacity_bytes < 0:
            raise ValueError("negative capacity for %s" % engine_id)
        self.id = engine_id
        self.capacity_bytes = int(capacity_bytes)
        self.host = host
        self.alive = True
        self.objects = {}

    @property
    def used_bytes(self):
        return sum(len(o) for o in self.objects.values())

    @property
    def free_bytes(self):
        return self.capacity_bytes - self.used_bytes

    @property
    def load_ratio(self):
        """
        Exact ``used / capacity``, a full engine without capacity counts as 1.
        """
        if self.capacity_bytes == 0:
            return Fraction(1)
        return Fraction(self.used_bytes, self.capacity_bytes)

    def fits(self, size):
        return self.alive and self.free_bytes >= size

    def __repr__(self):
        return "StorageEngine[%s %d/%d%s]" % (
            self.id, self.used_bytes, self.capacity_bytes, "" if self.alive else " dead")


@dataclass(frozen=True)
class Receipt:
    key: str
    engine_id: str
    size: int
    checksum: bytes


class ExchangeRoot:

    """
    :param engines: list of :class:`.StorageEngine`
    """

    def __init__(self, engines=()):
        self.engines = []
        self._by_id = {}
        self.placement = {}
        for e in engines:
            self.add_engine(e)

    def add_engine(self, engine):
        if engine.id in self._by_id:
            raise ValueError("engine %s declared twice" % engine.id)
        self.engines.append(engine)
        self._by_id[engine.id] = engine
        return engine

    def engine(self, engine_id):
        try:
            return self._by_id[engine_id]
        except KeyError:
            raise ExchangeError("UnknownEngine", engine_id)

    def kill_engine(self, engine_id):
        self.engine(engine_id).alive = False

    def revive_engine(self, engine_id):
        self.engine(engine_id).alive = True

    def loads(self):
        """
        Load ratios in engine order, a :class:`numpy.ndarray`.
        """
        return np.array([float(e.load_ratio) for e in self.engines], dtype=np.float64)

    def object_counts(self):
        return np.array([len(e.objects) for e in self.engines], dtype=np.int64)

    def select_engine(self, request_size):
        return select_engine(self, request_size)

    def store(self, key, archive_bytes):
        return store(self, key, archive_bytes)

    def retrieve(self, key):
        return retrieve(self, key)


def select_engine(root, request_size):
    """
    The id of the alive engine with room for ``request_size`` bytes and the
    smallest load ratio, ties broken by the bytes of the engine id.

    :raises ExchangeError: ``NoCapacity``
    """
    if request_size < 0:
        raise ValueError("negative request size %d" % request_size)
    candidates = [e for e in root.engines if e.fits(request_size)]
    if not candidates:
        raise ExchangeError("NoCapacity", "no engine fits %d bytes" % request_size)
    best = min(candidates, key=lambda e: (e.load_ratio, e.id.encode('utf-8')))
    return best.id


def store(root, key, archive_bytes):
    """
    Places the archive on the engine chosen by :func:`.select_engine`.
    The bytes are stored as they are, see :func:`intercloud_lib.udf.udf_verify`.

    :raises ExchangeError: ``DuplicateKey``, ``NoCapacity``
    :rtype: Receipt
    """
    if key in root.placement:
        raise ExchangeError("DuplicateKey", key)
    archive_bytes = bytes(archive_bytes)
    engine = root.engine(select_engine(root, len(archive_bytes)))
    engine.objects[key] = archive_bytes
    root.placement[key] = engine.id
    return Receipt(key, engine.id, len(archive_bytes), digest(archive_bytes))


def retrieve(root, key):
    """
    :raises ExchangeError: ``UnknownKey``, ``EngineDown``
    """
    if key not in root.placement:
        raise ExchangeError("UnknownKey", key)
    engine = root.engine(root.placement[key])
    if not engine.alive:
        raise ExchangeError("EngineDown", "%s is on dead engine %s" % (key, engine.id))
    return engine.objects[key]
