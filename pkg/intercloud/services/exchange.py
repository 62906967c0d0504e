# -*- coding: utf8 -*-
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
from intercloud.core import Module
from intercloud_lib.exchange import ExchangeError
from intercloud_lib.udf import FormatError, UdfError, udf_pack, udf_unpack

ACTOR = "exchange"


class ExchangeService(Module):

    """
    Stores UDF archives through the exchange root. Engines hosted on a
    crashed node are dead until it recovers, objects on them are not
    retrievable meanwhile.
    """

    def __init__(self, simulator):
        Module.__init__(self, simulator, 'exchange')
        self.logger = self.config.get_logger('EXCH')

    @property
    def exchange(self):
        return self.topology.exchange

    def on_store_object(self, key, files=None, archive=None):
        """
        Either ``files`` (``(path, mode, modified_at, payload)`` tuples, packed
        here) or a ready ``archive`` is stored.
        """
        try:
            if archive is None:
                archive = udf_pack(files or [])
            receipt = self.exchange.store(key, archive)
        except (UdfError, ExchangeError) as ex:
            self.record(ACTOR, 'store', 'key=%s error=%s' % (key, ex.reason))
            return
        self.logger.debug("loads after %s: %s" % (key, self.exchange.loads()))
        self.record(ACTOR, 'store', 'key=%s engine=%s size=%d sha256=%s' %
                    (key, receipt.engine_id, receipt.size, receipt.checksum.hex()[:16]))

    def on_retrieve_object(self, key):
        try:
            data = self.exchange.retrieve(key)
        except ExchangeError as ex:
            self.record(ACTOR, 'retrieve', 'key=%s error=%s' % (key, ex.reason))
            return
        try:
            files = len(udf_unpack(data))
        except FormatError:
            files = "opaque"
        self.record(ACTOR, 'retrieve', 'key=%s engine=%s size=%d files=%s' %
                    (key, self.exchange.placement[key], len(data), files))

    def on_crash_node(self, node):
        for engine in self.topology.engines_on(node):
            if engine.alive:
                self.exchange.kill_engine(engine.id)
                self.record(engine.id, 'engine-down', 'host=%s objects=%d' %
                            (node, len(engine.objects)))

    def on_recover_node(self, node):
        for engine in self.topology.engines_on(node):
            if not engine.alive:
                self.exchange.revive_engine(engine.id)
                self.record(engine.id, 'engine-up', 'host=%s' % node)
