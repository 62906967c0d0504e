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

import unittest

import mock
from intercloud.utils import IntercloudTestCase
from intercloud.core import EventKind
from intercloud_lib.trust import CloudId, TrustLevel
from intercloud_lib.messaging import (Message, MessageKind, Phase, SessionEvent,
                                      parse_address)


class ServicesTestCase(IntercloudTestCase):

    def setUp(self):
        self.sim = self.simulator(self.federation())

    def bind(self, node="C1"):
        for ev in SessionEvent:
            self.sim.schedule(EventKind.NEGOTIATE, node=node, event=ev)

    def send(self, frm, to, kind=MessageKind.CHAT, at=None):
        msg = Message(parse_address(frm), parse_address(to), kind, b"hello",
                      msg_id=self.sim.next_message_id())
        self.sim.schedule(EventKind.DELIVER, at=at, message=msg)
        return msg.msg_id

    def records(self, msg_id, *actions):
        tag = "msg=%d" % msg_id
        return [(r.tick, r.actor, r.action) for r in self.sim.trace
                if r.outcome.split(" ")[0] == tag and (not actions or r.action in actions)]


class TestMessaging(ServicesTestCase):

    def test_core_path(self):
        self.bind()
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.run()
        self.assertEqual(self.records(m, 'hop'), [(0, "C1", "hop"), (1, "S1", "hop"),
                                                  (2, "S2", "hop"), (3, "C2", "hop")])
        deliver = self.sim.trace.last('deliver')
        self.assertEqual(deliver.tick, 3)
        self.assertEqual(deliver.outcome, "msg=%d path=C1,S1,S2,C2" % m)

    def test_into_foreign_network(self):
        self.bind()
        m = self.send("c1@clouda.example", "fc1@legacy.example")
        self.sim.run()
        self.assertEqual([t for t, _, _ in self.records(m, 'hop')], [0, 1, 2, 3, 4])
        out = self.sim.trace.last('translate-out')
        self.assertEqual((out.tick, out.actor), (2, "G1"))
        self.assertEqual(out.outcome, "msg=%d from=c1@clouda.example to=fc1-legacy" % m)
        self.assertEqual(self.sim.trace.last('deliver').outcome,
                         "msg=%d path=C1,S1,G1,FN1,FC1" % m)

    def test_out_of_foreign_network(self):
        self.bind()
        m = self.send("fc1@legacy.example", "c1@clouda.example/app", MessageKind.CONTROL)
        self.sim.run()
        tin = self.sim.trace.last('translate-in')
        self.assertEqual((tin.tick, tin.actor), (2, "G1"))
        self.assertEqual(tin.outcome, "msg=%d from=fc1@legacy.example "
                                      "to=c1@clouda.example/app kind=Chat" % m)
        delivered = self.sim.module('messaging').delivered[-1]
        self.assertEqual(delivered.kind, MessageKind.CHAT)
        self.assertEqual(delivered.hop_trace, ("FC1", "FN1", "G1", "S1", "C1"))

    def test_not_bound(self):
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.run()
        self.assertEqual(self.sim.trace.last('send').outcome,
                         "msg=%d error=SessionNotBound" % m)

    def test_crashed_before_send(self):
        self.bind()
        self.sim.schedule(EventKind.CRASH_NODE, node="S1")
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.run()
        self.assertEqual(self.sim.trace.last('send').outcome, "msg=%d error=NoRoute" % m)
        self.assertEqual(self.records(m, 'hop', 'deliver'), [])

    def test_crash_while_underway(self):
        self.bind()
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.schedule(EventKind.CRASH_NODE, at=2, node="S2")
        self.sim.run()
        drop = self.sim.trace.last('drop')
        self.assertEqual((drop.tick, drop.actor, drop.outcome),
                         (2, "S2", "msg=%d reason=NodeDown" % m))
        self.assertIsNone(self.sim.trace.last('deliver'))

    def test_recover(self):
        self.bind()
        self.sim.schedule(EventKind.CRASH_NODE, node="S2")
        self.sim.schedule(EventKind.RECOVER_NODE, at=1, node="S2")
        self.sim.run_until(1)
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.run()
        self.assertEqual(self.sim.trace.last('deliver').outcome,
                         "msg=%d path=C1,S1,S2,C2" % m)

    def test_negotiate(self):
        self.sim.schedule(EventKind.NEGOTIATE, node="C1", event=SessionEvent.AUTHENTICATE)
        self.sim.schedule(EventKind.NEGOTIATE, node="S1", event=SessionEvent.BIND)
        self.bind()
        self.sim.run()
        outcomes = [r.outcome for r in self.sim.trace.actions('negotiate')]
        self.assertEqual(outcomes, ["Authenticate error=OrderingViolation phase=Connected",
                                    "Bind error=NoSession",
                                    "SecureChannel phase=Secured",
                                    "Authenticate phase=Authenticated",
                                    "Bind phase=Bound"])

    def test_crash_resets_session(self):
        self.bind()
        self.sim.schedule(EventKind.CRASH_NODE, at=1, node="C1")
        self.sim.schedule(EventKind.RECOVER_NODE, at=2, node="C1")
        self.sim.run()
        self.assertEqual(self.sim.topology.network.sessions["C1"].phase, Phase.CONNECTED)

    def test_hop_latency(self):
        self.config.hop_latency = 5
        self.bind()
        m = self.send("c1@clouda.example", "c2@cloudb.example")
        self.sim.run()
        self.assertEqual([t for t, _, _ in self.records(m, 'hop')], [0, 5, 10, 15])


class TestTrust(ServicesTestCase):

    a1 = CloudId.parse("a1@domA")
    b1 = CloudId.parse("b1@domB")

    def test_query(self):
        self.sim.schedule(EventKind.TRUST_QUERY, requester=self.a1, target=self.b1)
        self.sim.run()
        r = self.sim.trace.last('trust')
        self.assertEqual(r.actor, "a1@domA")
        self.assertEqual(r.outcome, "target=b1@domB path=CrossDomainRecommendation "
                                    "level=Marginal recommended=Marginal")

    def test_admit_and_set(self):
        c = CloudId.parse("a9@domA")
        self.sim.topology.add_cloud(c)
        self.sim.schedule(EventKind.ADMIT_CLOUD, cloud=c, token="wrong")
        self.sim.schedule(EventKind.ADMIT_CLOUD, cloud=c)
        self.sim.schedule(EventKind.SET_TRUST, cloud=c, level=TrustLevel.FULL)
        self.sim.schedule(EventKind.SET_TRUST, cloud=CloudId.parse("zz@domA"),
                          level=TrustLevel.FULL)
        self.sim.run()
        outcomes = [(r.actor, r.outcome) for r in self.sim.trace]
        self.assertEqual(outcomes, [
            ("root:domA", "a9@domA rejected=AuthenticationFailed"),
            ("root:domA", "a9@domA serial=2 level=Marginal expires=1000"),
            ("root:domA", "a9@domA level=Full"),
            ("root:domA", "zz@domA error=NotAdmitted")])

    def test_crash_revokes(self):
        self.sim.schedule(EventKind.CRASH_NODE, node="S2")
        self.sim.schedule(EventKind.TRUST_QUERY, requester=self.a1, target=self.b1)
        self.sim.schedule(EventKind.TRUST_QUERY, requester=self.b1, target=self.a1)
        self.sim.run()
        revoke = self.sim.trace.last('revoke')
        self.assertEqual((revoke.actor, revoke.outcome), ("root:domB", "b1@domB reason=NodeDown"))
        trust = self.sim.trace.actions('trust')
        self.assertEqual(trust[0].outcome, "target=b1@domB path=Denied level=Untrusted")
        self.assertEqual(trust[1].outcome, "target=a1@domA error=RequesterNotAdmitted")

    def test_readmission_after_recovery(self):
        self.sim.schedule(EventKind.CRASH_NODE, node="S2")
        self.sim.schedule(EventKind.RECOVER_NODE, at=1, node="S2")
        self.sim.schedule(EventKind.ADMIT_CLOUD, at=2, cloud=self.b1)
        self.sim.schedule(EventKind.TRUST_QUERY, at=2, requester=self.a1, target=self.b1)
        self.sim.run()
        self.assertIn("path=CrossDomainRecommendation", self.sim.trace.last('trust').outcome)


class TestExchange(ServicesTestCase):

    FILES = [("site/index.html", 0o644, 0, b"hello")]

    def test_store_retrieve(self):
        self.sim.schedule(EventKind.STORE_OBJECT, key="k", files=self.FILES)
        self.sim.schedule(EventKind.RETRIEVE_OBJECT, key="k")
        self.sim.schedule(EventKind.STORE_OBJECT, key="k", files=self.FILES)
        self.sim.schedule(EventKind.STORE_OBJECT, key="raw", archive=b"opaque")
        self.sim.schedule(EventKind.RETRIEVE_OBJECT, key="raw")
        self.sim.run()
        store, again, raw = self.sim.trace.actions('store')
        self.assertTrue(store.outcome.startswith("key=k engine=E1 size="))
        self.assertEqual(again.outcome, "key=k error=DuplicateKey")
        self.assertTrue(raw.outcome.startswith("key=raw engine=E2 size=6 "))
        got, opaque = self.sim.trace.actions('retrieve')
        self.assertTrue(got.outcome.endswith("files=1"))
        self.assertTrue(opaque.outcome.endswith("files=opaque"))

    def test_engine_down(self):
        self.sim.schedule(EventKind.STORE_OBJECT, key="k", files=self.FILES)
        self.sim.schedule(EventKind.CRASH_NODE, node="S1")
        self.sim.schedule(EventKind.RETRIEVE_OBJECT, key="k")
        self.sim.schedule(EventKind.RECOVER_NODE, node="S1")
        self.sim.schedule(EventKind.RETRIEVE_OBJECT, key="k")
        self.sim.run()
        self.assertEqual(self.sim.trace.last('engine-down').outcome, "host=S1 objects=1")
        first, second = self.sim.trace.actions('retrieve')
        self.assertEqual(first.outcome, "key=k error=EngineDown")
        self.assertIn("engine=E1", second.outcome)

    def test_illegal_files(self):
        self.sim.schedule(EventKind.STORE_OBJECT, key="k", files=[("../x", 0, 0, b"")])
        self.sim.run()
        self.assertEqual(self.sim.trace.last('store').outcome, "key=k error=IllegalPath")


class TestMigration(IntercloudTestCase):

    def setUp(self):
        self.sim = self.simulator(self.load_topology('failover.topo'))
        self.b1 = CloudId.parse("b1@provB")

    def test_transfer_vm(self):
        self.sim.schedule(EventKind.TRANSFER_VM, workload="web", dst=self.b1)
        self.sim.run()
        self.assertEqual([r.action for r in self.sim.trace], ['feasibility', 'adapt', 'transfer'])
        self.assertEqual(self.sim.trace.last('adapt').outcome, "to=b1@provB dropped=host.storage")
        self.assertEqual(self.sim.trace.last('transfer').outcome,
                         "TransferCompleted from=a1@provA to=b1@provB")
        web = self.sim.topology.workloads["web"]
        self.assertEqual(web.deployed_on, self.b1)
        self.assertEqual(web.item.config.entries["host.nic"], "eth-b")

    def test_transfer_to_runtime_env(self):
        self.sim.schedule(EventKind.TRANSFER_VM, workload="web", dst=CloudId.parse("rb@provB"))
        self.sim.run()
        self.assertEqual(self.sim.trace.last('transfer').outcome,
                         "TransferBlocked to=rb@provB report=KindMismatch,"
                         "DiskFormatUnsupported,HalMismatch")

    def test_warns_on_dropped_keys(self):
        migration = self.sim.module('migration')
        with mock.patch.object(migration, 'logger') as logger:
            self.sim.schedule(EventKind.TRANSFER_VM, workload="web", dst=self.b1)
            self.sim.run()
        self.assertEqual(logger.warning.call_count, 1)


if __name__ == '__main__':
    unittest.main()
