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

from intercloud.utils import IntercloudTestCase, data_file, expected_failure
from intercloud.scenario import ScenarioError, ScenarioReferenceError, ScenarioScript

BIND_C1 = "negotiate C1 SecureChannel\nnegotiate C1 Authenticate\nnegotiate C1 Bind\n"


class TestSyntax(unittest.TestCase):

    def assertSyntaxError(self, text, lineno):
        with self.assertRaises(ScenarioError) as ctx:
            ScenarioScript.parse(text, "bad.scn")
        self.assertNotIsInstance(ctx.exception, ScenarioReferenceError)
        self.assertEqual(ctx.exception.lineno, lineno)
        self.assertTrue(str(ctx.exception).startswith("bad.scn:%d: " % lineno))

    def test_bundled(self):
        script = ScenarioScript.load(data_file("c1-to-fc1.scn"))
        self.assertEqual(len(script), 6)
        self.assertEqual(script.commands[3].name, "send")
        self.assertEqual(script.commands[3].args[3:], ("hello", "C2"))
        self.assertEqual(script.commands[3].lineno, 5)

    def test_comments_and_blanks(self):
        self.assertEqual(len(ScenarioScript.parse("# nothing\n\n   \nrun-until 3\n")), 1)

    def test_errors(self):
        cases = ["dance C1",
                 "run-until",
                 "run-until 1 2",
                 "run-until soon",
                 "set-trust a1@domA total",
                 "admit a1",
                 "send C1@x c2@y Chat hi",
                 "send c1@x c2@y Shout hi",
                 "send c1@x c2@y Chat @random:many",
                 "send c1@x c2@y Chat @random:4 more",
                 "negotiate C1 Login",
                 "store k index.html",
                 "store k ../up=x",
                 "failover web a1@domA b1",
                 "query-trust a1@domA b1"]
        for text in cases:
            self.assertSyntaxError("run-until 0\n" + text + "\n", 2)

    @expected_failure(ScenarioError)
    def test_unreadable(self):
        ScenarioScript.load("/nonexistent/x.scn")


class TestReferences(IntercloudTestCase):

    def assertReferenceError(self, text, lineno, topology='fig2.topo'):
        script = ScenarioScript.parse(text, "ref.scn")
        with self.assertRaises(ScenarioReferenceError) as ctx:
            script.bind(self.load_topology(topology))
        self.assertEqual(ctx.exception.lineno, lineno)

    def test_errors(self):
        self.assertReferenceError("admit z9@domA\n", 1)
        self.assertReferenceError("run-until 1\nsend c1@clouda.example c9@cloudb.example Chat\n", 2)
        self.assertReferenceError("negotiate S1 Bind\n", 1)
        self.assertReferenceError("negotiate X9 Bind\n", 1)
        self.assertReferenceError("crash X9\n", 1)
        self.assertReferenceError("retrieve k\nstore k a=b\n", 1)
        self.assertReferenceError("transfer-vm web b1@domB\n", 1)
        self.assertReferenceError("query-trust a1@domA q@domB\n", 1)
        self.assertReferenceError("failover web a1@provA z@provB\n", 1, 'failover.topo')

    def test_valid(self):
        script = ScenarioScript.load(data_file("failover.scn"))
        self.assertIs(script.bind(self.load_topology('failover.topo')), script)


class TestPlay(IntercloudTestCase):

    def play(self, topology, text, seed=0):
        sim = self.simulator(self.load_topology(topology), seed=seed)
        ScenarioScript.parse(text).play(sim)
        return sim

    def test_c1_to_fc1(self):
        with open(data_file("c1-to-fc1.scn")) as f:
            sim = self.play('fig2.topo', f.read())
        delivered = [r.outcome for r in sim.trace.actions('deliver')]
        self.assertEqual(delivered, ["msg=1 path=C1,S1,S2,C2", "msg=2 path=C1,S1,G1,FN1,FC1"])
        self.assertEqual(sim.now, 10)
        payloads = [m.payload for m in sim.module('messaging').delivered]
        self.assertEqual(payloads, [b"hello C2", b"hello FC1"])

    def test_failover_script(self):
        with open(data_file("failover.scn")) as f:
            sim = self.play('failover.topo', f.read())
        t = sim.trace
        self.assertIn("path=CrossDomainRecommendation level=Full", t.actions('trust')[0].outcome)
        self.assertTrue(t.actions('store')[0].outcome.startswith("key=backup engine=EA "))
        self.assertEqual(t.last('retrieve').outcome, "key=backup error=EngineDown")
        self.assertEqual([r.outcome for r in t.actions('transfer')],
                         ["TransferCompleted from=a1@provA to=b1@provB",
                          "TransferCompleted from=ra@provA to=rb@provB"])
        self.assertEqual(t.actions('transfer')[1].tick, 5)

    def test_failover_twice(self):
        sim = self.play('failover.topo', "failover web a1@provA b1@provB\n"
                                         "failover web a1@provA b1@provB\n")
        self.assertEqual(sim.trace.last('failover').outcome, "error=NotDeployed on=b1@provB")

    def test_random_payload(self):
        text = BIND_C1 + "send c1@clouda.example c2@cloudb.example Chat @random:32\n"

        def payload(seed):
            return self.play('fig2.topo', text, seed).module('messaging').delivered[0].payload

        self.assertEqual(len(payload(1)), 32)
        self.assertEqual(payload(1), payload(1))
        self.assertNotEqual(payload(1), payload(2))

    def test_same_trace(self):
        with open(data_file("failover.scn")) as f:
            text = f.read()
        traces = set(self.play('failover.topo', text).trace.serialize() for _ in range(3))
        self.assertEqual(len(traces), 1)


if __name__ == '__main__':
    unittest.main()
