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

import itertools
import unittest

from intercloud.utils import IntercloudTestCase
from intercloud.topology import parse_topology
from intercloud.scenarios import failover_any, failover_scenario
from intercloud_lib.trust import CloudId


def cell_topology(vm, same_format, same_hal, level, owner_minimum=None, a1_node="SA"):
    """
    An image on ``a1@provA`` and one candidate ``b1@provB`` whose platform
    differs from the source as requested.
    """
    if vm:
        dst = "kind complete-vm\nhal %s\ndisk-formats %s\n" % (
            "x86-hal" if same_hal else "arm-hal", "qcow2 raw" if same_format else "vmdk")
    else:
        dst = "kind runtime-env\nhal %s\napi storage:1\n" % ("x86-hal" if same_hal else "rte-hal")
    owner = "" if owner_minimum is None else "minimum %s\n" % owner_minimum
    a1 = "" if a1_node is None else "node %s\n" % a1_node
    return """\
[domain corp]
token c
%(owner)s
[domain provA]
token a

[domain provB]
token b

[platform vm-a]
kind complete-vm
hal x86-hal
disk-formats qcow2

[platform dst]
%(dst)s
[cloud co@corp]
node HQ
admitted yes

[cloud a1@provA]
%(a1)splatform vm-a
admitted yes
level full

[cloud b1@provB]
node SB
platform dst
admitted yes
level %(level)s

[node HQ]
kind server
links SA SB

[node SA]
kind server

[node SB]
kind server

[image web]
disk-format qcow2
hal x86-hal
owner co@corp
deployed-on a1@provA
""" % dict(owner=owner, dst=dst, a1=a1, level=level)


A1 = CloudId.parse("a1@provA")
B1 = CloudId.parse("b1@provB")


class TestFailoverCells(IntercloudTestCase):

    def run_cell(self, *args, **kwargs):
        topo = parse_topology(cell_topology(*args, **kwargs), self.config)
        sim = self.simulator(topo)
        trace = failover_scenario(sim, "web", A1, B1)
        return sim, trace

    def test_all_cells(self):
        cells = 0
        for (vm, fmt, hal), level in itertools.product(
                itertools.product([True, False], repeat=3), ["untrusted", "marginal", "full"]):
            cells += 1
            sim, trace = self.run_cell(vm, fmt, hal, level)
            web = sim.topology.workloads["web"]
            transfer = trace.last('transfer').outcome
            what = (vm, fmt, hal, level)
            # the crash of provider A comes first
            self.assertEqual((trace[0].actor, trace[0].action), ("SA", "crash"), what)
            if level == "untrusted":
                self.assertEqual(transfer, "TransferBlocked to=b1@provB reason=TrustBelowMinimum "
                                           "level=Untrusted minimum=Marginal", what)
                self.assertEqual(trace.actions('feasibility'), [], what)
                self.assertEqual(web.deployed_on, A1)
                continue
            self.assertEqual(len(trace.actions('feasibility')), 1, what)
            trust = trace.last('trust')
            self.assertLess(trace.records.index(trust),
                            trace.records.index(trace.last('feasibility')))
            self.assertIn("level=%s" % level.capitalize(), trust.outcome)
            if vm and fmt and hal:
                self.assertEqual(transfer, "TransferCompleted from=a1@provA to=b1@provB", what)
                self.assertEqual(web.deployed_on, B1)
                self.assertEqual(trace.last('failover').outcome, "from=a1@provA candidates=b1@provB")
            else:
                expected = []
                if not vm:
                    expected.append("KindMismatch")
                if not (vm and fmt):
                    expected.append("DiskFormatUnsupported")
                if not hal:
                    expected.append("HalMismatch")
                self.assertEqual(transfer, "TransferBlocked to=b1@provB report=%s" %
                                 ",".join(expected), what)
                self.assertEqual(trace.last('failover').outcome, "failed", what)
                self.assertEqual(web.deployed_on, A1)
        self.assertEqual(cells, 24)

    def test_owner_minimum(self):
        sim, trace = self.run_cell(True, True, True, "marginal", owner_minimum="full")
        self.assertTrue(trace.last('transfer').outcome.startswith(
            "TransferBlocked to=b1@provB reason=TrustBelowMinimum"))
        self.assertEqual(trace.actions('feasibility'), [])

    def test_provider_without_node(self):
        topo = parse_topology(cell_topology(True, True, True, "full", a1_node=None), self.config)
        self.assertRaises(ValueError, failover_scenario, self.simulator(topo), "web", A1, B1)


class TestFailoverAny(IntercloudTestCase):

    def setUp(self):
        self.sim = self.simulator(self.load_topology('failover.topo'))

    def test_candidates_in_order(self):
        rb, b1 = CloudId.parse("rb@provB"), CloudId.parse("b1@provB")
        trace = failover_any(self.sim, "web", "a1@provA", ["rb@provB", "b1@provB"])
        blocked, done = trace.actions('transfer')
        self.assertEqual(blocked.outcome, "TransferBlocked to=rb@provB report=KindMismatch,"
                                          "DiskFormatUnsupported,HalMismatch")
        self.assertEqual(done.outcome, "TransferCompleted from=a1@provA to=b1@provB")
        self.assertEqual(self.sim.topology.workloads["web"].deployed_on, b1)
        self.assertEqual([r.outcome for r in trace.actions('trust')][0].split()[0],
                         "target=%s" % rb)

    def test_application(self):
        trace = failover_any(self.sim, "shop", "ra@provA", ["rb@provB"])
        self.assertEqual(trace.last('feasibility').outcome, "to=rb@provB feasible")
        self.assertEqual(trace.last('transfer').outcome,
                         "TransferCompleted from=ra@provA to=rb@provB")
        self.assertEqual(trace.actions('adapt'), [])

    def test_same_tick(self):
        self.sim.run_until(7)
        trace = failover_any(self.sim, "web", "a1@provA", ["b1@provB"])
        self.assertEqual(set(r.tick for r in trace), {7})

    def test_precondition(self):
        self.assertRaises(ValueError, failover_any, self.sim, "nothing", "a1@provA", [])
        self.assertRaises(ValueError, failover_any, self.sim, "web", "b1@provB", [])
        self.assertEqual(len(self.sim.trace), 0)

    def test_no_candidates(self):
        trace = failover_any(self.sim, "web", "a1@provA", [])
        self.assertEqual(trace.last('failover').outcome, "failed")


if __name__ == '__main__':
    unittest.main()
