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
from dataclasses import replace

from intercloud.core import EventKind, Module
from intercloud_lib.messaging import (NodeKind, OrderingViolation, Phase, RoutingError,
                                      SessionState, UnmappedAddress, negotiate,
                                      next_hop, route)


class MessagingService(Module):

    """
    Moves messages through the network, one hop per ``simulation.hop_latency``
    ticks. The next hop is decided again at every node, so a node crashing
    while a message is underway is honoured. Gateways translate when a
    message crosses into or out of the foreign network.

    Records: ``send``, ``hop``, ``translate-out``, ``translate-in``,
    ``deliver``, ``drop``, ``negotiate``, ``crash`` and ``recover``.
    """

    def __init__(self, simulator):
        Module.__init__(self, simulator, 'messaging')
        self.logger = self.config.get_logger('MSG')
        self.delivered = []

    @property
    def network(self):
        return self.topology.network

    def on_deliver(self, message, at_node=None, origin=None, destination=None):
        if at_node is None:
            self._inject(message)
        else:
            self._arrive(message, at_node, origin, destination)

    def _inject(self, msg):
        net = self.network
        sender = net.node_of(msg.from_) or str(msg.from_)
        try:
            report = route(net, msg)
        except RoutingError as ex:
            self.record(sender, 'send', 'msg=%d error=%s' % (msg.msg_id, ex.reason))
            return
        if not report.delivered:
            self.record(sender, 'send', 'msg=%d error=%s' % (msg.msg_id, report.reason))
            return
        origin, destination = report.path[0], report.path[-1]
        self.record(origin, 'send', 'msg=%d kind=%s to=%s' % (msg.msg_id, msg.kind, msg.to))
        self._arrive(replace(msg, hop_trace=()), origin, origin, destination)

    def _arrive(self, msg, node, origin, destination):
        net = self.network
        if not net.alive(node):
            self.record(node, 'drop', 'msg=%d reason=NodeDown' % msg.msg_id)
            return
        msg = replace(msg, hop_trace=msg.hop_trace + (node,))
        self.record(node, 'hop', 'msg=%d' % msg.msg_id)

        if net.kinds[node] is NodeKind.GATEWAY and len(msg.hop_trace) > 1:
            gw, direction = net.gateway_between(msg.hop_trace[-2], node)
            if direction == 'in':
                # the foreign network carried it in its own form
                try:
                    back = gw.translate_inbound(gw.translate_outbound(msg), msg.msg_id)
                except UnmappedAddress:
                    self.record(node, 'drop', 'msg=%d reason=UnmappedAddress' % msg.msg_id)
                    return
                msg = replace(back, hop_trace=msg.hop_trace)
                self.record(node, 'translate-in', 'msg=%d from=%s to=%s kind=%s' %
                            (msg.msg_id, msg.from_, msg.to, msg.kind))

        if node == destination:
            self.delivered.append(msg)
            self.record(node, 'deliver', 'msg=%d path=%s' % (msg.msg_id, ",".join(msg.hop_trace)))
            return

        nxt = next_hop(net, node, destination, origin)
        if nxt is None:
            self.record(node, 'drop', 'msg=%d reason=NoRoute' % msg.msg_id)
            return
        gw, direction = net.gateway_between(node, nxt)
        if direction == 'out':
            try:
                fmsg = gw.translate_outbound(msg)
            except UnmappedAddress:
                self.record(node, 'drop', 'msg=%d reason=UnmappedAddress' % msg.msg_id)
                return
            self.record(node, 'translate-out', 'msg=%d from=%s to=%s' %
                        (msg.msg_id, fmsg.foreign_from, fmsg.foreign_to))
        self.simulator.schedule(EventKind.DELIVER, at=self.now + self.config.hop_latency,
                                message=msg, at_node=nxt, origin=origin,
                                destination=destination)

    def on_negotiate(self, node, event):
        net = self.network
        if node not in net.sessions:
            self.record(node, 'negotiate', '%s error=NoSession' % event)
            return
        session = net.sessions[node]
        try:
            session = negotiate(session, event)
        except OrderingViolation:
            self.record(node, 'negotiate', '%s error=OrderingViolation phase=%s' %
                        (event, session.phase))
            return
        net.sessions[node] = session
        self.record(node, 'negotiate', '%s phase=%s' % (event, session.phase))

    def on_crash_node(self, node):
        net = self.network
        if node not in net.kinds:
            self.record(node, 'crash', 'error=UnknownNode')
            return
        net.dead.add(node)
        if node in net.sessions:
            net.sessions[node] = SessionState(Phase.CONNECTED, node)
        self.logger.info("%s down at tick %d" % (node, self.now))
        self.record(node, 'crash', 'down')

    def on_recover_node(self, node):
        net = self.network
        if node not in net.kinds:
            self.record(node, 'recover', 'error=UnknownNode')
            return
        net.dead.discard(node)
        self.record(node, 'recover', 'up')
