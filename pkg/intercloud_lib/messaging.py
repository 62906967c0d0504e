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
Messaging
=========

Addressed stanzas travel from a client to its server, between servers and,
through a gateway, into a foreign messaging network::

    C1 -- S1 -- S2 -- C2
          |
          G1 -- FN1 -- FC1

- :func:`.parse_address` / :meth:`.Address.render`: ``node@domain/resource``.
- :func:`.negotiate`: the session machine. A channel is secured before
  authentication, authentication happens before resource binding.
- :func:`.route`: shortest path over the :class:`.MessagingTopology`,
  ties broken by the smallest next node id.
- :meth:`.GatewayMapping.translate_outbound` and
  :meth:`~.GatewayMapping.translate_inbound`: conversion to and from the
  foreign network.

.. inheritance-diagram:: intercloud_lib.messaging

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""
# ATTN: this module must not depend on the config or the simulator.
import re
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum

_re_token = re.compile(r'^[a-z0-9.-]+$')
_re_node_id = re.compile(r'^[^\s@/]+$')


class MessagingError(Exception):

    """
    Base class, :attr:`reason` is the stable error code.
    """

    reason = "MessagingError"

    def __init__(self, msg=None, reason=None):
        if reason is not None:
            self.reason = reason
        Exception.__init__(self, msg or self.reason)


class ParseError(MessagingError):

    """
    ``reason`` is one of ``EmptyDomain``, ``IllegalCharacter``, ``EmptyNode``,
    ``EmptyResource``.
    """

    def __init__(self, reason, text):
        MessagingError.__init__(self, "%s in '%s'" % (reason, text), reason)
        self.text = text


class OrderingViolation(MessagingError):
    reason = "OrderingViolation"


class RoutingError(MessagingError):

    """
    ``UnknownDestination`` or ``SessionNotBound``. Unreachable destinations
    are not an error, see :class:`.DeliveryReport`.
    """


class UnmappedAddress(MessagingError):
    reason = "UnmappedAddress"


class TopologyViolation(MessagingError):
    reason = "TopologyViolation"


#
# Addresses
#

@dataclass(frozen=True)
class Address:

    """
    ``node@domain/resource``, where node and resource are optional.
    """

    node: str
    domain: str
    resource: str

    def render(self):
        """
        >>> parse_address('c1@clouda.example/app').render()
        'c1@clouda.example/app'
        """
        s = self.domain
        if self.node is not None:
            s = "%s@%s" % (self.node, s)
        if self.resource is not None:
            s = "%s/%s" % (s, self.resource)
        return s

    @property
    def bare(self):
        return replace(self, resource=None)

    def __str__(self):
        return self.render()


def _check_token(token, text):
    if not _re_token.match(token):
        raise ParseError("IllegalCharacter", text)
    return token


def parse_address(text):
    """
    Splits on the first ``@`` and the first ``/`` after it.

    >>> parse_address('clouda.example')
    Address(node=None, domain='clouda.example', resource=None)

    :raises ParseError:
    """
    node, sep, rest = text.partition('@')
    if not sep:
        node, rest = None, text
    elif node == "":
        raise ParseError("EmptyNode", text)
    domain, sep, resource = rest.partition('/')
    if not sep:
        resource = None
    elif resource == "":
        raise ParseError("EmptyResource", text)
    if domain == "":
        raise ParseError("EmptyDomain", text)
    for token in (node, domain, resource):
        if token is not None:
            _check_token(token, text)
    return Address(node, domain, resource)


#
# Sessions
#

class Phase(Enum):
    CONNECTED = 0
    SECURED = 1
    AUTHENTICATED = 2
    BOUND = 3

    def __str__(self):
        return self.name.capitalize()


class SessionEvent(Enum):
    SECURE_CHANNEL = "SecureChannel"
    AUTHENTICATE = "Authenticate"
    BIND = "Bind"

    def __str__(self):
        return self.value

    @staticmethod
    def parse(text):
        key = text.strip().replace('-', '').replace('_', '').lower()
        for ev in SessionEvent:
            if ev.value.lower() == key:
                return ev
        raise ValueError("unknown session event '%s'" % text)


# the only legal transitions
_TRANSITIONS = {
    (Phase.CONNECTED, SessionEvent.SECURE_CHANNEL): Phase.SECURED,
    (Phase.SECURED, SessionEvent.AUTHENTICATE): Phase.AUTHENTICATED,
    (Phase.AUTHENTICATED, SessionEvent.BIND): Phase.BOUND,
}


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    peer: str


def negotiate(session, event):
    """
    Advances ``session`` by exactly one phase.

    :raises OrderingViolation: if ``event`` is not the next transition
    :rtype: SessionState
    """
    nxt = _TRANSITIONS.get((session.phase, event))
    if nxt is None:
        raise OrderingViolation("%s while %s with %s" % (event, session.phase, session.peer))
    return SessionState(nxt, session.peer)


#
# Messages and topology
#

class MessageKind(Enum):
    CHAT = "Chat"
    CONTROL = "Control"
    DATA_NOTIFY = "DataNotify"

    def __str__(self):
        return self.value

    @staticmethod
    def parse(text):
        key = text.strip().replace('-', '').replace('_', '').lower()
        for kind in MessageKind:
            if kind.value.lower() == key:
                return kind
        raise ValueError("unknown message kind '%s'" % text)


@dataclass(frozen=True)
class Message:

    """
    A stanza. :attr:`hop_trace` is filled in while it travels.
    """

    from_: Address
    to: Address
    kind: MessageKind
    payload: bytes
    hop_trace: tuple = ()
    msg_id: int = 0


@dataclass(frozen=True)
class ForeignMessage:
    foreign_from: str
    foreign_to: str
    body: bytes

    def __post_init__(self):
        if not self.foreign_from or not self.foreign_to:
            raise ValueError("foreign tokens must not be empty")


class NodeKind(Enum):
    CLIENT = "client"
    SERVER = "server"
    GATEWAY = "gateway"
    FOREIGN_NETWORK = "foreign-network"
    FOREIGN_CLIENT = "foreign-client"

    def __str__(self):
        return self.value

    @property
    def foreign(self):
        return self in (NodeKind.FOREIGN_NETWORK, NodeKind.FOREIGN_CLIENT)


class GatewayMapping:

    """
    The translation table of one gateway: addresses on the foreign side
    correspond to foreign tokens. Addresses of the core network are not listed,
    they cross in rendered form.

    :param str gateway_id: the gateway node
    :param dict entries: :class:`.Address` to foreign token
    :param foreign_domains: domains living behind the gateway; by default the
                            domains of the mapped addresses.
    """

    def __init__(self, gateway_id, entries=None, foreign_domains=None):
        self.gateway_id = gateway_id
        self._to_foreign = {}
        self._to_core = {}
        self._foreign_domains = set(foreign_domains or [])
        for addr, token in (entries or {}).items():
            self.add(addr, token)

    def add(self, address, token):
        if not token:
            raise ValueError("empty foreign token for %s" % address)
        if token in self._to_core and self._to_core[token] != address:
            raise ValueError("foreign token '%s' mapped twice" % token)
        self._to_foreign[address] = token
        self._to_core[token] = address
        self._foreign_domains.add(address.domain)

    def add_foreign_domain(self, domain):
        self._foreign_domains.add(domain)

    @property
    def foreign_domains(self):
        return frozenset(self._foreign_domains)

    def __contains__(self, address):
        return address in self._to_foreign

    def _outbound_token(self, address):
        if address in self._to_foreign:
            return self._to_foreign[address]
        if address.domain in self._foreign_domains:
            raise UnmappedAddress("%s has no mapping on %s" % (address, self.gateway_id))
        return address.render()

    def _inbound_address(self, token):
        if token in self._to_core:
            return self._to_core[token]
        try:
            address = parse_address(token)
        except ParseError:
            raise UnmappedAddress("'%s' has no mapping on %s" % (token, self.gateway_id))
        if address.domain in self._foreign_domains:
            raise UnmappedAddress("'%s' has no mapping on %s" % (token, self.gateway_id))
        return address

    def translate_outbound(self, msg):
        """
        :raises UnmappedAddress: a foreign address without an entry
        :rtype: ForeignMessage
        """
        return ForeignMessage(self._outbound_token(msg.from_),
                              self._outbound_token(msg.to),
                              bytes(msg.payload))

    def translate_inbound(self, fmsg, msg_id=0):
        """
        The foreign network knows no kinds, re-entering messages are ``CHAT``.

        :rtype: Message
        """
        return Message(self._inbound_address(fmsg.foreign_from),
                       self._inbound_address(fmsg.foreign_to),
                       MessageKind.CHAT, bytes(fmsg.body), msg_id=msg_id)


def translate_outbound(gateway, msg):
    return gateway.translate_outbound(msg)


def translate_inbound(gateway, fmsg):
    return gateway.translate_inbound(fmsg)


class MessagingTopology:

    """
    Nodes, undirected links, node addresses, sessions and liveness.

    Link rules: a client has exactly one link, to a server. A gateway links
    one server and one foreign network. A foreign client has exactly one link,
    to a foreign network. These are checked by :meth:`validate`.
    """

    def __init__(self):
        self.kinds = {}  # node id -> NodeKind
        self.links = {}  # node id -> set of node ids
        self.addresses = {}  # bare Address -> node id
        self.sessions = {}  # client node id -> SessionState
        self.gateways = {}  # node id -> GatewayMapping
        self.dead = set()

    def add_node(self, node_id, kind, address=None):
        if not _re_node_id.match(node_id):
            raise TopologyViolation("illegal node id '%s'" % node_id)
        if node_id in self.kinds:
            raise TopologyViolation("node %s declared twice" % node_id)
        self.kinds[node_id] = NodeKind(kind)
        self.links[node_id] = set()
        if address is not None:
            self.add_address(node_id, address)
        if self.kinds[node_id] is NodeKind.CLIENT:
            self.sessions[node_id] = SessionState(Phase.CONNECTED, node_id)
        if self.kinds[node_id] is NodeKind.GATEWAY:
            self.gateways[node_id] = GatewayMapping(node_id)

    def add_address(self, node_id, address):
        if isinstance(address, str):
            address = parse_address(address)
        address = address.bare
        if address in self.addresses:
            raise TopologyViolation("address %s assigned twice" % address)
        self.addresses[address] = node_id

    def link(self, a, b):
        for n in (a, b):
            if n not in self.kinds:
                raise TopologyViolation("unknown node %s" % n)
        if a == b:
            raise TopologyViolation("self-link on %s" % a)
        self.links[a].add(b)
        self.links[b].add(a)

    def neighbours(self, node_id):
        return sorted(self.links[node_id])

    def validate(self):
        """
        :raises TopologyViolation:
        """
        def kinds_of(n):
            return sorted(str(self.kinds[m]) for m in self.links[n])

        for n, kind in sorted(self.kinds.items()):
            ks = kinds_of(n)
            if kind is NodeKind.CLIENT and ks != ['server']:
                raise TopologyViolation("client %s must attach to exactly one server" % n)
            if kind is NodeKind.FOREIGN_CLIENT and ks != ['foreign-network']:
                raise TopologyViolation(
                    "foreign client %s must attach to exactly one foreign network" % n)
            if kind is NodeKind.GATEWAY and ks != ['foreign-network', 'server']:
                raise TopologyViolation(
                    "gateway %s must bridge one server and one foreign network" % n)
            if kind is NodeKind.SERVER and any(
                    self.kinds[m].foreign for m in self.links[n]):
                raise TopologyViolation("server %s linked into a foreign network" % n)
        return self

    def node_of(self, address):
        """
        The node an address is homed on or ``None``.
        """
        return self.addresses.get(address.bare)

    def alive(self, node_id):
        return node_id not in self.dead

    def session_bound(self, node_id):
        if self.kinds[node_id] is not NodeKind.CLIENT:
            return True
        return self.sessions[node_id].phase is Phase.BOUND

    def gateway_between(self, a, b):
        """
        The gateway mapping, if the hop a->b crosses one, and the direction
        (``'out'`` towards the foreign side, ``'in'`` towards the core).
        """
        if self.kinds[a] is NodeKind.GATEWAY and self.kinds[b].foreign:
            return self.gateways[a], 'out'
        if self.kinds[b] is NodeKind.GATEWAY and self.kinds[a].foreign:
            return self.gateways[b], 'in'
        return None, None

    def _usable(self, origin, destination):
        """
        Nodes a path between the endpoints may use: alive ones and, unless
        an endpoint is foreign, no gateway or foreign network.
        """
        foreign = self.kinds[origin].foreign or self.kinds[destination].foreign
        usable = set()
        for n, kind in self.kinds.items():
            if n in self.dead:
                continue
            if not foreign and (kind is NodeKind.GATEWAY or kind.foreign):
                continue
            usable.add(n)
        return usable

    def distances_to(self, destination, usable):
        dist = {destination: 0}
        queue = deque([destination])
        while queue:
            n = queue.popleft()
            for m in self.links[n]:
                if m in usable and m not in dist:
                    dist[m] = dist[n] + 1
                    queue.append(m)
        return dist

    def shortest_path(self, origin, destination, usable=None):
        """
        The shortest path as list of node ids, at every step taking the
        smallest neighbour id which is one step closer. ``None`` if there
        is none.
        """
        if usable is None:
            usable = self._usable(origin, destination)
        if origin not in usable or destination not in usable:
            return None
        dist = self.distances_to(destination, usable)
        if origin not in dist:
            return None
        path = [origin]
        while path[-1] != destination:
            here = path[-1]
            path.append(min(m for m in self.links[here]
                            if m in dist and dist[m] == dist[here] - 1))
        return path


@dataclass(frozen=True)
class DeliveryReport:
    path: tuple
    delivered: bool
    reason: str = None
    message: Message = None


def _endpoints(topology, msg):
    origin = topology.node_of(msg.from_)
    if origin is None:
        raise RoutingError("%s is not homed on any node" % msg.from_, "UnknownOrigin")
    destination = topology.node_of(msg.to)
    if destination is None:
        raise RoutingError("%s is not homed on any node" % msg.to, "UnknownDestination")
    return origin, destination


def next_hop(topology, at, destination, origin=None):
    """
    The next node on the way from ``at`` to ``destination`` or ``None``.
    ``origin`` decides whether foreign nodes may be used.
    """
    origin = at if origin is None else origin
    usable = topology._usable(origin, destination)
    usable.add(at)
    path = topology.shortest_path(at, destination, usable)
    if path is None or len(path) < 2:
        return None
    return path[1]


def route(topology, msg):
    """
    Routes ``msg`` over ``topology``.

    :raises RoutingError: ``UnknownDestination`` or ``SessionNotBound``
    :rtype: DeliveryReport
    """
    origin, destination = _endpoints(topology, msg)
    for n in (origin, destination):
        if not topology.session_bound(n):
            raise RoutingError("session of %s is not bound" % n, "SessionNotBound")
    path = topology.shortest_path(origin, destination)
    if path is None:
        return DeliveryReport((), False, "NoRoute", replace(msg, hop_trace=(origin,)))
    path = tuple(path)
    return DeliveryReport(path, True, None, replace(msg, hop_trace=path))
