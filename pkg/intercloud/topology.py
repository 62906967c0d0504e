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
Topology
========

The :class:`.Topology` is the whole federation: trust domains with their
roots, clouds, platforms, the messaging network, storage engines and the
workloads (images and applications) deployed on the clouds.

Topology files
--------------

Line oriented. ``#`` starts a comment line, a ``[kind name]`` line opens a
section and every other line is a ``key value...`` pair::

    [domain domA]
    token secret-a
    validity 1000
    cap full
    minimum marginal

    [platform vmx]
    kind complete-vm
    hal x86-hal
    disk-formats qcow2 raw
    host.nic eth-a

    [platform rte]
    kind runtime-env
    hal rte-hal
    api storage:2 queue:1
    gateway G1

    [cloud a1@domA]
    node S1
    platform vmx
    admitted yes
    level full

    [node S1]
    kind server
    links S2 G1
    address clouda.example

    [node G1]
    kind gateway
    links FN1
    map fc1@legacy.example fc1-legacy

    [engine E1]
    capacity 4096
    host S1

    [image web]
    disk-format qcow2
    hal x86-hal
    owner co@domA
    deployed-on a1@domA
    config.name web
    config.host.nic eth-a

    [app shop]
    api storage:1
    owner co@domA
    deployed-on r1@domA

Node kinds are ``client``, ``server``, ``gateway``, ``foreign-network`` and
``foreign-client``; links are undirected and may be declared on either
end. ``phase`` sets the initial session phase of a client. Clouds with
``admitted yes`` are admitted by their root at tick 0, ``level`` then sets
their listed trust level. Unknown sections or keys are rejected, errors
name ``file:line``.

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""

import re
from collections import OrderedDict
from dataclasses import dataclass

from intercloud_lib.trust import (AcceptancePolicy, AdmissionEvidence, CloudId,
                                  DomainId, IntercloudRoot, TrustError, TrustLevel,
                                  TrustTopology)
from intercloud_lib.messaging import (MessagingError, MessagingTopology, NodeKind,
                                      Phase, SessionState, parse_address)
from intercloud_lib.exchange import ExchangeRoot, StorageEngine
from intercloud_lib.platform import (AppRequirements, Application, MachineConfig,
                                     PlatformDescriptor, PlatformKind,
                                     VirtualMachineImage)


class TopologyError(Exception):

    """
    A topology that does not parse or whose references do not resolve.
    """

    reason = "TopologyError"

    def __init__(self, msg, filename=None, lineno=None):
        self.msg = msg
        self.filename = filename
        self.lineno = lineno
        Exception.__init__(self, self.location() + msg)

    def location(self):
        if self.filename is None and self.lineno is None:
            return ""
        return "%s:%s: " % (self.filename or "<topology>", self.lineno or 0)


@dataclass
class CloudSpec:
    cloud: CloudId
    node: str = None
    platform: str = None


@dataclass
class Workload:

    """
    An image (``kind == 'image'``) or an application deployed on a cloud.
    ``owner`` is the cloud asking for the transfer on failover.
    """

    workload_id: str
    kind: str
    item: object
    owner: CloudId
    deployed_on: CloudId


class Topology:

    """
    :param Config config: supplies default validity and acceptance policy
    """

    def __init__(self, config=None):
        if config is None:
            from .config import Config
            config = Config(testing_mode=True)
        self.config = config
        self.trust = TrustTopology(config.default_policy)
        self.network = MessagingTopology()
        self.exchange = ExchangeRoot()
        self.platforms = OrderedDict()
        self.clouds = OrderedDict()
        self.workloads = OrderedDict()
        self._tokens = {}

    def add_domain(self, label, token, validity=None, policy=None):
        domain = DomainId(label)
        root = IntercloudRoot(domain, token,
                              validity=validity or self.config.validity)
        self.trust.add_root(root)
        self._tokens[domain] = token
        if policy is not None:
            self.trust.domain_policies[domain] = policy
        return root

    def token_of(self, domain):
        return self._tokens[domain]

    def add_platform(self, platform):
        if platform.platform_id in self.platforms:
            raise ValueError("platform %s declared twice" % platform.platform_id)
        self.platforms[platform.platform_id] = platform
        return platform

    def add_cloud(self, cloud, node=None, platform=None, policy=None):
        if isinstance(cloud, str):
            cloud = CloudId.parse(cloud)
        if cloud in self.clouds:
            raise ValueError("cloud %s declared twice" % cloud)
        self.trust.root(cloud.domain)
        spec = CloudSpec(cloud, node, platform)
        self.clouds[cloud] = spec
        if policy is not None:
            self.trust.policies[cloud] = policy
        return spec

    def cloud(self, cloud):
        if isinstance(cloud, str):
            cloud = CloudId.parse(cloud)
        try:
            return self.clouds[cloud]
        except KeyError:
            raise KeyError("unknown cloud %s" % cloud)

    def clouds_on(self, node):
        return [c for c, s in self.clouds.items() if s.node == node]

    def engines_on(self, node):
        return [e for e in self.exchange.engines if e.host == node]

    def platform_of(self, cloud):
        spec = self.cloud(cloud)
        if spec.platform is None:
            raise KeyError("cloud %s runs no platform" % spec.cloud)
        return self.platforms[spec.platform]

    def add_workload(self, workload):
        if workload.workload_id in self.workloads:
            raise ValueError("workload %s declared twice" % workload.workload_id)
        self.workloads[workload.workload_id] = workload
        return workload

    def admit(self, cloud, now=0, level=None):
        """
        Admission with the domain's own token.
        """
        root = self.trust.root(cloud.domain)
        cert = root.admit_cloud(cloud, AdmissionEvidence(self.token_of(cloud.domain)), now)
        if level is not None:
            root.set_trust_level(cloud, level)
        return cert

    def validate(self):
        """
        Checks that all references resolve.

        :raises ValueError:
        """
        self.network.validate()
        nodes = self.network.kinds
        for c, spec in self.clouds.items():
            if spec.node is not None and spec.node not in nodes:
                raise ValueError("cloud %s on unknown node %s" % (c, spec.node))
            if spec.platform is not None and spec.platform not in self.platforms:
                raise ValueError("cloud %s runs unknown platform %s" % (c, spec.platform))
        for p in self.platforms.values():
            if p.gateway_id is not None and nodes.get(p.gateway_id) is not NodeKind.GATEWAY:
                raise ValueError("platform %s: %s is not a gateway" % (p.platform_id, p.gateway_id))
        for e in self.exchange.engines:
            if e.host is not None and e.host not in nodes:
                raise ValueError("engine %s on unknown node %s" % (e.id, e.host))
        for w in self.workloads.values():
            for c in (w.owner, w.deployed_on):
                if c not in self.clouds:
                    raise ValueError("workload %s refers to unknown cloud %s" % (w.workload_id, c))
            if self.clouds[w.deployed_on].platform is None:
                raise ValueError("workload %s deployed on %s without platform" %
                                 (w.workload_id, w.deployed_on))
        return self

    def __repr__(self):
        return "Topology[%d domains, %d clouds, %d nodes, %d engines, %d workloads]" % (
            len(self.trust.roots), len(self.clouds), len(self.network.kinds),
            len(self.exchange.engines), len(self.workloads))


#
# File format
#

_re_section = re.compile(r'^\[\s*([a-z]+)\s+(\S+)\s*\]$')

_ONE, _MANY, _REPEAT = "one", "many", "repeat"

# allowed keys per section kind; ``*`` entries are key prefixes
_SCHEMA = {
    'domain': {'token': _ONE, 'validity': _ONE, 'cap': _ONE, 'minimum': _ONE},
    'cloud': {'node': _ONE, 'platform': _ONE, 'cap': _ONE, 'minimum': _ONE,
              'admitted': _ONE, 'level': _ONE},
    'platform': {'kind': _ONE, 'hal': _ONE, 'disk-formats': _MANY, 'api': _MANY,
                 'gateway': _ONE, 'host.*': _ONE},
    'image': {'disk-format': _ONE, 'hal': _ONE, 'owner': _ONE, 'deployed-on': _ONE,
              'config.*': _ONE},
    'app': {'api': _MANY, 'owner': _ONE, 'deployed-on': _ONE},
    'node': {'kind': _ONE, 'links': _MANY, 'address': _REPEAT, 'phase': _ONE,
             'map': _REPEAT, 'foreign-domain': _MANY},
    'engine': {'capacity': _ONE, 'host': _ONE},
}

_BUILD_ORDER = ['domain', 'platform', 'node', 'cloud', 'engine', 'image', 'app']


class _Section:

    def __init__(self, kind, name, lineno):
        self.kind = kind
        self.name = name
        self.lineno = lineno
        self.entries = OrderedDict()  # key -> (values, lineno)

    def schema_of(self, key):
        schema = _SCHEMA[self.kind]
        if key in schema:
            return schema[key]
        for k, v in schema.items():
            if k.endswith('*') and key.startswith(k[:-1]) and len(key) > len(k) - 1:
                return v
        return None

    def get(self, key, default=None):
        if key not in self.entries:
            return default
        return self.entries[key][0]

    def line(self, key):
        return self.entries[key][1] if key in self.entries else self.lineno

    def prefixed(self, prefix):
        return [(k, v, ln) for k, (v, ln) in self.entries.items() if k.startswith(prefix)]


class _Parser:

    def __init__(self, filename):
        self.filename = filename

    def error(self, lineno, msg):
        return TopologyError(msg, self.filename, lineno)

    def sections(self, text):
        sections = []
        current = None
        seen = set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            if line.startswith('['):
                m = _re_section.match(line)
                if m is None:
                    raise self.error(lineno, "malformed section header '%s'" % line)
                kind, name = m.groups()
                if kind not in _SCHEMA:
                    raise self.error(lineno, "unknown section kind '%s'" % kind)
                if (kind, name) in seen:
                    raise self.error(lineno, "%s %s declared twice" % (kind, name))
                seen.add((kind, name))
                current = _Section(kind, name, lineno)
                sections.append(current)
                continue
            if current is None:
                raise self.error(lineno, "'%s' outside of a section" % line)
            parts = line.split()
            key, values = parts[0], parts[1:]
            mode = current.schema_of(key)
            if mode is None:
                raise self.error(lineno, "unknown key '%s' in [%s %s]" %
                                 (key, current.kind, current.name))
            if not values:
                raise self.error(lineno, "key '%s' without value" % key)
            if mode == _ONE:
                if key in current.entries:
                    raise self.error(lineno, "key '%s' given twice" % key)
                current.entries[key] = (" ".join(values), lineno)
                continue
            new = values if mode == _MANY else [(values, lineno)]
            if key in current.entries:
                prev, first = current.entries[key]
                current.entries[key] = (prev + new, first)
            else:
                current.entries[key] = (new, lineno)
        return sections

    def required(self, sec, key):
        value = sec.get(key)
        if value is None:
            raise self.error(sec.lineno, "[%s %s] lacks '%s'" % (sec.kind, sec.name, key))
        return value

    def level(self, sec, key):
        text = sec.get(key)
        if text is None:
            return None
        try:
            return TrustLevel.parse(text)
        except ValueError as ex:
            raise self.error(sec.line(key), str(ex))

    def integer(self, sec, key, default=None):
        text = sec.get(key)
        if text is None:
            return default
        try:
            return int(text)
        except ValueError:
            raise self.error(sec.line(key), "'%s' is not an integer" % text)

    def policy(self, sec, fallback):
        cap, minimum = self.level(sec, 'cap'), self.level(sec, 'minimum')
        if cap is None and minimum is None:
            return None
        try:
            return AcceptancePolicy(cap if cap is not None else fallback.cap,
                                    minimum if minimum is not None else fallback.minimum_acceptable)
        except ValueError as ex:
            raise self.error(sec.lineno, str(ex))

    def apis(self, sec, values):
        apis = {}
        for item in values:
            name, sep, version = item.partition(':')
            try:
                if not sep or not name:
                    raise ValueError
                apis[name] = int(version)
            except ValueError:
                raise self.error(sec.line('api'), "api '%s' is not name:version" % item)
        return apis

    def cloud_ref(self, topo, sec, key):
        text = self.required(sec, key)
        try:
            cloud = CloudId.parse(text)
        except ValueError as ex:
            raise self.error(sec.line(key), str(ex))
        if cloud not in topo.clouds:
            raise self.error(sec.line(key), "unknown cloud %s" % cloud)
        return cloud

    def build(self, sections, config):
        topo = Topology(config)
        by_kind = OrderedDict((k, []) for k in _BUILD_ORDER)
        for sec in sections:
            by_kind[sec.kind].append(sec)
        admissions = []
        for kind, secs in by_kind.items():
            build = getattr(self, '_build_%s' % kind)
            for sec in secs:
                try:
                    build(topo, sec, admissions)
                except TopologyError:
                    raise
                except (ValueError, KeyError, TrustError, MessagingError) as ex:
                    raise self.error(sec.lineno, str(ex).strip("'\""))
            if kind == 'node':
                self._link_nodes(topo, secs)
        try:
            topo.validate()
        except (ValueError, MessagingError) as ex:
            raise self.error(None, str(ex))
        for cloud, level, lineno in admissions:
            try:
                topo.admit(cloud, 0, level)
            except TrustError as ex:
                raise self.error(lineno, str(ex))
        return topo

    def _build_domain(self, topo, sec, admissions):
        validity = self.integer(sec, 'validity')
        if validity is not None and validity <= 0:
            raise self.error(sec.line('validity'), "validity must be positive")
        topo.add_domain(sec.name, self.required(sec, 'token'), validity,
                        self.policy(sec, topo.trust.default_policy))

    def _build_platform(self, topo, sec, admissions):
        kind = self.required(sec, 'kind')
        try:
            kind = PlatformKind(kind)
        except ValueError:
            raise self.error(sec.line('kind'), "unknown platform kind '%s'" % kind)
        host = dict((k, v) for k, v, _ in sec.prefixed('host.'))
        topo.add_platform(PlatformDescriptor(sec.name, kind, self.required(sec, 'hal'),
                                             sec.get('disk-formats', []),
                                             self.apis(sec, sec.get('api', [])),
                                             sec.get('gateway'), host))

    def _build_node(self, topo, sec, admissions):
        net = topo.network
        kind = self.required(sec, 'kind')
        try:
            kind = NodeKind(kind)
        except ValueError:
            raise self.error(sec.line('kind'), "unknown node kind '%s'" % kind)
        net.add_node(sec.name, kind)
        for values, lineno in sec.get('address', []):
            if len(values) != 1:
                raise self.error(lineno, "address takes one value")
            try:
                net.add_address(sec.name, values[0])
            except MessagingError as ex:
                raise self.error(lineno, str(ex))
        if sec.get('phase') is not None:
            if kind is not NodeKind.CLIENT:
                raise self.error(sec.line('phase'), "only clients have a session phase")
            try:
                phase = Phase[sec.get('phase').upper()]
            except KeyError:
                raise self.error(sec.line('phase'), "unknown phase '%s'" % sec.get('phase'))
            net.sessions[sec.name] = SessionState(phase, sec.name)
        if sec.get('map') or sec.get('foreign-domain'):
            if kind is not NodeKind.GATEWAY:
                raise self.error(sec.lineno, "only gateways have mappings")
            gw = net.gateways[sec.name]
            for values, lineno in sec.get('map', []):
                if len(values) != 2:
                    raise self.error(lineno, "map takes an address and a foreign token")
                try:
                    gw.add(parse_address(values[0]), values[1])
                except (MessagingError, ValueError) as ex:
                    raise self.error(lineno, str(ex))
            for d in sec.get('foreign-domain', []):
                gw.add_foreign_domain(d)

    def _link_nodes(self, topo, sections):
        for sec in sections:
            for other in sec.get('links', []):
                if other not in topo.network.kinds:
                    raise self.error(sec.line('links'), "link to unknown node %s" % other)
                try:
                    topo.network.link(sec.name, other)
                except MessagingError as ex:
                    raise self.error(sec.line('links'), str(ex))

    def _build_cloud(self, topo, sec, admissions):
        try:
            cloud = CloudId.parse(sec.name)
        except ValueError as ex:
            raise self.error(sec.lineno, str(ex))
        if cloud.domain not in topo.trust.roots:
            raise self.error(sec.lineno, "cloud %s in undeclared domain" % cloud)
        node = sec.get('node')
        if node is not None and node not in topo.network.kinds:
            raise self.error(sec.line('node'), "unknown node %s" % node)
        platform = sec.get('platform')
        if platform is not None and platform not in topo.platforms:
            raise self.error(sec.line('platform'), "unknown platform %s" % platform)
        topo.add_cloud(cloud, node, platform,
                       self.policy(sec, topo.trust.policy_of(cloud)))
        admitted = sec.get('admitted', 'no')
        if admitted not in ('yes', 'no'):
            raise self.error(sec.line('admitted'), "admitted is 'yes' or 'no'")
        level = self.level(sec, 'level')
        if admitted == 'yes':
            admissions.append((cloud, level, sec.lineno))
        elif level is not None:
            raise self.error(sec.line('level'), "level needs 'admitted yes'")

    def _build_engine(self, topo, sec, admissions):
        capacity = self.integer(sec, 'capacity')
        if capacity is None:
            self.required(sec, 'capacity')
        host = sec.get('host')
        if host is not None and host not in topo.network.kinds:
            raise self.error(sec.line('host'), "unknown node %s" % host)
        topo.exchange.add_engine(StorageEngine(sec.name, capacity, host))

    def _build_image(self, topo, sec, admissions):
        config = MachineConfig(dict((k[len('config.'):], v) for k, v, _ in sec.prefixed('config.')))
        image = VirtualMachineImage(sec.name, self.required(sec, 'disk-format'),
                                    self.required(sec, 'hal'), config)
        topo.add_workload(Workload(sec.name, 'image', image,
                                   self.cloud_ref(topo, sec, 'owner'),
                                   self.cloud_ref(topo, sec, 'deployed-on')))

    def _build_app(self, topo, sec, admissions):
        app = Application(sec.name, AppRequirements(self.apis(sec, sec.get('api', []))))
        topo.add_workload(Workload(sec.name, 'app', app,
                                   self.cloud_ref(topo, sec, 'owner'),
                                   self.cloud_ref(topo, sec, 'deployed-on')))


def parse_topology(text, config=None, filename=None):
    """
    Parses the text of a topology file.

    :raises TopologyError:
    :rtype: Topology
    """
    parser = _Parser(filename)
    sections = parser.sections(text)
    return parser.build(sections, config)


def load_topology(fn, config=None):
    """
    Reads and parses the topology file ``fn``.

    :raises TopologyError: also if the file cannot be read
    """
    try:
        with open(fn, encoding='utf-8') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as ex:
        raise TopologyError("cannot read: %s" % ex, fn, 0)
    topo = parse_topology(text, config, fn)
    if config is not None:
        config.get_logger('TOPO').info("%s from %s" % (topo, fn))
    return topo
