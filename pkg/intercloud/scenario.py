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
Scenario Scripts
================

One command per line, ``#`` starts a comment line. Each command schedules
its event at the current tick, ``run-until`` advances the clock. After the
last command the remaining events are drained.

=====================================  =====================================
``admit CLOUD [TOKEN]``                admission, by default with the
                                       domain's token
``set-trust CLOUD LEVEL``              ``untrusted``, ``marginal``, ``full``
``send FROM TO KIND [TEXT...]``        ``Chat``, ``Control``, ``DataNotify``;
                                       ``@random:N`` sends N seeded bytes
``negotiate NODE EVENT``               ``SecureChannel``, ``Authenticate``,
                                       ``Bind``
``store KEY [PATH=TEXT...]``           packs the files into a UDF archive
``retrieve KEY``
``crash NODE``, ``recover NODE``
``transfer-vm WORKLOAD CLOUD``
``query-trust REQUESTER TARGET``
``failover WORKLOAD A B [C...]``       see :mod:`intercloud.scenarios.failover`
``run-until TICK``
=====================================  =====================================

Syntax errors raise :class:`.ScenarioError`. Commands referring to entities
the topology does not declare raise :class:`.ScenarioReferenceError`, before
anything is executed.

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""

from dataclasses import dataclass

from intercloud_lib.trust import CloudId, TrustLevel
from intercloud_lib.messaging import (MessageKind, Message, MessagingError,
                                      SessionEvent, parse_address)
from intercloud_lib.udf import check_path
from .core import EventKind


class ScenarioError(Exception):

    def __init__(self, msg, filename=None, lineno=None):
        self.msg = msg
        self.filename = filename
        self.lineno = lineno
        Exception.__init__(self, "%s:%s: %s" % (filename or "<scenario>", lineno or 0, msg))


class ScenarioReferenceError(ScenarioError):
    pass


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple
    lineno: int


# name -> (minimum number of arguments, maximum or None)
_ARITY = {
    'admit': (1, 2),
    'set-trust': (2, 2),
    'send': (3, None),
    'negotiate': (2, 2),
    'store': (1, None),
    'retrieve': (1, 1),
    'crash': (1, 1),
    'recover': (1, 1),
    'transfer-vm': (2, 2),
    'query-trust': (2, 2),
    'failover': (3, None),
    'run-until': (1, 1),
}


class ScenarioScript:

    """
    A parsed script, bound to a topology with :meth:`.bind` and executed
    with :meth:`.play`.
    """

    def __init__(self, commands, filename=None):
        self.commands = list(commands)
        self.filename = filename

    @staticmethod
    def parse(text, filename=None):
        """
        :raises ScenarioError:
        """
        script = ScenarioScript([], filename)
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            parts = line.split()
            name, args = parts[0], tuple(parts[1:])
            if name not in _ARITY:
                raise script.error(lineno, "unknown command '%s'" % name)
            lo, hi = _ARITY[name]
            if len(args) < lo or (hi is not None and len(args) > hi):
                raise script.error(lineno, "wrong number of arguments for '%s'" % name)
            cmd = Command(name, args, lineno)
            script._check_syntax(cmd)
            script.commands.append(cmd)
        return script

    @staticmethod
    def load(fn):
        try:
            with open(fn, encoding='utf-8') as f:
                text = f.read()
        except (OSError, UnicodeDecodeError) as ex:
            raise ScenarioError("cannot read: %s" % ex, fn, 0)
        return ScenarioScript.parse(text, fn)

    def error(self, lineno, msg, cls=ScenarioError):
        return cls(msg, self.filename, lineno)

    def __len__(self):
        return len(self.commands)

    #
    # syntax
    #

    def _cloud(self, cmd, text):
        try:
            return CloudId.parse(text)
        except ValueError as ex:
            raise self.error(cmd.lineno, str(ex))

    def _check_syntax(self, cmd):
        a = cmd.args
        try:
            if cmd.name in ('admit', 'set-trust'):
                self._cloud(cmd, a[0])
            if cmd.name == 'set-trust':
                TrustLevel.parse(a[1])
            elif cmd.name == 'send':
                parse_address(a[0])
                parse_address(a[1])
                MessageKind.parse(a[2])
                if len(a) > 3 and a[3].startswith('@random:'):
                    if len(a) != 4 or not a[3][len('@random:'):].isdigit():
                        raise ValueError("random payload is '@random:N'")
            elif cmd.name == 'negotiate':
                SessionEvent.parse(a[1])
            elif cmd.name == 'store':
                for spec in a[1:]:
                    path, sep, _ = spec.partition('=')
                    if not sep or not check_path(path):
                        raise ValueError("file spec '%s' is not PATH=TEXT" % spec)
            elif cmd.name in ('transfer-vm',):
                self._cloud(cmd, a[1])
            elif cmd.name == 'query-trust':
                self._cloud(cmd, a[0])
                self._cloud(cmd, a[1])
            elif cmd.name == 'failover':
                for c in a[1:]:
                    self._cloud(cmd, c)
            elif cmd.name == 'run-until':
                if not a[0].isdigit():
                    raise ValueError("tick '%s' is not a non-negative integer" % a[0])
        except (ValueError, MessagingError) as ex:
            raise self.error(cmd.lineno, str(ex))

    #
    # references
    #

    def bind(self, topology):
        """
        Checks that every command refers to declared entities only.

        :raises ScenarioReferenceError:
        """
        net = topology.network
        stored = set()

        def ref_error(cmd, msg):
            return self.error(cmd.lineno, msg, ScenarioReferenceError)

        def cloud(cmd, text):
            c = CloudId.parse(text)
            if c not in topology.clouds:
                raise ref_error(cmd, "undeclared cloud %s" % c)
            return c

        def node(cmd, text):
            if text not in net.kinds:
                raise ref_error(cmd, "undeclared node %s" % text)
            return text

        def workload(cmd, text):
            if text not in topology.workloads:
                raise ref_error(cmd, "undeclared workload %s" % text)
            return topology.workloads[text]

        for cmd in self.commands:
            a = cmd.args
            if cmd.name in ('admit', 'set-trust'):
                cloud(cmd, a[0])
            elif cmd.name == 'send':
                for text in a[:2]:
                    if net.node_of(parse_address(text)) is None:
                        raise ref_error(cmd, "address %s is not homed on any node" % text)
            elif cmd.name == 'negotiate':
                node(cmd, a[0])
                if a[0] not in net.sessions:
                    raise ref_error(cmd, "%s is not a client" % a[0])
            elif cmd.name == 'store':
                stored.add(a[0])
            elif cmd.name == 'retrieve':
                if a[0] not in stored:
                    raise ref_error(cmd, "key %s is never stored" % a[0])
            elif cmd.name in ('crash', 'recover'):
                node(cmd, a[0])
            elif cmd.name == 'transfer-vm':
                workload(cmd, a[0])
                cloud(cmd, a[1])
            elif cmd.name == 'query-trust':
                cloud(cmd, a[0])
                cloud(cmd, a[1])
            elif cmd.name == 'failover':
                workload(cmd, a[0])
                for c in a[1:]:
                    cloud(cmd, c)
                if topology.cloud(a[1]).node is None:
                    raise ref_error(cmd, "%s is not hosted on a node" % a[1])
        return self

    #
    # execution
    #

    def play(self, sim):
        """
        Binds to the simulator's topology, executes all commands and drains
        the event queue.

        :rtype: Trace
        """
        self.bind(sim.topology)
        logger = sim.config.get_logger('SCEN')
        for cmd in self.commands:
            logger.debug("line %d at tick %d: %s %s" % (cmd.lineno, sim.now, cmd.name,
                                                        " ".join(cmd.args)))
            getattr(self, '_play_%s' % cmd.name.replace('-', '_'))(sim, *cmd.args)
        sim.run()
        return sim.trace

    def _play_admit(self, sim, cloud, token=None):
        sim.schedule(EventKind.ADMIT_CLOUD, cloud=CloudId.parse(cloud), token=token)

    def _play_set_trust(self, sim, cloud, level):
        sim.schedule(EventKind.SET_TRUST, cloud=CloudId.parse(cloud),
                     level=TrustLevel.parse(level))

    def _play_send(self, sim, from_, to, kind, *text):
        if text and text[0].startswith('@random:'):
            payload = sim.random.randbytes(int(text[0][len('@random:'):]))
        else:
            payload = " ".join(text).encode('utf-8')
        msg = Message(parse_address(from_), parse_address(to), MessageKind.parse(kind),
                      payload, msg_id=sim.next_message_id())
        sim.schedule(EventKind.DELIVER, message=msg)

    def _play_negotiate(self, sim, node, event):
        sim.schedule(EventKind.NEGOTIATE, node=node, event=SessionEvent.parse(event))

    def _play_store(self, sim, key, *specs):
        files = []
        for spec in specs:
            path, _, text = spec.partition('=')
            files.append((path, 0o644, sim.now, text.encode('utf-8')))
        sim.schedule(EventKind.STORE_OBJECT, key=key, files=files)

    def _play_retrieve(self, sim, key):
        sim.schedule(EventKind.RETRIEVE_OBJECT, key=key)

    def _play_crash(self, sim, node):
        sim.schedule(EventKind.CRASH_NODE, node=node)

    def _play_recover(self, sim, node):
        sim.schedule(EventKind.RECOVER_NODE, node=node)

    def _play_transfer_vm(self, sim, workload, dst):
        sim.schedule(EventKind.TRANSFER_VM, workload=workload, dst=CloudId.parse(dst))

    def _play_query_trust(self, sim, requester, target):
        sim.schedule(EventKind.TRUST_QUERY, requester=CloudId.parse(requester),
                     target=CloudId.parse(target))

    def _play_failover(self, sim, workload, provider_a, *candidates):
        from .scenarios import failover_any
        try:
            failover_any(sim, workload, provider_a, candidates)
        except ValueError:
            # moved away by an earlier command
            sim.record(workload, 'failover', 'error=NotDeployed on=%s' %
                       sim.topology.workloads[workload].deployed_on)

    def _play_run_until(self, sim, tick):
        sim.run_until(int(tick))
