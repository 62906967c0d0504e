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
Core
====

This is the core part of the simulator. It contains the essential components
and base-classes for the modules:

- :class:`.Trace`: the ordered record of everything that happened in a run.
- :class:`.EventBus`: the backbone for communicating between the simulator
  and the :mod:`services <intercloud.services>`.
- :class:`.Module`, the base-class of the services.
- and most importantly, the :class:`.Simulator` which holds everything
  together. It owns the clock and the event queue, events execute in
  ``(at, seq)`` order.

The event loop is single threaded, every service state is owned by it.
Independent simulators may run side by side.

.. inheritance-diagram:: intercloud.core

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""

import heapq
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum

from .config import Config
from .utils import SimRandom


class SchedulingInPast(Exception):

    def __init__(self, at, now):
        Exception.__init__(self, "event at tick %d scheduled while at tick %d" % (at, now))
        self.reason = "SchedulingInPast"
        self.at = at
        self.now = now


class EventKind(Enum):

    """
    The value is the :class:`.EventBus` key, services listen with ``on_<key>``.
    """

    DELIVER = "deliver"
    CRASH_NODE = "crash_node"
    RECOVER_NODE = "recover_node"
    ADMIT_CLOUD = "admit_cloud"
    SET_TRUST = "set_trust"
    TRUST_QUERY = "trust_query"
    NEGOTIATE = "negotiate"
    STORE_OBJECT = "store_object"
    RETRIEVE_OBJECT = "retrieve_object"
    TRANSFER_VM = "transfer_vm"
    FAILOVER = "failover"
    CUSTOM = "custom"

    @property
    def key(self):
        return self.value

    def __str__(self):
        return "".join(w.capitalize() for w in self.value.split('_'))


class Event:

    """
    This class holds the data for one single scheduled event.
    The keyword arguments are the kind-specific payload, they are
    also available as attributes.
    """

    def __init__(self, at, kind, **kwargs):
        self.at = int(at)
        self.kind = EventKind(kind)
        self.seq = None
        self._kwargs = kwargs
        for k, v in list(kwargs.items()):
            setattr(self, k, v)

    @property
    def payload(self):
        return dict(self._kwargs)

    def __lt__(self, other):
        return (self.at, self.seq) < (other.at, other.seq)

    def __repr__(self):
        return "Event[%s at=%d seq=%s %s]" % (self.kind, self.at, self.seq, self._kwargs)


class EventBus:

    """
    Publishes events to the modules subscribed to a key.
    Subscribers are called right away, in the order they registered.
    """
    # pattern for a valid key
    import re
    _re_key = re.compile(r'^[a-z_]+$')

    def __init__(self, config):
        self._subs = {}
        self.config = config
        self.logger = config.get_logger('EVBUS')

    @property
    def keys(self):
        """
        List of all keys where you can send an :class:`Event` to.
        """
        return list(self._subs.keys())

    def register(self, target):
        """
        Registers a given ``target`` for this EventBus instance.
        Each of its ``on_<key>`` methods is subscribed to ``<key>``.

        :param Module target:
        """
        import inspect
        for name, _ in inspect.getmembers(target, predicate=inspect.ismethod):
            if not name.startswith("on_"):
                continue
            self.subscribe(name[3:], target)

    @staticmethod
    def _check_key(key):
        if not EventBus._re_key.match(key):
            raise ValueError('"%s" key not allowed' % key)
        return key

    def subscribe(self, key, target):
        """
        Called by :meth:`.register`.

        .. Note:: counterpart is :func:`unsubscribe`.
        """
        self._check_key(key)
        if key not in self._subs:
            self._subs[key] = []

        assert target not in self._subs[key]
        self._subs[key].append(target)

    def unsubscribe(self, key, target):
        """
        If ``key`` is ``None``, the target is removed from all keys.
        """
        if key is None:
            for k, v in list(self._subs.items()):
                for t in list(v):
                    if t is target:
                        self.unsubscribe(k, t)
            return

        self._check_key(key)
        if key not in self._subs:
            self.logger.critical("cannot unsubscribe unknown key '%s'" % key)
            return

        if target in self._subs[key]:
            self._subs[key].remove(target)

    def publish(self, key, /, **kwargs):
        """
        Calls ``on_<key>(**kwargs)`` of all subscribers of ``key``.
        Exceptions of the handlers are not caught.

        :return: number of subscribers called
        """
        self._check_key(key)
        if not self._subs.get(key):
            if self.config.debug:
                self.logger.warning("key '%s' unknown." % key)
            return 0

        targets = list(self._subs[key])
        for target in targets:
            getattr(target, 'on_%s' % key)(**kwargs)
        return len(targets)


@dataclass(frozen=True)
class TraceRecord:
    tick: int
    actor: str
    action: str
    outcome: str

    def format(self):
        """
        >>> TraceRecord(3, 'S1', 'hop', 'msg=1').format()
        'tick=3 actor=S1 action=hop outcome=msg=1'
        """
        return "tick=%d actor=%s action=%s outcome=%s" % (
            self.tick, self.actor, self.action, self.outcome)


class Trace:

    """
    Records in execution order. Serialized, it is one line per record with
    a stable field order (see :meth:`.TraceRecord.format`).
    """

    COLUMNS = ['tick', 'actor', 'action', 'outcome']

    def __init__(self, config=None):
        self.records = []
        self.logger = config.get_logger('CORE') if config is not None else None

    def add(self, tick, actor, action, outcome=""):
        # one record per line, no matter what the outcome text is
        rec = TraceRecord(int(tick), str(actor).replace(' ', '_'), str(action),
                          " ".join(str(outcome).split()))
        self.records.append(rec)
        if self.logger is not None:
            self.logger.debug(rec.format())
        return rec

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    def actions(self, action):
        return [r for r in self.records if r.action == action]

    def last(self, action=None):
        rs = self.records if action is None else self.actions(action)
        return rs[-1] if rs else None

    def serialize(self):
        return "".join(r.format() + "\n" for r in self.records)

    def write(self, fn):
        with open(fn, 'w', encoding='utf-8', newline='\n') as out:
            out.write(self.serialize())

    def to_frame(self):
        """
        The records as a :class:`pandas.DataFrame` with the columns
        ``tick``, ``actor``, ``action`` and ``outcome``.
        """
        from pandas import DataFrame
        return DataFrame([(r.tick, r.actor, r.action, r.outcome) for r in self.records],
                         columns=Trace.COLUMNS)

    def summary(self):
        """
        Number of records per action.
        """
        return self.to_frame().groupby('action').size().sort_index()

    def info(self):
        if self.logger is None:
            return
        self.logger.info("%d records in trace" % len(self))
        if len(self) > 0:
            self.logger.debug("Trace:\n%s" % self.to_frame().tail(3))


class Module:

    """
    "Abstract" parent class for the :mod:`services <intercloud.services>`.
    Handlers are methods named ``on_<key>``, see :class:`.EventBus`.
    """

    def __init__(self, simulator, name=None):
        """
        :param Simulator simulator:
        :param str name:
        """
        name = name if name else self.__class__.__name__
        self._simulator = simulator
        self.config = simulator.config
        self._name = name
        # implicit dependency check (only class references)
        self._depends_on = []

    @property
    def name(self):
        """
        The module's name. It has to be unique within a simulator.
        """
        return self._name

    @property
    def simulator(self):
        return self._simulator

    @property
    def eventbus(self):
        return self._simulator.eventbus

    @property
    def topology(self):
        return self._simulator.topology

    @property
    def trace(self):
        return self._simulator.trace

    @property
    def now(self):
        return self._simulator.now

    def record(self, actor, action, outcome=""):
        return self._simulator.record(actor, action, outcome)

    def check_dependencies(self, modules):
        """
        Called once all modules are added. Return false if there is
        a problem.
        """
        return True

    def __start__(self):
        """
        Called right before the module is registered at the :class:`.EventBus`.
        """
        pass

    def __stop__(self):
        pass

    def __repr__(self):
        return 'Module %s' % self.name


class Simulator:

    """
    Deterministic discrete event simulator over a
    :class:`~intercloud.topology.Topology`.

    The trace is a pure function of the topology, the scheduled events and
    the seed.

    :param Topology topology:
    :param Config config: defaults to the testing configuration
    :param int seed: defaults to ``core.seed`` of the configuration
    :param services: module classes to add, defaults to
                     :data:`intercloud.services.DEFAULT_SERVICES`
    """

    def __init__(self, topology, config=None, seed=None, services=None):
        self.config = config = config if config is not None else Config(testing_mode=True)
        self.logger = config.get_logger('CORE')
        self.topology = topology
        self.seed = config.seed if seed is None else int(seed)
        self.random = SimRandom(self.seed)
        self.eventbus = EventBus(config)
        self.trace = Trace(config)
        self._queue = []
        self._seq = 0
        self._now = 0
        self._msg_ids = 0
        self._modules = OrderedDict()

        if services is None:
            from .services import DEFAULT_SERVICES
            services = DEFAULT_SERVICES
        for S in services:
            self.add(S)
        self.check_dependencies()
        self.logger.debug("EventBus keys: %s" % self.eventbus.keys)

    @property
    def now(self):
        return self._now

    @property
    def pending(self):
        return len(self._queue)

    @property
    def modules(self):
        return list(self._modules.values())

    def add(self, Mod, **kwargs):
        """
        Instantiates the module class ``Mod`` and registers it.
        """
        self.logger.debug("init: %s %s" % (Mod.__name__, kwargs))
        module = Mod(self, **kwargs)
        assert module.name not in self._modules, \
            "Names of modules need to be unique. '%s' is already used." % module.name
        self._modules[module.name] = module
        module.__start__()
        # only after __start__ it is ready to receive events
        self.eventbus.register(module)
        return module

    def module(self, who):
        return self._modules[who]

    def check_dependencies(self):
        modules = self.modules
        all_mods = set(m.__class__ for m in modules)
        for module in modules:
            if not module.check_dependencies(modules):
                raise Exception("%s does not satisfy dependencies. #1" % module)
            for mod_class in module._depends_on:
                if mod_class not in all_mods:
                    raise Exception("%s depends on %s, but missing." % (module, mod_class))

    def next_message_id(self):
        self._msg_ids += 1
        return self._msg_ids

    def record(self, actor, action, outcome=""):
        return self.trace.add(self._now, actor, action, outcome)

    def schedule(self, kind, at=None, **payload):
        """
        Enqueues an :class:`.Event` (or creates one of ``kind`` with the
        ``payload``) at tick ``at``, by default the current tick.

        :raises SchedulingInPast:
        :return: the event id, i.e. its ``seq``
        """
        if isinstance(kind, Event):
            event = kind
        else:
            event = Event(self._now if at is None else at, kind, **payload)
        if event.at < self._now:
            raise SchedulingInPast(event.at, self._now)
        self._seq += 1
        event.seq = self._seq
        heapq.heappush(self._queue, (event.at, event.seq, event))
        return event.seq

    def _execute(self, event):
        self._now = event.at
        self.logger.debug("executing %r" % event)
        self.eventbus.publish(event.kind.key, **event.payload)

    def run_until(self, tick):
        """
        Executes all events with ``at <= tick`` and moves the clock to ``tick``.

        :rtype: Trace
        """
        while self._queue and self._queue[0][0] <= tick:
            _, _, event = heapq.heappop(self._queue)
            self._execute(event)
        self._now = max(self._now, tick)
        return self.trace

    def run(self):
        """
        Executes events until the queue is empty or the next one is beyond
        ``simulation.max_ticks``.

        :rtype: Trace
        """
        max_ticks = self.config.max_ticks
        while self._queue:
            if self._queue[0][0] > max_ticks:
                self.logger.warning("%d events beyond tick %d are dropped" % (
                    len(self._queue), max_ticks))
                self._queue = []
                break
            _, _, event = heapq.heappop(self._queue)
            self._execute(event)
        return self.trace

    def stop(self):
        for m in self.modules:
            m.__stop__()
        self.trace.info()

    def __repr__(self):
        return "Simulator[tick=%d pending=%d records=%d]" % (
            self._now, len(self._queue), len(self.trace))
