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

r"""
Failover
--------

The servers of provider A crash and the company moves its workload to
provider B:

#. the node of ``provider_a`` crashes (its clouds lose their certificates),
#. the owner of the workload decides whether it trusts ``provider_b``,
#. only if the trust level reaches the owner's minimum, the transfer is
   checked (:func:`~intercloud_lib.platform.check_vm_transfer` for images,
   :func:`~intercloud_lib.platform.check_api_compat` for applications),
#. a feasible transfer adapts the machine configuration and ends with
   ``TransferCompleted``, anything else with ``TransferBlocked``.
"""

from intercloud.core import EventKind
from intercloud_lib.trust import CloudId


def _cloud(c):
    return c if isinstance(c, CloudId) else CloudId.parse(c)


def failover_any(sim, workload, provider_a, candidates):
    """
    Crash of ``provider_a`` and failover to the first of ``candidates``
    which passes both gates. Everything happens at the current tick.

    :param Simulator sim:
    :param str workload: id of an image or application of the topology
    :raises ValueError: the workload is not deployed on ``provider_a`` or
                        ``provider_a`` is not hosted on a node
    :rtype: Trace
    """
    topo = sim.topology
    provider_a = _cloud(provider_a)
    candidates = [_cloud(c) for c in candidates]
    if workload not in topo.workloads:
        raise ValueError("unknown workload %s" % workload)
    if topo.workloads[workload].deployed_on != provider_a:
        raise ValueError("%s is not deployed on %s" % (workload, provider_a))
    node = topo.cloud(provider_a).node
    if node is None:
        raise ValueError("%s is not hosted on a node" % provider_a)
    logger = sim.config.get_logger('FOVER')
    logger.info("%s: %s -> %s" % (workload, provider_a, ", ".join(map(str, candidates))))

    sim.schedule(EventKind.CRASH_NODE, node=node)
    sim.schedule(EventKind.FAILOVER, workload=workload, provider_a=provider_a,
                 candidates=candidates)
    return sim.run_until(sim.now)


def failover_scenario(sim, workload, provider_a, provider_b):
    """
    :func:`.failover_any` with the single candidate ``provider_b``.
    """
    return failover_any(sim, workload, provider_a, [provider_b])
