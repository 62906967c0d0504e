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

from intercloud.core import Module
from intercloud_lib.trust import TrustError
from intercloud_lib.platform import (TransferError, adapt_config, check_api_compat,
                                     check_vm_transfer)
from .trust import TrustService


class MigrationService(Module):

    """
    Moves workloads between clouds. A plain transfer (``transfer_vm``) only
    checks feasibility. A failover first asks the workload's owner whether it
    trusts the candidate enough, and checks feasibility only for candidates
    which pass.

    Records: ``failover``, ``feasibility``, ``adapt`` and ``transfer``
    (``TransferCompleted`` or ``TransferBlocked``).
    """

    def __init__(self, simulator):
        Module.__init__(self, simulator, 'migration')
        self.logger = self.config.get_logger('MIGR')
        self._depends_on.append(TrustService)

    def feasibility(self, workload, dst):
        """
        :raises TransferError: ``SourceNotCompleteVM``, ``DestinationNotRuntimeEnv``
        :raises KeyError: a cloud without platform
        :rtype: FeasibilityReport
        """
        dst_platform = self.topology.platform_of(dst)
        if workload.kind == 'image':
            src_platform = self.topology.platform_of(workload.deployed_on)
            return check_vm_transfer(workload.item, src_platform, dst_platform)
        return check_api_compat(workload.item.requirements, dst_platform)

    def transfer(self, workload, dst):
        """
        Feasibility check, configuration adaption and move.

        :return: True if the workload moved to ``dst``
        """
        wid = workload.workload_id
        try:
            report = self.feasibility(workload, dst)
        except (TransferError, KeyError) as ex:
            reason = getattr(ex, 'reason', 'NoPlatform')
            self.record(wid, 'feasibility', 'to=%s error=%s' % (dst, reason))
            self.record(wid, 'transfer', 'TransferBlocked to=%s reason=%s' % (dst, reason))
            return False
        self.record(wid, 'feasibility', 'to=%s %s' % (dst, report))
        if not report.feasible:
            self.record(wid, 'transfer', 'TransferBlocked to=%s report=%s' %
                        (dst, ",".join(str(f) for f in report.failures)))
            return False

        if workload.kind == 'image':
            dropped = []
            config = adapt_config(workload.item.config, self.topology.platform_of(dst), dropped)
            workload.item = replace(workload.item, config=config)
            if dropped:
                self.logger.warning("%s: host keys without counterpart on %s: %s" %
                                    (wid, dst, dropped))
            self.record(wid, 'adapt', 'to=%s dropped=%s' % (dst, ",".join(dropped) or "none"))
        src = workload.deployed_on
        workload.deployed_on = dst
        self.logger.info("%s moved from %s to %s" % (wid, src, dst))
        self.record(wid, 'transfer', 'TransferCompleted from=%s to=%s' % (src, dst))
        return True

    def on_transfer_vm(self, workload, dst):
        self.transfer(self.topology.workloads[workload], dst)

    def on_failover(self, workload, provider_a, candidates):
        """
        Tries the ``candidates`` in order and stops at the first completed
        transfer. Trust is decided before feasibility, for every candidate.
        """
        w = self.topology.workloads[workload]
        if w.deployed_on != provider_a:
            self.record(workload, 'failover', 'error=NotDeployed on=%s' % w.deployed_on)
            return
        self.record(workload, 'failover', 'from=%s candidates=%s' %
                    (provider_a, ",".join(str(c) for c in candidates)))
        trust = self.simulator.module('trust')
        minimum = self.topology.trust.policy_of(w.owner).minimum_acceptable
        for candidate in candidates:
            decision = trust.query(w.owner, candidate)
            if isinstance(decision, TrustError):
                self.record(workload, 'transfer', 'TransferBlocked to=%s reason=%s' %
                            (candidate, decision.reason))
                continue
            if decision.effective_level < minimum:
                self.record(workload, 'transfer',
                            'TransferBlocked to=%s reason=TrustBelowMinimum level=%s minimum=%s' %
                            (candidate, decision.effective_level, minimum))
                continue
            if self.transfer(w, candidate):
                return
        self.record(workload, 'failover', 'failed')
