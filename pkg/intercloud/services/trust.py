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
from intercloud.core import Module
from intercloud_lib.trust import (AdmissionEvidence, TrustError, TrustLevel,
                                  resolve_trust)


def root_actor(domain):
    return "root:%s" % domain


class TrustService(Module):

    """
    Admission, trust levels and trust queries, handled by the roots of the
    :class:`~intercloud_lib.trust.TrustTopology`.

    A crashed node takes the certificates of its clouds with it: they are
    revoked and stay unattestable until the node recovers. A recovered cloud
    has to be admitted again.
    """

    def __init__(self, simulator):
        Module.__init__(self, simulator, 'trust')
        self.logger = self.config.get_logger('TRUST')

    @property
    def trust(self):
        return self.topology.trust

    def on_admit_cloud(self, cloud, token=None):
        actor = root_actor(cloud.domain)
        try:
            root = self.trust.root(cloud.domain)
            if token is None:
                token = self.topology.token_of(cloud.domain)
            cert = root.admit_cloud(cloud, AdmissionEvidence(token), self.now)
        except TrustError as ex:
            self.record(actor, 'admit', '%s rejected=%s' % (cloud, ex.reason))
            return
        self.record(actor, 'admit', '%s serial=%d level=%s expires=%d' %
                    (cloud, cert.serial, root.level_of(cloud), cert.expires_at))

    def on_set_trust(self, cloud, level):
        actor = root_actor(cloud.domain)
        try:
            self.trust.root(cloud.domain).set_trust_level(cloud, level)
        except TrustError as ex:
            self.record(actor, 'set-trust', '%s error=%s' % (cloud, ex.reason))
            return
        self.record(actor, 'set-trust', '%s level=%s' % (cloud, TrustLevel(level)))

    def query(self, requester, target):
        """
        Resolves and records one trust decision.

        :return: the :class:`~intercloud_lib.trust.TrustDecision` or the
                 :class:`~intercloud_lib.trust.TrustError` that prevented it
        """
        try:
            decision = resolve_trust(self.trust, requester, target, self.now)
        except TrustError as ex:
            self.record(requester, 'trust', 'target=%s error=%s' % (target, ex.reason))
            return ex
        self.logger.debug("%s -> %s" % (requester, decision))
        self.record(requester, 'trust', str(decision))
        return decision

    def on_trust_query(self, requester, target):
        self.query(requester, target)

    def on_crash_node(self, node):
        for cloud in self.topology.clouds_on(node):
            self.trust.unattestable.add(cloud)
            root = self.trust.roots.get(cloud.domain)
            if root is not None and cloud in root.trust_list:
                root.revoke_cloud(cloud)
                self.record(root_actor(cloud.domain), 'revoke', '%s reason=NodeDown' % cloud)

    def on_recover_node(self, node):
        for cloud in self.topology.clouds_on(node):
            self.trust.unattestable.discard(cloud)
