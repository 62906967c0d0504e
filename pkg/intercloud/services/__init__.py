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
Services
========
Each service owns one concern of the federation and listens to a stream of
:class:`Events <intercloud.core.Event>` from the :class:`~intercloud.core.EventBus`.
The handlers turn the outcome of the protocol operations of
:mod:`intercloud_lib`, errors included, into :class:`~intercloud.core.Trace`
records.

Several services listen to ``crash_node`` and ``recover_node``. They are
called in the order of :data:`.DEFAULT_SERVICES`: the node goes down first,
then its clouds lose their certificates and its storage engines die.

.. inheritance-diagram:: intercloud.services

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""

from .messaging import MessagingService
from .trust import TrustService
from .exchange import ExchangeService
from .migration import MigrationService

DEFAULT_SERVICES = [MessagingService, TrustService, ExchangeService, MigrationService]
