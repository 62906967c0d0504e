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
Scenarios
=========

Scripted sequences of events on a :class:`~intercloud.core.Simulator`.
They only schedule events, the :mod:`services <intercloud.services>` do
the work, so a scripted run and the same events scheduled by hand give the
same trace.

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""

from .failover import failover_any, failover_scenario
