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
Platforms
=========

Two kinds of platforms:

- *complete virtual machine* platforms run whole images. An image moves
  only if the destination supports its disk format and presents the same
  hardware abstraction layer (HAL); see :func:`.check_vm_transfer`.
  The machine configuration adapts itself to the destination
  (:func:`.adapt_config`).
- *run-time environments* offer a set of versioned APIs instead.
  An application moves if every API it needs is there in a recent enough
  version; see :func:`.check_api_compat`.

.. inheritance-diagram:: intercloud_lib.platform

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""
# ATTN: this module must not depend on the config or the simulator.
from dataclasses import dataclass, field
from enum import Enum

HOST_PREFIX = "host."


class TransferError(Exception):

    """
    ``reason`` is ``SourceNotCompleteVM`` or ``DestinationNotRuntimeEnv``.
    """

    def __init__(self, reason, msg):
        Exception.__init__(self, "%s: %s" % (reason, msg))
        self.reason = reason


class PlatformKind(Enum):
    COMPLETE_VM = "complete-vm"
    RUNTIME_ENV = "runtime-env"

    def __str__(self):
        return self.value


@dataclass(frozen=True, order=True)
class Failure:

    """
    One reason code of a :class:`.FeasibilityReport`, ``api`` is set for
    ``ApiMissing`` and ``ApiTooOld``.
    """

    code: str
    api: str = None

    def __str__(self):
        return self.code if self.api is None else "%s(%s)" % (self.code, self.api)


KIND_MISMATCH = Failure("KindMismatch")
DISK_FORMAT_UNSUPPORTED = Failure("DiskFormatUnsupported")
HAL_MISMATCH = Failure("HalMismatch")


def api_missing(name):
    return Failure("ApiMissing", name)


def api_too_old(name):
    return Failure("ApiTooOld", name)


@dataclass(frozen=True)
class FeasibilityReport:
    failures: tuple = ()

    @property
    def feasible(self):
        return len(self.failures) == 0

    def __str__(self):
        if self.feasible:
            return "feasible"
        return "infeasible: %s" % ", ".join(str(f) for f in self.failures)


class PlatformDescriptor:

    """
    :param str platform_id:
    :param PlatformKind kind:
    :param str hal_id: identity of the hardware abstraction layer
    :param supported_disk_formats: complete-VM platforms only
    :param dict api_surface: api name to version, run-time environments only
    :param str gateway_id: messaging gateway of a run-time environment
    :param dict host_profile: values of the ``host.*`` configuration keys on
                              this platform
    """

    def __init__(self, platform_id, kind, hal_id, supported_disk_formats=(),
                 api_surface=None, gateway_id=None, host_profile=None):
        kind = PlatformKind(kind)
        api_surface = dict(api_surface or {})
        supported_disk_formats = frozenset(supported_disk_formats)
        if kind is PlatformKind.COMPLETE_VM and (api_surface or gateway_id):
            raise ValueError("complete VM platform %s cannot offer apis or a gateway" % platform_id)
        if kind is PlatformKind.RUNTIME_ENV and supported_disk_formats:
            raise ValueError("run-time environment %s cannot support disk formats" % platform_id)
        if not hal_id:
            raise ValueError("platform %s needs a hal id" % platform_id)
        self.platform_id = platform_id
        self.kind = kind
        self.hal_id = hal_id
        self.supported_disk_formats = supported_disk_formats
        self.api_surface = api_surface
        self.gateway_id = gateway_id
        self.host_profile = dict(host_profile or {})
        for k in self.host_profile:
            if not k.startswith(HOST_PREFIX):
                raise ValueError("host profile key '%s' lacks the '%s' prefix" % (k, HOST_PREFIX))

    def __repr__(self):
        return "Platform[%s %s hal=%s]" % (self.platform_id, self.kind, self.hal_id)


class MachineConfig:

    """
    Configuration of a machine. Keys starting with ``host.`` are specific to
    the hosting platform, all others are portable.
    """

    def __init__(self, entries=None):
        self.entries = dict(entries or {})
        for k, v in self.entries.items():
            if not k or not isinstance(v, str):
                raise ValueError("bad config entry %r=%r" % (k, v))

    @property
    def portable(self):
        return {k: v for k, v in self.entries.items() if not k.startswith(HOST_PREFIX)}

    @property
    def host_specific(self):
        return {k: v for k, v in self.entries.items() if k.startswith(HOST_PREFIX)}

    def __eq__(self, other):
        return isinstance(other, MachineConfig) and self.entries == other.entries

    def __repr__(self):
        return "MachineConfig(%r)" % dict(sorted(self.entries.items()))


@dataclass(frozen=True)
class VirtualMachineImage:
    image_id: str
    disk_format: str
    hal_id: str
    config: MachineConfig = field(default_factory=MachineConfig)

    def __post_init__(self):
        if not self.disk_format:
            raise ValueError("image %s has no disk format" % self.image_id)


@dataclass(frozen=True)
class AppRequirements:

    """
    ``required_apis`` maps api name to minimum version.
    """

    required_apis: dict


@dataclass(frozen=True)
class Application:

    """
    A workload of a run-time environment.
    """

    app_id: str
    requirements: AppRequirements


def check_vm_transfer(image, src, dst):
    """
    Every violated condition, in the order kind, disk format, HAL.

    :raises TransferError: ``SourceNotCompleteVM``
    :rtype: FeasibilityReport
    """
    if src.kind is not PlatformKind.COMPLETE_VM:
        raise TransferError("SourceNotCompleteVM", "%s is a %s" % (src.platform_id, src.kind))
    failures = []
    if dst.kind is not PlatformKind.COMPLETE_VM:
        failures.append(KIND_MISMATCH)
    if image.disk_format not in dst.supported_disk_formats:
        failures.append(DISK_FORMAT_UNSUPPORTED)
    if image.hal_id != dst.hal_id:
        failures.append(HAL_MISMATCH)
    return FeasibilityReport(tuple(failures))


def check_api_compat(app, dst):
    """
    One failure per unmet requirement, in requirement-name order.

    :param AppRequirements app:
    :raises TransferError: ``DestinationNotRuntimeEnv``
    :rtype: FeasibilityReport
    """
    if dst.kind is not PlatformKind.RUNTIME_ENV:
        raise TransferError("DestinationNotRuntimeEnv", "%s is a %s" % (dst.platform_id, dst.kind))
    failures = []
    for name in sorted(app.required_apis):
        if name not in dst.api_surface:
            failures.append(api_missing(name))
        elif dst.api_surface[name] < app.required_apis[name]:
            failures.append(api_too_old(name))
    return FeasibilityReport(tuple(failures))


def adapt_config(config, dst, dropped=None):
    """
    Portable keys stay as they are, ``host.*`` keys take the value of the
    destination's host profile. Host keys the profile lacks are removed and
    appended to the ``dropped`` list, if one is given.

    :rtype: MachineConfig
    """
    adapted = dict(config.portable)
    for key in sorted(config.host_specific):
        if key in dst.host_profile:
            adapted[key] = dst.host_profile[key]
        elif dropped is not None:
            dropped.append(key)
    return MachineConfig(adapted)
