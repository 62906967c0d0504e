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
Uniform Data Format
===================

A platform independent archive: a manifest of file attributes followed by
the packaged payloads. All integers are big-endian::

    "UDF1"                          4 bytes
    entry_count                     u32
    per entry:
        path_len                    u16
        path                        UTF-8, path_len bytes
        size                        u32
        modified_at                 i64
        mode                        u16
        checksum                    32 bytes, SHA-256 of the payload
    payloads                        concatenated, in entry order
    archive checksum                32 bytes, SHA-256 of all preceding bytes

Entries are sorted ascending by the bytes of their path. An empty archive
has 40 bytes.

The decoder :func:`.udf_unpack` is strict and reports the first violation
as :class:`.FormatError`.

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""
# ATTN: this module must not depend on the config or the simulator.
import hashlib
import struct
from dataclasses import dataclass

MAGIC = b"UDF1"
DIGEST_SIZE = 32
MAX_PAYLOAD = 2 ** 32 - 1
_ENTRY_FIXED = struct.Struct('>IqH')  # size, modified_at, mode


def digest(data):
    return hashlib.sha256(data).digest()


class UdfError(Exception):

    """
    Raised by :func:`.udf_pack`; ``reason`` is ``DuplicatePath``,
    ``IllegalPath``, ``Oversize`` or ``IllegalAttribute``.
    """

    def __init__(self, reason, msg):
        Exception.__init__(self, "%s: %s" % (reason, msg))
        self.reason = reason


class FormatError(Exception):

    """
    Raised by :func:`.udf_unpack`.

    - ``reason``: ``BadMagic``, ``Truncated``, ``ChecksumMismatch``,
      ``UnsortedEntries``, ``DuplicatePath``, ``IllegalPath``,
      ``ArchiveChecksumMismatch`` or ``TrailingData``
    - ``offset``: byte offset where the problem was detected
    - ``path``: the affected entry, if any
    """

    def __init__(self, reason, offset, path=None):
        msg = "%s at offset %d" % (reason, offset)
        if path is not None:
            msg += " (entry '%s')" % path
        Exception.__init__(self, msg)
        self.reason = reason
        self.offset = offset
        self.path = path


def check_path(path):
    """
    ``True`` iff ``path`` is relative, uses ``/`` separators and has no
    empty, ``.`` or ``..`` segments.

    >>> check_path('docs/a.txt'), check_path('../a'), check_path('/etc')
    (True, False, False)
    """
    if not isinstance(path, str) or not path or '\\' in path or '\x00' in path:
        return False
    if len(path.encode('utf-8', 'surrogatepass')) > 0xFFFF:
        return False
    return all(seg not in ('', '.', '..') for seg in path.split('/'))


@dataclass(frozen=True)
class FileAttributes:
    path: str
    size_bytes: int
    modified_at: int
    mode: int
    checksum: bytes


@dataclass(frozen=True)
class UdfEntry:
    attributes: FileAttributes
    payload: bytes

    @property
    def path(self):
        return self.attributes.path

    def as_tuple(self):
        """
        The ``(path, mode, modified_at, payload)`` form :func:`.udf_pack` takes.
        """
        a = self.attributes
        return a.path, a.mode, a.modified_at, self.payload


def _sort_key(path):
    return path.encode('utf-8')


def udf_pack(files):
    """
    Packs ``(path, mode, modified_at, payload)`` tuples.

    :raises UdfError:
    :rtype: bytes
    """
    seen = set()
    entries = []
    for path, mode, modified_at, payload in files:
        if not check_path(path):
            raise UdfError("IllegalPath", repr(path))
        try:
            path.encode('utf-8')
        except UnicodeEncodeError:
            raise UdfError("IllegalPath", repr(path))
        if path in seen:
            raise UdfError("DuplicatePath", path)
        seen.add(path)
        payload = bytes(payload)
        if len(payload) > MAX_PAYLOAD:
            raise UdfError("Oversize", "%s has %d bytes" % (path, len(payload)))
        if not 0 <= mode <= 0xFFFF:
            raise UdfError("IllegalAttribute", "mode %r of %s" % (mode, path))
        if not -2 ** 63 <= modified_at < 2 ** 63:
            raise UdfError("IllegalAttribute", "modified_at %r of %s" % (modified_at, path))
        entries.append((path, int(mode), int(modified_at), payload))
    entries.sort(key=lambda e: _sort_key(e[0]))

    out = [MAGIC, struct.pack('>I', len(entries))]
    for path, mode, modified_at, payload in entries:
        raw = path.encode('utf-8')
        out.append(struct.pack('>H', len(raw)))
        out.append(raw)
        out.append(_ENTRY_FIXED.pack(len(payload), modified_at, mode))
        out.append(digest(payload))
    out.extend(e[3] for e in entries)
    body = b"".join(out)
    return body + digest(body)


class _Reader:

    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, n):
        if self.offset + n > len(self.data):
            raise FormatError("Truncated", self.offset)
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt):
        return fmt.unpack(self.take(fmt.size))


_U16 = struct.Struct('>H')
_U32 = struct.Struct('>I')


def udf_unpack(data):
    """
    Strict decoder, returns the list of :class:`.UdfEntry` in archive order.

    :raises FormatError:
    """
    data = bytes(data)
    rd = _Reader(data)
    if rd.take(len(MAGIC)) != MAGIC:
        raise FormatError("BadMagic", 0)
    count, = rd.unpack(_U32)

    headers = []
    prev = None
    for _ in range(count):
        start = rd.offset
        path_len, = rd.unpack(_U16)
        raw = rd.take(path_len)
        try:
            path = raw.decode('utf-8')
        except UnicodeDecodeError:
            raise FormatError("IllegalPath", start)
        if not check_path(path):
            raise FormatError("IllegalPath", start, path)
        if prev is not None:
            if raw == prev:
                raise FormatError("DuplicatePath", start, path)
            if raw < prev:
                raise FormatError("UnsortedEntries", start, path)
        prev = raw
        size, modified_at, mode = rd.unpack(_ENTRY_FIXED)
        checksum = rd.take(DIGEST_SIZE)
        headers.append(FileAttributes(path, size, modified_at, mode, checksum))

    entries = []
    for attrs in headers:
        start = rd.offset
        payload = rd.take(attrs.size_bytes)
        if digest(payload) != attrs.checksum:
            raise FormatError("ChecksumMismatch", start, attrs.path)
        entries.append(UdfEntry(attrs, payload))

    end = rd.offset
    if rd.take(DIGEST_SIZE) != digest(data[:end]):
        raise FormatError("ArchiveChecksumMismatch", end)
    if rd.offset != len(data):
        raise FormatError("TrailingData", rd.offset)
    return entries


def udf_verify(data):
    """
    ``None`` if the archive is clean, the :class:`.FormatError` otherwise.
    """
    try:
        udf_unpack(data)
    except FormatError as ex:
        return ex
    return None
