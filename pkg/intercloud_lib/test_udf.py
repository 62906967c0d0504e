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
import doctest
import struct
import unittest

from cryptography.hazmat.primitives import hashes

from .udf import *
from intercloud.utils import IntercloudTestCase, SimRandom, expected_failure


def sha256(data):
    h = hashes.Hash(hashes.SHA256())
    h.update(data)
    return h.finalize()


def reference_pack(files, sort=True, seal=True):
    """
    Independent encoder, may produce unsorted or duplicate entries.
    """
    files = list(files)
    if sort:
        files.sort(key=lambda f: f[0].encode('utf-8'))
    out = b"UDF1" + struct.pack('>I', len(files))
    for path, mode, mtime, payload in files:
        raw = path.encode('utf-8')
        out += struct.pack('>H', len(raw)) + raw
        out += struct.pack('>IqH', len(payload), mtime, mode) + sha256(payload)
    for f in files:
        out += f[3]
    return out + sha256(out) if seal else out


def reseal(archive):
    body = archive[:-32]
    return body + sha256(body)


FILES = [("docs/b.txt", 0o644, 1000, b"bee"),
         ("a", 0o755, -5, b""),
         ("docs/a.txt", 0o600, 2 ** 40, b"ay" * 100)]


class Encoding(unittest.TestCase):

    def test_empty(self):
        data = udf_pack([])
        self.assertEqual(len(data), 40)
        self.assertEqual(data[:8], b"UDF1\x00\x00\x00\x00")
        self.assertEqual(udf_unpack(data), [])
        self.assertIsNone(udf_verify(data))

    def test_reference_layout(self):
        self.assertEqual(udf_pack(FILES), reference_pack(FILES))

    def test_sorted_by_path_bytes(self):
        entries = udf_unpack(udf_pack(FILES))
        self.assertEqual([e.path for e in entries], ["a", "docs/a.txt", "docs/b.txt"])
        # bytewise, not by code point of the lowered name
        entries = udf_unpack(udf_pack([("b", 0, 0, b""), ("B", 0, 0, b""), ("ä", 0, 0, b"")]))
        self.assertEqual([e.path for e in entries], ["B", "b", "ä"])

    def test_input_order_irrelevant(self):
        self.assertEqual(udf_pack(FILES), udf_pack(list(reversed(FILES))))

    def test_attributes(self):
        e = udf_unpack(udf_pack(FILES))[2]
        self.assertEqual(e.attributes.size_bytes, 3)
        self.assertEqual(e.attributes.modified_at, 1000)
        self.assertEqual(e.attributes.mode, 0o644)
        self.assertEqual(e.attributes.checksum, sha256(b"bee"))
        self.assertEqual(e.as_tuple(), FILES[0])

    @expected_failure(UdfError, "DuplicatePath")
    def test_duplicate(self):
        udf_pack([("a", 0, 0, b"1"), ("a", 0, 0, b"2")])

    def test_illegal_paths(self):
        for path in ["", "/etc/passwd", "a//b", "a/./b", "../a", "a/..", "a\\b", "a\x00"]:
            with self.assertRaises(UdfError) as ctx:
                udf_pack([(path, 0, 0, b"")])
            self.assertEqual(ctx.exception.reason, "IllegalPath", repr(path))

    def test_illegal_attributes(self):
        for mode, mtime in [(-1, 0), (0x10000, 0), (0, 2 ** 63), (0, -2 ** 63 - 1)]:
            with self.assertRaises(UdfError) as ctx:
                udf_pack([("a", mode, mtime, b"")])
            self.assertEqual(ctx.exception.reason, "IllegalAttribute")

    def test_extreme_attributes(self):
        files = [("a", 0xFFFF, -2 ** 63, b"x"), ("b", 0, 2 ** 63 - 1, b"y")]
        self.assertEqual([e.as_tuple() for e in udf_unpack(udf_pack(files))], files)


class RoundTrip(IntercloudTestCase):

    def test_random_file_sets(self):
        rnd = SimRandom(2013)
        for _ in range(200):
            files = self.random_files(rnd)
            entries = udf_unpack(udf_pack(files))
            expected = sorted(files, key=lambda f: f[0].encode('utf-8'))
            self.assertEqual([e.as_tuple() for e in entries], expected)


class Decoding(IntercloudTestCase):

    def assertFormatError(self, data, reason, path=None):
        with self.assertRaises(FormatError) as ctx:
            udf_unpack(data)
        self.assertEqual(ctx.exception.reason, reason)
        if path is not None:
            self.assertEqual(ctx.exception.path, path)
        self.assertIsInstance(udf_verify(data), FormatError)
        return ctx.exception

    def test_bad_magic(self):
        data = udf_pack(FILES)
        ex = self.assertFormatError(b"UDF2" + data[4:], "BadMagic")
        self.assertEqual(ex.offset, 0)
        self.assertFormatError(b"", "Truncated")

    def test_truncated(self):
        data = udf_pack(FILES)
        for cut in (3, 8, 20, len(data) - 33, len(data) - 1):
            self.assertFormatError(data[:cut], "Truncated")

    def test_trailing_data(self):
        ex = self.assertFormatError(udf_pack(FILES) + b"\x00", "TrailingData")
        self.assertEqual(ex.offset, len(udf_pack(FILES)))

    def test_archive_checksum(self):
        data = bytearray(udf_pack(FILES))
        data[-1] ^= 1
        self.assertFormatError(bytes(data), "ArchiveChecksumMismatch")

    def test_payload_checksum(self):
        data = bytearray(udf_pack(FILES))
        # last byte of the last payload, which belongs to docs/b.txt
        data[-33] ^= 1
        self.assertFormatError(reseal(bytes(data)), "ChecksumMismatch", "docs/b.txt")
        # before the archive checksum
        self.assertFormatError(bytes(data), "ChecksumMismatch", "docs/b.txt")

    def test_unsorted(self):
        files = [("b", 0, 0, b"2"), ("a", 0, 0, b"1")]
        self.assertFormatError(reference_pack(files, sort=False), "UnsortedEntries", "a")

    def test_duplicate(self):
        files = [("a", 0, 0, b"1"), ("a", 0, 0, b"2")]
        self.assertFormatError(reference_pack(files, sort=False), "DuplicatePath", "a")

    def test_illegal_path(self):
        self.assertFormatError(reference_pack([("../x", 0, 0, b"")]), "IllegalPath")
        self.assertFormatError(reference_pack([("a/b", 0, 0, b"")]).replace(b"a/b", b"a\xffb"),
                               "IllegalPath")

    def test_first_violation_wins(self):
        # a header problem is found before any payload is looked at
        files = [("b", 0, 0, b"2"), ("a", 0, 0, b"1")]
        data = bytearray(reference_pack(files, sort=False))
        data[-33] ^= 1
        self.assertFormatError(bytes(data), "UnsortedEntries")

    def test_single_byte_corruption(self):
        rnd = SimRandom(11)
        archives = [udf_pack([]), udf_pack(FILES)]
        while len(archives) < 6:
            data = udf_pack(self.random_files(rnd, max_files=4, max_size=64))
            if len(data) <= 1024:
                archives.append(data)
        for data in archives:
            for offset in range(len(data)):
                for mask in (0x01, 0x80, 0xFF):
                    bad = bytearray(data)
                    bad[offset] ^= mask
                    self.assertRaises(FormatError, udf_unpack, bytes(bad))


def load_tests(loader, tests, pattern):
    flags = doctest.ELLIPSIS | doctest.NORMALIZE_WHITESPACE
    tests.addTests(doctest.DocTestSuite('intercloud_lib.udf', optionflags=flags))
    return tests


if __name__ == '__main__':
    unittest.main()
