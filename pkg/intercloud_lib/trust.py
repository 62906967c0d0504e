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
Trust Management
================

Every trust domain has exactly one :class:`.IntercloudRoot`. The root acts as
certificate authority for the clouds of its domain: it authenticates and
:meth:`admits <.IntercloudRoot.admit_cloud>` them, issues :class:`.Certificate`
objects and keeps the :class:`.TrustList`.

A cloud asking for the trustworthiness of another cloud goes through its own
root (:func:`.resolve_trust`):

- same domain: the root looks the target up in its trust list.
- other domain: the root asks the target's root, which answers with a signed
  :class:`.Recommendation`. The requester caps the recommended level with its
  :class:`.AcceptancePolicy`.

Signatures are produced by a :class:`.Signer`. The bundled
:class:`.KeyedHashSigner` is a keyed SHA-256 hash; anything offering
``sign``/``verify`` can replace it.

.. inheritance-diagram:: intercloud_lib.trust

.. codeauthor:: Harald Schilly <harald.schilly@univie.ac.at>
"""
# ATTN: this module must not depend on the config or the simulator.
import re
import struct
from dataclasses import dataclass
from enum import Enum, IntEnum

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import constant_time, hashes, hmac

SIGNATURE_SIZE = 32
DEFAULT_VALIDITY = 1000

_re_cloud_name = re.compile(r'^[a-z0-9-]+$')
_re_domain_label = re.compile(r'^[A-Za-z0-9.-]+$')


class TrustError(Exception):

    """
    Base class of all trust related errors.
    The :attr:`reason` is a short, stable code, e.g. ``WrongDomain``.
    """

    reason = "TrustError"

    def __init__(self, msg=None, reason=None):
        if reason is not None:
            self.reason = reason
        Exception.__init__(self, msg or self.reason)


class AdmissionRejected(TrustError):

    """
    Raised by :meth:`.IntercloudRoot.admit_cloud`, the reason is one of
    ``WrongDomain``, ``AlreadyAdmitted`` or ``AuthenticationFailed``.
    """

    def __init__(self, reason, candidate):
        TrustError.__init__(self, "%s: %s" % (reason, candidate), reason)
        self.candidate = candidate


class NotAdmitted(TrustError):
    reason = "NotAdmitted"


class RequesterNotAdmitted(TrustError):
    reason = "RequesterNotAdmitted"


class UnknownDomain(TrustError):
    reason = "UnknownDomain"


class MalformedCertificate(TrustError):
    reason = "MalformedCertificate"


class TrustLevel(IntEnum):

    """
    Totally ordered trust scale.

    >>> TrustLevel.MARGINAL < TrustLevel.FULL
    True
    >>> str(TrustLevel.parse('full'))
    'Full'
    """

    UNTRUSTED = 0
    MARGINAL = 1
    FULL = 2

    def __str__(self):
        return self.name.capitalize()

    @staticmethod
    def parse(text):
        try:
            return TrustLevel[text.strip().upper()]
        except KeyError:
            raise ValueError("unknown trust level '%s'" % text)


class VerificationResult(Enum):
    VALID = "Valid"
    BAD_SIGNATURE = "BadSignature"
    EXPIRED = "Expired"
    NOT_YET_VALID = "NotYetValid"

    def __str__(self):
        return self.value


class DecisionPath(Enum):
    DIRECT_LOOKUP = "DirectLookup"
    CROSS_DOMAIN_RECOMMENDATION = "CrossDomainRecommendation"
    DENIED = "Denied"

    def __str__(self):
        return self.value


@dataclass(frozen=True, order=True)
class DomainId:

    """
    Label of a trust domain, e.g. ``domA``.
    """

    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not _re_domain_label.match(self.label):
            raise ValueError("illegal domain label '%s'" % (self.label,))

    def __str__(self):
        return self.label


@dataclass(frozen=True, order=True)
class CloudId:

    """
    A cloud, identified by its ``name`` inside a :class:`.DomainId`.
    The textual form is ``name@domain``.
    """

    name: str
    domain: DomainId

    def __post_init__(self):
        if not isinstance(self.name, str) or not _re_cloud_name.match(self.name):
            raise ValueError("illegal cloud name '%s'" % (self.name,))
        if not isinstance(self.domain, DomainId):
            object.__setattr__(self, 'domain', DomainId(self.domain))

    @staticmethod
    def parse(text):
        """
        >>> CloudId.parse('a1@domA')
        CloudId(name='a1', domain=DomainId(label='domA'))
        """
        name, sep, label = text.partition('@')
        if not sep:
            raise ValueError("cloud id needs the form name@domain, got '%s'" % text)
        return CloudId(name, DomainId(label))

    def __str__(self):
        return "%s@%s" % (self.name, self.domain)


@dataclass(frozen=True)
class AdmissionEvidence:

    """
    What a candidate presents to the root. Currently this is the shared
    per-domain token.
    """

    token: str


@dataclass(frozen=True)
class AcceptancePolicy:

    """
    How much a cloud is willing to trust clouds of *other* domains.

    - ``cap``: the maximum level ever granted to a cross-domain peer.
    - ``minimum_acceptable``: below this, the decision is a denial.
    """

    cap: TrustLevel = TrustLevel.FULL
    minimum_acceptable: TrustLevel = TrustLevel.MARGINAL

    def __post_init__(self):
        if self.minimum_acceptable > self.cap:
            raise ValueError("minimum_acceptable %s exceeds cap %s"
                             % (self.minimum_acceptable, self.cap))


#
# Signing
#

class Signer:

    """
    "Abstract" signing interface. Subclasses implement :meth:`sign` and
    hand out a verification key via :attr:`verification_key`.
    """

    def sign(self, data):
        raise NotImplementedError()

    @property
    def verification_key(self):
        raise NotImplementedError()


class VerificationKey:

    """
    Counterpart of a :class:`.Signer`. The keyed hash is symmetric, hence the
    key carries the secret; it never leaves the :class:`.TrustTopology`.
    """

    def __init__(self, secret):
        self._secret = bytes(secret)

    def verify(self, data, signature):
        h = hmac.HMAC(self._secret, hashes.SHA256())
        h.update(bytes(data))
        try:
            h.verify(bytes(signature))
        except InvalidSignature:
            return False
        return True


class KeyedHashSigner(Signer):

    """
    HMAC-SHA256 over the canonical serialization.
    """

    def __init__(self, secret):
        self._secret = bytes(secret)

    @staticmethod
    def for_domain(domain):
        """
        A deterministic signer for the given domain, used when the topology
        does not provide a secret.
        """
        h = hashes.Hash(hashes.SHA256())
        h.update(b"intercloud-root:" + str(domain).encode('utf-8'))
        return KeyedHashSigner(h.finalize())

    def sign(self, data):
        h = hmac.HMAC(self._secret, hashes.SHA256())
        h.update(bytes(data))
        return h.finalize()

    @property
    def verification_key(self):
        return VerificationKey(self._secret)


#
# Certificates
#

def _pack_str(text, width=2):
    raw = text.encode('utf-8')
    fmt = '>H' if width == 2 else '>I'
    return struct.pack(fmt, len(raw)) + raw


def _unpack_str(data, offset, width=2):
    fmt = '>H' if width == 2 else '>I'
    if offset + width > len(data):
        raise MalformedCertificate("truncated at %d" % offset)
    length, = struct.unpack_from(fmt, data, offset)
    offset += width
    if offset + length > len(data):
        raise MalformedCertificate("truncated at %d" % offset)
    raw = bytes(data[offset:offset + length])
    try:
        return raw.decode('utf-8'), offset + length
    except UnicodeDecodeError:
        raise MalformedCertificate("invalid UTF-8 at %d" % offset)


@dataclass(frozen=True)
class Certificate:

    """
    Root-issued attestation binding a :class:`.CloudId` to its domain for the
    half-open validity window ``[issued_at, expires_at)``.
    """

    serial: int
    subject: CloudId
    issuer: DomainId
    issued_at: int
    expires_at: int
    signature: bytes = b""

    def payload(self):
        """
        Canonical serialization of everything but the signature:
        8-byte serial, subject and issuer (2-byte length + UTF-8 each),
        8-byte ``issued_at``, 8-byte ``expires_at``; all big-endian.
        """
        return b"".join([struct.pack('>Q', self.serial),
                         _pack_str(str(self.subject)),
                         _pack_str(str(self.issuer)),
                         struct.pack('>q', self.issued_at),
                         struct.pack('>q', self.expires_at)])

    def encode(self):
        return self.payload() + self.signature

    def valid_at(self, now):
        return self.issued_at <= now < self.expires_at


def decode_certificate(data):
    """
    Inverse of :meth:`.Certificate.encode`. Raises :class:`.MalformedCertificate`.
    """
    data = bytes(data)
    if len(data) < 8:
        raise MalformedCertificate("truncated at 0")
    serial, = struct.unpack_from('>Q', data, 0)
    subject, offset = _unpack_str(data, 8)
    issuer, offset = _unpack_str(data, offset)
    if offset + 16 + SIGNATURE_SIZE != len(data):
        raise MalformedCertificate("bad length %d" % len(data))
    issued_at, expires_at = struct.unpack_from('>qq', data, offset)
    signature = data[offset + 16:]
    try:
        return Certificate(serial, CloudId.parse(subject), DomainId(issuer),
                           issued_at, expires_at, signature)
    except ValueError as ex:
        raise MalformedCertificate(str(ex))


def verify_certificate(cert, root_key, now):
    """
    Checks, in this order, signature, expiry and start of validity.
    ``cert`` may also be the encoded bytes; undecodable bytes cannot carry a
    valid signature and yield ``BAD_SIGNATURE``.

    :param VerificationKey root_key: key of the issuing root
    :rtype: VerificationResult
    """
    if not isinstance(cert, Certificate):
        try:
            cert = decode_certificate(cert)
        except MalformedCertificate:
            return VerificationResult.BAD_SIGNATURE
    if not root_key.verify(cert.payload(), cert.signature):
        return VerificationResult.BAD_SIGNATURE
    if now >= cert.expires_at:
        return VerificationResult.EXPIRED
    if now < cert.issued_at:
        return VerificationResult.NOT_YET_VALID
    return VerificationResult.VALID


@dataclass(frozen=True)
class TrustEntry:
    level: TrustLevel
    serial: int


class TrustList:

    """
    The registry of a root: :class:`.CloudId` to (:class:`.TrustLevel`, serial).
    """

    def __init__(self, domain):
        self.domain = domain
        self._entries = {}

    def __contains__(self, cloud):
        return cloud in self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(sorted(self._entries))

    def get(self, cloud):
        return self._entries.get(cloud)

    def put(self, cloud, level, serial):
        assert cloud.domain == self.domain, "%s is not in domain %s" % (cloud, self.domain)
        self._entries[cloud] = TrustEntry(TrustLevel(level), serial)

    def remove(self, cloud):
        del self._entries[cloud]

    def items(self):
        return sorted(self._entries.items())


class IntercloudRoot:

    """
    The authority of one domain.

    :param DomainId domain: the domain this root is responsible for
    :param str token: shared secret a candidate has to present on admission
    :param Signer signer: defaults to :meth:`.KeyedHashSigner.for_domain`
    :param int validity: lifetime of issued certificates in ticks
    """

    def __init__(self, domain, token, signer=None, validity=DEFAULT_VALIDITY):
        if not isinstance(domain, DomainId):
            domain = DomainId(domain)
        if validity <= 0:
            raise ValueError("validity must be positive, got %s" % validity)
        self.domain = domain
        self._token = token
        self.signer = signer if signer is not None else KeyedHashSigner.for_domain(domain)
        self.validity = validity
        self.trust_list = TrustList(domain)
        self.certificates = {}  # serial -> Certificate
        self._last_serial = 0

    @property
    def verification_key(self):
        return self.signer.verification_key

    @property
    def last_serial(self):
        return self._last_serial

    def certificate_of(self, cloud):
        """
        The currently listed certificate of ``cloud`` or ``None``.
        """
        entry = self.trust_list.get(cloud)
        return None if entry is None else self.certificates[entry.serial]

    def level_of(self, cloud):
        entry = self.trust_list.get(cloud)
        return None if entry is None else entry.level

    def admit_cloud(self, candidate, evidence, now=0):
        """
        Authenticates ``candidate`` and issues a fresh certificate.
        The new cloud enters the trust list at ``MARGINAL``.

        :raises AdmissionRejected: ``WrongDomain``, ``AlreadyAdmitted``, ``AuthenticationFailed``
        :rtype: Certificate
        """
        if candidate.domain != self.domain:
            raise AdmissionRejected("WrongDomain", candidate)
        if candidate in self.trust_list:
            raise AdmissionRejected("AlreadyAdmitted", candidate)
        if evidence is None or not constant_time.bytes_eq(str(evidence.token).encode('utf-8'),
                                                          str(self._token).encode('utf-8')):
            raise AdmissionRejected("AuthenticationFailed", candidate)
        self._last_serial += 1
        unsigned = Certificate(self._last_serial, candidate, self.domain,
                               now, now + self.validity)
        cert = Certificate(unsigned.serial, candidate, self.domain,
                           unsigned.issued_at, unsigned.expires_at,
                           self.signer.sign(unsigned.payload()))
        self.certificates[cert.serial] = cert
        self.trust_list.put(candidate, TrustLevel.MARGINAL, cert.serial)
        return cert

    def revoke_cloud(self, subject):
        """
        Removes ``subject`` from the trust list. Its serial is never reused.

        :raises NotAdmitted:
        """
        if subject not in self.trust_list:
            raise NotAdmitted("%s is not admitted by %s" % (subject, self.domain))
        self.trust_list.remove(subject)
        return self

    def set_trust_level(self, subject, level):
        """
        Root-local promotion or demotion of an admitted cloud.

        :raises NotAdmitted:
        """
        entry = self.trust_list.get(subject)
        if entry is None:
            raise NotAdmitted("%s is not admitted by %s" % (subject, self.domain))
        self.trust_list.put(subject, TrustLevel(level), entry.serial)
        return self

    def holds_valid_certificate(self, cloud, now):
        cert = self.certificate_of(cloud)
        if cert is None:
            return False
        return verify_certificate(cert, self.verification_key, now) is VerificationResult.VALID

    def recommend(self, about, to_root, now):
        """
        Answer to a cross-domain query: a signed :class:`.Recommendation`
        carrying the listed level of ``about`` or ``None`` if this root cannot
        vouch for it at ``now``.
        """
        if about.domain != self.domain or not self.holds_valid_certificate(about, now):
            return None
        rec = Recommendation(about, self.domain, to_root, self.level_of(about),
                             self.certificate_of(about))
        return rec.signed_by(self.signer)

    def __repr__(self):
        return "IntercloudRoot[%s: %d clouds, last serial %d]" % (
            self.domain, len(self.trust_list), self._last_serial)


def admit_cloud(root, candidate, evidence, now=0):
    return root.admit_cloud(candidate, evidence, now)


def revoke_cloud(root, subject):
    return root.revoke_cloud(subject)


def set_trust_level(root, subject, level):
    return root.set_trust_level(subject, level)


@dataclass(frozen=True)
class Recommendation:

    """
    A statement of ``from_root`` for ``to_root`` about one of its clouds.
    """

    about: CloudId
    from_root: DomainId
    to_root: DomainId
    recommended_level: TrustLevel
    attached_certificate: Certificate
    signature: bytes = b""

    def __post_init__(self):
        if self.about.domain != self.from_root:
            raise ValueError("%s cannot be recommended by %s" % (self.about, self.from_root))

    def payload(self):
        cert = self.attached_certificate.encode()
        return b"".join([_pack_str(str(self.about)),
                         _pack_str(str(self.from_root)),
                         _pack_str(str(self.to_root)),
                         struct.pack('>B', int(self.recommended_level)),
                         struct.pack('>I', len(cert)), cert])

    def signed_by(self, signer):
        return Recommendation(self.about, self.from_root, self.to_root,
                              self.recommended_level, self.attached_certificate,
                              signer.sign(self.payload()))


def verify_recommendation(rec, from_root_key):
    return from_root_key.verify(rec.payload(), rec.signature)


@dataclass(frozen=True)
class TrustDecision:
    requester: CloudId
    target: CloudId
    path: DecisionPath
    effective_level: TrustLevel
    evidence: Recommendation = None

    def __str__(self):
        s = "target=%s path=%s level=%s" % (self.target, self.path, self.effective_level)
        if self.evidence is not None:
            s += " recommended=%s" % self.evidence.recommended_level
        return s


class TrustTopology:

    """
    All roots of a federation plus the acceptance policies of the clouds.

    Clouds in :attr:`unattestable` (e.g. hosted on a crashed node) are treated
    as holding no valid certificate.
    """

    def __init__(self, default_policy=None):
        self.roots = {}  # DomainId -> IntercloudRoot
        self.policies = {}  # CloudId -> AcceptancePolicy
        self.domain_policies = {}  # DomainId -> AcceptancePolicy
        self.default_policy = default_policy or AcceptancePolicy()
        self.unattestable = set()

    def add_root(self, root):
        if root.domain in self.roots:
            raise ValueError("domain %s has a root already" % root.domain)
        self.roots[root.domain] = root
        return root

    def root(self, domain):
        try:
            return self.roots[domain]
        except KeyError:
            raise UnknownDomain("no root for domain %s" % domain)

    def key_of(self, domain):
        return self.root(domain).verification_key

    def policy_of(self, cloud):
        if cloud in self.policies:
            return self.policies[cloud]
        return self.domain_policies.get(cloud.domain, self.default_policy)

    def attestable(self, cloud, now):
        if cloud in self.unattestable:
            return False
        root = self.roots.get(cloud.domain)
        return root is not None and root.holds_valid_certificate(cloud, now)

    def clouds(self):
        """
        All currently listed clouds, sorted.
        """
        return sorted(c for r in self.roots.values() for c in r.trust_list)


def resolve_trust(topology, requester, target, now):
    """
    Decides how far ``requester`` trusts ``target`` at tick ``now``.

    :raises RequesterNotAdmitted: requester holds no valid certificate
    :raises UnknownDomain: the target's domain has no root
    :rtype: TrustDecision
    """
    if requester.domain not in topology.roots or not topology.attestable(requester, now):
        raise RequesterNotAdmitted("%s holds no valid certificate" % requester)
    own_root = topology.roots[requester.domain]

    def denied(evidence=None):
        return TrustDecision(requester, target, DecisionPath.DENIED,
                             TrustLevel.UNTRUSTED, evidence)

    if target.domain == requester.domain:
        if not topology.attestable(target, now):
            return denied()
        return TrustDecision(requester, target, DecisionPath.DIRECT_LOOKUP,
                             own_root.level_of(target))

    target_root = topology.root(target.domain)
    if target in topology.unattestable:
        return denied()
    rec = target_root.recommend(target, own_root.domain, now)
    if rec is None:
        return denied()
    # roots trust each other's recommendations, a forged one is still dropped
    if not verify_recommendation(rec, topology.key_of(rec.from_root)):
        return denied()
    policy = topology.policy_of(requester)
    level = min(rec.recommended_level, policy.cap)
    if level < policy.minimum_acceptable:
        return denied(rec)
    return TrustDecision(requester, target, DecisionPath.CROSS_DOMAIN_RECOMMENDATION,
                         level, rec)


def trust_table(topology, now):
    """
    Decisions for every ordered pair of listed clouds, a list of
    :class:`.TrustDecision` (requester-major, sorted).
    """
    clouds = topology.clouds()
    table = []
    for requester in clouds:
        for target in clouds:
            try:
                table.append(resolve_trust(topology, requester, target, now))
            except RequesterNotAdmitted:
                break
    return table
