"""
Data models shared by the RA, SA, members and verifiers.

Every role object has a fixed-width binary form: 4-byte magic, 1-byte
version, then its fields in declaration order.
"""
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Sequence, Type, TypeVar, Union

from .exceptions import MalformedEncoding
from .groups import (
    CURVE_NAME,
    G1_BYTES,
    G2_BYTES,
    HASH_SUITE,
    SCALAR_BYTES,
    G1Elem,
    G2Elem,
    Scalar,
    from_hex,
    split_fixed,
    to_hex,
)
from .linenc import LinearCiphertext, LinearPublicKey, LinearSecretKey
from .sok import DlogProof, MembershipProof, SokStatement

FORMAT_VERSION = 1
SUITE_BLS12_381_SHA256 = 1

MAGIC_PARAMS = b"LGSG"
MAGIC_RA = b"LGSR"
MAGIC_SA = b"LGSS"
MAGIC_MEMBER = b"LGSM"
MAGIC_PENDING = b"LGSP"
MAGIC_REQUEST = b"LGSQ"
MAGIC_CERT = b"LGSC"
MAGIC_SIGNATURE = b"LGS1"

_HEADER_BYTES = 5


def _pack(magic: bytes, *fields: bytes) -> bytes:
    return magic + bytes([FORMAT_VERSION]) + b"".join(fields)


def _unpack(magic: bytes, data: bytes, widths: Sequence[int]) -> List[bytes]:
    data = bytes(data)
    if len(data) < _HEADER_BYTES or data[:4] != magic:
        raise MalformedEncoding(f"expected magic {magic!r}")
    if data[4] != FORMAT_VERSION:
        raise MalformedEncoding(f"unsupported format version {data[4]}")
    return split_fixed(data[_HEADER_BYTES:], widths)


@dataclass(frozen=True)
class GroupParams:
    """GPK: the public parameters every party shares."""
    g1: G1Elem
    h: G1Elem
    u: G1Elem
    v1: G1Elem
    v2: G1Elem
    g2: G2Elem
    omega: G2Elem
    curve: str = CURVE_NAME
    hash_suite: str = HASH_SUITE

    def __post_init__(self):
        for name in ('g1', 'h', 'u', 'v1', 'v2', 'g2', 'omega'):
            if getattr(self, name).is_identity():
                raise ValueError(f"group parameter {name} is the identity")

    @property
    def linear_public_key(self) -> LinearPublicKey:
        return LinearPublicKey(v1=self.v1, v2=self.v2, u=self.u)

    def statement(self, u0: G1Elem, l1: G1Elem, l2: G1Elem, l3: G1Elem, l4: G1Elem) -> SokStatement:
        return SokStatement(
            g1=self.g1, g2=self.g2, h=self.h, u=self.u, v1=self.v1, v2=self.v2,
            omega=self.omega, u0=u0, l1=l1, l2=l2, l3=l3, l4=l4,
        )

    def to_bytes(self) -> bytes:
        return _pack(
            MAGIC_PARAMS,
            bytes([SUITE_BLS12_381_SHA256]),
            self.g1.to_bytes(), self.h.to_bytes(), self.u.to_bytes(),
            self.v1.to_bytes(), self.v2.to_bytes(),
            self.g2.to_bytes(), self.omega.to_bytes(),
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> 'GroupParams':
        suite, g1, h, u, v1, v2, g2, omega = _unpack(
            MAGIC_PARAMS, data, (1,) + (G1_BYTES,) * 5 + (G2_BYTES,) * 2
        )
        if suite[0] != SUITE_BLS12_381_SHA256:
            raise MalformedEncoding(f"unknown curve/hash suite {suite[0]}")
        try:
            return cls(
                g1=G1Elem.from_bytes(g1), h=G1Elem.from_bytes(h), u=G1Elem.from_bytes(u),
                v1=G1Elem.from_bytes(v1), v2=G1Elem.from_bytes(v2),
                g2=G2Elem.from_bytes(g2), omega=G2Elem.from_bytes(omega),
            )
        except ValueError as e:
            raise MalformedEncoding(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            'curve': self.curve,
            'hash_suite': self.hash_suite,
            'g1': to_hex(self.g1.to_bytes()),
            'h': to_hex(self.h.to_bytes()),
            'u': to_hex(self.u.to_bytes()),
            'v1': to_hex(self.v1.to_bytes()),
            'v2': to_hex(self.v2.to_bytes()),
            'g2': to_hex(self.g2.to_bytes()),
            'omega': to_hex(self.omega.to_bytes()),
        }


@dataclass(frozen=True)
class RaSecret:
    """Registration authority issuing key gamma (omega = g2^gamma)."""
    gamma: Scalar

    def __post_init__(self):
        if self.gamma.is_zero():
            raise ValueError("gamma must be non-zero")

    def __repr__(self) -> str:
        return "RaSecret(<redacted>)"

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_RA, self.gamma.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'RaSecret':
        (gamma,) = _unpack(MAGIC_RA, data, (SCALAR_BYTES,))
        try:
            return cls(Scalar.from_bytes(gamma))
        except ValueError as e:
            raise MalformedEncoding(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {'role': 'registration-authority'}


@dataclass(frozen=True)
class SaSecret:
    """Supervision authority tracing key (k1, k2)."""
    key: LinearSecretKey

    def __repr__(self) -> str:
        return "SaSecret(<redacted>)"

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_SA, self.key.k1.to_bytes(), self.key.k2.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'SaSecret':
        k1, k2 = _unpack(MAGIC_SA, data, (SCALAR_BYTES, SCALAR_BYTES))
        try:
            return cls(LinearSecretKey(Scalar.from_bytes(k1), Scalar.from_bytes(k2)))
        except ValueError as e:
            raise MalformedEncoding(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {'role': 'supervision-authority'}


@dataclass(frozen=True)
class Cert:
    """Membership certificate (A, x) issued by the RA."""
    A: G1Elem
    x: Scalar

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_CERT, self.A.to_bytes(), self.x.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'Cert':
        A, x = _unpack(MAGIC_CERT, data, (G1_BYTES, SCALAR_BYTES))
        return cls(G1Elem.from_bytes(A), Scalar.from_bytes(x))

    def to_dict(self) -> Dict[str, Any]:
        return {'A': to_hex(self.A.to_bytes()), 'x': to_hex(self.x.to_bytes())}


@dataclass(frozen=True)
class MemberKey:
    """A member's VR-SDH triple: certificate plus the member-only secret y."""
    cert: Cert
    y: Scalar

    def __repr__(self) -> str:
        return f"MemberKey(A={self.cert.A!r}, <secrets redacted>)"

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_MEMBER, self.cert.A.to_bytes(), self.cert.x.to_bytes(), self.y.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'MemberKey':
        A, x, y = _unpack(MAGIC_MEMBER, data, (G1_BYTES, SCALAR_BYTES, SCALAR_BYTES))
        return cls(Cert(G1Elem.from_bytes(A), Scalar.from_bytes(x)), Scalar.from_bytes(y))

    def to_dict(self) -> Dict[str, Any]:
        return {'A': to_hex(self.cert.A.to_bytes())}


@dataclass(frozen=True)
class PendingMember:
    """Member-side state between join-request and join-finish."""
    y: Scalar
    Y: G1Elem

    def __repr__(self) -> str:
        return f"PendingMember(Y={self.Y!r})"

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_PENDING, self.y.to_bytes(), self.Y.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'PendingMember':
        y, Y = _unpack(MAGIC_PENDING, data, (SCALAR_BYTES, G1_BYTES))
        return cls(Scalar.from_bytes(y), G1Elem.from_bytes(Y))

    def to_dict(self) -> Dict[str, Any]:
        return {'Y': to_hex(self.Y.to_bytes())}


@dataclass(frozen=True)
class JoinRequest:
    """First Join message: Y = h^y with a proof of knowledge of y."""
    Y: G1Elem
    proof: DlogProof

    def to_bytes(self) -> bytes:
        return _pack(MAGIC_REQUEST, self.Y.to_bytes(), self.proof.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> 'JoinRequest':
        Y, proof = _unpack(MAGIC_REQUEST, data, (G1_BYTES, 2 * SCALAR_BYTES))
        return cls(G1Elem.from_bytes(Y), DlogProof.from_bytes(proof))

    def to_dict(self) -> Dict[str, Any]:
        return {'Y': to_hex(self.Y.to_bytes())}


@dataclass(frozen=True)
class Signature:
    """sigma = (l1, l2, l3, l4, proof); l1..l3 escrow A, l4 is the link tag."""
    l1: G1Elem
    l2: G1Elem
    l3: G1Elem
    l4: G1Elem
    proof: MembershipProof

    BYTES = _HEADER_BYTES + 4 * G1_BYTES + MembershipProof.BYTES

    @property
    def ciphertext(self) -> LinearCiphertext:
        return LinearCiphertext(self.l1, self.l2, self.l3)

    @property
    def link_tag(self) -> G1Elem:
        return self.l4

    def to_bytes(self) -> bytes:
        return _pack(
            MAGIC_SIGNATURE,
            self.l1.to_bytes(), self.l2.to_bytes(), self.l3.to_bytes(), self.l4.to_bytes(),
            self.proof.to_bytes(),
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> 'Signature':
        l1, l2, l3, l4, proof = _unpack(
            MAGIC_SIGNATURE, data, (G1_BYTES,) * 4 + (MembershipProof.BYTES,)
        )
        return cls(
            G1Elem.from_bytes(l1), G1Elem.from_bytes(l2),
            G1Elem.from_bytes(l3), G1Elem.from_bytes(l4),
            MembershipProof.from_bytes(proof),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'l1': to_hex(self.l1.to_bytes()),
            'l2': to_hex(self.l2.to_bytes()),
            'l3': to_hex(self.l3.to_bytes()),
            'l4': to_hex(self.l4.to_bytes()),
            'proof': to_hex(self.proof.to_bytes()),
        }


@dataclass(frozen=True)
class RegistryEntry:
    """One row of the RA's registration list."""
    index: int
    A: G1Elem
    x: Scalar
    Y: G1Elem
    issued_at: datetime

    @property
    def cert(self) -> Cert:
        return Cert(self.A, self.x)

    def with_index(self, index: int) -> 'RegistryEntry':
        return replace(self, index=index)

    @classmethod
    def new(cls, A: G1Elem, x: Scalar, Y: G1Elem) -> 'RegistryEntry':
        """Unnumbered entry; the registration list assigns the index."""
        return cls(index=0, A=A, x=x, Y=Y, issued_at=datetime.now(timezone.utc))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'index': self.index,
            'A': to_hex(self.A.to_bytes()),
            'Y': to_hex(self.Y.to_bytes()),
            'issued_at': self.issued_at.isoformat(),
        }


# =========================================================================
# Role files
# =========================================================================

ROLE_TYPES = {
    MAGIC_PARAMS: GroupParams,
    MAGIC_RA: RaSecret,
    MAGIC_SA: SaSecret,
    MAGIC_MEMBER: MemberKey,
    MAGIC_PENDING: PendingMember,
    MAGIC_REQUEST: JoinRequest,
    MAGIC_CERT: Cert,
    MAGIC_SIGNATURE: Signature,
}

RoleObject = Union[GroupParams, RaSecret, SaSecret, MemberKey, PendingMember, JoinRequest, Cert, Signature]
T = TypeVar('T')

OUTPUT_BINARY = 'binary'
OUTPUT_HEX = 'hex'


def encode_blob(blob: bytes, fmt: str = OUTPUT_BINARY) -> bytes:
    """Binary stays as is; hex becomes '0x...' plus a newline."""
    if fmt == OUTPUT_BINARY:
        return bytes(blob)
    if fmt == OUTPUT_HEX:
        return (to_hex(blob) + "\n").encode('ascii')
    raise ValueError(f"unknown output format: {fmt!r}")


def decode_blob(raw: bytes) -> bytes:
    """Inverse of encode_blob for either format (hex is detected by its 0x prefix)."""
    if raw[:2] == b"0x":
        try:
            text = raw.decode('ascii')
        except UnicodeDecodeError as e:
            raise MalformedEncoding("hex file contains non-ASCII bytes") from e
        return from_hex(text)
    return bytes(raw)


def write_role_file(path: Union[str, Path], obj: RoleObject, fmt: str = OUTPUT_BINARY) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_blob(obj.to_bytes(), fmt))
    return path


def read_role_file(path: Union[str, Path], cls: Type[T]) -> T:
    return cls.from_bytes(decode_blob(Path(path).read_bytes()))


def parse_any(blob: bytes) -> RoleObject:
    """Decode a blob of any role type, dispatching on its magic."""
    cls = ROLE_TYPES.get(bytes(blob[:4]))
    if cls is None:
        raise MalformedEncoding(f"unknown magic {bytes(blob[:4])!r}")
    return cls.from_bytes(blob)
