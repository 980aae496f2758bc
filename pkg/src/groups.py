"""
Pairing backend: BLS12-381 through py_ecc's optimized implementation.

Provides the three prime-order groups (G1, G2, GT), scalar arithmetic
modulo the group order, hashing to G1 and to scalars, the pairing itself
and fixed-width canonical encodings.

Usage:
    s = Scalar(5)
    P = G1Elem.generator() ** s
    e = pairing(P, G2Elem.generator())

Notes:
- The scheme never needs an isomorphism between G2 and G1, so every G1
  base (g1, h, u, ...) is derived with hash_to_g1 under a fixed tag and
  nobody knows discrete logs between them.
- Python integers are not constant time. Equality on scalars goes through
  hmac.compare_digest; nothing stronger is attempted.
"""

from __future__ import annotations

import hashlib
import hmac
import itertools
import logging
import secrets
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Protocol, Sequence, Tuple, Union

from py_ecc.bls.hash import expand_message_xmd
from py_ecc.bls.hash_to_curve import hash_to_G1
from py_ecc.bls.point_compression import (
    compress_G1,
    compress_G2,
    decompress_G1,
    decompress_G2,
)
from py_ecc.optimized_bls12_381 import (
    FQ12,
    G1 as _G1_GENERATOR,
    G2 as _G2_GENERATOR,
    Z1,
    Z2,
    add,
    curve_order,
    eq,
    field_modulus,
    final_exponentiate,
    is_inf,
    multiply,
    neg,
    pairing as _py_ecc_pairing,
)

from .exceptions import MalformedEncoding, NotOnCurve, WrongSubgroup

logger = logging.getLogger(__name__)

ORDER: int = curve_order
FIELD_MODULUS: int = field_modulus

CURVE_NAME = "BLS12-381"
HASH_SUITE = "BLS12381G1_XMD:SHA-256_SSWU_RO_"
SECURITY_LEVEL = 128

SCALAR_BYTES = 32
G1_BYTES = 48
G2_BYTES = 96
GT_BYTES = 12 * 48

# bit 383: compressed, bit 382: infinity, bit 381: sign of y
_POW_2_381 = 2 ** 381
_POW_2_382 = 2 ** 382
_POW_2_383 = 2 ** 383

# hash_to_scalar expands to |p| + 128 bits before reducing
_WIDE_BYTES = 48


# =========================================================================
# Operation counters
# =========================================================================

@dataclass
class OperationCounts:
    """Tally of expensive backend operations inside a count_operations block."""
    pairings: int = 0
    g1_exps: int = 0
    g2_exps: int = 0
    gt_exps: int = 0

    @property
    def exponentiations(self) -> int:
        return self.g1_exps + self.g2_exps + self.gt_exps

    def to_dict(self) -> dict:
        return {
            'pairings': self.pairings,
            'g1_exps': self.g1_exps,
            'g2_exps': self.g2_exps,
            'gt_exps': self.gt_exps,
        }


_active_counts: ContextVar[Optional[OperationCounts]] = ContextVar("lgs_operation_counts", default=None)


@contextmanager
def count_operations() -> Iterator[OperationCounts]:
    """
    Count pairings and exponentiations performed inside the block.

    Usage:
        with count_operations() as counts:
            verify(gpk, message, amount, sig)
        print(counts.pairings)
    """
    counts = OperationCounts()
    token = _active_counts.set(counts)
    try:
        yield counts
    finally:
        _active_counts.reset(token)


def _tally(kind: str, n: int = 1) -> None:
    counts = _active_counts.get()
    if counts is not None:
        setattr(counts, kind, getattr(counts, kind) + n)


# =========================================================================
# Scalars
# =========================================================================

@dataclass(frozen=True, eq=False)
class Scalar:
    """Element of Z_p, always stored fully reduced."""
    value: int

    def __post_init__(self):
        object.__setattr__(self, 'value', int(self.value) % ORDER)

    @classmethod
    def zero(cls) -> 'Scalar':
        return cls(0)

    @classmethod
    def one(cls) -> 'Scalar':
        return cls(1)

    def is_zero(self) -> bool:
        return self.value == 0

    def inverse(self) -> 'Scalar':
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse modulo the group order")
        return Scalar(pow(self.value, ORDER - 2, ORDER))

    def __add__(self, other: 'ScalarLike') -> 'Scalar':
        return Scalar(self.value + _int(other))

    __radd__ = __add__

    def __sub__(self, other: 'ScalarLike') -> 'Scalar':
        return Scalar(self.value - _int(other))

    def __rsub__(self, other: 'ScalarLike') -> 'Scalar':
        return Scalar(_int(other) - self.value)

    def __mul__(self, other: 'ScalarLike') -> 'Scalar':
        return Scalar(self.value * _int(other))

    __rmul__ = __mul__

    def __neg__(self) -> 'Scalar':
        return Scalar(-self.value)

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return hmac.compare_digest(self.to_bytes(), other.to_bytes())

    def __hash__(self) -> int:
        return hash(('Scalar', self.value))

    def __repr__(self) -> str:
        return f"Scalar({to_hex(self.to_bytes())})"

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(SCALAR_BYTES, 'big')

    @classmethod
    def from_bytes(cls, data: bytes) -> 'Scalar':
        if len(data) != SCALAR_BYTES:
            raise MalformedEncoding(f"scalar needs {SCALAR_BYTES} bytes, got {len(data)}")
        value = int.from_bytes(data, 'big')
        if value >= ORDER:
            raise MalformedEncoding("scalar encoding is not reduced modulo the group order")
        return cls(value)


ScalarLike = Union[Scalar, int]


def _int(x: ScalarLike) -> int:
    return x.value if isinstance(x, Scalar) else int(x)


# =========================================================================
# Group elements
# =========================================================================

def _in_subgroup(point) -> bool:
    return is_inf(multiply(point, ORDER))


@dataclass(frozen=True, eq=False)
class G1Elem:
    """Point of the order-p subgroup of E(F_q), written multiplicatively."""
    point: tuple = field(repr=False)

    @classmethod
    def generator(cls) -> 'G1Elem':
        return cls(_G1_GENERATOR)

    @classmethod
    def identity(cls) -> 'G1Elem':
        return cls(Z1)

    def is_identity(self) -> bool:
        return is_inf(self.point)

    def __mul__(self, other: 'G1Elem') -> 'G1Elem':
        if not isinstance(other, G1Elem):
            return NotImplemented
        return G1Elem(add(self.point, other.point))

    def __truediv__(self, other: 'G1Elem') -> 'G1Elem':
        return self * other.inverse()

    def __pow__(self, exponent: ScalarLike) -> 'G1Elem':
        _tally('g1_exps')
        return G1Elem(multiply(self.point, _int(exponent) % ORDER))

    def inverse(self) -> 'G1Elem':
        return G1Elem(neg(self.point))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, G1Elem):
            return NotImplemented
        return eq(self.point, other.point)

    def __hash__(self) -> int:
        return hash(('G1', self.to_bytes()))

    def __repr__(self) -> str:
        return f"G1Elem({to_hex(self.to_bytes())})"

    def to_bytes(self) -> bytes:
        return compress_G1(self.point).to_bytes(G1_BYTES, 'big')

    @classmethod
    def from_bytes(cls, data: bytes) -> 'G1Elem':
        if len(data) != G1_BYTES:
            raise MalformedEncoding(f"G1 element needs {G1_BYTES} bytes, got {len(data)}")
        z = int.from_bytes(data, 'big')
        x = _check_flags(z, extra_zero=True)
        if x is None:
            point = Z1
        else:
            try:
                point = decompress_G1(z)
            except ValueError as e:
                raise NotOnCurve(str(e)) from e
        if not _in_subgroup(point):
            raise WrongSubgroup("G1 point is outside the prime-order subgroup")
        elem = cls(point)
        if elem.to_bytes() != bytes(data):
            raise MalformedEncoding("non-canonical G1 encoding")
        return elem


@dataclass(frozen=True, eq=False)
class G2Elem:
    """Point of the order-p subgroup of the sextic twist over F_q^2."""
    point: tuple = field(repr=False)

    @classmethod
    def generator(cls) -> 'G2Elem':
        return cls(_G2_GENERATOR)

    @classmethod
    def identity(cls) -> 'G2Elem':
        return cls(Z2)

    def is_identity(self) -> bool:
        return is_inf(self.point)

    def __mul__(self, other: 'G2Elem') -> 'G2Elem':
        if not isinstance(other, G2Elem):
            return NotImplemented
        return G2Elem(add(self.point, other.point))

    def __truediv__(self, other: 'G2Elem') -> 'G2Elem':
        return self * other.inverse()

    def __pow__(self, exponent: ScalarLike) -> 'G2Elem':
        _tally('g2_exps')
        return G2Elem(multiply(self.point, _int(exponent) % ORDER))

    def inverse(self) -> 'G2Elem':
        return G2Elem(neg(self.point))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, G2Elem):
            return NotImplemented
        return eq(self.point, other.point)

    def __hash__(self) -> int:
        return hash(('G2', self.to_bytes()))

    def __repr__(self) -> str:
        return f"G2Elem({to_hex(self.to_bytes())})"

    def to_bytes(self) -> bytes:
        z1, z2 = compress_G2(self.point)
        return z1.to_bytes(G1_BYTES, 'big') + z2.to_bytes(G1_BYTES, 'big')

    @classmethod
    def from_bytes(cls, data: bytes) -> 'G2Elem':
        if len(data) != G2_BYTES:
            raise MalformedEncoding(f"G2 element needs {G2_BYTES} bytes, got {len(data)}")
        z1 = int.from_bytes(data[:G1_BYTES], 'big')
        z2 = int.from_bytes(data[G1_BYTES:], 'big')
        if z2 >= FIELD_MODULUS:
            raise MalformedEncoding("G2 real coordinate is not reduced")
        x_im = _check_flags(z1, extra_zero=(z2 == 0))
        if x_im is None:
            point = Z2
        else:
            try:
                point = decompress_G2((z1, z2))
            except ValueError as e:
                raise NotOnCurve(str(e)) from e
        if not _in_subgroup(point):
            raise WrongSubgroup("G2 point is outside the prime-order subgroup")
        elem = cls(point)
        if elem.to_bytes() != bytes(data):
            raise MalformedEncoding("non-canonical G2 encoding")
        return elem


def _check_flags(z: int, extra_zero: bool) -> Optional[int]:
    """
    Validate the compression flags of a 48-byte word.

    Returns the x coordinate, or None for the point at infinity.
    """
    c_flag = (z >> 383) & 1
    b_flag = (z >> 382) & 1
    a_flag = (z >> 381) & 1
    x = z % _POW_2_381
    if not c_flag:
        raise MalformedEncoding("compression flag is not set")
    if b_flag:
        if a_flag or x or not extra_zero:
            raise MalformedEncoding("point at infinity must carry no coordinate bits")
        return None
    if x >= FIELD_MODULUS:
        raise MalformedEncoding("x coordinate is not reduced")
    return x


@dataclass(frozen=True, eq=False)
class GtElem:
    """Element of the order-p subgroup of F_q^12^*, the pairing target."""
    value: FQ12 = field(repr=False)

    @classmethod
    def identity(cls) -> 'GtElem':
        return cls(FQ12.one())

    def is_identity(self) -> bool:
        return self.value == FQ12.one()

    def __mul__(self, other: 'GtElem') -> 'GtElem':
        if not isinstance(other, GtElem):
            return NotImplemented
        return GtElem(self.value * other.value)

    def __truediv__(self, other: 'GtElem') -> 'GtElem':
        return self * other.inverse()

    def __pow__(self, exponent: ScalarLike) -> 'GtElem':
        _tally('gt_exps')
        return GtElem(self.value ** (_int(exponent) % ORDER))

    def inverse(self) -> 'GtElem':
        return GtElem(self.value.inv())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GtElem):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(('GT', self.to_bytes()))

    def to_bytes(self) -> bytes:
        """Twelve 48-byte big-endian coefficients of the F_q^12 polynomial basis."""
        return b"".join(
            (int(c) % FIELD_MODULUS).to_bytes(48, 'big') for c in self.value.coeffs
        )


# =========================================================================
# Pairing
# =========================================================================

def pairing(a: G1Elem, b: G2Elem) -> GtElem:
    """Optimal ate pairing e(a, b)."""
    _tally('pairings')
    return GtElem(_py_ecc_pairing(b.point, a.point))


def pairing_product(pairs: Iterable[Tuple[G1Elem, G2Elem]]) -> GtElem:
    """Product of pairings sharing one final exponentiation."""
    acc = FQ12.one()
    for a, b in pairs:
        _tally('pairings')
        acc = acc * _py_ecc_pairing(b.point, a.point, final_exponentiate=False)
    return GtElem(final_exponentiate(acc))


# =========================================================================
# Hashing
# =========================================================================

def hash_to_g1(domain_tag: bytes, data: bytes) -> G1Elem:
    """
    Hash arbitrary bytes to G1 (SSWU with cofactor clearing).

    The domain tag separates uses; distinct tags give unrelated outputs.
    """
    if not domain_tag:
        raise ValueError("domain_tag must be non-empty")
    return G1Elem(hash_to_G1(bytes(data), bytes(domain_tag), hashlib.sha256))


def hash_to_scalar(domain_tag: bytes, data: bytes) -> Scalar:
    """Hash to Z_p by expanding to 384 bits and reducing (bias below 2^-128)."""
    if not domain_tag:
        raise ValueError("domain_tag must be non-empty")
    wide = expand_message_xmd(bytes(data), bytes(domain_tag), _WIDE_BYTES, hashlib.sha256)
    return Scalar(int.from_bytes(wide, 'big'))


# =========================================================================
# Randomness
# =========================================================================

class ScalarSource(Protocol):
    """Entropy source handed to every probabilistic operation."""

    def random_scalar(self) -> Scalar:
        ...

    def random_bytes(self, n: int) -> bytes:
        ...


class SystemScalarSource:
    """Operating-system randomness via the secrets module."""

    def random_scalar(self) -> Scalar:
        return Scalar(secrets.randbelow(ORDER))

    def random_bytes(self, n: int) -> bytes:
        return secrets.token_bytes(n)


class SeededScalarSource:
    """
    Deterministic counter-mode source for reproducible runs and tests.

    Never use for real keys: anyone holding the seed can replay every draw.
    """

    _SCALAR_TAG = b"LGS-DRBG-SCALAR-v1"
    _BYTES_TAG = b"LGS-DRBG-BYTES-v1"

    def __init__(self, seed: bytes):
        if not seed:
            raise ValueError("seed must be non-empty")
        self._seed = bytes(seed)
        self._counter = itertools.count()

    def _block(self) -> bytes:
        return self._seed + next(self._counter).to_bytes(8, 'big')

    def random_scalar(self) -> Scalar:
        return hash_to_scalar(self._SCALAR_TAG, self._block())

    def random_bytes(self, n: int) -> bytes:
        return expand_message_xmd(self._block(), self._BYTES_TAG, n, hashlib.sha256)


_system_source = SystemScalarSource()


def default_source(rng: Optional[ScalarSource] = None) -> ScalarSource:
    return rng if rng is not None else _system_source


def random_scalar(rng: Optional[ScalarSource] = None) -> Scalar:
    return default_source(rng).random_scalar()


def random_nonzero_scalar(rng: Optional[ScalarSource] = None) -> Scalar:
    source = default_source(rng)
    while True:
        s = source.random_scalar()
        if not s.is_zero():
            return s


# =========================================================================
# Text forms
# =========================================================================

def to_hex(data: bytes) -> str:
    return "0x" + bytes(data).hex()


def from_hex(text: str) -> bytes:
    text = text.strip()
    if not text.startswith("0x"):
        raise MalformedEncoding("hex text must start with 0x")
    try:
        return bytes.fromhex(text[2:])
    except ValueError as e:
        raise MalformedEncoding(f"invalid hex: {e}") from e


def split_fixed(data: bytes, widths: Sequence[int]) -> list:
    """Cut a buffer into fixed-width fields; the total must match exactly."""
    if len(data) != sum(widths):
        raise MalformedEncoding(f"expected {sum(widths)} bytes, got {len(data)}")
    parts, offset = [], 0
    for w in widths:
        parts.append(bytes(data[offset:offset + w]))
        offset += w
    return parts
