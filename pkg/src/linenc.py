"""
Linear encryption over G1.

Two-generator ElGamal: c = (v1^a, v2^b, m * u^(a+b)) with v1^k1 = v2^k2 = u.
CPA-secure only; the enclosing signature supplies authenticity.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from .groups import (
    G1_BYTES,
    G1Elem,
    Scalar,
    ScalarSource,
    default_source,
    hash_to_g1,
    random_nonzero_scalar,
    random_scalar,
    split_fixed,
)


U_TAG = b"LGS-LINENC-U-v1"


@dataclass(frozen=True)
class LinearPublicKey:
    v1: G1Elem
    v2: G1Elem
    u: G1Elem

    def __post_init__(self):
        for name in ('v1', 'v2', 'u'):
            if getattr(self, name).is_identity():
                raise ValueError(f"linear public key component {name} is the identity")


@dataclass(frozen=True)
class LinearSecretKey:
    k1: Scalar
    k2: Scalar

    def __post_init__(self):
        if self.k1.is_zero() or self.k2.is_zero():
            raise ValueError("linear secret key exponents must be non-zero")

    def __repr__(self) -> str:
        return "LinearSecretKey(<redacted>)"


@dataclass(frozen=True)
class LinearCiphertext:
    c1: G1Elem
    c2: G1Elem
    c3: G1Elem

    def to_bytes(self) -> bytes:
        return self.c1.to_bytes() + self.c2.to_bytes() + self.c3.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'LinearCiphertext':
        c1, c2, c3 = split_fixed(data, (G1_BYTES, G1_BYTES, G1_BYTES))
        return cls(G1Elem.from_bytes(c1), G1Elem.from_bytes(c2), G1Elem.from_bytes(c3))


def lin_keygen(rng: Optional[ScalarSource] = None) -> Tuple[LinearPublicKey, LinearSecretKey]:
    """
    Generate a fresh key pair.

    u is hashed from a random seed; v1 = u^(1/k1) and v2 = u^(1/k2), so the
    mutual discrete logs of v1, v2 and u stay unknown to everyone but the
    key holder.
    """
    source = default_source(rng)
    u = hash_to_g1(U_TAG, source.random_bytes(32))
    k1 = random_nonzero_scalar(source)
    k2 = random_nonzero_scalar(source)
    pk = LinearPublicKey(v1=u ** k1.inverse(), v2=u ** k2.inverse(), u=u)
    sk = LinearSecretKey(k1=k1, k2=k2)
    return pk, sk


def lin_keypair_consistent(pk: LinearPublicKey, sk: LinearSecretKey) -> bool:
    """Check v1^k1 = v2^k2 = u."""
    return pk.v1 ** sk.k1 == pk.u and pk.v2 ** sk.k2 == pk.u


def lin_enc(
    pk: LinearPublicKey,
    msg: G1Elem,
    rng: Optional[ScalarSource] = None,
    *,
    alpha: Optional[Scalar] = None,
    beta: Optional[Scalar] = None,
) -> Tuple[LinearCiphertext, Tuple[Scalar, Scalar]]:
    """
    Encrypt msg and return the ciphertext together with its randomness.

    The signer reuses (alpha, beta) as witnesses in the membership proof,
    which is why they leave this function. Callers may pin them explicitly.
    """
    if alpha is None:
        alpha = random_scalar(rng)
    if beta is None:
        beta = random_scalar(rng)
    ct = LinearCiphertext(
        c1=pk.v1 ** alpha,
        c2=pk.v2 ** beta,
        c3=msg * pk.u ** (alpha + beta),
    )
    return ct, (alpha, beta)


def lin_dec(sk: LinearSecretKey, ct: LinearCiphertext) -> G1Elem:
    """m = c3 / (c1^k1 * c2^k2). No integrity check."""
    return ct.c3 / (ct.c1 ** sk.k1 * ct.c2 ** sk.k2)

