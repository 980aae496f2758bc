"""
Fiat-Shamir proofs of knowledge.

Two proofs live here:
- DlogProof: Schnorr proof of y with Y = base^y, used by Join.
- MembershipProof: the six-relation signature of knowledge behind Sign,

      l1 = v1^alpha                    l2 = v2^beta
      1  = l1^x * v1^-delta1           1  = l2^x * v2^-delta2
      l4 = u0^x
      e(g1,g2)/e(l3,w) = e(u,w)^(-alpha-beta) * e(l3,g2)^x
                         * e(u,g2)^(-delta1-delta2) * e(h,g2)^y

Responses follow z = r - c*w. The GT commitment is evaluated as a product
of two pairings (G1 exponents folded by bilinearity); its value is the same
element the four-factor expression defines, so transcripts are unchanged.

Transcripts:
    dlog:       "LGS-DLOG-v1" || len(context) (8, BE) || context || base || Y || a
    membership: "LGS-SOK-v1"  || len(message) (8, BE) || message || l1..l4 || a1..a6

Variable-length fields are always length-prefixed. Both transcripts are
hashed to Z_p under "LGS-H1-v1".
"""

import hmac
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .exceptions import EncodingError, WitnessMismatch
from .groups import (
    SCALAR_BYTES,
    G1Elem,
    G2Elem,
    GtElem,
    Scalar,
    ScalarSource,
    hash_to_scalar,
    pairing_product,
    random_scalar,
    split_fixed,
)

logger = logging.getLogger(__name__)

CHALLENGE_DST = b"LGS-H1-v1"
SOK_TAG = b"LGS-SOK-v1"
DLOG_TAG = b"LGS-DLOG-v1"
NONCE_TAG = b"LGS-SOK-NONCE-v1"

NONCE_RANDOM = "random"
NONCE_DETERMINISTIC = "deterministic"

_WITNESS_FIELDS = ('alpha', 'beta', 'x', 'y', 'delta1', 'delta2')


def _length_prefixed(data: bytes) -> bytes:
    return len(data).to_bytes(8, 'big') + bytes(data)


# =========================================================================
# Discrete-log proof
# =========================================================================

@dataclass(frozen=True)
class DlogProof:
    c: Scalar
    z: Scalar

    def to_bytes(self) -> bytes:
        return self.c.to_bytes() + self.z.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> 'DlogProof':
        c, z = split_fixed(data, (SCALAR_BYTES, SCALAR_BYTES))
        return cls(Scalar.from_bytes(c), Scalar.from_bytes(z))


def _dlog_challenge(base: G1Elem, Y: G1Elem, a: G1Elem, context: bytes) -> Scalar:
    transcript = (
        DLOG_TAG
        + _length_prefixed(context)
        + base.to_bytes()
        + Y.to_bytes()
        + a.to_bytes()
    )
    return hash_to_scalar(CHALLENGE_DST, transcript)


def dlog_prove(
    base: G1Elem,
    Y: G1Elem,
    y: Scalar,
    context: bytes,
    rng: Optional[ScalarSource] = None,
) -> DlogProof:
    """Prove knowledge of y with Y = base^y, bound to context."""
    if base ** y != Y:
        raise WitnessMismatch("Y is not base^y")
    r = random_scalar(rng)
    c = _dlog_challenge(base, Y, base ** r, context)
    return DlogProof(c=c, z=r - c * y)


def dlog_verify(base: G1Elem, Y: G1Elem, proof: DlogProof, context: bytes) -> bool:
    if not isinstance(proof, DlogProof) or not isinstance(Y, G1Elem):
        return False
    a = base ** proof.z * Y ** proof.c
    return proof.c == _dlog_challenge(base, Y, a, context)


# =========================================================================
# Membership signature of knowledge
# =========================================================================

@dataclass(frozen=True)
class SokStatement:
    """Public side of the membership relation."""
    g1: G1Elem
    g2: G2Elem
    h: G1Elem
    u: G1Elem
    v1: G1Elem
    v2: G1Elem
    omega: G2Elem
    u0: G1Elem
    l1: G1Elem
    l2: G1Elem
    l3: G1Elem
    l4: G1Elem

    def __post_init__(self):
        if self.u0.is_identity():
            raise ValueError("u0 must not be the identity")


@dataclass(frozen=True)
class SokWitness:
    alpha: Scalar
    beta: Scalar
    x: Scalar
    y: Scalar
    delta1: Scalar
    delta2: Scalar

    @classmethod
    def build(cls, alpha: Scalar, beta: Scalar, x: Scalar, y: Scalar) -> 'SokWitness':
        return cls(alpha=alpha, beta=beta, x=x, y=y, delta1=x * alpha, delta2=x * beta)

    def to_bytes(self) -> bytes:
        return b"".join(getattr(self, name).to_bytes() for name in _WITNESS_FIELDS)

    def __repr__(self) -> str:
        return "SokWitness(<redacted>)"


@dataclass(frozen=True)
class MembershipProof:
    c: Scalar
    z_alpha: Scalar
    z_beta: Scalar
    z_x: Scalar
    z_y: Scalar
    z_delta1: Scalar
    z_delta2: Scalar

    FIELDS = ('c', 'z_alpha', 'z_beta', 'z_x', 'z_y', 'z_delta1', 'z_delta2')
    BYTES = 7 * SCALAR_BYTES

    def to_bytes(self) -> bytes:
        return b"".join(getattr(self, name).to_bytes() for name in self.FIELDS)

    @classmethod
    def from_bytes(cls, data: bytes) -> 'MembershipProof':
        parts = split_fixed(data, (SCALAR_BYTES,) * 7)
        return cls(*(Scalar.from_bytes(p) for p in parts))


@dataclass(frozen=True)
class MembershipCommitments:
    """The six first-move values (a1..a6), or their recomputation."""
    a1: G1Elem
    a2: G1Elem
    a3: GtElem
    a4: G1Elem
    a5: G1Elem
    a6: G1Elem


def check_witness(stmt: SokStatement, wit: SokWitness) -> None:
    """Raise WitnessMismatch unless the witness satisfies the G1 relations."""
    if wit.delta1 != wit.x * wit.alpha or wit.delta2 != wit.x * wit.beta:
        raise WitnessMismatch("delta values are not x*alpha and x*beta")
    if stmt.v1 ** wit.alpha != stmt.l1 or stmt.v2 ** wit.beta != stmt.l2:
        raise WitnessMismatch("l1/l2 do not match alpha/beta")
    if stmt.u0 ** wit.x != stmt.l4:
        raise WitnessMismatch("link tag does not match x")


def _challenge(stmt: SokStatement, message: bytes, commits: MembershipCommitments) -> Scalar:
    transcript = b"".join((
        SOK_TAG,
        _length_prefixed(message),
        stmt.l1.to_bytes(),
        stmt.l2.to_bytes(),
        stmt.l3.to_bytes(),
        stmt.l4.to_bytes(),
        commits.a1.to_bytes(),
        commits.a2.to_bytes(),
        commits.a3.to_bytes(),
        commits.a4.to_bytes(),
        commits.a5.to_bytes(),
        commits.a6.to_bytes(),
    ))
    return hash_to_scalar(CHALLENGE_DST, transcript)


def _statement_bytes(stmt: SokStatement) -> bytes:
    return b"".join(
        e.to_bytes() for e in (stmt.u0, stmt.l1, stmt.l2, stmt.l3, stmt.l4)
    )


def _nonces(
    stmt: SokStatement,
    wit: SokWitness,
    message: bytes,
    rng: Optional[ScalarSource],
    nonce_mode: str,
) -> Tuple[Scalar, ...]:
    if nonce_mode == NONCE_RANDOM:
        return tuple(random_scalar(rng) for _ in _WITNESS_FIELDS)
    if nonce_mode == NONCE_DETERMINISTIC:
        seed = wit.to_bytes() + _statement_bytes(stmt) + _length_prefixed(message)
        return tuple(
            hash_to_scalar(NONCE_TAG, seed + bytes([i]))
            for i in range(len(_WITNESS_FIELDS))
        )
    raise ValueError(f"unknown nonce mode: {nonce_mode!r}")


def membership_commitments(stmt: SokStatement, nonces: Tuple[Scalar, ...]) -> MembershipCommitments:
    """Prover's first move for nonces (r_alpha, r_beta, r_x, r_y, r_delta1, r_delta2)."""
    r_alpha, r_beta, r_x, r_y, r_d1, r_d2 = nonces
    a3 = pairing_product((
        (stmt.u ** -(r_alpha + r_beta), stmt.omega),
        (stmt.l3 ** r_x * stmt.u ** -(r_d1 + r_d2) * stmt.h ** r_y, stmt.g2),
    ))
    return MembershipCommitments(
        a1=stmt.v1 ** r_alpha,
        a2=stmt.v2 ** r_beta,
        a3=a3,
        a4=stmt.l1 ** r_x * stmt.v1 ** -r_d1,
        a5=stmt.l2 ** r_x * stmt.v2 ** -r_d2,
        a6=stmt.u0 ** r_x,
    )


def membership_recompute(stmt: SokStatement, proof: MembershipProof) -> MembershipCommitments:
    """Verifier's reconstruction of a1..a6 from the responses and challenge."""
    c = proof.c
    a3 = pairing_product((
        (stmt.u ** -(proof.z_alpha + proof.z_beta) * stmt.l3 ** -c, stmt.omega),
        (
            stmt.l3 ** proof.z_x
            * stmt.u ** -(proof.z_delta1 + proof.z_delta2)
            * stmt.h ** proof.z_y
            * stmt.g1 ** c,
            stmt.g2,
        ),
    ))
    return MembershipCommitments(
        a1=stmt.v1 ** proof.z_alpha * stmt.l1 ** c,
        a2=stmt.v2 ** proof.z_beta * stmt.l2 ** c,
        a3=a3,
        a4=stmt.l1 ** proof.z_x * stmt.v1 ** -proof.z_delta1,
        a5=stmt.l2 ** proof.z_x * stmt.v2 ** -proof.z_delta2,
        a6=stmt.u0 ** proof.z_x * stmt.l4 ** c,
    )


def membership_prove_with_commitments(
    stmt: SokStatement,
    wit: SokWitness,
    message: bytes,
    rng: Optional[ScalarSource] = None,
    *,
    nonce_mode: str = NONCE_RANDOM,
) -> Tuple[MembershipProof, MembershipCommitments]:
    """membership_prove that also hands back a1..a6 for inspection."""
    check_witness(stmt, wit)
    nonces = _nonces(stmt, wit, message, rng, nonce_mode)
    commits = membership_commitments(stmt, nonces)
    c = _challenge(stmt, message, commits)
    secrets_ = tuple(getattr(wit, name) for name in _WITNESS_FIELDS)
    z = tuple(r - c * w for r, w in zip(nonces, secrets_))
    return MembershipProof(c, *z), commits


def membership_prove(
    stmt: SokStatement,
    wit: SokWitness,
    message: bytes,
    rng: Optional[ScalarSource] = None,
    *,
    nonce_mode: str = NONCE_RANDOM,
) -> MembershipProof:
    """
    Produce the membership signature of knowledge on message.

    Args:
        stmt: Group bases, u0 and l1..l4
        wit: (alpha, beta, x, y, delta1, delta2)
        message: Bytes the proof is bound to
        rng: Entropy source for the random nonce mode
        nonce_mode: "random" (default) or "deterministic", where nonces are
            hashed from witness, statement and message

    Raises:
        WitnessMismatch: the witness does not fit the statement
    """
    proof, _ = membership_prove_with_commitments(stmt, wit, message, rng, nonce_mode=nonce_mode)
    return proof


def membership_verify(stmt: SokStatement, message: bytes, proof: MembershipProof) -> bool:
    """Accept iff the recomputed transcript hashes back to proof.c."""
    if not isinstance(proof, MembershipProof):
        return False
    try:
        commits = membership_recompute(stmt, proof)
        expected = _challenge(stmt, message, commits)
    except (EncodingError, ValueError, TypeError) as e:
        logger.debug(f"Membership proof rejected during recomputation: {e}")
        return False
    return hmac.compare_digest(proof.c.to_bytes(), expected.to_bytes())
