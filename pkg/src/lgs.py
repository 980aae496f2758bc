"""
Linkable group signature protocol.

Six algorithms over three roles:
- RA (registration authority): holds gamma, issues certificates, keeps the
  registration list.
- SA (supervision authority): holds (k1, k2), traces signatures.
- Members: join, sign; anyone verifies and links.

Usage:
    gpk, ra, sa = setup()
    registry = RegistrationList("registry.lgs")

    y, request = join_user_start(gpk)
    cert = join_ra_issue(gpk, ra, request, registry)
    member = join_user_finish(gpk, y, cert)

    sig = sign(gpk, member, b"tx-body", b"100")
    assert verify(gpk, b"tx-body", b"100", sig)
    entry = trace(gpk, sa, b"tx-body", b"100", sig, registry)
"""

import hashlib
import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .exceptions import (
    CertificateCheckFailed,
    DuplicateMember,
    DuplicateX,
    DuplicateY,
    EncodingError,
    InvalidJoinProof,
    MemberNotFound,
    SignatureInvalid,
    UnsupportedSecurityLevel,
)
from .groups import (
    SECURITY_LEVEL,
    G1Elem,
    G2Elem,
    Scalar,
    ScalarSource,
    default_source,
    hash_to_g1,
    pairing,
    pairing_product,
    random_nonzero_scalar,
)
from .linenc import lin_dec, lin_enc, lin_keygen, lin_keypair_consistent
from .models import (
    Cert,
    GroupParams,
    JoinRequest,
    MemberKey,
    RaSecret,
    RegistryEntry,
    SaSecret,
    Signature,
)
from .registry import RegistrationList
from .sok import (
    NONCE_RANDOM,
    SokWitness,
    dlog_prove,
    dlog_verify,
    membership_prove,
    membership_verify,
)

logger = logging.getLogger(__name__)

GENERATOR_TAG = b"LGS-GEN-v1"
AMOUNT_TAG = b"LGS-H0-AMOUNT-v1"
JOIN_CONTEXT_TAG = b"LGS-JOIN-v1"

SUPPORTED_SECURITY_LEVELS = (SECURITY_LEVEL,)

SignedItem = Tuple[bytes, bytes, Signature]


class LinkResult(Enum):
    """Three-valued outcome of link()."""
    LINKED = "linked"
    UNLINKED = "unlinked"
    INVALID = "invalid"


# =========================================================================
# Setup
# =========================================================================

def setup(
    security_level: int = SECURITY_LEVEL,
    rng: Optional[ScalarSource] = None,
) -> Tuple[GroupParams, RaSecret, SaSecret]:
    """
    Generate the group public parameters and both authority keys.

    g1 and h are hashed from fixed tags, g2 is the standard G2 generator,
    omega = g2^gamma, and (u, v1, v2) come from a fresh linear-encryption
    key pair.

    Raises:
        UnsupportedSecurityLevel: anything other than 128
    """
    if security_level not in SUPPORTED_SECURITY_LEVELS:
        raise UnsupportedSecurityLevel(
            f"security level {security_level} not supported (choose from {SUPPORTED_SECURITY_LEVELS})"
        )
    source = default_source(rng)

    g1 = hash_to_g1(GENERATOR_TAG, b"g1")
    h = hash_to_g1(GENERATOR_TAG, b"h")
    g2 = G2Elem.generator()

    gamma = random_nonzero_scalar(source)
    lin_pk, lin_sk = lin_keygen(source)

    gpk = GroupParams(
        g1=g1, h=h, u=lin_pk.u, v1=lin_pk.v1, v2=lin_pk.v2,
        g2=g2, omega=g2 ** gamma,
    )
    logger.info("Group parameters generated")
    return gpk, RaSecret(gamma), SaSecret(lin_sk)


def check_authority_keys(
    gpk: GroupParams,
    ra: Optional[RaSecret] = None,
    sa: Optional[SaSecret] = None,
) -> bool:
    """True if the given authority keys belong to these parameters."""
    if ra is not None and gpk.g2 ** ra.gamma != gpk.omega:
        return False
    if sa is not None and not lin_keypair_consistent(gpk.linear_public_key, sa.key):
        return False
    return True


# =========================================================================
# Join
# =========================================================================

def join_context(gpk: GroupParams) -> bytes:
    """Context string binding join proofs to one set of parameters."""
    return JOIN_CONTEXT_TAG + hashlib.sha256(gpk.to_bytes()).digest()


def join_user_start(
    gpk: GroupParams,
    rng: Optional[ScalarSource] = None,
) -> Tuple[Scalar, JoinRequest]:
    """Member picks y, sends Y = h^y with a proof of knowledge of y."""
    source = default_source(rng)
    y = random_nonzero_scalar(source)
    Y = gpk.h ** y
    proof = dlog_prove(gpk.h, Y, y, join_context(gpk), source)
    return y, JoinRequest(Y=Y, proof=proof)


def join_ra_issue(
    gpk: GroupParams,
    ra: RaSecret,
    req: JoinRequest,
    registry: RegistrationList,
    rng: Optional[ScalarSource] = None,
) -> Cert:
    """
    RA checks the request and issues A = (g1 * Y^-1)^(1/(gamma+x)).

    x is resampled when gamma + x = 0 or when another member already holds
    it (a shared x would give two members the same link tags).

    Raises:
        InvalidJoinProof: the proof of knowledge of y fails
        DuplicateMember: Y already holds a certificate
    """
    if not dlog_verify(gpk.h, req.Y, req.proof, join_context(gpk)):
        logger.warning("Rejected join request: proof of knowledge does not verify")
        raise InvalidJoinProof("join request proof does not verify")
    if registry.lookup_by_Y(req.Y) is not None:
        logger.warning("Rejected join request: Y already registered")
        raise DuplicateMember("a certificate for this Y already exists")

    source = default_source(rng)
    base = gpk.g1 / req.Y
    while True:
        x = random_nonzero_scalar(source)
        denominator = ra.gamma + x
        if denominator.is_zero() or registry.contains_x(x):
            logger.debug("Resampling degenerate or colliding x")
            continue
        A = base ** denominator.inverse()
        # uniqueness of Y and x is settled under the registry lock
        try:
            index = registry.append(RegistryEntry.new(A=A, x=x, Y=req.Y))
        except DuplicateY as e:
            logger.warning("Rejected join request: Y registered concurrently")
            raise DuplicateMember("a certificate for this Y already exists") from e
        except DuplicateX:
            logger.debug("x taken concurrently, resampling")
            continue
        break

    logger.info(f"Issued certificate for member #{index}")
    return Cert(A=A, x=x)


def _certificate_holds(gpk: GroupParams, y: Scalar, cert: Cert) -> bool:
    # e(A, omega * g2^x) == e(g1 * h^-y, g2), checked as one product against 1
    if cert.A.is_identity():
        return False
    product = pairing_product((
        (cert.A, gpk.omega * gpk.g2 ** cert.x),
        ((gpk.g1 / gpk.h ** y).inverse(), gpk.g2),
    ))
    return product.is_identity()


def join_user_finish(gpk: GroupParams, y: Scalar, cert: Cert) -> MemberKey:
    """
    Member accepts (A, x) only if e(A, omega*g2^x) = e(g1*h^-y, g2).

    Raises:
        CertificateCheckFailed: the pairing check fails
    """
    if not _certificate_holds(gpk, y, cert):
        logger.warning("Certificate failed the pairing check")
        raise CertificateCheckFailed("issued certificate does not satisfy the pairing equation")
    return MemberKey(cert=cert, y=y)


def check_member_key(gpk: GroupParams, mk: MemberKey, ra: Optional[RaSecret] = None) -> bool:
    """
    Check the VR-SDH identity of a member key.

    Always checks e(A, omega*g2^x) * e(h, g2)^y = e(g1, g2); with the RA
    secret also checks A^(gamma+x) * h^y = g1.
    """
    A, x, y = mk.cert.A, mk.cert.x, mk.y
    lhs = pairing(A, gpk.omega * gpk.g2 ** x) * pairing(gpk.h, gpk.g2) ** y
    if lhs != pairing(gpk.g1, gpk.g2):
        return False
    if ra is not None and A ** (ra.gamma + x) * gpk.h ** y != gpk.g1:
        return False
    return True


# =========================================================================
# Sign / Verify
# =========================================================================

def link_base(amount: bytes) -> G1Elem:
    """u0 = H0(amount). Amounts are opaque bytes: b"5" and b"05" differ."""
    return hash_to_g1(AMOUNT_TAG, bytes(amount))


def sign(
    gpk: GroupParams,
    mk: MemberKey,
    message: bytes,
    amount: bytes,
    rng: Optional[ScalarSource] = None,
    *,
    nonce_mode: str = NONCE_RANDOM,
) -> Signature:
    """
    Sign message for amount.

    (l1, l2, l3) is a linear encryption of A under the SA key, l4 = u0^x is
    the link tag, and the proof shows all of it is consistent with a valid
    certificate.
    """
    source = default_source(rng)
    u0 = link_base(amount)
    ct, (alpha, beta) = lin_enc(gpk.linear_public_key, mk.cert.A, source)
    l4 = u0 ** mk.cert.x
    stmt = gpk.statement(u0, ct.c1, ct.c2, ct.c3, l4)
    witness = SokWitness.build(alpha, beta, mk.cert.x, mk.y)
    proof = membership_prove(stmt, witness, bytes(message), source, nonce_mode=nonce_mode)
    return Signature(l1=ct.c1, l2=ct.c2, l3=ct.c3, l4=l4, proof=proof)


def verify(gpk: GroupParams, message: bytes, amount: bytes, sig: Signature) -> bool:
    """Accept iff the membership proof verifies for u0 = H0(amount)."""
    if not isinstance(sig, Signature):
        return False
    try:
        stmt = gpk.statement(link_base(amount), sig.l1, sig.l2, sig.l3, sig.l4)
    except ValueError:
        return False
    return membership_verify(stmt, bytes(message), sig.proof)


def verify_bytes(gpk: GroupParams, message: bytes, amount: bytes, blob: bytes) -> bool:
    """verify() on an encoded signature; undecodable input rejects."""
    try:
        sig = Signature.from_bytes(blob)
    except EncodingError as e:
        logger.debug(f"Signature rejected at decode: {e}")
        return False
    return verify(gpk, message, amount, sig)


# =========================================================================
# Link
# =========================================================================

def link(gpk: GroupParams, first: SignedItem, second: SignedItem) -> LinkResult:
    """
    Publicly decide whether two signatures come from one member for one amount.

    Both must verify; tags are only comparable under the same amount.
    """
    m1, amount1, sig1 = first
    m2, amount2, sig2 = second
    if not verify(gpk, m1, amount1, sig1) or not verify(gpk, m2, amount2, sig2):
        return LinkResult.INVALID
    if bytes(amount1) == bytes(amount2) and sig1.l4 == sig2.l4:
        return LinkResult.LINKED
    return LinkResult.UNLINKED


def link_batch(gpk: GroupParams, items: Sequence[SignedItem]) -> List[List[int]]:
    """
    Group the positions of valid signatures sharing (amount, l4).

    Only groups with two or more members are returned, i.e. repeated
    spends by one signer. Invalid signatures are skipped.
    """
    groups: Dict[Tuple[bytes, bytes], List[int]] = {}
    for position, (message, amount, sig) in enumerate(items):
        if not verify(gpk, message, amount, sig):
            logger.debug(f"Skipping invalid signature at position {position}")
            continue
        key = (bytes(amount), sig.l4.to_bytes())
        groups.setdefault(key, []).append(position)
    return [positions for positions in groups.values() if len(positions) > 1]


# =========================================================================
# Trace
# =========================================================================

def trace(
    gpk: GroupParams,
    sa: SaSecret,
    message: bytes,
    amount: bytes,
    sig: Signature,
    registry: RegistrationList,
) -> RegistryEntry:
    """
    Open a valid signature to its signer's registration row.

    Raises:
        SignatureInvalid: the signature does not verify (tracing is refused)
        MemberNotFound: the decrypted A is not registered
    """
    if not verify(gpk, message, amount, sig):
        logger.warning("Refusing to trace an invalid signature")
        raise SignatureInvalid("signature does not verify")
    A = lin_dec(sa.key, sig.ciphertext)
    entry = registry.lookup_by_A(A)
    if entry is None:
        logger.warning("Decrypted certificate is not in the registration list")
        raise MemberNotFound("decrypted certificate is not registered")
    logger.info(f"Traced signature to member #{entry.index}")
    return entry
