"""
Tests for the proofs of knowledge: the join-time discrete-log proof and
the membership signature of knowledge behind Sign/Verify.
"""

import sys
from dataclasses import replace

import pytest

from src.exceptions import WitnessMismatch
from src.groups import G1Elem, Scalar, SeededScalarSource, hash_to_g1
from src.lgs import link_base
from src.linenc import lin_enc
from src.sok import (
    NONCE_DETERMINISTIC,
    DlogProof,
    MembershipProof,
    SokWitness,
    dlog_prove,
    dlog_verify,
    membership_prove,
    membership_prove_with_commitments,
    membership_recompute,
    membership_verify,
)
from tests.conftest import scale


@pytest.fixture(scope="module")
def instance(group):
    """A valid (statement, witness) pair for member 0 and amount b"100"."""
    member = group.members[0]
    u0 = link_base(b"100")
    ct, (alpha, beta) = lin_enc(
        group.gpk.linear_public_key, member.cert.A, SeededScalarSource(b"sok-instance")
    )
    stmt = group.gpk.statement(u0, ct.c1, ct.c2, ct.c3, u0 ** member.cert.x)
    return stmt, SokWitness.build(alpha, beta, member.cert.x, member.y)


# =========================================================================
# Discrete-log proof
# =========================================================================

def test_dlog_proof_verifies(rng):
    base = hash_to_g1(b"LGS-TEST-BASE", b"h")
    y = Scalar(123456789)
    proof = dlog_prove(base, base ** y, y, b"ctx", rng)
    assert dlog_verify(base, base ** y, proof, b"ctx")
    assert DlogProof.from_bytes(proof.to_bytes()) == proof


def test_dlog_proof_is_bound_to_context_and_key(rng):
    base = hash_to_g1(b"LGS-TEST-BASE", b"h")
    y = Scalar(42)
    proof = dlog_prove(base, base ** y, y, b"ctx", rng)
    assert not dlog_verify(base, base ** y, proof, b"other-ctx")
    assert not dlog_verify(base, base ** Scalar(43), proof, b"ctx")


def test_dlog_context_is_length_prefixed(rng):
    base = hash_to_g1(b"LGS-TEST-BASE", b"h")
    y = Scalar(77)
    proof = dlog_prove(base, base ** y, y, b"ctx", rng)
    assert not dlog_verify(base, base ** y, proof, b"ctx\x00")
    assert not dlog_verify(base, base ** y, proof, b"ct")


def test_dlog_prove_refuses_wrong_witness(rng):
    base = hash_to_g1(b"LGS-TEST-BASE", b"h")
    with pytest.raises(WitnessMismatch):
        dlog_prove(base, base ** Scalar(5), Scalar(6), b"ctx", rng)


# =========================================================================
# Membership proof
# =========================================================================

def test_membership_proof_verifies(instance, rng):
    stmt, wit = instance
    proof = membership_prove(stmt, wit, b"message", rng)
    assert membership_verify(stmt, b"message", proof)
    assert MembershipProof.from_bytes(proof.to_bytes()) == proof


def test_verifier_recomputes_prover_commitments(instance, rng):
    stmt, wit = instance
    for i in range(scale(1, 100)):
        message = b"message-%d" % i
        proof, commits = membership_prove_with_commitments(stmt, wit, message, rng)
        assert membership_recompute(stmt, proof) == commits


def test_membership_proof_is_bound_to_message_and_statement(instance, rng):
    stmt, wit = instance
    proof = membership_prove(stmt, wit, b"message", rng)
    assert not membership_verify(stmt, b"other message", proof)
    moved_tag = replace(stmt, l4=stmt.l4 * G1Elem.generator())
    assert not membership_verify(moved_tag, b"message", proof)


@pytest.mark.parametrize("field", ["l1", "l2", "l3"])
def test_membership_proof_is_bound_to_each_ciphertext_part(instance, rng, field):
    stmt, wit = instance
    proof = membership_prove(stmt, wit, b"message", rng)
    moved = replace(stmt, **{field: getattr(stmt, field) * G1Elem.generator()})
    assert not membership_verify(moved, b"message", proof)


def test_membership_proof_is_bound_to_link_base(instance, rng):
    stmt, wit = instance
    proof = membership_prove(stmt, wit, b"message", rng)
    assert not membership_verify(replace(stmt, u0=link_base(b"200")), b"message", proof)


def test_membership_prove_refuses_wrong_witness(instance, rng):
    stmt, wit = instance
    bad = SokWitness.build(wit.alpha, wit.beta, wit.x + 1, wit.y)
    with pytest.raises(WitnessMismatch):
        membership_prove(stmt, bad, b"message", rng)


def test_random_proofs_are_rejected(instance):
    stmt, _ = instance
    source = SeededScalarSource(b"sok-random-proof")
    for _ in range(scale(3, 1000)):
        forged = MembershipProof(*(source.random_scalar() for _ in MembershipProof.FIELDS))
        assert not membership_verify(stmt, b"message", forged)


def test_deterministic_nonces_repeat(instance, rng):
    stmt, wit = instance
    first = membership_prove(stmt, wit, b"message", nonce_mode=NONCE_DETERMINISTIC)
    second = membership_prove(stmt, wit, b"message", nonce_mode=NONCE_DETERMINISTIC)
    assert first == second
    assert membership_verify(stmt, b"message", first)
    assert membership_prove(stmt, wit, b"message", rng) != first


def test_witness_repr_hides_secrets(instance):
    _, wit = instance
    assert str(wit.x.value) not in repr(wit)


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
