"""
Tests for linear encryption: correctness, key consistency and a small
hand-checkable vector.
"""

import sys

import pytest

from src.groups import G1Elem, Scalar, SeededScalarSource, hash_to_g1
from src.linenc import (
    LinearCiphertext,
    LinearPublicKey,
    LinearSecretKey,
    lin_dec,
    lin_enc,
    lin_keygen,
    lin_keypair_consistent,
)
from tests.conftest import scale


@pytest.fixture(scope="module")
def keypair():
    return lin_keygen(SeededScalarSource(b"linenc-keys"))


def test_decrypt_recovers_message(keypair, rng):
    pk, sk = keypair
    for i in range(scale(3, 1000)):
        msg = hash_to_g1(b"LGS-TEST-MSG", i.to_bytes(4, 'big'))
        ct, _ = lin_enc(pk, msg, rng)
        assert lin_dec(sk, ct) == msg


def test_keygen_is_consistent(keypair):
    pk, sk = keypair
    assert lin_keypair_consistent(pk, sk)
    _, other_sk = lin_keygen(SeededScalarSource(b"linenc-other"))
    assert not lin_keypair_consistent(pk, other_sk)


def test_zero_randomness_leaves_message_in_clear(keypair):
    pk, sk = keypair
    msg = hash_to_g1(b"LGS-TEST-MSG", b"zero")
    ct, (alpha, beta) = lin_enc(pk, msg, alpha=Scalar(0), beta=Scalar(0))
    assert ct.c1.is_identity() and ct.c2.is_identity()
    assert ct.c3 == msg
    assert lin_dec(sk, ct) == msg


def test_small_vector():
    g1 = G1Elem.generator()
    pk = LinearPublicKey(v1=g1 ** 3, v2=g1 ** 2, u=g1 ** 6)
    sk = LinearSecretKey(k1=Scalar(2), k2=Scalar(3))
    assert lin_keypair_consistent(pk, sk)

    msg = g1 ** 5
    ct, _ = lin_enc(pk, msg, alpha=Scalar(1), beta=Scalar(1))
    assert ct.c1 == g1 ** 3
    assert ct.c2 == g1 ** 2
    assert ct.c3 == g1 ** 17
    assert lin_dec(sk, ct) == msg


def test_rerandomized_ciphertext_decrypts_the_same(keypair, rng):
    pk, sk = keypair
    msg = hash_to_g1(b"LGS-TEST-MSG", b"rerandomize")
    ct, _ = lin_enc(pk, msg, rng)
    a, b = Scalar(7), Scalar(9)
    shifted = LinearCiphertext(
        c1=ct.c1 * pk.v1 ** a,
        c2=ct.c2 * pk.v2 ** b,
        c3=ct.c3 * pk.u ** (a + b),
    )
    assert shifted != ct
    assert lin_dec(sk, shifted) == msg


def test_ciphertext_encoding(keypair, rng):
    pk, _ = keypair
    ct, _ = lin_enc(pk, hash_to_g1(b"LGS-TEST-MSG", b"enc"), rng)
    assert LinearCiphertext.from_bytes(ct.to_bytes()) == ct


def test_degenerate_keys_are_refused():
    g1 = G1Elem.generator()
    with pytest.raises(ValueError):
        LinearPublicKey(v1=G1Elem.identity(), v2=g1, u=g1)
    with pytest.raises(ValueError):
        LinearSecretKey(k1=Scalar(0), k2=Scalar(1))
    assert "redacted" in repr(LinearSecretKey(k1=Scalar(1), k2=Scalar(1)))


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
