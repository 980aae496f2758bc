"""
Shared fixtures for the test suite.

py_ecc is pure Python, so every pairing costs on the order of a second.
The suite builds one group per session and reuses its members and
signatures. Set LGS_FULL_ACCEPTANCE=1 to run the larger acceptance counts.
"""

import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List

import pytest

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.groups import SeededScalarSource
from src.lgs import join_ra_issue, join_user_finish, join_user_start, setup, sign
from src.models import GroupParams, MemberKey, RaSecret, SaSecret, Signature
from src.registry import RegistrationList

FULL_ACCEPTANCE = os.environ.get("LGS_FULL_ACCEPTANCE") == "1"


def scale(reduced: int, full: int) -> int:
    """Iteration count for the current test scale."""
    return full if FULL_ACCEPTANCE else reduced


@dataclass
class Group:
    gpk: GroupParams
    ra: RaSecret
    sa: SaSecret
    registry: RegistrationList
    members: List[MemberKey]


@dataclass
class SignedSet:
    """Signatures over a small group, named by signer / amount / message."""
    m0_a100_first: Signature
    m0_a100_second: Signature
    m1_a100: Signature
    m0_a200: Signature


def enroll(gpk, ra, registry, rng=None) -> MemberKey:
    y, request = join_user_start(gpk, rng)
    cert = join_ra_issue(gpk, ra, request, registry, rng)
    return join_user_finish(gpk, y, cert)


@pytest.fixture
def rng():
    return SeededScalarSource(b"lgs-test-seed")


@pytest.fixture(scope="session")
def group() -> Group:
    source = SeededScalarSource(b"lgs-session-group")
    gpk, ra, sa = setup(rng=source)
    registry = RegistrationList()
    members = [enroll(gpk, ra, registry, source) for _ in range(2)]
    return Group(gpk=gpk, ra=ra, sa=sa, registry=registry, members=members)


@pytest.fixture(scope="session")
def signed(group) -> SignedSet:
    source = SeededScalarSource(b"lgs-session-signatures")
    m0, m1 = group.members
    return SignedSet(
        m0_a100_first=sign(group.gpk, m0, b"first", b"100", source),
        m0_a100_second=sign(group.gpk, m0, b"second", b"100", source),
        m1_a100=sign(group.gpk, m1, b"first", b"100", source),
        m0_a200=sign(group.gpk, m0, b"first", b"200", source),
    )
