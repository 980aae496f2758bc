"""
Linkable group signatures over BLS12-381.

Members sign anonymously on behalf of a group, signatures by one member
for one amount are publicly linkable, and a supervision authority can
trace any valid signature back to its registration row.
"""

from .exceptions import LGSError
from .lgs import (
    LinkResult,
    check_member_key,
    join_ra_issue,
    join_user_finish,
    join_user_start,
    link,
    link_batch,
    setup,
    sign,
    trace,
    verify,
    verify_bytes,
)
from .models import Cert, GroupParams, MemberKey, RegistryEntry, Signature
from .registry import RegistrationList

__version__ = "1.0.0"
__all__ = [
    "LGSError",
    "LinkResult",
    "setup",
    "join_user_start",
    "join_ra_issue",
    "join_user_finish",
    "check_member_key",
    "sign",
    "verify",
    "verify_bytes",
    "link",
    "link_batch",
    "trace",
    "GroupParams",
    "Cert",
    "MemberKey",
    "Signature",
    "RegistryEntry",
    "RegistrationList",
]
