"""
Exception hierarchy for the linkable group signature library.

Verification-style operations return booleans and never raise on bad
cryptographic input; everything below is raised by decoders, issuance,
tracing and storage.
"""


class LGSError(Exception):
    """Root of every error raised by this package."""


# Encoding layer

class EncodingError(LGSError):
    """A byte string could not be decoded into a valid value."""


class MalformedEncoding(EncodingError):
    """Wrong length, bad flags, bad magic/version or a non-canonical value."""


class NotOnCurve(EncodingError):
    """Encoded coordinates do not describe a point on the curve."""


class WrongSubgroup(EncodingError):
    """The point is on the curve but outside the prime-order subgroup."""


# Protocol layer

class WitnessMismatch(LGSError):
    """A prover was handed a witness that does not satisfy its statement."""


class UnsupportedSecurityLevel(LGSError):
    """Setup was asked for a security level this build does not provide."""


class InvalidJoinProof(LGSError):
    """The join request's proof of knowledge of y did not verify."""


class DuplicateMember(LGSError):
    """A join request reused a Y that already holds a certificate."""


class CertificateCheckFailed(LGSError):
    """An issued certificate failed the member's pairing check."""


class SignatureInvalid(LGSError):
    """Tracing was refused because the signature does not verify."""


class MemberNotFound(LGSError):
    """The decrypted certificate is not in the registration list."""


# Registration list

class RegistryError(LGSError):
    """Base class for registration-list failures."""


class DuplicateA(RegistryError):
    """A row with the same certificate element A already exists."""


class DuplicateY(RegistryError):
    """A row with the same public value Y already exists."""


class DuplicateX(RegistryError):
    """A row with the same certificate scalar x already exists."""


class StorageFailure(RegistryError):
    """The backing file could not be read, written or validated."""
