"""Exception types shared across the package.

Every domain error carries a short machine-readable ``code`` (for example
``"duplicate-site"`` or ``"nonplanar-base"``); the CLI prints it verbatim.
"""


class DomainError(Exception):
    """A well-formed request that violates a domain invariant."""

    code = "domain-error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def as_dict(self):
        return {"error": self.code, "message": str(self)}


class MalformedInput(DomainError, ValueError):
    """Input that cannot be parsed into the expected structure."""

    code = "malformed-input"


class RetriesExhausted(DomainError):
    code = "retries-exhausted"


class CertificateViolation(DomainError):
    """An internal certificate check failed. This is always a bug."""

    code = "certificate-violation"
