"""Exception hierarchy shared by every service module.

Each exception carries a stable machine ``code`` so the HTTP layer can map
errors to responses without string matching.
"""

from __future__ import annotations


class CynoteError(Exception):
    """Base class for all service errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ValidationError(CynoteError):
    """Malformed or missing input. ``fields`` names the offending fields."""

    code = "validation_error"

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


class DomainError(CynoteError):
    """Input is well-formed but outside an operation's mathematical domain."""

    code = "domain_error"


class PayloadTooLargeError(CynoteError):
    """Attachment or request body beyond the configured cap."""

    code = "payload_too_large"


class NotFoundError(CynoteError):
    code = "not_found"


class ArchivedNotebookError(CynoteError):
    """Insertion into an archived (locked) notebook."""

    code = "archived_notebook"


class UnsupportedKindError(CynoteError):
    code = "unsupported_kind"


class UniquenessError(CynoteError):
    code = "duplicate"


class PolicyError(CynoteError):
    """Password policy violation."""

    code = "policy_violation"


class InvalidCredentialsError(CynoteError):
    """Uniform login failure; never discloses whether the user exists."""

    code = "invalid_credentials"


class NotAuthorizedError(CynoteError):
    """Account exists but is not (or no longer) authorized to use the system."""

    code = "not_authorized"


class PasswordExpiredError(CynoteError):
    """Password older than the policy allows; holder must change it first."""

    code = "password_expired"

    def __init__(self, message: str, age_days: float):
        super().__init__(message)
        self.age_days = age_days


class StaleSessionError(CynoteError):
    code = "stale_session"


class ChangePasswordError(CynoteError):
    """Rejected password change; ``reason`` is the logged explanation."""

    code = "change_password_failed"

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ParseError(CynoteError):
    """Malformed dump file or remote payload; raw payload retained."""

    code = "parse_error"

    def __init__(self, message: str, raw: bytes | str | None = None):
        super().__init__(message)
        self.raw = raw


class BackupError(CynoteError):
    """Backup failed; ``uploaded`` lists names that made it before the fault."""

    code = "backup_failed"

    def __init__(self, message: str, uploaded: list[str] | None = None):
        super().__init__(message)
        self.uploaded = uploaded or []


class ServiceUnavailableError(CynoteError):
    code = "service_unavailable"
