"""Exception types shared across the package.

Every domain failure derives from :class:`DomainError` so the CLI and the
HTTP service can map them uniformly (exit code 1, structured HTTP error).
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for expected, user-facing failures."""

    code = "domain-error"


# --- PDF parsing -----------------------------------------------------------

class MalformedPdf(DomainError):
    code = "malformed-pdf"


class EncryptedPdf(DomainError):
    code = "encrypted-pdf"


class UnsupportedFeature(DomainError):
    code = "unsupported-feature"


# --- external processors ---------------------------------------------------

class ProcessorFailed(DomainError):
    """External pre-processor exited nonzero; carries captured diagnostics."""

    code = "processor-failed"

    def __init__(self, message: str, returncode: int = 1, stderr: str = ""):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr


class InvalidLayout(DomainError):
    """A token-layout payload violates the structure-file schema."""

    code = "invalid-layout"

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# --- geometry --------------------------------------------------------------

class EmptySelection(DomainError):
    code = "empty-selection"


class InvalidDimensions(DomainError):
    code = "invalid-dimensions"


# --- metrics ---------------------------------------------------------------

class LayoutMismatch(DomainError):
    code = "layout-mismatch"


class UnknownCategory(DomainError):
    code = "unknown-category"


class NoSharedDocuments(DomainError):
    code = "no-shared-documents"


# --- project store ---------------------------------------------------------

class UnknownDocument(DomainError):
    code = "unknown-document"

    def __init__(self, hashes):
        if isinstance(hashes, str):
            hashes = [hashes]
        self.hashes = list(hashes)
        super().__init__("unknown document(s): " + ", ".join(self.hashes))


class NotAssigned(DomainError):
    code = "not-assigned"


class InvalidStatus(DomainError):
    code = "invalid-status"


class InvalidIdentity(DomainError):
    code = "invalid-identity"


class ValidationFailed(DomainError):
    """An annotation set failed validation; carries the violation list."""

    code = "validation-failed"

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(v.message for v in self.violations[:5])
        more = len(self.violations) - 5
        if more > 0:
            detail += f" (+{more} more)"
        super().__init__(f"annotation set failed validation: {detail}")


# --- exporters -------------------------------------------------------------

class UnknownAnnotator(DomainError):
    code = "unknown-annotator"
