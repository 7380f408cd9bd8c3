"""Exception hierarchy shared across the package."""

from __future__ import annotations


class AlmError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AlmError):
    """A value violates a domain invariant (negative exposure, fraction out of range, ...)."""


class ConfigurationError(AlmError):
    """The risk configuration is incomplete or inconsistent for the requested computation."""


class StructuralError(AlmError):
    """Inputs are structurally malformed (duplicate ids, wrong equity count, mismatched dates)."""


class SchemaError(AlmError):
    """A file does not conform to its schema.

    Carries every violation found in the file, not just the first one, so a
    risk config with several typos surfaces them all in one run.
    """

    def __init__(self, path: str, violations: list[str]):
        self.path = str(path)
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"{self.path}: {len(self.violations)} schema violation(s)\n{lines}")
