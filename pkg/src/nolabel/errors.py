"""Exception hierarchy with stable error codes and process exit codes.

Every error raised by the library carries a machine-readable ``code`` and a
``category`` that front ends (CLI, service) map onto exit codes and HTTP
statuses without string matching.
"""
from __future__ import annotations

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_PHYSICS = 3
EXIT_VERIFICATION = 4


class NoLabelError(Exception):
    """Base class for all library errors."""

    code = "E_ERROR"
    category = "internal"
    exit_code = EXIT_INTERNAL


class ParseError(NoLabelError):
    """State-text rejected; carries the position and what was expected."""

    code = "E_SYNTAX"
    category = "parse"
    exit_code = EXIT_PARSE

    def __init__(self, message: str, line: int, column: int,
                 expected: tuple[str, ...] = (), code: str | None = None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.expected = expected
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        base = f"line {self.line}, column {self.column}: {self.args[0]}"
        if self.expected:
            base += " (expected " + " | ".join(self.expected) + ")"
        return base


class PhysicsError(NoLabelError):
    """A mathematically ill-posed request (not a bug, not bad syntax)."""

    code = "E_PHYSICS"
    category = "physics"
    exit_code = EXIT_PHYSICS


class PauliViolationError(PhysicsError):
    """Two fermions placed in the same single-particle state."""

    code = "E_PAULI"


class DegenerateStateError(PhysicsError):
    """A state whose norm vanishes after symmetry reduction."""

    code = "E_ZERO_STATE"


class NoSupportError(PhysicsError):
    """A partial trace whose raw trace vanishes (no amplitude in the subspace)."""

    code = "E_NO_SUPPORT"


class UnsupportedBasisError(PhysicsError):
    """An operation that requires composite labels applied to a plain basis."""

    code = "E_NON_COMPOSITE_BASIS"


class ZeroEigenvalueError(PhysicsError):
    """Partner construction requested for a zero (or clamped) eigenvalue."""

    code = "E_ZERO_EIGENVALUE"


class VerificationError(NoLabelError):
    """A self-check failed; results must not be trusted."""

    code = "E_VERIFICATION"
    category = "verification"
    exit_code = EXIT_VERIFICATION


class DecompositionError(VerificationError):
    """Reconstruction from Schmidt terms does not reproduce the state."""

    code = "E_RECONSTRUCTION"


class OracleMismatchError(VerificationError):
    """Independent brute-force check disagrees with the pipeline."""

    code = "E_ORACLE_MISMATCH"
