"""Exception types shared across the package."""

from __future__ import annotations


class RoleProbeError(Exception):
    """Base class for all errors raised by this package."""


class ConlluParseError(RoleProbeError):
    """Malformed CoNLL-U input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SwapEligibilityError(RoleProbeError):
    """Argument swap requested for a clause that failed the eligibility filters."""

    def __init__(self, sentence_id: str, failures: tuple[str, ...]):
        self.sentence_id = sentence_id
        self.failures = failures
        super().__init__(
            f"clause in sentence {sentence_id!r} is not swap-eligible: "
            + ", ".join(failures)
        )


class AlignmentError(RoleProbeError):
    """A treebank token could not be matched to any subword span."""


class CorruptArchiveError(RoleProbeError):
    """Embedding archive whose manifest and binary payload disagree."""


class ArchiveVersionError(RoleProbeError):
    """Embedding archive written with an unsupported format version."""


class ConfigError(RoleProbeError):
    """Invalid configuration value."""


class TrainingDivergedError(RoleProbeError):
    """Probe training produced a non-finite loss."""

    def __init__(self, epoch: int, batch: int):
        self.epoch = epoch
        self.batch = batch
        super().__init__(
            f"training diverged: non-finite loss at epoch {epoch}, batch {batch}"
        )


class InsufficientDataError(RoleProbeError):
    """A probe training class is empty."""

    def __init__(self, n_subjects: int, n_objects: int):
        self.n_subjects = n_subjects
        self.n_objects = n_objects
        super().__init__(
            f"cannot build a balanced training set: "
            f"{n_subjects} subject and {n_objects} object instances"
        )


class CoverageError(RoleProbeError):
    """An embedding archive does not cover a required sentence."""
