"""Shared exception types."""

from __future__ import annotations


class SenseloopError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(SenseloopError):
    """A stored document does not match the expected schema."""


class SnapshotValidationError(SenseloopError):
    """A workspace snapshot violates one or more invariants."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        rules = ", ".join(v.rule for v in self.violations)
        super().__init__(f"invalid snapshot: {rules}")


class DiffError(SenseloopError):
    """Two snapshots cannot be diffed (e.g. they disagree on document content)."""


class ReportStructureError(SenseloopError):
    """Report text does not match the expected section structure."""


class SequencingError(SenseloopError):
    """A timeline or snapshot append does not continue the existing sequence."""


class NoInteractions(SenseloopError):
    """Signal: the interaction set is empty, so there is nothing to refine.

    This is control flow, not a failure; callers skip the model entirely.
    """


class ModelTransportError(SenseloopError):
    """The model endpoint could not be reached or returned garbage."""


class PipelineError(SenseloopError):
    """A refinement pipeline stage failed after its retry/repair budget."""


class PromptBudgetError(PipelineError):
    """A prompt exceeds the token budget even at maximum truncation."""


class PlanParseError(PipelineError):
    """The analysis output could not be parsed into a refinement plan."""


class PlanValidationError(PipelineError):
    """A parsed plan targets a section that does not exist and is not sanctioned."""


class RefinementFormatError(PipelineError):
    """The refinement output does not match the expected report structure."""
