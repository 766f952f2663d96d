"""Exception taxonomy: structural errors vs. algorithmic (finite-size) failures.

Structural errors mean the caller violated a precondition.  Pipeline errors
mean a randomized construction ran out of usable edges at this problem size;
they are expected occasionally and are reported, not fatal, in experiment
runs.
"""


class GraphError(Exception):
    """A structural precondition was violated."""


class DegreeViolation(GraphError):
    pass


class InactiveVertex(GraphError):
    pass


class MissingEdge(GraphError):
    pass


class NonIsolated(GraphError):
    pass


class ShortCycle(GraphError):
    """Inserting the edge would close a cycle on fewer than 3 vertices."""


class SpliceError(GraphError):
    """A transactional edit failed; the system was rolled back."""


class ParityError(GraphError):
    pass


class ConflictingPairs(GraphError):
    pass


class NotInConfiguration(GraphError):
    pass


class SharedPoint(GraphError):
    pass


class AttemptsExhausted(GraphError):
    def __init__(self, attempts):
        super().__init__(f"no simple graph after {attempts} attempts")
        self.attempts = attempts


class BadParams(GraphError):
    pass


class TooLarge(GraphError):
    pass


class PipelineError(Exception):
    """A randomized construction failed at this (finite) problem size."""

    stage = "pipeline"


class AbsorberExhausted(PipelineError):
    stage = "absorber"

    def __init__(self, j, reason=""):
        super().__init__(f"absorber step {j} exhausted its candidates {reason}".rstrip())
        self.j = j


class AvailabilityExhausted(PipelineError):
    stage = "merge"

    def __init__(self, case, reason=""):
        super().__init__(f"no available edge in case {case} {reason}".rstrip())
        self.case = case


class BudgetExceeded(PipelineError):
    stage = "merge"


class ExtractionFailed(PipelineError):
    stage = "extract"

    def __init__(self, k, regime, reason):
        super().__init__(f"k={k} ({regime}): {reason}")
        self.k = k
        self.regime = regime
        self.reason = reason


class PreconditionFailed(PipelineError):
    stage = "precondition"


class ClaimViolated(PipelineError):
    """A structural claim that follows from matching maximality failed.

    Seeing this means the supplied matching was not actually maximum.
    """

    stage = "partition"

    def __init__(self, level, which):
        super().__init__(f"level {level}: {which}")
        self.level = level
        self.which = which


class StepFailed(PipelineError):
    stage = "steps"

    def __init__(self, step, case, reason):
        super().__init__(f"step {step} (case {case}): {reason}")
        self.step = step
        self.case = case
        self.reason = reason
