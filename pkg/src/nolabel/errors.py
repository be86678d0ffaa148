"""Exception hierarchy for the nolabel package."""


class NoLabelError(Exception):
    """Base class for all errors raised by this package."""


class BasisMismatchError(NoLabelError):
    """Operands are defined over different mode bases."""


class StructureError(NoLabelError):
    """Structurally invalid input: wrong shapes, mixed particle numbers,
    mismatched statistics, non-permutation assignments, and similar."""


class DegenerateStateError(NoLabelError):
    """Operation undefined on a (numerically) zero-norm state or ensemble."""


class RegionSupportError(NoLabelError):
    """No particle has support on the requested region."""


class DeformationUndefinedError(NoLabelError):
    """A deformation's regions do not all act on at least one particle."""


class MeasureUndefinedError(NoLabelError):
    """The indistinguishability measure has no detection event to condition on."""


class NoCoincidenceError(NoLabelError):
    """Postselection probability vanishes: no coincidence outcome exists."""


class PhaseUndefinedError(NoLabelError):
    """Exchange-phase extraction needs both output amplitudes and all four
    deformation amplitudes to be nonzero."""


class ChannelUndefinedError(NoLabelError):
    """Noise channels act only on spatially disjoint, localized constituents."""


class ScenarioError(NoLabelError):
    """Scenario configuration is missing, malformed, or violates an invariant."""


class PipelineError(NoLabelError):
    """A pipeline stage failed; the message carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
