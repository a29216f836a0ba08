"""Exception hierarchy for sectorbound."""


class SectorboundError(Exception):
    """Base class for all sectorbound errors."""


class DimensionMismatch(SectorboundError):
    """Matrix or vector dimensions are inconsistent with the declared sizes."""


class NonFiniteEntry(SectorboundError):
    """An input matrix contains NaN or infinite entries."""


class FixedPointDivergence(SectorboundError):
    """The implicit feedback equation did not converge; the interconnection
    may be ill-posed."""


class UnstableNominal(SectorboundError):
    """The state matrix is not Schur stable (spectral radius >= 1)."""


class NegativeLambda(SectorboundError):
    """A diagonal multiplier weight is negative."""


class OutOfSector(SectorboundError):
    """A slope vector has entries outside the sector interval."""


class SectorViolation(SectorboundError):
    """An input/output pair violates the per-channel sector inequality."""


class WitnessNotStrict(SectorboundError):
    """A counterexample witness does not achieve strict negativity."""


class UnsupportedClass(SectorboundError):
    """Unknown multiplier class tag."""


class SolverFailure(SectorboundError):
    """The cone solver failed to reach a conclusive status."""


class InfeasibleProblem(SectorboundError):
    """No certificate exists in the requested multiplier class."""


class BudgetExceeded(SectorboundError):
    """A branch-and-bound search exhausted its node budget."""


class ParseError(SectorboundError):
    """A system or configuration file could not be parsed."""
