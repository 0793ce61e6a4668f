"""Exception types shared across the package.

Two broad groups: malformed input (ValueError subclasses) and structural
infeasibility (InfeasibilityError), which the CLI maps to exit codes 1
and 2 respectively.
"""


class RepairSimError(Exception):
    """Base class for package-specific errors."""


class InfeasibilityError(RepairSimError):
    """The requested configuration is structurally impossible, not malformed."""


class DuplicatePrimes(RepairSimError, ValueError):
    """Tower extension degrees must be pairwise distinct primes."""


class SingularBasis(RepairSimError, ValueError):
    """Basis candidates are linearly dependent over the subfield."""


class ArityError(RepairSimError, ValueError):
    """A sequence argument has the wrong length."""


class SingularEvaluationSet(RepairSimError, ValueError):
    """Evaluation points are not pairwise distinct."""


class InsufficientData(RepairSimError, ValueError):
    """Fewer known coordinates than the code dimension."""


class InconsistentSymbols(RepairSimError, ValueError):
    """Known coordinates do not agree with any single codeword."""


class InvalidSubset(RepairSimError, ValueError):
    """A per-prime evaluation subset cannot be realized."""


class InsufficientPrimes(InfeasibilityError):
    """The prime window holds fewer primes than the planner needs."""


class InfeasiblePlan(InfeasibilityError):
    """A plan violates its repairability certificates."""


class NotRepairable(InfeasibilityError):
    """The failed coordinate's prime class leaves too few helpers."""


class BuildCapExceeded(InfeasibilityError):
    """Sub-packetization exceeds the configured build cap."""


class NotDualCodeword(RepairSimError):
    """A claimed dual codeword fails the syndrome check."""


class AlreadyFailed(RepairSimError):
    """The node is already marked failed."""


class TooManyFailures(RepairSimError):
    """More than one node is down; only single failures are repaired."""
