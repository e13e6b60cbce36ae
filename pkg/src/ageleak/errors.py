"""Exception hierarchy for ageleak.

Everything raised on bad inputs or infeasible requests derives from
:class:`AgeLeakError`, so callers (and the CLI) can distinguish validation
failures from genuine numerical non-convergence (:class:`ConvergenceFailure`).
"""


class AgeLeakError(Exception):
    """Base class for all ageleak errors."""


# --- probability mass function construction -------------------------------

class PmfError(AgeLeakError, ValueError):
    """Invalid finite pmf specification."""


class NegativeProbability(PmfError):
    pass


class UnnormalizedMass(PmfError):
    pass


class NonPositiveDuration(PmfError):
    pass


class DuplicateDuration(PmfError):
    pass


class TailTooHeavy(PmfError):
    """Geometric truncation would fold more than the allowed tail mass."""


# --- parameter validation ---------------------------------------------------

class InvalidBeta(AgeLeakError, ValueError):
    pass


class InvalidLambda(AgeLeakError, ValueError):
    pass


class InvalidTau(AgeLeakError, ValueError):
    pass


class InvalidRate(AgeLeakError, ValueError):
    pass


class NonHalfIntegerTau(AgeLeakError, ValueError):
    """Uniform inter-dump times need 2*tau - 1 to be a positive integer."""


class ZeroRate(AgeLeakError, ValueError):
    pass


class Unstable(AgeLeakError):
    """FCFS queue would have unbounded backlog at this load."""


class NoFeasibleAlpha(AgeLeakError):
    """No admission probability stabilizes the FCFS queue."""


# --- numerical / resource limits --------------------------------------------

class ConvergenceFailure(AgeLeakError):
    """Root finding did not reach the requested residual."""


class HorizonTooLarge(AgeLeakError):
    """Brute-force enumeration refuses horizons beyond its hard cap."""


class InvalidConfig(AgeLeakError, ValueError):
    """Malformed simulation configuration."""


# --- trade-off assembly -----------------------------------------------------

class BaselinePoint(AgeLeakError):
    """Efficiency is undefined at the zero-delay baseline."""


class NoOverlap(AgeLeakError):
    """Two trade-off series share no common age range."""


class TooFewPoints(AgeLeakError):
    pass
