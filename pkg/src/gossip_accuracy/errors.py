"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 1,
numerical failures exit 2 (strict-mode comparison failures exit 3).
"""


class GossipAccuracyError(Exception):
    """Base class for all errors raised by this package."""


# --- input / validation errors (CLI exit code 1) ---

class BadShape(GossipAccuracyError):
    """Matrix or vector input has the wrong shape, size, or dtype."""


class NegativeRate(GossipAccuracyError):
    """An off-diagonal generator entry is negative."""


class RowSumViolation(GossipAccuracyError):
    """A generator row does not sum to zero within tolerance."""


class Reducible(GossipAccuracyError):
    """The positive-rate digraph of the generator is not strongly connected."""


class KOutOfRange(GossipAccuracyError):
    """Subset size k outside 1..n."""


class DegenerateChain(GossipAccuracyError):
    """Binary chain parameters do not describe an irreducible two-state CTMC."""


class AllRatesZero(GossipAccuracyError):
    """Both the source push rate and the gossip rate are zero."""


class ModeMismatch(GossipAccuracyError):
    """Mode-tagged vectors disagree in dimension."""


class NotTwoNodes(GossipAccuracyError):
    """The exact oracle only supports two-node networks."""


class TooFewBatches(GossipAccuracyError):
    """Batch-means error estimation needs at least two batches."""


class InvalidParameter(GossipAccuracyError):
    """A scalar parameter or configuration field is out of its domain."""


# --- numerical failures (CLI exit code 2) ---

class SingularSystem(GossipAccuracyError):
    """A dense solve hit a pivot below threshold or an unacceptable residual."""


class ZeroModeMass(GossipAccuracyError):
    """A source mode carries (numerically) no stationary mass."""


class DegenerateRun(GossipAccuracyError):
    """The simulator's total event rate vanished."""


INPUT_ERRORS = (
    BadShape,
    NegativeRate,
    RowSumViolation,
    Reducible,
    KOutOfRange,
    DegenerateChain,
    AllRatesZero,
    ModeMismatch,
    NotTwoNodes,
    TooFewBatches,
    InvalidParameter,
)

NUMERIC_ERRORS = (SingularSystem, ZeroModeMass, DegenerateRun)
