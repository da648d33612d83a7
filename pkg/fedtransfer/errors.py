"""Exception hierarchy shared by every fedtransfer package."""


class FedTransferError(Exception):
    """Base class for all fedtransfer errors."""


class InvalidArgumentError(FedTransferError, ValueError):
    """An argument is outside its documented domain."""


class ShapeMismatchError(InvalidArgumentError):
    """Array shapes disagree with the model or with each other."""


class IdxFormatError(FedTransferError, ValueError):
    """An IDX file has a bad magic number, bad header or truncated body."""


class IdxMismatchError(FedTransferError, ValueError):
    """Image and label IDX files disagree on the number of items."""


class PartitionExhaustedError(FedTransferError, RuntimeError):
    """A randomized partitioner ran out of retries."""


class RankDeficiencyError(FedTransferError, ValueError):
    """A design matrix does not have full column rank."""


class AlignmentError(FedTransferError, ValueError):
    """An adversarial batch is not aligned with its evaluation dataset."""


class DegenerateInputError(FedTransferError, ValueError):
    """A statistic is undefined for the given input (e.g. constant data)."""


class ZeroGradientError(FedTransferError, ValueError):
    """An input gradient vanished where a direction was required."""


class UnsupportedModelError(FedTransferError, ValueError):
    """The requested model family does not satisfy the required assumption."""


class NonConvexModelError(FedTransferError, ValueError):
    """Constant estimation was requested for a non-convex model kind."""


class AssumptionViolationError(FedTransferError, ValueError):
    """A theoretical precondition (e.g. X^T X >= I) does not hold."""


class BoundUnderflowError(FedTransferError, ArithmeticError):
    """The denominator of a closed-form bound underflowed."""


class ReportSchemaError(FedTransferError, ValueError):
    """An output document does not validate against its published schema."""
