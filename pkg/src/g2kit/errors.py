"""Exception types shared across the package.

Everything raised on purpose derives from G2KitError so callers (and the CLI,
which maps these to exit code 1) can catch one base class.  Malformed input
data raises ParseError, which the CLI maps to exit code 2 instead.
"""


class G2KitError(Exception):
    """Base class for all validation and computation errors."""


class DegreeError(G2KitError):
    """A form had the wrong degree for the requested operation."""


class ExactModeError(G2KitError):
    """Exact mode was asked for arithmetic it cannot do exactly."""


class MetricError(G2KitError):
    """A matrix offered as a metric is not symmetric positive definite."""


class NotG2FormError(G2KitError):
    """A 3-form is degenerate: it does not induce a positive metric."""


class DecompositionError(G2KitError):
    """A type decomposition precondition failed (wrong component present,
    unexpected eigenstructure, non rank-one data, ...)."""


class FrameError(G2KitError):
    """A frame was required, missing, or not orthonormal for the metric."""


class ConstraintError(G2KitError):
    """Twist parameters do not satisfy c^2 + |omega|^2 = 1."""


class TangencyError(G2KitError):
    """A tangent vector violates the sphere tangency condition."""


class MetricMismatchError(G2KitError):
    """A form offered for recovery does not induce the expected metric."""


class RecoveryError(G2KitError):
    """Parameter recovery failed to reproduce the input within tolerance."""


class SubspaceViolationError(G2KitError):
    """A recovered direction leaves the model's allowed 1-form subspace."""


class ModelError(G2KitError):
    """Unknown flat model, or an operation unsupported for this model."""


class BracketClosureError(G2KitError):
    """A set of matrices offered as a subalgebra is not bracket-closed."""


class HolonomyError(G2KitError):
    """Bad holonomy data: non-orthogonal frame rotation, or generators not
    inside the 3-form stabilizer where required."""


class ParseError(G2KitError):
    """Malformed serialized input (JSON shape, scalar encoding, indices)."""
