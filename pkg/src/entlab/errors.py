"""Exception types shared across the package."""


class EntlabError(Exception):
    """Base class for all entlab errors."""


class LayoutError(EntlabError):
    """Subsystem labels collide, are unknown, or do not form the required partition."""


class ShapeError(EntlabError):
    """Array dimensions are incompatible with the requested operation."""


class PositivityError(EntlabError):
    """An operator that must be positive semidefinite has a genuinely negative eigenvalue."""


class ParamError(EntlabError):
    """A state-family or optimizer parameter is out of range."""


class DecompositionError(EntlabError):
    """A pure-state ensemble fails to reconstruct the state it claims to decompose."""


class MCSError(EntlabError):
    """A correlation matrix is not a valid maximally-correlated-state kernel."""


class ValidationError(EntlabError):
    """A constructed object violates one of its invariants.

    `kind` names the violated invariant ("trace", "positivity", "hermiticity",
    "shape", "norm", "isometry", ...).
    """

    def __init__(self, kind, message=None):
        self.kind = kind
        super().__init__(message or f"invariant violated: {kind}")


class ParseError(EntlabError):
    """A state-spec document is malformed."""


class UsageError(EntlabError):
    """A CLI request names an unknown command, measure, or flag combination."""


class CapError(EntlabError):
    """A requested computation exceeds the configured dimension cap."""
