"""Exception hierarchy for polytangle.

Services raise these for verification and model failures. Plain argument
range errors stay ``ValueError`` and malformed model values stay pydantic's
``ValidationError``; the CLI maps both families onto exit codes.
"""

from typing import Optional


class PolytangleError(Exception):
    """Base class for every domain error raised by polytangle."""


class VerificationError(PolytangleError):
    """A mechanical check failed. The CLI reports these with exit status 1."""


# =============================================================================
# Engulfing / certificates
# =============================================================================

class CaseMismatch(VerificationError):
    """A step's block bookkeeping deviates from its classified case."""


class PunctureDeficit(VerificationError):
    """A gluing disk has fewer than two punctures."""


class InterfaceNotDisk(VerificationError):
    """A gluing or adjunction interface is not a union of disks."""


class NonBallAdjunct(VerificationError):
    """An adjoined block-set is not a ball or meets the subtangle."""


class CertificateInvalid(VerificationError):
    """A certificate failed independent re-validation."""

    def __init__(self, node: Optional[int], reason: str):
        self.node = node
        self.reason = reason
        where = "certificate" if node is None else f"node {node}"
        super().__init__(f"{where}: {reason}")


# =============================================================================
# Isotopy schedulers
# =============================================================================

class InfiniteNesting(VerificationError):
    """A periodic nesting generator produces an infinite ascending chain."""


class UnassignedRegion(PolytangleError):
    """A node that must be pushed has no region, or leaves its region's neighbourhood."""


class UnremovableTarget(PolytangleError):
    """A target can never become innermost because a non-target sits inside it."""


class ScheduleMismatch(VerificationError):
    """A replayed push schedule deviates from the pushes it records."""


class NotStandardPosition(PolytangleError):
    """An annulus trace is not in standard position."""


class PatchTreeError(PolytangleError):
    """A patch tree violates the model (order-1 vertex, falling root, not a tree)."""


# =============================================================================
# Exhaustions and labelings
# =============================================================================

class ExhaustionPreconditionError(PolytangleError):
    """A descriptor fails the preconditions of a frontier operation."""


class ShapeMismatch(PolytangleError):
    """Two labelings are defined over different (mu, nu) shapes."""


# =============================================================================
# Geometry and storage
# =============================================================================

class TemplateFailure(VerificationError):
    """Realized arcs intersect themselves or each other."""


class NonGenericProjection(PolytangleError):
    """A projection stayed degenerate after every shear attempt."""


class SchemaError(PolytangleError):
    """A structured document does not match the schema."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)


class UsageError(PolytangleError):
    """Invalid command-line usage."""
