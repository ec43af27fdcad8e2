"""Exception types shared across the package."""


class HibikitError(Exception):
    """Base class for all errors raised by this package."""


class CycleError(HibikitError):
    """The transitive closure of the given relation is not irreflexive."""


class UnknownLabel(HibikitError):
    """A relation or lookup references a label that is not in the ground set."""


class GroundSetMismatch(HibikitError):
    """Two posets that must share a ground set do not."""


class NotALattice(HibikitError):
    """The given tables violate a lattice axiom."""


class NotDistributive(HibikitError):
    """The lattice is not distributive.

    The offending triple (a, b, c) is stored in the `witness` attribute.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotStronger(HibikitError):
    """The given order does not contain the required base order."""


class NotInCone(HibikitError):
    """The weight vector violates a diamond pair inequality."""


class NotSubface(HibikitError):
    """The claimed face containment does not hold (tight sets do not nest)."""


class TooLarge(HibikitError):
    """The request exceeds a documented size guard."""


class UnboundedError(HibikitError):
    """The polyhedron is unbounded where a bounded one is required."""


class BadParams(HibikitError):
    """Parameters outside the documented domain."""
