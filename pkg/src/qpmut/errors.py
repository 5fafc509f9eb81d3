"""Exception types shared across the package."""


class QPMutError(Exception):
    """Base class for all computation errors raised by this package."""


class InvalidQuiverError(QPMutError):
    """Quiver data violates a structural invariant (loops, bad indices, duplicate ids)."""


class NotReducedError(QPMutError):
    """An operation requiring a reduced QP received an unreduced one."""


class DegeneratePotentialError(QPMutError):
    """A 2-cycle survives reduction with no quadratic term able to eliminate it."""


class CapExceededError(QPMutError):
    """An iterative computation failed to stabilize within its degree cap."""


class ExchangeConsistencyError(QPMutError):
    """QP mutation produced a quiver whose exchange matrix contradicts the matrix mutation rule."""


class NotGentleError(QPMutError):
    """A presentation violates the gentle axioms, with a diagnosis of the offending vertex or arrow."""


class InfiniteDimensionalError(QPMutError):
    """Path growth does not terminate: the algebra has a relation-free oriented cycle."""


class DimensionNotResolvedError(QPMutError):
    """Rewriting completion hit its degree cap with irreducible paths still alive."""


class SingularCartanError(QPMutError):
    """Coxeter data requested for an algebra whose Cartan matrix is singular."""
