"""Exception types raised across the pipeline."""


class RolleError(Exception):
    """Base class for all library errors."""


class ConfigError(RolleError, ValueError):
    pass


class OrderOutOfRangeError(RolleError, IndexError):
    """A derivative order above ``max_order`` was requested."""

    def __init__(self, k: int, max_order: int):
        super().__init__(f"derivative order {k} requested but max_order is {max_order}")
        self.k = k
        self.max_order = max_order


class CapabilityError(RolleError, ValueError):
    """The target function lacks derivatives needed by an operation."""


class NodeSetError(RolleError, ValueError):
    pass


class InputDataError(RolleError, ValueError):
    pass


class SingularDenominatorError(RolleError, ArithmeticError):
    """The Rolle ODE denominator ``Q^2 f^(2n+3)(xi)`` is numerically zero.

    ``cause`` is ``"node"`` when the node polynomial vanishes and
    ``"derivative"`` when the top derivative of ``f`` vanishes at ``xi``.
    """

    def __init__(self, x: float, xi: float, denominator: float, cause: str):
        super().__init__(
            f"singular denominator {denominator:.3e} at x={x!r}, xi={xi!r} ({cause})"
        )
        self.x = x
        self.xi = xi
        self.denominator = denominator
        self.cause = cause


class NoRootError(RolleError):
    pass


class DegenerateProblemError(RolleError):
    """The remainder identity does not depend on xi (e.g. constant top derivative)."""


class AllBranchesInvalidError(RolleError):
    pass


class AmbiguousBranchError(RolleError):
    def __init__(self, valid):
        super().__init__(f"multiple valid Rolle branches: {sorted(valid)}")
        self.valid = list(valid)


class FitError(RolleError):
    pass


class SlopeEstimationError(RolleError):
    pass


class SplineDomainError(RolleError, ValueError):
    pass
