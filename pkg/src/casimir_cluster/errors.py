"""Exception and warning types shared across the package."""


class InvalidArgumentError(ValueError):
    """Raised when an argument violates an operation's precondition."""


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates the uncertainty relation."""


class OutOfValidityError(ValueError):
    """Raised when a perturbative formula is evaluated outside its domain."""


class NotBipartiteError(ValueError):
    """Raised when a graph has an odd cycle.

    The offending cycle (a list of node labels) is kept on ``self.cycle``.
    """

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"graph is not bipartite; odd cycle {self.cycle}")


class PlanInfeasibleError(RuntimeError):
    """Raised when no drive schedule can realise the requested lattice."""


class PerturbativeWarning(UserWarning):
    """Emitted when parameters leave the regime where first-order results hold."""
