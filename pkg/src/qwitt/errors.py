"""Exception types shared across the package."""


class DegenerateParameterError(ValueError):
    """A q-number or a-number in a denominator vanishes for the requested parameters."""


class LatticeIndexError(IndexError):
    """A point or shift falls outside the lattice it was evaluated on."""


class SingularPointError(ValueError):
    """Evaluation at a point where the quotient is undefined (for example x = 0)."""


class ContractError(ValueError):
    """Input data violates a structural requirement (reality, size, parity)."""


class SingularityError(ArithmeticError):
    """The evolution equation divides by a quantity that fell below the guard floor.

    ``site`` is the lattice index at which the guard tripped, ``quantity`` names
    what was too small.
    """

    def __init__(self, message, site=None, quantity=None):
        super().__init__(message)
        self.site = site
        self.quantity = quantity


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagree beyond tolerance."""
