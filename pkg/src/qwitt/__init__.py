"""Discrete q-deformed Witt algebra, quantum kinematics and nonlinear evolution on the N-point circle."""

from .errors import (
    ConsistencyError,
    ContractError,
    DegenerateParameterError,
    LatticeIndexError,
    SingularityError,
    SingularPointError,
)
from .qcalc import UnitPhase, a_number, q_number

__version__ = "0.1.0"
