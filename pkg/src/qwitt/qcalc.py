"""Scalar and lattice-level q- and a-calculus.

q-numbers, a-numbers, the additive and multiplicative difference quotients,
the multiplicative shift and the decomposition rule.  Everything downstream
(mode operators, kinematics, dynamics) builds on the helpers defined here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import DegenerateParameterError, LatticeIndexError, SingularPointError

#: absolute floor below which a q-number used as a divisor counts as zero
ZERO_TOL = 1e-9
#: default absolute tolerance for exact identities
IDENTITY_TOL = 1e-12
_POINT_TOL = 1e-9


@dataclass(frozen=True)
class UnitPhase:
    """Deformation parameter ``q = exp(i*phi0)`` on the unit circle.

    With ``N`` given the phase is tied to the ``N``-point circle,
    ``phi0 = 2*pi/N`` and ``q**N == 1``.  ``q == 1`` (and ``q == -1``) are
    rejected: every formula divides by ``q - 1/q``.
    """

    phi0: float
    N: int | None = None

    def __post_init__(self):
        if self.N is not None:
            if int(self.N) != self.N or self.N < 1:
                raise ValueError(f"lattice size must be a positive integer, got {self.N!r}")
            expected = 2.0 * math.pi / self.N
            if not math.isclose(self.phi0, expected, rel_tol=0.0, abs_tol=1e-14):
                raise ValueError(f"phi0={self.phi0} does not match 2*pi/N for N={self.N}")
        if abs(math.sin(self.phi0)) < 1e-12:
            raise DegenerateParameterError(
                f"degenerate deformation: sin(phi0) = 0 for phi0={self.phi0}"
                + (f" (N={self.N}; need N >= 3)" if self.N is not None else "")
            )

    @classmethod
    def lattice(cls, N: int) -> "UnitPhase":
        """Phase of the N-point circle, ``q = exp(2*pi*i/N)``."""
        if int(N) != N or N < 1:
            raise ValueError(f"lattice size must be a positive integer, got {N!r}")
        return cls(2.0 * math.pi / N, int(N))

    @property
    def q(self) -> complex:
        return cmath.exp(1j * self.phi0)

    def power(self, x):
        """``q**x`` evaluated as ``exp(i*phi0*x)``; no branch cut for fractional ``x``."""
        return np.exp(1j * self.phi0 * np.asarray(x)) if np.ndim(x) else cmath.exp(1j * self.phi0 * x)


PhaseLike = Union[UnitPhase, complex, float]


def _as_phase(q) -> UnitPhase | None:
    return q if isinstance(q, UnitPhase) else None


def q_number(A, q: PhaseLike):
    """``[A]_q = (q**A - q**-A) / (q - 1/q)``.

    For a unit phase and real ``A`` the value is computed as
    ``sin(A*phi0)/sin(phi0)`` and returned as a real number (or real array).
    Complex ``A`` or a non-phase numeric ``q`` go through the defining
    quotient directly.
    """
    phase = _as_phase(q)
    if phase is not None:
        if np.isrealobj(A):
            val = np.sin(np.asarray(A, dtype=float) * phase.phi0) / math.sin(phase.phi0)
            return float(val) if np.ndim(val) == 0 else val
        A = np.asarray(A, dtype=complex)
        num = np.exp(1j * phase.phi0 * A) - np.exp(-1j * phase.phi0 * A)
        val = num / (2j * math.sin(phase.phi0))
        return complex(val) if np.ndim(val) == 0 else val
    q = complex(q)
    den = q - 1.0 / q
    if abs(den) < 1e-15:
        raise DegenerateParameterError(f"q - 1/q vanishes for q={q}")
    A = np.asarray(A, dtype=complex)
    val = (np.power(q, A) - np.power(q, -A)) / den
    return complex(val) if np.ndim(val) == 0 else val


def q_number_direct(A, phase: UnitPhase) -> complex:
    """Defining expression of ``[A]_q`` with complex arithmetic; kept as an oracle."""
    q = phase.q
    return (cmath.exp(1j * phase.phi0 * A) - cmath.exp(-1j * phase.phi0 * A)) / (q - 1.0 / q)


def a_number(A, a):
    """``[A]_a = (exp(a*A) - exp(-a*A)) / (2a)``.

    Real ``a`` is evaluated as ``sinh(a*A)/a``.  Complex ``a`` is allowed
    (the implicit additive setting uses ``a = i*phi0``).
    """
    if a == 0:
        raise DegenerateParameterError("a-number with a = 0")
    if np.isrealobj(a) and np.isrealobj(A):
        val = np.sinh(a * np.asarray(A, dtype=float)) / a
        return float(val) if np.ndim(val) == 0 else val
    A = np.asarray(A, dtype=complex)
    val = (np.exp(a * A) - np.exp(-a * A)) / (2 * a)
    return complex(val) if np.ndim(val) == 0 else val


def require_nonzero(k, phase: UnitPhase, what: str = "k") -> float:
    """Return ``[k]_q`` or raise if it vanishes (k = 0 or k = N/2 mod N on the circle)."""
    val = q_number(k, phase)
    if abs(val) < ZERO_TOL:
        detail = ""
        if phase.N is not None:
            detail = f" ({what} = {k} = {int(round(k)) % phase.N} mod N={phase.N})"
        raise DegenerateParameterError(f"[{what}]_q = 0 for {what}={k}{detail}")
    return val


# ----------------------------------------------------------------------------
# lattices and lattice functions


@dataclass(frozen=True)
class AdditiveLattice:
    """Points ``x0 + j*a`` for ``j`` in ``indices``."""

    x0: float
    a: float
    indices: range

    def __post_init__(self):
        if self.a == 0:
            raise DegenerateParameterError("additive lattice step a = 0")

    def __len__(self):
        return len(self.indices)

    @property
    def points(self) -> np.ndarray:
        return self.x0 + self.a * np.asarray(self.indices, dtype=float)

    def index_of(self, x) -> int:
        j = (x - self.x0) / self.a
        jr = round(j)
        if abs(j - jr) > _POINT_TOL or jr not in self.indices:
            raise LatticeIndexError(f"{x} is not a point of the additive lattice")
        return self.indices.index(jr)


@dataclass(frozen=True)
class MultiplicativeLattice:
    """Points ``x0 * q**j`` with real ``q != 1`` and ``x0 != 0``."""

    x0: float
    q: float
    indices: range

    def __post_init__(self):
        if self.x0 == 0:
            raise SingularPointError("multiplicative lattice with x0 = 0")
        if self.q == 1 or self.q <= 0:
            raise DegenerateParameterError(f"multiplicative lattice needs real q > 0, q != 1 (got {self.q})")

    def __len__(self):
        return len(self.indices)

    @property
    def points(self) -> np.ndarray:
        return self.x0 * self.q ** np.asarray(self.indices, dtype=float)

    def index_of(self, x) -> int:
        ratio = x / self.x0
        if ratio <= 0:
            raise LatticeIndexError(f"{x} is not a point of the multiplicative lattice")
        j = math.log(ratio) / math.log(self.q)
        jr = round(j)
        if abs(j - jr) > _POINT_TOL or jr not in self.indices:
            raise LatticeIndexError(f"{x} is not a point of the multiplicative lattice")
        return self.indices.index(jr)


@dataclass(frozen=True)
class CircleLattice:
    """The N-point circle, as angles ``2*pi*j/N`` or as points ``q**j``.

    Index arithmetic is modulo ``N``.
    """

    phase: UnitPhase
    coordinate: str = "z"

    def __post_init__(self):
        if self.phase.N is None:
            raise ValueError("circle lattice needs a phase tied to N")
        if self.coordinate not in ("z", "angle"):
            raise ValueError(f"coordinate must be 'z' or 'angle', got {self.coordinate!r}")

    @classmethod
    def of_size(cls, N: int, coordinate: str = "z") -> "CircleLattice":
        return cls(UnitPhase.lattice(N), coordinate)

    @property
    def N(self) -> int:
        return self.phase.N

    def __len__(self):
        return self.N

    @property
    def angles(self) -> np.ndarray:
        return self.phase.phi0 * np.arange(self.N)

    @property
    def points(self) -> np.ndarray:
        return self.angles if self.coordinate == "angle" else np.exp(1j * self.angles)

    def index_of(self, x) -> int:
        if self.coordinate == "angle":
            j = x / self.phase.phi0
        else:
            if abs(abs(x) - 1.0) > _POINT_TOL:
                raise LatticeIndexError(f"{x} is not on the unit circle")
            j = cmath.phase(x) / self.phase.phi0
        jr = round(j)
        if abs(j - jr) > _POINT_TOL:
            raise LatticeIndexError(f"{x} is not a point of the {self.N}-point circle")
        return jr % self.N


Lattice = Union[AdditiveLattice, MultiplicativeLattice, CircleLattice]


@dataclass(frozen=True)
class LatticeFunction:
    """Complex samples attached to a lattice, one per lattice point."""

    samples: np.ndarray
    lattice: Lattice = field(repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 1 or len(s) != len(self.lattice):
            raise LatticeIndexError(f"{s.shape} samples for a lattice of size {len(self.lattice)}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_callable(cls, f: Callable, lattice: Lattice) -> "LatticeFunction":
        return cls(np.array([f(x) for x in lattice.points], dtype=complex), lattice)

    def __call__(self, x) -> complex:
        return complex(self.samples[self.lattice.index_of(x)])


FunctionLike = Union[LatticeFunction, Callable]


def additive_quotient(f: FunctionLike, a: float, x) -> complex:
    """Central additive difference ``(f(x+a) - f(x-a)) / (2a)``."""
    if a == 0:
        raise DegenerateParameterError("additive quotient with a = 0")
    return (f(x + a) - f(x - a)) / (2 * a)


def multiplicative_quotient(f: FunctionLike, q: PhaseLike, k: int, x) -> complex:
    """``(f(q**k x) - f(q**-k x)) / (x (q - 1/q))``.

    ``q`` is a :class:`UnitPhase` (circle) or a real number (real q-lattice).
    """
    if x == 0:
        raise SingularPointError("multiplicative quotient evaluated at x = 0")
    phase = _as_phase(q)
    if phase is not None:
        qk, qmk, den = phase.power(k), phase.power(-k), phase.q - 1.0 / phase.q
    else:
        if q == 1:
            raise DegenerateParameterError("multiplicative quotient with q = 1")
        qk, qmk, den = q**k, q ** (-k), q - 1.0 / q
    xp, xm = qk * x, qmk * x
    if isinstance(f, LatticeFunction) and isinstance(f.lattice, MultiplicativeLattice):
        # keep real-lattice points real so the index lookup stays exact
        xp, xm = np.real_if_close(xp), np.real_if_close(xm)
    return (f(xp) - f(xm)) / (x * den)


def shift_multiplicative(f: FunctionLike, q: PhaseLike, k: int):
    """``K_k f (x) = f(q**k x)``.

    On the N-point circle this is the cyclic index shift ``l -> l + k``.  A
    finite real q-lattice is not closed under the shift for ``k != 0``.
    Callables are wrapped lazily.
    """
    if not isinstance(f, LatticeFunction):
        phase = _as_phase(q)
        factor = phase.power(k) if phase is not None else q**k
        return lambda x: f(factor * x)
    lat = f.lattice
    if k == 0:
        return f
    if isinstance(lat, CircleLattice):
        phase = _as_phase(q)
        if phase is None or phase.N is None or abs(phase.q - lat.phase.q) > 1e-12:
            raise LatticeIndexError("shift phase does not map the circle lattice onto itself")
        return LatticeFunction(np.roll(f.samples, -int(k)), lat)
    raise LatticeIndexError(f"{type(lat).__name__} with finite index range is not closed under q**{k}")


def decomposition_residual(A, B, q: PhaseLike | None = None, a=None, epsilon: int = 1) -> complex:
    """``[A+B] - ([A] q**(eps B) + [B] q**(-eps A))`` (or the a-version).

    Zero for every scalar ``A``, ``B`` and both signs of ``epsilon``.
    """
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if (q is None) == (a is None):
        raise ValueError("give exactly one of q or a")
    if q is not None:
        phase = _as_phase(q)
        if phase is not None:
            pw = phase.power
        else:
            pw = lambda x: complex(q) ** x  # noqa: E731
        lhs = q_number(A + B, q)
        rhs = q_number(A, q) * pw(epsilon * B) + q_number(B, q) * pw(-epsilon * A)
        return complex(lhs - rhs)
    lhs = a_number(A + B, a)
    rhs = a_number(A, a) * cmath.exp(epsilon * a * B) + a_number(B, a) * cmath.exp(-epsilon * a * A)
    return complex(lhs - rhs)
