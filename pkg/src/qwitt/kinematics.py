"""Deformed and undeformed quantum kinematics on the N-point circle.

Position observables ``Q(f)`` are multiplication operators; momenta ``P(X)``
are assembled from the Witt generators of :mod:`qwitt.witt`.  Fields are given
by their Fourier coefficients on canonical modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ContractError
from .qcalc import UnitPhase, q_number, require_nonzero
from .witt import (
    ModeOperator,
    canonical_modes,
    make_L_deformed,
    make_L_undeformed,
    make_T,
)

REALITY_TOL = 1e-12
PRESETS = ("constant", "cos", "sin", "gaussian-bump")


def _canon(n: int, N: int) -> int:
    return (n + N // 2) % N - N // 2


@dataclass(frozen=True)
class FieldCoefficients:
    """Fourier coefficients ``c_n`` of a real function or vector field on the circle.

    ``kind`` is ``"function"`` or ``"vector"``.  Reality means
    ``c_{-n} = conj(c_n)``; it is checked against the lattice at quantization
    time because on even ``N`` the mode ``-N/2`` is its own partner.
    """

    coeffs: Mapping[int, complex]
    kind: str = "function"

    def __post_init__(self):
        if self.kind not in ("function", "vector"):
            raise ValueError(f"kind must be 'function' or 'vector', got {self.kind!r}")
        object.__setattr__(self, "coeffs", {int(n): complex(c) for n, c in self.coeffs.items() if c != 0})

    def modes(self):
        return sorted(self.coeffs)

    def on_lattice(self, N: int) -> dict[int, complex]:
        """Coefficients folded onto canonical modes of the N-point circle."""
        out: dict[int, complex] = {}
        for n, c in self.coeffs.items():
            m = _canon(n, N)
            out[m] = out.get(m, 0) + c
        return out

    def check_window(self, N: int, window: int | None = None):
        lo, hi = -(N // 2), N - N // 2
        for n in self.coeffs:
            if not lo <= n < hi or (window is not None and abs(n) > window):
                raise ContractError(f"mode {n} outside the window of the {N}-point circle")

    def reality_residual(self, N: int | None = None) -> float:
        c = self.coeffs if N is None else self.on_lattice(N)
        res = 0.0
        for n, v in c.items():
            partner = -n if N is None else _canon(-n, N)
            res = max(res, abs(c.get(partner, 0) - np.conj(v)))
        return res

    def require_real(self, N: int | None = None, tol: float = REALITY_TOL):
        r = self.reality_residual(N)
        if r > tol:
            raise ContractError(f"coefficients violate c_(-n) = conj(c_n) by {r:.3g}")

    def samples(self, N: int) -> np.ndarray:
        """Values at the lattice angles ``2*pi*l/N``."""
        l = np.arange(N)
        out = np.zeros(N, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.exp(2j * np.pi * n * l / N)
        return out

    def evaluate(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        return sum(c * np.exp(1j * n * phi) for n, c in self.coeffs.items()) + 0 * phi

    def __add__(self, other: "FieldCoefficients") -> "FieldCoefficients":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return FieldCoefficients(out, self.kind)

    def scaled(self, s) -> "FieldCoefficients":
        return FieldCoefficients({n: s * c for n, c in self.coeffs.items()}, self.kind)

    def times(self, other: "FieldCoefficients", kind: str | None = None) -> "FieldCoefficients":
        """Pointwise product (convolution of coefficients on the integers)."""
        out: dict[int, complex] = {}
        for n, a in self.coeffs.items():
            for m, b in other.coeffs.items():
                out[n + m] = out.get(n + m, 0) + a * b
        return FieldCoefficients(out, kind or self.kind)

    def derivative(self) -> "FieldCoefficients":
        """Continuum ``d/dphi``: coefficients ``i n c_n``."""
        return FieldCoefficients({n: 1j * n * c for n, c in self.coeffs.items()}, self.kind)

    @classmethod
    def from_samples(cls, values, kind: str = "function", window: int | None = None) -> "FieldCoefficients":
        values = np.asarray(values)
        N = len(values)
        c = np.fft.fft(values) / N
        modes = canonical_modes(N)
        out = {int(m): complex(v) for m, v in zip(modes, c) if window is None or abs(m) <= window}
        return cls(out, kind)

    @classmethod
    def preset(cls, name: str, N: int | None = None, kind: str = "function", value: float = 1.0,
               width: float = 0.5, center: float = np.pi, window: int | None = None) -> "FieldCoefficients":
        """Named fields: ``constant``, ``cos``, ``sin``, ``gaussian-bump``.

        The bump is sampled on the N-point circle and truncated to ``|n| <=
        window`` (default ``N // 4``).
        """
        if name == "constant":
            return cls({0: value}, kind)
        if name == "cos":
            return cls({1: value / 2, -1: value / 2}, kind)
        if name == "sin":
            return cls({1: value / 2j, -1: -value / 2j}, kind)
        if name == "gaussian-bump":
            if N is None:
                raise ValueError("gaussian-bump needs the lattice size N")
            phi = 2 * np.pi * np.arange(N) / N
            d = np.angle(np.exp(1j * (phi - center)))
            vals = value * np.exp(-(d**2) / (2 * width**2))
            w = N // 4 if window is None else window
            f = cls.from_samples(vals, kind, window=w)
            # the Nyquist partner is dropped by the window; symmetrise for exact reality
            sym = {n: 0.5 * (c + np.conj(f.coeffs.get(-n, 0))) for n, c in f.coeffs.items()}
            return cls(sym, kind)
        raise ValueError(f"unknown field preset {name!r}; choose from {PRESETS}")

    @classmethod
    def from_spec(cls, spec, N: int | None = None, kind: str = "function") -> "FieldCoefficients":
        """Parse a config entry: ``[[n, re, im], ...]`` or ``{"preset": name, ...}``."""
        if isinstance(spec, str):
            return cls.preset(spec, N=N, kind=kind)
        if isinstance(spec, Mapping):
            opts = dict(spec)
            if "coefficients" in opts:
                return cls.from_spec(opts["coefficients"], N, opts.get("kind", kind))
            name = opts.pop("preset")
            kind = opts.pop("kind", kind)
            return cls.preset(name, N=N, kind=kind, **opts)
        out: dict[int, complex] = {}
        for triple in spec:
            n, re, im = triple
            out[int(n)] = out.get(int(n), 0) + complex(re, im)
        return cls(out, kind)


@dataclass(frozen=True)
class KinematicsParams:
    """Quantum numbers ``alpha``, ``D`` and internal coordinate ``k`` on a lattice phase."""

    alpha: float
    D: float
    k: int
    phase: UnitPhase
    require_even: bool = True

    def __post_init__(self):
        if int(self.k) != self.k:
            raise ContractError(f"k must be an integer, got {self.k}")
        if self.require_even and (self.k <= 0 or self.k % 2):
            raise ContractError(f"k must be an even positive integer, got {self.k}")
        require_nonzero(self.k, self.phase, "k")
        if self.require_even:
            require_nonzero(self.k // 2, self.phase, "k/2")

    @property
    def nu(self) -> int:
        return self.k // 2


def _require_lattice_field(f: FieldCoefficients, phase: UnitPhase):
    f.check_window(phase.N)
    f.require_real(phase.N)


def quantize_position(f: FieldCoefficients, phase: UnitPhase) -> ModeOperator:
    """``Q(f) = sum_n f_n T_n``; pointwise multiplication by ``f`` in position space."""
    _require_lattice_field(f, phase)
    out = ModeOperator(np.zeros((phase.N, phase.N)), phase)
    for n, c in f.coeffs.items():
        out = out + c * make_T(n, phase)
    return out


def quantize_momentum(X: FieldCoefficients, params: KinematicsParams) -> ModeOperator:
    """``P(X) = sum_n X_n (L_{n,k} + i [n]_q D T_n)``."""
    phase = params.phase
    _require_lattice_field(X, phase)
    out = ModeOperator(np.zeros((phase.N, phase.N)), phase)
    for n, c in X.coeffs.items():
        gen = make_L_deformed(n, params.k, params.alpha, phase) + (1j * q_number(n, phase) * params.D) * make_T(n, phase)
        out = out + c * gen
    return out


def quantize_undeformed(field: FieldCoefficients, alpha: float, D: float, phase: UnitPhase) -> ModeOperator:
    """Undeformed ``Q(f)`` or ``P(X) = sum X_n (L_n + i D n T_n)`` on canonical modes.

    Only meaningful on wrap-free columns; used as the q -> 1 reference.
    """
    field.check_window(phase.N)
    out = ModeOperator(np.zeros((phase.N, phase.N)), phase)
    for n, c in field.coeffs.items():
        if field.kind == "function":
            out = out + c * make_T(n, phase)
        else:
            out = out + c * (make_L_undeformed(n, alpha, phase) + (1j * D * n) * make_T(n, phase))
    return out


def gradient_field(f: FieldCoefficients, phase: UnitPhase) -> FieldCoefficients:
    """Deformed gradient, coefficients ``i [n]_q f_n``, as a vector field."""
    return FieldCoefficients({n: 1j * q_number(n, phase) * c for n, c in f.coeffs.items()}, "vector")


def delta_field(l: int, N: int) -> FieldCoefficients:
    """Real indicator of lattice site ``l`` in canonical Fourier modes."""
    modes = canonical_modes(N)
    return FieldCoefficients({int(n): np.exp(-2j * np.pi * l * n / N) / N for n in modes}, "function")


def position_support(op: ModeOperator, tol: float = 1e-12) -> list[set[int]]:
    """For every row ``l`` the set of offsets ``j - l`` (mod N, canonical) with nonzero weight."""
    P = op.position_matrix()
    N = op.N
    rows = []
    for l in range(N):
        nz = np.flatnonzero(np.abs(P[l]) > tol)
        rows.append({_canon(int(j) - l, N) for j in nz})
    return rows
