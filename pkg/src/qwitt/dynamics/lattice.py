"""Deformed evolution on the N-point circle.

Two routes to the density rate:

* :func:`rho_dot_ehrenfest` evaluates the expectation of the deformed momentum
  of ``grad f`` for every lattice indicator ``f`` with explicit matrices;
* :func:`rho_dot_fokker_planck` applies the deformed continuity operator to
  the current :func:`current`.

and two routes to the right-hand side of the evolution equation:

* ``spectral``: the linear and nonlinear parts built from mode-space
  functions of ``N_z`` (FFT) and lattice shifts;
* ``stencil``: the same equation written site by site in terms of
  ``psi(l + s)`` with explicit trigonometric weights.

Mode-space conventions: ``psi(l) = sum_m psihat_m q**(l m)``, ``N_z psihat_m
= m psihat_m``, and ``K_s psi(l) = psi(l + s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import ConsistencyError, ContractError, SingularityError
from ..kinematics import KinematicsParams
from ..qcalc import UnitPhase, q_number
from ..witt import canonical_modes, make_L_deformed

BACKENDS = ("stencil", "spectral")
GUARD_RELATIVE = 1e-8
NORMALIZATION = "2pi/N"


def shift(x: np.ndarray, s: int) -> np.ndarray:
    """``(K_s x)(l) = x(l + s)`` with periodic index."""
    return np.roll(x, -int(s))


def apply_mode_function(x: np.ndarray, phase: UnitPhase, fn) -> np.ndarray:
    """Multiply the Fourier coefficient of mode ``m`` by ``fn(m)``."""
    m = canonical_modes(phase.N)
    return np.fft.ifft(fn(m) * np.fft.fft(x))


def qN(x, phase: UnitPhase, scale: float = 1.0, offset: float = 0.0) -> np.ndarray:
    """Apply ``[scale * (N_z + offset)]_q`` to position samples."""
    return apply_mode_function(x, phase, lambda m: q_number(scale * (m + offset), phase))


@dataclass(frozen=True)
class WaveFunction:
    """Complex samples ``psi(l)`` on the N-point circle, inner product ``(2pi/N) sum conj(psi) phi``."""

    samples: np.ndarray
    phase: UnitPhase

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim != 1 or len(s) != self.phase.N:
            raise ContractError(f"{s.shape} samples for N={self.phase.N}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def N(self) -> int:
        return self.phase.N

    @property
    def c(self) -> float:
        return 2 * math.pi / self.N

    def __call__(self, l: int) -> complex:
        return complex(self.samples[int(l) % self.N])

    def inner(self, other: "WaveFunction") -> complex:
        return self.c * complex(np.vdot(self.samples, other.samples))

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def total_probability(self) -> float:
        return self.c * float(np.sum(self.rho))

    def modes(self) -> np.ndarray:
        """Fourier coefficients in ``numpy.fft`` order (mode ``m`` at index ``m mod N``)."""
        return np.fft.fft(self.samples) / self.N

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.samples / self.norm(), self.phase)

    def with_samples(self, samples) -> "WaveFunction":
        return WaveFunction(samples, self.phase)

    # presets --------------------------------------------------------------

    @classmethod
    def lattice(cls, samples) -> "WaveFunction":
        samples = np.asarray(samples, dtype=complex)
        return cls(samples, UnitPhase.lattice(len(samples)))

    @classmethod
    def plane_wave(cls, N: int, m: int, normalize: bool = True) -> "WaveFunction":
        l = np.arange(N)
        psi = cls(np.exp(2j * np.pi * m * l / N), UnitPhase.lattice(N))
        return psi.normalized() if normalize else psi

    @classmethod
    def constant(cls, N: int, value: complex = 1.0, normalize: bool = True) -> "WaveFunction":
        psi = cls(np.full(N, value, dtype=complex), UnitPhase.lattice(N))
        return psi.normalized() if normalize else psi

    @classmethod
    def gaussian_bump(cls, N: int, width: float = 0.5, amplitude: float = 0.5, center: float = math.pi,
                      background: float = 1.0, normalize: bool = True) -> "WaveFunction":
        """``background + amplitude * exp(-d**2 / (2 width**2))`` with ``d`` the periodic distance to ``center``."""
        psi = cls(bump_profile(2 * np.pi * np.arange(N) / N, width, amplitude, center, background),
                  UnitPhase.lattice(N))
        return psi.normalized() if normalize else psi

    @classmethod
    def random_smooth(cls, N: int, rng: np.random.Generator, n_modes: int = 3, offset: float = 2.0,
                      normalize: bool = True) -> "WaveFunction":
        """Constant ``offset`` plus random complex low modes ``|m| <= n_modes`` of unit scale.

        The offset keeps ``|psi|`` away from zero.
        """
        l = np.arange(N)
        psi = np.full(N, offset, dtype=complex)
        for m in range(-n_modes, n_modes + 1):
            if m == 0:
                continue
            c = (rng.normal() + 1j * rng.normal()) / (2 * n_modes)
            psi += c * np.exp(2j * np.pi * m * l / N)
        out = cls(psi, UnitPhase.lattice(N))
        return out.normalized() if normalize else out

    @classmethod
    def random(cls, N: int, rng: np.random.Generator, normalize: bool = True) -> "WaveFunction":
        out = cls(rng.normal(size=N) + 1j * rng.normal(size=N), UnitPhase.lattice(N))
        return out.normalized() if normalize else out


def bump_profile(phi, width=0.5, amplitude=0.5, center=math.pi, background=1.0) -> np.ndarray:
    d = np.angle(np.exp(1j * (np.asarray(phi) - center)))
    return (background + amplitude * np.exp(-(d**2) / (2 * width**2))).astype(complex)


@dataclass(frozen=True)
class RShift:
    """Shift ``R = a1 K_{k1} + a2 K_{k2}`` multiplying ``conj(psi)`` in the nonlinear part."""

    a1: complex = 1.0
    k1: int = 0
    a2: complex = 0.0
    k2: int = 0

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if int(k) != k:
                raise ContractError(f"R shifts must be integer lattice shifts, got {k}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = self.a1 * shift(x, self.k1)
        if self.a2 != 0:
            out = out + self.a2 * shift(x, self.k2)
        return out

    @property
    def is_identity(self) -> bool:
        return self.a1 == 1 and self.k1 == 0 and self.a2 == 0

    def support(self) -> set[int]:
        s = {int(self.k1)} if self.a1 != 0 else set()
        if self.a2 != 0:
            s.add(int(self.k2))
        return s

    def to_dict(self) -> dict:
        return {"a1": _cjson(self.a1), "k1": int(self.k1), "a2": _cjson(self.a2), "k2": int(self.k2)}


def _cjson(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass(frozen=True)
class DynParams:
    """Everything the evolution needs apart from the state."""

    kin: KinematicsParams
    R: RShift = field(default_factory=RShift)
    dt: float = 1e-3
    t_end: float = 1.0
    guard_eps: float | None = None
    backend: str = "stencil"

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ContractError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.dt <= 0:
            raise ContractError("dt must be positive")
        if self.guard_eps is not None and self.guard_eps <= 0:
            raise ContractError("guard_eps must be positive")

    @classmethod
    def make(cls, N: int, k: int = 2, alpha: float = 0.0, D: float = 0.0, **kw) -> "DynParams":
        return cls(KinematicsParams(alpha, D, k, UnitPhase.lattice(N)), **kw)

    @property
    def phase(self) -> UnitPhase:
        return self.kin.phase

    @property
    def N(self) -> int:
        return self.kin.phase.N

    def to_dict(self) -> dict:
        return {
            "N": self.N, "k": self.kin.k, "alpha": self.kin.alpha, "D": self.kin.D,
            "R": self.R.to_dict(), "dt": self.dt, "t_end": self.t_end,
            "guard_eps": self.guard_eps, "backend": self.backend,
        }


def _samples(psi) -> np.ndarray:
    return psi.samples if isinstance(psi, WaveFunction) else np.asarray(psi, dtype=complex)


def _check_size(x: np.ndarray, params: DynParams):
    if len(x) != params.N:
        raise ContractError(f"state has {len(x)} sites, params are for N={params.N}")


# ----------------------------------------------------------------------------
# density rate


CACHE_MAX_N = 64


def _ehrenfest_operator(N: int, n: int, k: int, alpha: float, D: float) -> np.ndarray:
    """Mode matrix ``i [n]_q (L_{n,k} + i D [n]_q T_n)``."""
    phase = UnitPhase.lattice(N)
    qn = q_number(int(n), phase)
    L = make_L_deformed(int(n), k, alpha, phase).matrix
    T = np.zeros((N, N))
    T[(np.arange(N) + n) % N, np.arange(N)] = 1.0
    return 1j * qn * (L + 1j * D * qn * T)


@lru_cache(maxsize=32)
def _ehrenfest_stack(N: int, k: int, alpha: float, D: float) -> np.ndarray:
    ops = np.array([_ehrenfest_operator(N, int(n), k, alpha, D) for n in canonical_modes(N)])
    ops.setflags(write=False)
    return ops


def rho_dot_ehrenfest(psi, params: DynParams) -> np.ndarray:
    """Density rate fixed by the deformed Ehrenfest relation.

    For the lattice indicator ``f = delta_l`` (Fourier coefficients
    ``q**(-l n) / N``) the left side is ``c * rho_dot(l)`` and the right side
    the expectation of the deformed momentum of ``grad f``; the normalization
    ``c`` cancels.
    """
    x = _samples(psi)
    _check_size(x, params)
    N = params.N
    k, alpha, D = int(params.kin.k), float(params.kin.alpha), float(params.kin.D)
    c = np.fft.fft(x) / N
    modes = canonical_modes(N)
    if N <= CACHE_MAX_N:
        v = np.einsum("i,nij,j->n", c.conj(), _ehrenfest_stack(N, k, alpha, D), c)
    else:
        v = np.array([np.vdot(c, _ehrenfest_operator(N, int(n), k, alpha, D) @ c) for n in modes])
    l = np.arange(N)
    # the 1/N of f_n cancels the factor N of the inner product written in modes
    return (np.exp(-2j * np.pi * np.outer(l, modes) / N) @ v).real


def current(psi, params: DynParams, alpha: float | None = None) -> np.ndarray:
    """Deformed current.

    ``([k/2 (N_z + alpha)] psi) (K_{k/2} e^{-i k alpha phi0 / 2} conj psi)
    - (K_{k/2} e^{+i k alpha phi0 / 2} psi) ([k/2 (N_z - alpha)] conj psi)``,
    divided by ``[k]_q``.  Real up to rounding; returned as complex samples.
    """
    x = _samples(psi)
    _check_size(x, params)
    phase = params.phase
    k = params.kin.k
    a = params.kin.alpha if alpha is None else alpha
    h = k // 2
    cx = np.conj(x)
    ph = np.exp(1j * h * a * phase.phi0)
    t1 = qN(x, phase, h, a) * shift(cx, h) / ph
    t2 = shift(x, h) * ph * qN(cx, phase, h, -a)
    return (t1 - t2) / q_number(k, phase)


def current_flipped_phases(psi, params: DynParams) -> np.ndarray:
    """Current with the opposite sign of the alpha phases (fails the continuity check for alpha != 0)."""
    x = _samples(psi)
    phase = params.phase
    k, a = params.kin.k, params.kin.alpha
    h = k // 2
    cx = np.conj(x)
    ph = np.exp(1j * h * a * phase.phi0)
    t1 = qN(x, phase, h, a) * shift(cx, h) * ph
    t2 = shift(x, h) / ph * qN(cx, phase, h, -a)
    return (t1 - t2) / q_number(k, phase)


def current_reflection_gap(psi, params: DynParams) -> float:
    """``max |I^{alpha} + I^{-alpha}|``; nonzero in general."""
    return float(np.max(np.abs(current(psi, params) + current(psi, params, -params.kin.alpha))))


def rho_dot_fokker_planck(psi, params: DynParams) -> np.ndarray:
    """``-i [N_z]_q (I - i D [N_z]_q rho)``."""
    x = _samples(psi)
    _check_size(x, params)
    phase = params.phase
    rho = np.abs(x) ** 2
    inner = current(x, params) - 1j * params.kin.D * qN(rho, phase)
    return (-1j * qN(inner, phase)).real


# ----------------------------------------------------------------------------
# the split into linear and nonlinear parts (assembled route)


def S_q1(x: np.ndarray, k: int) -> np.ndarray:
    """``(K_{k/2+1} + K_{k/2-1}) x / 2``."""
    h = k // 2
    return 0.5 * (shift(x, h + 1) + shift(x, h - 1))


def linear_part(psi, params: DynParams) -> np.ndarray:
    """Linear part ``F_L`` of ``i psi_dot conj(psi)``."""
    x = _samples(psi)
    _check_size(x, params)
    phase = params.phase
    k, a = params.kin.k, params.kin.alpha
    h = k // 2
    qk = q_number(k, phase)
    cx = np.conj(x)
    S = S_q1(cx, k)
    lin = apply_mode_function(x, phase, lambda m: q_number(m, phase) * q_number(h * m, phase)) / qk * S
    if a != 0:
        ph = np.exp(1j * h * a * phase.phi0)
        b1 = (1j / ph) * qN(shift(x, -h), phase) * S
        b2 = (1j * ph) * qN(shift(x, h), phase) * shift(S, -k)
        lin = lin - 1j * q_number(h * a, phase) / qk * (b1 + b2)
    return lin


def c_q(psi, params: DynParams) -> np.ndarray:
    """Real correction ``C_q`` of the nonlinear coefficient (vanishes as q -> 1)."""
    x = _samples(psi)
    _check_size(x, params)
    phase = params.phase
    k = params.kin.k
    h = k // 2
    cx = np.conj(x)
    t1 = -qN(shift(x, h), phase) * qN(shift(cx, 1) + shift(cx, -1), phase, h)
    t2 = qN(shift(x, 1) + shift(x, -1), phase, h) * qN(shift(cx, h), phase)
    return ((t1 + t2) / (2j * q_number(k, phase))).real


def guard_floor(x: np.ndarray, params: DynParams) -> float:
    """Amplitude floor: ``guard_eps`` if set, else ``1e-8 * max |psi|``."""
    if params.guard_eps is not None:
        return float(params.guard_eps)
    return GUARD_RELATIVE * float(np.max(np.abs(x)))


def _guard(x: np.ndarray, params: DynParams):
    floor = guard_floor(x, params)
    amp = np.abs(x)
    bad = np.flatnonzero(amp < floor)
    if bad.size:
        l = int(bad[0])
        raise SingularityError(f"|psi({l})| = {amp[l]:.3g} below guard {floor:.3g}", site=l, quantity="amplitude")
    dens = 2 * np.real(x * params.R.apply(np.conj(x)))
    bad = np.flatnonzero(np.abs(dens) < floor**2)
    if bad.size:
        l = int(bad[0])
        raise SingularityError(f"2 Re(psi R conj psi)({l}) = {dens[l]:.3g} below guard {floor**2:.3g}",
                               site=l, quantity="density")
    return dens


def nonlinear_coefficient(psi, params: DynParams) -> np.ndarray:
    """Real multiplication operator ``G`` with ``G * 2 Re(psi R conj psi) = C_q - D [N_z]_q**2 rho``."""
    x = _samples(psi)
    _check_size(x, params)
    dens = _guard(x, params)
    phase = params.phase
    rho = np.abs(x) ** 2
    lap = apply_mode_function(rho, phase, lambda m: q_number(m, phase) ** 2).real
    return (c_q(x, params) - params.kin.D * lap) / dens


def nonlinear_part(psi, params: DynParams) -> np.ndarray:
    """``F_NL = i G psi (R conj psi)``."""
    x = _samples(psi)
    G = nonlinear_coefficient(x, params)
    return 1j * G * x * params.R.apply(np.conj(x))


def _rhs_assembled(x: np.ndarray, params: DynParams) -> np.ndarray:
    return -1j * (linear_part(x, params) + nonlinear_part(x, params)) / np.conj(x)


# ----------------------------------------------------------------------------
# explicit stencil route


def _rhs_stencil(x: np.ndarray, params: DynParams) -> np.ndarray:
    """Site-by-site form; touches ``l``, ``l +- k_-``, ``l +- k_+``, ``l +- 2`` and the R shifts.

    ``k_+ = 1 + k/2`` and ``k_- = 1 - k/2``.  All weights are closed-form
    trigonometric constants; no Fourier transform is used.
    """
    N = params.N
    k, a, D = params.kin.k, params.kin.alpha, params.kin.D
    h = k // 2
    phi0 = 2 * math.pi / N
    s, sk = math.sin(phi0), math.sin(k * phi0)
    kp, km = 1 + h, 1 - h
    cx = np.conj(x)
    p = lambda j: shift(x, j)  # noqa: E731
    pc = lambda j: shift(cx, j)  # noqa: E731

    S = 0.5 * (pc(kp) + pc(-km))
    lin = -(p(kp) - p(km) - p(-km) + p(-kp)) / (4 * s * sk) * S
    if a != 0:
        ph = np.exp(1j * h * a * phi0)
        w = math.sin(h * a * phi0) / sk
        # i [N_z] K_{-k/2} psi and i [N_z] K_{k/2} psi as central differences
        d_minus = (p(km) - p(-kp)) / (2 * s)
        d_plus = (p(kp) - p(-km)) / (2 * s)
        S_back = 0.5 * (pc(km) + pc(-kp))
        lin = lin - 1j * w * (d_minus * S / ph + ph * d_plus * S_back)

    A = p(kp) - p(-km)
    B = p(kp) + p(-km) - p(km) - p(-kp)
    C = -np.imag(B * np.conj(A)) / (4 * s * sk)
    rho = np.abs(x) ** 2
    lap = -(shift(rho, 2) - 2 * rho + shift(rho, -2)) / (4 * s * s)
    Rc = params.R.apply(cx)
    dens = 2 * np.real(x * Rc)
    G = (C - D * lap) / dens
    return -1j * (lin + 1j * G * x * Rc) / cx


def rhs_evolution(psi, params: DynParams, backend: str | None = None) -> np.ndarray:
    """``psi_dot = -i (F_L + F_NL) / conj(psi)``.

    Raises :class:`SingularityError` when the amplitude or the density-like
    bilinear falls below the guard floor.
    """
    x = _samples(psi)
    _check_size(x, params)
    _guard(x, params)
    backend = backend or params.backend
    if backend == "stencil":
        return _rhs_stencil(x, params)
    if backend == "spectral":
        return _rhs_assembled(x, params)
    raise ContractError(f"unknown backend {backend!r}")


def backend_residual(psi, params: DynParams) -> float:
    x = _samples(psi)
    _guard(x, params)
    return float(np.max(np.abs(_rhs_stencil(x, params) - _rhs_assembled(x, params))))


def check_backends(psi, params: DynParams, tol: float = 1e-10) -> float:
    """Return the backend residual or raise :class:`ConsistencyError` beyond ``tol``."""
    r = backend_residual(psi, params)
    if r > tol:
        raise ConsistencyError(f"stencil and assembled right-hand sides differ by {r:.3g} > {tol:.3g}")
    return r


def split_residual(psi, params: DynParams) -> float:
    """``max |2 Re(conj(psi) psi_dot) - rho_dot|`` against the Fokker-Planck rate."""
    x = _samples(psi)
    rate = 2 * np.real(np.conj(x) * rhs_evolution(x, params))
    return float(np.max(np.abs(rate - rho_dot_fokker_planck(x, params))))


def plane_wave_energy(m: int, params: DynParams) -> float:
    """Phase-rotation frequency of a single mode under the evolution equation.

    ``[m] cos(m phi0) ([k m / 2] cos(k m phi0 / 2) + 2 [k alpha / 2] cos(k (alpha + 2m) phi0 / 2)) / [k]``
    """
    phase = params.phase
    k, a = params.kin.k, params.kin.alpha
    h = k // 2
    phi0 = phase.phi0
    qn = lambda v: q_number(v, phase)  # noqa: E731
    return qn(m) * math.cos(m * phi0) * (qn(h * m) * math.cos(h * m * phi0)
                                         + 2 * qn(h * a) * math.cos(h * (a + 2 * m) * phi0)) / qn(k)


def stencil_sites(params: DynParams) -> set[int]:
    """Offsets the right-hand side at ``l`` may depend on."""
    h = params.kin.k // 2
    kp, km = 1 + h, 1 - h
    base = {0, kp, -kp, km, -km, 2, -2}
    for r in params.R.support():
        base |= {r}
    return {((o + params.N // 2) % params.N) - params.N // 2 for o in base}
