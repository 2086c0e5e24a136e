"""Undeformed reference: nonlinear Schroedinger evolution on the circle.

``i psi_t = -psi''/2 - i alpha psi' + i (D / (2 rho)) rho'' psi`` integrated with
a Fourier pseudo-spectral method and integrating-factor RK4 (the linear part
is exact in Fourier space).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SingularityError


def _wavenumbers(M: int) -> np.ndarray:
    return np.fft.fftfreq(M, 1.0 / M)


def spectral_derivative(f: np.ndarray, order: int = 1) -> np.ndarray:
    """``d^order f / dphi^order`` for samples on ``2 pi l / M``."""
    m = _wavenumbers(len(f))
    w = (1j * m) ** order
    if order % 2 and len(f) % 2 == 0:
        w[len(f) // 2] = 0  # odd derivatives of the Nyquist mode are not real
    return np.fft.ifft(w * np.fft.fft(f))


def continuum_current(psi: np.ndarray, alpha: float = 0.0) -> np.ndarray:
    """``j = (i/2)(conj(psi)' psi - conj(psi) psi') + alpha rho``."""
    psi = np.asarray(psi, dtype=complex)
    dpsi = spectral_derivative(psi)
    return (0.5j * (np.conj(dpsi) * psi - np.conj(psi) * dpsi)).real + alpha * np.abs(psi) ** 2


@dataclass
class ContinuumTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), M)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at_lattice(self, N: int) -> np.ndarray:
        """Final state subsampled to the N-point lattice (``M`` must be a multiple of ``N``)."""
        M = self.states.shape[1]
        if M % N:
            raise ValueError(f"reference grid {M} is not a multiple of {N}")
        return self.final[:: M // N]


def stable_dt(M: int, D: float, dt_max: float = 2e-4) -> float:
    """Step bound for the explicit nonlinear term (``D rho''/rho`` is stiff like ``D m**2``)."""
    if D <= 0:
        return dt_max
    return min(dt_max, 1.0 / (D * (M / 2) ** 2))


def continuum_reference(psi0, alpha: float, D: float, T: float, M: int | None = None,
                        dt: float | None = None, floor: float = 1e-8, record_every: int = 0) -> ContinuumTrajectory:
    """Integrate the continuum equation from ``psi0`` to time ``T``.

    ``psi0`` is either samples on a uniform grid (then ``M = len(psi0)``) or a
    callable of the angle, sampled on ``M`` points.
    """
    if callable(psi0):
        M = M or 512
        u0 = np.asarray(psi0(2 * np.pi * np.arange(M) / M), dtype=complex)
    else:
        u0 = np.asarray(psi0, dtype=complex)
        M = len(u0)
    m = _wavenumbers(M)
    dt = dt or stable_dt(M, D)
    nsteps = max(1, int(math.ceil(T / dt - 1e-12)))
    dt = T / nsteps
    lin = -1j * (0.5 * m**2 + alpha * m)
    E = np.exp(lin * dt / 2)
    E2 = E * E
    F, iF = np.fft.fft, np.fft.ifft

    def nonlinear(u):
        if D == 0:
            return np.zeros_like(u)
        p = iF(u)
        rho = np.abs(p) ** 2
        if rho.min() < floor * rho.max():
            l = int(np.argmin(rho))
            raise SingularityError(f"continuum density {rho[l]:.3g} below floor", site=l, quantity="density")
        rho2 = np.real(iF(-(m**2) * F(rho)))
        return F(D / (2 * rho) * rho2 * p)

    if D != 0:
        nonlinear(F(u0))
    u = F(u0)
    times, states = [0.0], [u0]
    for step in range(1, nsteps + 1):
        k1 = nonlinear(u)
        k2 = nonlinear(E * (u + dt / 2 * k1))
        k3 = nonlinear(E * u + dt / 2 * k2)
        k4 = nonlinear(E2 * u + dt * E * k3)
        u = E2 * u + dt / 6 * (E2 * k1 + 2 * E * (k2 + k3) + k4)
        if record_every and step % record_every == 0 and step != nsteps:
            times.append(step * dt)
            states.append(iF(u))
    times.append(T)
    states.append(iF(u))
    return ContinuumTrajectory(np.array(times), np.array(states))


def nonlinear_functionals(psi, alpha: float = 0.0, D=(1.0, 1.0, 1.0, 1.0, 1.0), floor: float = 1e-12,
                             separate: bool = False):
    """The five real nonlinear functionals compatible with the continuity equation.

    ``j'/rho, rho''/rho, j**2/rho**2, j rho'/rho**2, rho'**2/rho**2`` with ``j``
    from :func:`continuum_current`.  Returns ``sum D_k R_k`` or, with
    ``separate=True``, the stacked terms ``D_k R_k`` of shape ``(5, M)``.
    """
    psi = np.asarray(psi, dtype=complex)
    rho = np.abs(psi) ** 2
    if rho.min() <= floor * max(rho.max(), 1.0):
        l = int(np.argmin(rho))
        raise SingularityError(f"density {rho[l]:.3g} below floor", site=l, quantity="density")
    j = continuum_current(psi, alpha)
    rho1 = spectral_derivative(rho).real
    rho2 = spectral_derivative(rho, 2).real
    j1 = spectral_derivative(j).real
    terms = np.array([j1 / rho, rho2 / rho, j**2 / rho**2, j * rho1 / rho**2, rho1**2 / rho**2])
    terms = np.asarray(D, dtype=float)[:, None] * terms
    return terms if separate else terms.sum(axis=0)
