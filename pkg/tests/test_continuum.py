import numpy as np
import pytest

from qwitt.dynamics.continuum import (
    continuum_current,
    continuum_reference,
    nonlinear_functionals,
    spectral_derivative,
    stable_dt,
)
from qwitt.dynamics.lattice import bump_profile
from qwitt.errors import SingularityError

M = 64
PHI = 2 * np.pi * np.arange(M) / M


def test_spectral_derivative():
    np.testing.assert_allclose(spectral_derivative(np.sin(3 * PHI)).real, 3 * np.cos(3 * PHI), atol=1e-12)
    np.testing.assert_allclose(spectral_derivative(np.cos(2 * PHI), 2).real, -4 * np.cos(2 * PHI), atol=1e-12)


def test_current_of_plane_wave():
    psi = np.exp(2j * PHI)
    np.testing.assert_allclose(continuum_current(psi, 0.5), 2.5 * np.ones(M), atol=1e-12)


def test_stable_dt():
    assert stable_dt(512, 0.0) == 2e-4
    assert stable_dt(512, 0.1) == pytest.approx(1 / (0.1 * 256**2))


@pytest.mark.parametrize("m,alpha,D", [(1, 0.0, 0.0), (2, 0.3, 0.0), (-3, 0.5, 0.2)])
def test_plane_wave_phase(m, alpha, D):
    T = 0.3
    psi0 = np.exp(1j * m * PHI)
    out = continuum_reference(psi0, alpha, D, T).final
    np.testing.assert_allclose(out, psi0 * np.exp(-1j * (m * m / 2 + alpha * m) * T), atol=1e-10)


def test_free_evolution_matches_modes():
    # linear case: each Fourier mode picks up its own phase
    psi0 = bump_profile(PHI)
    out = continuum_reference(psi0, 0.2, 0.0, 0.5).final
    m = np.fft.fftfreq(M, 1 / M)
    ref = np.fft.ifft(np.fft.fft(psi0) * np.exp(-1j * (m**2 / 2 + 0.2 * m) * 0.5))
    np.testing.assert_allclose(out, ref, atol=1e-10)


def test_probability_conserved_with_nonlinearity():
    psi0 = bump_profile(PHI)
    traj = continuum_reference(psi0, 0.3, 0.1, 0.2, record_every=100)
    p = np.sum(np.abs(traj.states) ** 2, axis=1)
    assert len(traj.times) > 2
    assert np.max(np.abs(p - p[0])) / p[0] < 1e-10


def test_callable_initial_and_lattice_sampling():
    traj = continuum_reference(lambda phi: bump_profile(phi), 0.0, 0.0, 0.01, M=128)
    assert traj.final.shape == (128,)
    assert traj.at_lattice(16).shape == (16,)
    np.testing.assert_allclose(traj.at_lattice(16), traj.final[::8])


def test_reference_guard():
    psi0 = np.cos(PHI).astype(complex)
    with pytest.raises(SingularityError):
        continuum_reference(psi0, 0.0, 0.1, 0.01)


class TestNonlinearFunctionals:
    def test_plane_wave_only_current_term(self):
        t = nonlinear_functionals(np.exp(3j * PHI), separate=True)
        np.testing.assert_allclose(t[2], 9.0, atol=1e-10)
        assert np.max(np.abs(t[[0, 1, 3, 4]])) < 1e-10

    def test_real_state_has_no_current_terms(self):
        t = nonlinear_functionals(bump_profile(PHI).real, separate=True)
        assert np.max(np.abs(t[[0, 2, 3]])) < 1e-12
        assert np.max(np.abs(t[1])) > 0.1 and np.max(np.abs(t[4])) > 0.01

    def test_constant_is_zero(self):
        assert np.max(np.abs(nonlinear_functionals(np.full(M, 0.7 + 0.2j)))) < 1e-12

    def test_coefficients_weight_terms(self):
        psi = bump_profile(PHI) * np.exp(1j * PHI)
        D = (0.1, 0.2, 0.3, 0.4, 0.5)
        sep = nonlinear_functionals(psi, 0.0, D, separate=True)
        unit = nonlinear_functionals(psi, 0.0, separate=True)
        np.testing.assert_allclose(sep, np.array(D)[:, None] * unit)
        np.testing.assert_allclose(nonlinear_functionals(psi, 0.0, D), sep.sum(axis=0))

    def test_zero_density_rejected(self):
        with pytest.raises(SingularityError):
            nonlinear_functionals(np.sin(PHI))
