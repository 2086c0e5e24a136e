"""Lattice time evolution, its integrator and the continuum reference."""

from .continuum import continuum_current, continuum_reference, nonlinear_functionals
from .integrate import EvolutionState, Trajectory, integrate, step_rk4, write_csv, write_summary
from .lattice import (
    BACKENDS,
    DynParams,
    RShift,
    WaveFunction,
    backend_residual,
    c_q,
    check_backends,
    current,
    linear_part,
    nonlinear_coefficient,
    nonlinear_part,
    plane_wave_energy,
    rho_dot_ehrenfest,
    rho_dot_fokker_planck,
    rhs_evolution,
    split_residual,
)
