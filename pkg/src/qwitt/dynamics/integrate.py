"""Fixed-step RK4 integration of the lattice evolution, trajectories and their output files."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import SingularityError
from .lattice import (
    DynParams,
    WaveFunction,
    backend_residual,
    current,
    rho_dot_ehrenfest,
    rho_dot_fokker_planck,
    rhs_evolution,
)

CSV_HEADER = ("t", "l", "re_psi", "im_psi", "rho", "re_I0", "im_I0")


@dataclass(frozen=True)
class EvolutionState:
    """State at time ``t``; every diagnostic is computed from ``psi`` on access."""

    psi: WaveFunction
    t: float = 0.0

    def total_probability(self) -> float:
        return self.psi.total_probability()

    def current(self, params: DynParams) -> np.ndarray:
        return current(self.psi, params)

    def fp_residual(self, params: DynParams) -> float:
        """Fokker-Planck against Ehrenfest density rate (needs ``O(N**3)`` work)."""
        return float(np.max(np.abs(rho_dot_fokker_planck(self.psi, params) - rho_dot_ehrenfest(self.psi, params))))

    def mode_energies(self) -> np.ndarray:
        """``|psihat_m|**2`` in ``numpy.fft`` order."""
        return np.abs(self.psi.modes()) ** 2

    def diagnostics(self, params: DynParams) -> dict:
        return {
            "t": self.t,
            "total_probability": self.total_probability(),
            "current": self.current(params),
            "fp_residual": self.fp_residual(params),
            "mode_energies": self.mode_energies(),
        }


def step_rk4(state: EvolutionState, params: DynParams, dt: float | None = None) -> EvolutionState:
    """One classical RK4 step; raises :class:`SingularityError` from any stage."""
    dt = params.dt if dt is None else dt
    f = lambda y: rhs_evolution(y, params)  # noqa: E731
    y = state.psi.samples
    k1 = f(y)
    k2 = f(y + dt / 2 * k1)
    k3 = f(y + dt / 2 * k2)
    k4 = f(y + dt * k3)
    return EvolutionState(state.psi.with_samples(y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)), state.t + dt)


@dataclass
class Trajectory:
    params: DynParams
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    probabilities: list = field(default_factory=list)
    singular: bool = False
    singular_time: float | None = None
    singular_message: str | None = None
    singular_site: int | None = None
    backend_residual: float | None = None
    steps: int = 0

    @property
    def final(self) -> EvolutionState:
        return EvolutionState(WaveFunction(self.states[-1], self.params.phase), self.times[-1])

    @property
    def probability_drift(self) -> float:
        p = np.asarray(self.probabilities)
        return float(np.max(np.abs(p - p[0])))

    def summary(self, fp_samples: int = 3) -> dict:
        """Diagnostics for the JSON report; FP residual sampled at the first, middle and last states."""
        idx = sorted({0, len(self.states) // 2, len(self.states) - 1})[:max(1, fp_samples)]
        fp = max(EvolutionState(WaveFunction(self.states[i], self.params.phase)).fp_residual(self.params) for i in idx)
        return {
            "params": self.params.to_dict(),
            "steps": self.steps,
            "recorded": len(self.times),
            "t_final": self.times[-1],
            "conservation_drift": self.probability_drift,
            "fp_ehrenfest_residual": fp,
            "backend_residual": self.backend_residual,
            "singular": self.singular,
            "singular_time": self.singular_time,
            "singular_site": self.singular_site,
            "singular_message": self.singular_message,
        }


def n_steps(params: DynParams) -> int:
    return max(0, int(math.ceil(params.t_end / params.dt - 1e-9)))


def integrate(state: EvolutionState, params: DynParams, check_backends: bool = True,
              record_every: int = 1) -> Trajectory:
    """Integrate to ``params.t_end`` with ``ceil(t_end / dt)`` equal steps.

    The two right-hand-side backends are compared on the initial state.  A
    guard violation stops the run and returns the partial trajectory with
    ``singular`` set.
    """
    traj = Trajectory(params)
    traj.times.append(state.t)
    traj.states.append(state.psi.samples)
    traj.probabilities.append(state.total_probability())
    n = n_steps(params)
    dt = params.t_end / n if n else params.dt
    try:
        if check_backends:
            traj.backend_residual = backend_residual(state.psi, params)
        for i in range(1, n + 1):
            state = step_rk4(state, params, dt)
            if not np.all(np.isfinite(state.psi.samples)):
                raise SingularityError("state became non-finite", quantity="amplitude")
            traj.steps = i
            traj.probabilities.append(state.total_probability())
            if i % record_every == 0 or i == n:
                traj.times.append(state.t)
                traj.states.append(state.psi.samples)
    except SingularityError as exc:
        traj.singular = True
        traj.singular_time = state.t
        traj.singular_message = str(exc)
        traj.singular_site = exc.site
    return traj


def write_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for t, x in zip(traj.times, traj.states):
            I = current(x, traj.params)
            rho = np.abs(x) ** 2
            for l in range(len(x)):
                w.writerow([repr(float(t)), l, repr(float(x[l].real)), repr(float(x[l].imag)),
                            repr(float(rho[l])), repr(float(I[l].real)), repr(float(I[l].imag))])
    return path


def write_summary(traj: Trajectory, path, extra: dict | None = None) -> Path:
    path = Path(path)
    doc = traj.summary()
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
