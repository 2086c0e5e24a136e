"""The four commands.  Each returns ``(exit_status, report)``; reports are plain JSON data."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .. import witt as W
from ..dynamics import (
    DynParams,
    EvolutionState,
    RShift,
    WaveFunction,
    continuum_reference,
    integrate,
    plane_wave_energy,
    rho_dot_ehrenfest,
    rho_dot_fokker_planck,
    write_csv,
    write_summary,
)
from ..dynamics.lattice import bump_profile
from ..errors import ContractError, DegenerateParameterError
from ..kinematics import (
    FieldCoefficients,
    KinematicsParams,
    position_support,
    quantize_momentum,
    quantize_position,
    quantize_undeformed,
)
from ..qcalc import UnitPhase
from .config import ConfigError, RunConfig, as_list

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _r(x):
    """Round floats for stable, readable parameter keys."""
    return round(float(x), 12) if isinstance(x, float) else x


def _finish(command: str, cfg: RunConfig, cases: list[W.CheckReport], extra: dict | None = None):
    cases = sorted(cases, key=lambda c: c.key)
    failed = [c for c in cases if not c.passed]
    by_rel: dict[str, dict] = {}
    for c in cases:
        e = by_rel.setdefault(c.relation, {"cases": 0, "failed": 0, "inapplicable": 0, "max_residual": 0.0})
        e["cases"] += 1
        e["failed"] += int(not c.passed)
        e["inapplicable"] += int(not c.applicable)
        if c.residual is not None:
            e["max_residual"] = max(e["max_residual"], c.residual)
    report = {
        "command": command,
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "passed": not failed,
        "summary": {
            "cases": len(cases),
            "failed": len(failed),
            "inapplicable": sum(not c.applicable for c in cases),
            "relations": dict(sorted(by_rel.items())),
            "failed_keys": [c.key for c in failed],
        },
        "cases": [c.to_dict() for c in cases],
    }
    if extra:
        report.update(extra)
    return (EXIT_OK if not failed else EXIT_FAIL), report


def _random_alphas(cfg: RunConfig, count: int) -> list[float]:
    rng = np.random.default_rng(cfg.seed)
    return [round(float(a), 6) for a in rng.uniform(0, 2 * math.pi, count)]


# ----------------------------------------------------------------------------


def cmd_algebra_check(cfg: RunConfig):
    """Deformed Witt relations, undeformed limit relations, shifts, Hopf structure and q-bracket closure."""
    tol = cfg.tolerances["algebra"]
    p = cfg.get("params")
    mmax = int(p.get("m_max", 3))
    js = [int(j) for j in as_list(p.get("j", [1, 2, 3]))]
    alphas = [float(a) for a in as_list(p.get("alpha", [0.0]))] + _random_alphas(cfg, int(cfg.doc.get("samples", 0) or 0))
    deltas = [int(d) for d in as_list(p.get("delta", [1]))]
    bs = as_list(p.get("b", [1]))
    a_param = float(p.get("a", 0.5))
    fault = cfg.doc.get("fault_injection") or {}
    perturb = float(fault.get("perturbation", 0.0))
    fault_rel = fault.get("relation", "witt_deformed")
    R = range(-mmax, mmax + 1)
    cases: list[W.CheckReport] = []

    for N in as_list(cfg.get("lattice", "N")):
        ph = UnitPhase.lattice(int(N))
        for a in alphas:
            a = _r(a)
            for m, n in itertools.product(R, R):
                for j1, j2 in itertools.product(js, js):
                    cases.append(W.check_deformed_relations(m, n, j1, j2, a, ph, tol,
                                                            perturbation=perturb if fault_rel.startswith("witt_deformed") else 0.0))
                    cases.append(W.check_antisymmetry(m, n, j1, j2, a, ph, tol))
                cases.append(W.check_undeformed_relations(m, n, a, ph, tol))
                for j in js:
                    cases.append(W.check_coupling(m, n, j, a, ph, tol))
                    cases.append(W.check_K_relations(m, n, j, a, ph, tol))
                    for d in deltas:
                        cases.append(W.check_T_tilde_relations(m, n, d, j, a, ph, tol))
            for n in R:
                for j in js:
                    cases.append(W.check_A_specialization(n, j, a, ph, tol))
                    cases.append(W.check_implicit_additive(n, j, a, ph, tol))
                    cases.append(W.check_symmetry(n, j, a, ph, tol))
        for m, n in itertools.product(R, R):
            for b in bs:
                try:
                    cases.append(W.check_qbracket_closure(n, m, a_param, b, ph, tol))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc

    hopf = cfg.get("hopf")
    hmax = int(hopf.get("m_max", mmax))
    hjs = [int(j) for j in as_list(hopf.get("j", js))]
    HR = range(-hmax, hmax + 1)
    for N in as_list(hopf.get("N", [])):
        ph = UnitPhase.lattice(int(N))
        for a in alphas:
            for m, n in itertools.product(HR, HR):
                for j1, j2 in itertools.product(hjs, hjs):
                    cases.append(W.check_hopf_homomorphism(m, n, j1, j2, _r(a), ph, tol))

    extra = {"fault_injection": {"relation": fault_rel, "perturbation": perturb}} if perturb else None
    return _finish("algebra-check", cfg, cases, extra)


# ----------------------------------------------------------------------------


def _random_real_field(rng, N: int, window: int, kind: str) -> FieldCoefficients:
    c = {0: complex(rng.normal())}
    for n in range(1, window + 1):
        z = complex(rng.normal(), rng.normal())
        c[n], c[-n] = z, z.conjugate()
    return FieldCoefficients(c, kind)


def cmd_kinematics_check(cfg: RunConfig):
    """Hermiticity, multiplicativity, locality, undeformed commutators and the FP/Ehrenfest identity."""
    tol = cfg.tolerances
    p = cfg.get("params")
    rng = np.random.default_rng(cfg.seed)
    samples = int(cfg.doc.get("samples", 5) or 0)
    fspec, xspec = cfg.get("fields", "f", "cos"), cfg.get("fields", "X", "sin")
    cases: list[W.CheckReport] = []

    for N in as_list(cfg.get("lattice", "N")):
        N = int(N)
        ph = UnitPhase.lattice(N)
        window = max(1, N // 4)
        try:
            f = FieldCoefficients.from_spec(fspec, N)
            X = FieldCoefficients.from_spec(xspec, N, kind="vector")
        except (ValueError, ContractError) as exc:
            raise ConfigError(f"bad field specification: {exc}") from exc
        g = _random_real_field(rng, N, window, "function")
        base = {"N": N}
        Qf, Qg = quantize_position(f, ph), quantize_position(g, ph)
        fg = FieldCoefficients(f.times(g).on_lattice(N))
        cases.append(W.CheckReport("position_hermitian", base, Qf.hermiticity_residual(), 1e-12))
        cases.append(W.CheckReport("position_commute", base, W.commutator(Qf, Qg).max_abs(), 1e-12))
        cases.append(W.CheckReport("position_product", base, (Qf @ Qg).distance(quantize_position(fg, ph)), 1e-12))
        pos = np.diag(Qf.position_matrix())
        cases.append(W.CheckReport("position_pointwise", base, float(np.max(np.abs(pos - f.samples(N)))), 1e-12))

        if N >= 8:
            # undeformed commutator contract [P(X), Q(f)] = -i Q(X f') on wrap-free columns
            mono = FieldCoefficients({1: 1, -1: 1})
            Xm = FieldCoefficients({1: 1, -1: 1}, "vector")
            for a, D in itertools.product(as_list(p.get("alpha", [0.0])), as_list(p.get("D", [0.0]))):
                P0 = quantize_undeformed(Xm, a, D, ph)
                lhs = W.commutator(P0, quantize_undeformed(mono, a, D, ph))
                rhs = -1j * quantize_undeformed(Xm.times(mono.derivative(), "function"), a, D, ph)
                cols = W.wrap_free_columns(N, [-2, -1, 0, 1, 2])
                cases.append(W.CheckReport("undeformed_commutator", {**base, "alpha": _r(a), "D": _r(D)},
                                           lhs.distance(rhs, cols), tol["kinematics"]))

        for k, a, D in itertools.product(as_list(p.get("k", [2])), as_list(p.get("alpha", [0.0])),
                                         as_list(p.get("D", [0.0]))):
            key = {**base, "k": int(k), "alpha": _r(a), "D": _r(D)}
            try:
                kin = KinematicsParams(float(a), float(D), int(k), ph)
            except (DegenerateParameterError, ContractError) as exc:
                for rel in ("momentum_hermitian", "momentum_locality", "ehrenfest_equivalence",
                            "probability_conservation"):
                    cases.append(W.CheckReport(rel, key, None, tol["kinematics"], applicable=False, note=str(exc)))
                continue
            PX = quantize_momentum(X, kin)
            cases.append(W.CheckReport("momentum_hermitian", key, PX.hermiticity_residual(), 1e-12))
            # single-mode locality: offsets 0 and +-k only
            loc = 0.0
            for n in range(-window, window + 1):
                single = FieldCoefficients({n: 1} if n == 0 else {n: 0.5, -n: 0.5}, "vector")
                rows = position_support(quantize_momentum(single, kin))
                allowed = {0, int(k), -int(k)}
                allowed = {((o + N // 2) % N) - N // 2 for o in allowed}
                loc = max(loc, float(sum(len(r - allowed) for r in rows)))
            cases.append(W.CheckReport("momentum_locality", key, loc, 0.0))
            dp = DynParams(kin)
            fp_res, cons = 0.0, 0.0
            for _ in range(samples):
                psi = WaveFunction.random(N, rng)
                e, fpk = rho_dot_ehrenfest(psi, dp), rho_dot_fokker_planck(psi, dp)
                fp_res = max(fp_res, float(np.max(np.abs(e - fpk))))
                cons = max(cons, abs(float(e.sum())), abs(float(fpk.sum())))
            cases.append(W.CheckReport("ehrenfest_equivalence", {**key, "samples": samples}, fp_res, tol["fp_ehrenfest"]))
            cases.append(W.CheckReport("probability_conservation", {**key, "samples": samples}, cons, tol["conservation"]))
    return _finish("kinematics-check", cfg, cases)


# ----------------------------------------------------------------------------


def initial_state(spec, N: int, seed: int) -> WaveFunction:
    """``{"preset": name, ...}`` with names gaussian-bump, plane-wave, constant, random-smooth."""
    if isinstance(spec, str):
        spec = {"preset": spec}
    spec = dict(spec)
    name = spec.pop("preset", "gaussian-bump")
    normalize = bool(spec.pop("normalize", True))
    try:
        if name == "gaussian-bump":
            return WaveFunction.gaussian_bump(N, normalize=normalize, **spec)
        if name == "plane-wave":
            return WaveFunction.plane_wave(N, int(spec.get("m", 1)), normalize=normalize)
        if name == "constant":
            return WaveFunction.constant(N, spec.get("value", 1.0), normalize=normalize)
        if name == "random-smooth":
            return WaveFunction.random_smooth(N, np.random.default_rng(seed), normalize=normalize, **spec)
    except TypeError as exc:
        raise ConfigError(f"bad initial state options: {exc}") from exc
    raise ConfigError(f"unknown initial preset {name!r}")


def _dyn_params(cfg: RunConfig, N: int) -> DynParams:
    p = cfg.get("params")
    integ = cfg.get("integrator")
    try:
        kin = KinematicsParams(float(p.get("alpha", 0.0)), float(p.get("D", 0.0)), int(p.get("k", 2)),
                               UnitPhase.lattice(N))
        return DynParams(kin, RShift(**p.get("R", {})), dt=float(integ.get("dt", 1e-3)),
                         t_end=float(integ.get("t_end", 1.0)), guard_eps=integ.get("guard_eps"),
                         backend=integ.get("backend", "stencil"))
    except (DegenerateParameterError, ContractError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_evolve(cfg: RunConfig):
    """One run: trajectory CSV, diagnostics JSON, invariant checks."""
    from ..errors import ConsistencyError

    tol = cfg.tolerances
    N = int(cfg.get("lattice", "N"))
    params = _dyn_params(cfg, N)
    init_spec = cfg.get("fields", "initial", {"preset": "gaussian-bump"})
    psi0 = initial_state(init_spec, N, cfg.seed)
    record = int(cfg.get("integrator", "record_every", 1) or 1)
    traj = integrate(EvolutionState(psi0), params, record_every=record)
    summary = traj.summary()
    checks = {}
    if not traj.singular:
        checks["conservation_drift"] = {"value": summary["conservation_drift"], "tol": tol["drift"]}
        checks["fp_ehrenfest_residual"] = {"value": summary["fp_ehrenfest_residual"], "tol": tol["fp_ehrenfest"]}
    if traj.backend_residual is not None:
        checks["backend_residual"] = {"value": traj.backend_residual, "tol": tol["backend"]}
    preset = init_spec.get("preset") if isinstance(init_spec, dict) else init_spec
    if preset == "plane-wave" and params.R.is_identity and not traj.singular:
        m = int(init_spec.get("m", 1)) if isinstance(init_spec, dict) else 1
        E = plane_wave_energy(m, params)
        t = traj.times[-1]
        err = float(np.max(np.abs(traj.states[-1] - np.exp(-1j * E * t) * psi0.samples)))
        checks["phase_rotation"] = {"value": err, "tol": tol["phase_rotation"], "energy": E}
    for c in checks.values():
        c["passed"] = bool(c["value"] <= c["tol"])
    ok = all(c["passed"] for c in checks.values())
    report = {
        "command": "evolve",
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "passed": ok,
        "diagnostics": summary,
        "checks": dict(sorted(checks.items())),
    }
    out = cfg.output
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_csv(traj, out / "trajectory.csv")
        write_summary(traj, out / "diagnostics.json", {"checks": report["checks"], "seed": cfg.seed})
        report["files"] = ["trajectory.csv", "diagnostics.json"]
    return (EXIT_OK if ok else EXIT_FAIL), report


# ----------------------------------------------------------------------------


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _ladder_verdict(values) -> bool:
    return bool(all(b < a for a, b in zip(values, values[1:])))


def cmd_limit_study(cfg: RunConfig):
    """N-doubling ladders: generator entries, momentum operators or trajectories against the continuum."""
    st = cfg.get("study")
    p = cfg.get("params")
    kind = st.get("kind", "operator")
    Ns = [int(N) for N in as_list(st.get("N", [16, 32, 64, 128, 256]))]
    k = int(p.get("k", 2))
    alpha = float(p.get("alpha", 0.0))
    entries, errs, used = [], [], []

    if kind in ("operator", "momentum"):
        modes = [int(m) for m in as_list(st.get("modes", [-2, -1, 0, 1, 2]))]
        n = int(st.get("n", 1))
        D = float(as_list(p.get("D", 0.0))[0])
        for N in Ns:
            ph = UnitPhase.lattice(N)
            entry = {"N": N, "phi0": ph.phi0}
            try:
                if kind == "operator":
                    _, e = W.limit_entry_errors(n, k, alpha, [N], modes)
                    err = float(e[0])
                else:
                    kin = KinematicsParams(alpha, D, k, ph)
                    X = FieldCoefficients.preset("cos", kind="vector")
                    cols = np.isin(W.canonical_modes(N), modes)
                    Pq = quantize_momentum(X, kin)
                    P0 = quantize_undeformed(X, alpha, D, ph)
                    err = Pq.distance(P0, cols)
            except (DegenerateParameterError, ContractError, ValueError) as exc:
                entry.update({"applicable": False, "note": str(exc)})
                entries.append(entry)
                continue
            entry.update({"applicable": True, "error": err})
            entries.append(entry)
            errs.append(err)
            used.append(ph.phi0)
        verdict = {"monotone": _ladder_verdict(errs) if len(errs) > 1 else None}
        if len(errs) >= 2 and all(e > 0 for e in errs):
            s = _slope(used, errs)
            verdict.update({"slope_vs_phi0": s, "expected_slope": 2.0, "slope_ok": bool(abs(s - 2.0) <= 0.1)})
        passed = bool(verdict.get("monotone") is not False and verdict.get("slope_ok", True))
        extra = {"n": n, "modes": modes, "k": k, "alpha": alpha}
    elif kind == "trajectory":
        T = float(st.get("T", 0.2))
        M = int(st.get("reference_M", 512))
        Ds = [float(d) for d in as_list(p.get("D", 0.0))]
        verdict = {}
        passed = True
        for D in Ds:
            gaps = trajectory_gaps(Ns, D, T, M, alpha=alpha, k=k)
            for N, g in zip(Ns, gaps):
                entries.append({"N": N, "D": D, "applicable": g is not None, "error": g})
            vals = [g for g in gaps if g is not None]
            verdict[f"D={D}"] = {"monotone": _ladder_verdict(vals)}
            passed = passed and verdict[f"D={D}"]["monotone"]
        extra = {"T": T, "reference_M": M, "k": k, "alpha": alpha}
    else:
        raise ConfigError(f"unknown study kind {kind!r}")

    report = {
        "command": "limit-study",
        "seed": cfg.seed,
        "config": cfg.to_json(),
        "kind": kind,
        "passed": passed,
        "ladder": entries,
        "verdict": verdict,
        **extra,
    }
    return (EXIT_OK if passed else EXIT_FAIL), report


def lattice_dt(N: int) -> float:
    """Step small enough for the stiff ``1/sin(phi0)**2`` scale of the stencil."""
    return min(1e-3, 0.5 * math.sin(2 * math.pi / N) ** 2)


def trajectory_gaps(Ns, D: float, T: float, M: int = 512, alpha: float = 0.0, k: int = 2,
                    width: float = 0.5, amplitude: float = 0.5):
    """Max-norm gaps between lattice and continuum trajectories started from the same bump.

    The bump is not normalized; both equations are homogeneous of degree one.
    """
    prof = lambda x: bump_profile(x, width, amplitude)  # noqa: E731
    ref = continuum_reference(prof, alpha, D, T, M=M)
    gaps = []
    for N in Ns:
        if M % N:
            raise ConfigError(f"reference grid {M} is not a multiple of N={N}")
        try:
            params = DynParams.make(N, k, alpha, D, dt=lattice_dt(N), t_end=T)
        except (DegenerateParameterError, ContractError):
            gaps.append(None)
            continue
        psi = WaveFunction.lattice(prof(2 * np.pi * np.arange(N) / N))
        traj = integrate(EvolutionState(psi), params, check_backends=False, record_every=10**9)
        gaps.append(None if traj.singular else float(np.max(np.abs(traj.states[-1] - ref.at_lattice(N)))))
    return gaps


COMMANDS = {
    "algebra-check": cmd_algebra_check,
    "kinematics-check": cmd_kinematics_check,
    "evolve": cmd_evolve,
    "limit-study": cmd_limit_study,
}
