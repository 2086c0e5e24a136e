import csv
import json
import subprocess
import sys

import pytest

from qwitt.cli import RunConfig
from qwitt.cli.config import ConfigError, parse_override
from qwitt.cli.main import main
from qwitt.dynamics.integrate import CSV_HEADER

SMALL_ALGEBRA = ["lattice.N=[8]", "params.m_max=2", "params.j=[1,2]", "params.alpha=[0.3]",
                 "params.delta=[1]", "params.b=[1]", "hopf.N=[6]", "hopf.m_max=1", "hopf.j=[1]"]


def run(argv, capsys):
    status = main(argv)
    out = capsys.readouterr()
    return status, (json.loads(out.out) if out.out.strip() else None), out.err


class TestConfig:
    def test_defaults_fill_in(self):
        cfg = RunConfig.build("evolve")
        assert cfg.get("lattice", "N") == 64 and cfg.seed == 0
        assert cfg.tolerances["drift"] == 1e-8

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="params.beta"):
            RunConfig.build("evolve", {"params": {"beta": 1}})

    def test_override_parsing(self):
        assert parse_override("lattice.N=[8, 12]") == (["lattice", "N"], [8, 12])
        assert parse_override("fields.initial.preset=plane-wave") == (["fields", "initial", "preset"], "plane-wave")
        with pytest.raises(ConfigError):
            parse_override("lattice.N")

    def test_nu_sets_k(self):
        assert RunConfig.build("evolve", {"params": {"nu": 2}}).get("params", "k") == 4
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", {"params": {"nu": 2, "k": 2}})

    def test_command_mismatch(self):
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", {"command": "algebra-check"})

    def test_evolve_needs_scalars(self):
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", overrides=["params.alpha=[0.1,0.2]"])
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", overrides=["params.R.k1=0.5"])
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", overrides=["integrator.backend=\"fft\""])

    def test_bad_tolerance_key(self):
        with pytest.raises(ConfigError):
            RunConfig.build("evolve", {"tolerances": {"nope": 1.0}})


class TestAlgebra:
    def test_passes(self, capsys):
        status, rep, _ = run(["algebra-check", *SMALL_ALGEBRA], capsys)
        assert status == 0 and rep["passed"]
        s = rep["summary"]
        assert s["failed"] == 0 and s["cases"] == len(rep["cases"])
        assert "witt_deformed_mixed" in s["relations"] and "hopf" in s["relations"]

    def test_odd_lattice(self, capsys):
        status, rep, _ = run(["algebra-check", *SMALL_ALGEBRA, "lattice.N=[7]", "hopf.N=[]"], capsys)
        assert status == 0 and rep["summary"]["cases"] > 0

    def test_fault_injection(self, capsys):
        status, rep, _ = run(["algebra-check", *SMALL_ALGEBRA, "fault_injection.perturbation=1e-6"], capsys)
        assert status == 1 and not rep["passed"]
        keys = rep["summary"]["failed_keys"]
        assert keys and all(k.startswith("witt_deformed") for k in keys)
        assert rep["fault_injection"]["perturbation"] == 1e-6

    def test_reproducible(self, capsys, tmp_path):
        args = ["algebra-check", *SMALL_ALGEBRA, "samples=2", "--quiet"]
        path = tmp_path / "report.json"
        assert main([*args, "--seed", "5", "--out", str(tmp_path)]) == 0
        first = path.read_bytes()
        assert main([*args, "--seed", "5", "--out", str(tmp_path)]) == 0
        assert path.read_bytes() == first
        main([*args, "--seed", "6", "--out", str(tmp_path)])
        assert path.read_bytes() != first

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"lattice": {"N": [8]}, "params": {"m_max": 1, "j": [1], "alpha": [0.0]},
                                    "hopf": {"N": []}}))
        status, rep, _ = run(["algebra-check", "--config", str(path)], capsys)
        assert status == 0 and rep["config"]["params"]["m_max"] == 1


class TestKinematics:
    def test_passes(self, capsys):
        status, rep, _ = run(["kinematics-check", "lattice.N=[8]", "params.alpha=[0.3]", "params.D=[0.2]",
                              "params.k=[2,4]", "samples=2"], capsys)
        assert status == 0
        rels = rep["summary"]["relations"]
        assert "ehrenfest_equivalence" in rels and "momentum_locality" in rels
        # k = 4 is degenerate on N = 8 and must be reported, not dropped
        assert rep["summary"]["inapplicable"] > 0


class TestEvolve:
    def test_outputs(self, capsys, tmp_path):
        status, rep, _ = run(["evolve", "lattice.N=16", "integrator.t_end=0.05", "integrator.record_every=10",
                              "--out", str(tmp_path)], capsys)
        assert status == 0 and rep["passed"]
        assert set(rep["checks"]) == {"conservation_drift", "fp_ehrenfest_residual", "backend_residual"}
        with (tmp_path / "trajectory.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CSV_HEADER
        assert len(rows) == 1 + 16 * 6
        diag = json.loads((tmp_path / "diagnostics.json").read_text())
        assert diag["singular"] is False and diag["steps"] == 50
        assert json.loads((tmp_path / "report.json").read_text()) == rep

    def test_plane_wave_rotation(self, capsys):
        status, rep, _ = run(["evolve", "lattice.N=16", "params.alpha=0.3", "integrator.t_end=0.1",
                              'fields.initial={"preset": "plane-wave", "m": 2}'], capsys)
        assert status == 0 and rep["checks"]["phase_rotation"]["value"] < 1e-10

    def test_guard_reports_singularity(self, capsys):
        status, rep, _ = run(["evolve", "lattice.N=16", "integrator.guard_eps=0.5", "integrator.t_end=0.05"],
                             capsys)
        assert status == 0
        assert rep["diagnostics"]["singular"] and rep["diagnostics"]["singular_site"] is not None

    def test_spectral_backend_and_shift(self, capsys):
        status, rep, _ = run(["evolve", "lattice.N=16", "integrator.t_end=0.02", "integrator.backend=spectral",
                              'params.R={"a1": 1.0, "k1": 0, "a2": 0.1, "k2": 1}'], capsys)
        assert status == 0 and rep["diagnostics"]["params"]["backend"] == "spectral"

    def test_degenerate_k(self, capsys):
        status, _, err = run(["evolve", "lattice.N=8", "params.k=4"], capsys)
        assert status == 2 and "config error" in err


class TestLimitStudy:
    def test_operator(self, capsys):
        status, rep, _ = run(["limit-study"], capsys)
        assert status == 0 and rep["verdict"]["slope_ok"]

    def test_momentum(self, capsys):
        status, rep, _ = run(["limit-study", "study.kind=momentum"], capsys)
        assert status == 0 and abs(rep["verdict"]["slope_vs_phi0"] - 2) < 0.1

    def test_degenerate_rung(self, capsys):
        status, rep, _ = run(["limit-study", "params.k=8", "study.N=[16,128,256,512,1024]"], capsys)
        assert rep["ladder"][0]["applicable"] is False
        assert all(e["applicable"] for e in rep["ladder"][1:])
        assert status == 0

    def test_trajectory(self, capsys):
        status, rep, _ = run(["limit-study", "study.kind=trajectory", "study.N=[16,32]", "study.T=0.05",
                              "study.reference_M=128", "params.alpha=0.0"], capsys)
        assert status == 0 and rep["verdict"]["D=0.0"]["monotone"]


def test_unknown_key_exit_code(capsys):
    status, rep, err = run(["evolve", "params.bogus=1"], capsys)
    assert status == 2 and rep is None and "bogus" in err


def test_unreadable_config(capsys, tmp_path):
    status, _, err = run(["evolve", "--config", str(tmp_path / "missing.json")], capsys)
    assert status == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qwitt", "evolve", "params.nope=1"], capture_output=True, text=True)
    assert proc.returncode == 2
