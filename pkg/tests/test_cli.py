"""
Tests for the command-line runner.
"""

import json

import pytest

from bell_decoherence.core import __version__
from bell_decoherence.main import build_parser, main


def write_json(path, data):
    path.write_text(json.dumps(data), encoding='utf-8')
    return str(path)


def write_trace(path, rows):
    lines = ["t,method,state,concurrence,stderr"] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding='utf-8')
    return str(path)


@pytest.fixture
def montecarlo_scenario(tmp_path):
    return write_json(tmp_path / "mc.json", {
        "geometry": "dephasing",
        "state": "psi-,phi+",
        "noise.kind": "ou",
        "noise.sigma": 1.0,
        "noise.tc": 1.0,
        "gamma": 0.5,
        "t_max": 0.4,
        "n_points": 3,
        "methods": "analytic,montecarlo",
        "trajectories": 2000,
        "seed": 7,
    })


class TestRun:
    """bell-decoherence run."""

    def test_preset_to_stdout(self, capsys):
        """A preset run prints the CSV trace."""
        assert main(["run", "fig2"]) == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0] == "t,method,state,concurrence,stderr"
        assert len(lines) == 1 + 2 * 4 * 151
        assert lines[1].startswith("0,analytic,")

    def test_short_time(self, tmp_path):
        """Over a very short window every state stays fully entangled."""
        path = write_json(tmp_path / "short.json", {
            "geometry": "isotropic", "state": "all", "noise.kind": "white", "noise.T": 1.0,
            "gamma": 0.3, "t_max": 0.001, "n_points": 5, "methods": "analytic",
        })
        out = tmp_path / "short.csv"
        assert main(["run", path, "--out", str(out)]) == 0
        rows = out.read_text(encoding='utf-8').splitlines()[1:]
        assert len(rows) == 20
        assert all(abs(float(row.split(",")[3]) - 1.0) < 1e-3 for row in rows)

    def test_threads_do_not_change_output(self, montecarlo_scenario, tmp_path):
        """Monte Carlo output is byte-identical for any thread count."""
        serial, threaded = tmp_path / "serial.csv", tmp_path / "threaded.csv"
        assert main(["run", montecarlo_scenario, "--out", str(serial), "--threads", "1"]) == 0
        assert main(["run", montecarlo_scenario, "--out", str(threaded), "--threads", "3"]) == 0
        assert serial.read_bytes() == threaded.read_bytes()

    def test_invalid_config(self, tmp_path, capsys):
        """Validation failures exit with 2 and name the key."""
        path = write_json(tmp_path / "bad.json", {
            "geometry": "dephasing", "state": "all", "noise.kind": "white", "noise.T": 1.0,
            "gamma": 1.5, "t_max": 1.0, "n_points": 3, "methods": "analytic",
        })
        assert main(["run", path]) == 2
        assert "gamma" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        """Unknown files and presets exit with 2."""
        assert main(["run", str(tmp_path / "absent.json")]) == 2

    def test_bad_thread_count(self):
        """At least one worker thread is required."""
        assert main(["run", "fig1", "--threads", "0"]) == 2

    def test_method_geometry_mismatch(self, tmp_path, capsys):
        """Closed forms do not cover transverse OU noise."""
        path = write_json(tmp_path / "mismatch.json", {
            "geometry": "transverse", "state": "all", "noise.kind": "ou", "noise.sigma": 1.0,
            "noise.tc": 1.0, "t_max": 1.0, "n_points": 3, "methods": "analytic",
        })
        assert main(["run", path]) == 3
        assert "analytic" in capsys.readouterr().err

    def test_qsba_without_omega(self, tmp_path):
        """qsba with omega = 0 is a configuration error."""
        path = write_json(tmp_path / "qsba.json", {
            "geometry": "transverse", "state": "phi+", "noise.kind": "ou", "noise.sigma": 1.0,
            "noise.tc": 1.0, "t_max": 1.0, "n_points": 3, "methods": "qsba",
        })
        assert main(["run", path]) == 2


class TestCompare:
    """bell-decoherence compare."""

    @pytest.fixture
    def traces(self, tmp_path):
        analytic = write_trace(tmp_path / "analytic.csv", [
            (0, "analytic", "psi_minus", 1, ""),
            (0.5, "analytic", "psi_minus", 0.5, ""),
        ])
        cumulant = write_trace(tmp_path / "cumulant.csv", [
            (0, "cumulant2", "psi_minus", 1, ""),
            (0.5, "cumulant2", "psi_minus", 0.6, ""),
        ])
        return analytic, cumulant

    def test_within_tolerance(self, traces, capsys):
        """Agreement within the tolerance exits with 0."""
        assert main(["compare", *traces, "--tol", "0.2"]) == 0
        out = capsys.readouterr().out
        assert "psi_minus,analytic,cumulant2,0.1" in out
        assert out.rstrip().endswith("OK")

    def test_tolerance_exceeded(self, traces):
        """Deviations above the tolerance exit with 1."""
        assert main(["compare", *traces, "--tol", "0.05"]) == 1

    def test_grid_mismatch(self, traces, tmp_path):
        """Different time grids exit with 5."""
        other = write_trace(tmp_path / "other.csv", [
            (0, "montecarlo", "psi_minus", 1, 0),
            (0.25, "montecarlo", "psi_minus", 0.7, 0.01),
        ])
        assert main(["compare", traces[0], other]) == 5

    def test_across_states(self, tmp_path, capsys):
        """--across-states pairs one method between two initial states."""
        path = write_trace(tmp_path / "states.csv", [
            (0, "analytic", "psi_plus", 1, ""),
            (0.5, "analytic", "psi_plus", 0.2, ""),
            (0, "analytic", "phi_plus", 1, ""),
            (0.5, "analytic", "phi_plus", 0.5, ""),
        ])
        assert main(["compare", path, "--across-states"]) == 0
        assert "psi_plus/phi_plus,analytic,analytic,0.3" in capsys.readouterr().out
        assert main(["compare", path, "--across-states", "--tol", "0.1"]) == 1

    def test_missing_file(self, tmp_path):
        """Unreadable trace files exit with 2."""
        assert main(["compare", str(tmp_path / "absent.csv")]) == 2


class TestPresets:
    """bell-decoherence presets."""

    def test_list(self, capsys):
        """Every preset name is printed."""
        assert main(["presets", "list"]) == 0
        assert capsys.readouterr().out.split() == [f"fig{k}" for k in range(1, 7)]

    def test_show(self, capsys):
        """A preset is shown as flat JSON."""
        assert main(["presets", "show", "fig4"]) == 0
        assert json.loads(capsys.readouterr().out)["noise.tc"] == 10.0

    def test_show_unknown(self):
        """Unknown presets exit with 2."""
        assert main(["presets", "show", "fig0"]) == 2
        assert main(["presets", "show"]) == 2

    def test_version(self, capsys):
        """--version prints the package version."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--version"])
        assert __version__ in capsys.readouterr().out
