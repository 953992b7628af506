import math
import re
import subprocess
import sys

import numpy as np
import pytest

from plots import PlotSpec, SchemaError, render


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row)
              for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def fidelity_csv(tmp_path):
    rows = []
    for ratio in (0.1, 0.05, 0.025):
        deficit = 30.0 * ratio**2
        rows.append([2, ratio, 2, 1 - deficit, 1 - deficit])
        rows.append([2, ratio, 1, math.exp(-8 * (1 - math.cos(ratio))), 0.5])
    return write_csv(tmp_path / "fidelity.csv",
                     ["j", "ratio", "regime", "probability_analytic",
                      "probability_series"], rows)


@pytest.fixture
def scatter_csv(tmp_path):
    E, V0 = 1.0, 2.0
    beta = math.sqrt(2 * (V0 - E))
    rows = []
    for a in np.linspace(2.0, 5.0, 6):
        T = math.exp(-2 * beta * a) * 3.2
        rows.append([float(a), E, V0, T * (1 + 0.01 * math.sin(a)), T])
    return write_csv(tmp_path / "scatter.csv",
                     ["a", "E", "V0", "T_numeric", "T_analytic"], rows)


@pytest.fixture
def trajectory_csv(tmp_path):
    rows = []
    for t in np.linspace(0, 100, 60):
        rows.append([float(t), 20 * math.sin(t / 40), 0.2, 1.0, 0.1, 0.9, 3.5])
    return write_csv(tmp_path / "traj.csv",
                     ["t", "x_mean", "p_mean", "norm", "p_left", "p_right",
                      "spread"], rows)


@pytest.fixture
def kinematics_csv(tmp_path):
    rows = []
    base = 900.0
    for i in range(1, 4):
        for j in range(i + 1, 5):
            rows.append([i, j, base + 6.8 * (i - 1), 6.8 * (j - i),
                         6.81 * (j - i)])
    return write_csv(tmp_path / "kin.csv",
                     ["i", "j", "T_i", "dT_ji_analytic", "dT_ji_measured"], rows)


class TestRenderKinds:
    def test_fidelity_curve(self, fidelity_csv, tmp_path):
        out = tmp_path / "fid.png"
        render(PlotSpec(str(fidelity_csv), "fidelity-curve", str(out)))
        assert out.exists() and out.stat().st_size > 0

    def test_transmission_loglinear(self, scatter_csv, tmp_path):
        out = tmp_path / "sc.png"
        meta = render(PlotSpec(str(scatter_csv), "transmission-loglinear", str(out)))
        assert out.exists() and out.stat().st_size > 0
        beta = math.sqrt(2.0)
        assert meta["fitted_slope"] == pytest.approx(-2 * beta, rel=0.05)
        assert meta["expected_slope"] == pytest.approx(-2 * beta, rel=1e-12)

    def test_trajectory(self, trajectory_csv, tmp_path):
        out = tmp_path / "tr.png"
        render(PlotSpec(str(trajectory_csv), "trajectory", str(out)))
        assert out.exists() and out.stat().st_size > 0

    def test_arrival_ladder(self, kinematics_csv, tmp_path):
        out = tmp_path / "kin.png"
        render(PlotSpec(str(kinematics_csv), "arrival-ladder", str(out)))
        assert out.exists() and out.stat().st_size > 0

    def test_idempotent_and_input_untouched(self, scatter_csv, tmp_path):
        before = scatter_csv.read_bytes()
        out = tmp_path / "sc.png"
        render(PlotSpec(str(scatter_csv), "transmission-loglinear", str(out)))
        render(PlotSpec(str(scatter_csv), "transmission-loglinear", str(out)))
        assert scatter_csv.read_bytes() == before


class TestSchemaErrors:
    def test_missing_column_named(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv", ["a", "E", "V0", "T_numeric"],
                        [[1.0, 1.0, 2.0, 0.5]])
        with pytest.raises(SchemaError) as err:
            render(PlotSpec(str(bad), "transmission-loglinear", str(tmp_path / "x.png")))
        assert "T_analytic" in str(err.value)

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotSpec("x.csv", "pie-chart", "y.png")


class TestAgainstHarness:
    """Consume the primary package through its CLI, its external interface."""

    def test_fitted_slope_matches_harness_fit(self, tmp_path):
        cfg = tmp_path / "scatter.cfg"
        cfg.write_text(
            "experiment = scatter\nE = 1.0\nV0 = 2.0\npoints = 4\n"
            "n = 2048\noutput = scatter.csv\n"
        )
        proc = subprocess.run(
            [sys.executable, "-m", "statelock", "run", str(cfg)],
            capture_output=True, text=True, timeout=500,
            env={"STATELOCK_OUTDIR": str(tmp_path), "PATH": "/usr/bin:/bin"},
        )
        assert proc.returncode == 0, proc.stderr
        match = re.search(r"fitted_slope=([-\d.e+]+)", proc.stdout)
        assert match, proc.stdout
        harness_slope = float(match.group(1))

        meta = render(PlotSpec(str(tmp_path / "scatter.csv"),
                               "transmission-loglinear",
                               str(tmp_path / "scatter.png")))
        # agreement to three significant digits
        assert float(f"{meta['fitted_slope']:.3g}") == float(f"{harness_slope:.3g}")

    def test_cli_entry_point(self, scatter_csv, tmp_path, capsys):
        from plots.render import main

        rc = main([str(scatter_csv), "transmission-loglinear",
                   str(tmp_path / "out.png")])
        assert rc == 0
        assert "fitted_slope" in capsys.readouterr().out
