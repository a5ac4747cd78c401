"""Rendering tests; every input is produced by the simulation CLI.

The phase test probes actual pixels: the three regime colors must appear,
the two boundary-regime colors must not, and both boundary lines must hit
their expected positions computed from the pinned style geometry.
"""

import json
import subprocess
import sys
from pathlib import Path

import matplotlib
import matplotlib.image as mpimg
import numpy as np
import pytest

import plots

PLOTS_PY = Path(plots.__file__).resolve()


def _cli(*args) -> None:
    subprocess.run([sys.executable, "-m", "herdlab", *map(str, args)],
                   check=True, capture_output=True, text=True)


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("plotdata")


@pytest.fixture(scope="session")
def sweep_csv(data_dir):
    out = data_dir / "sweep.csv"
    _cli("sweep", "--alpha-list", "2.0", "--alpha-tilde-list", "1.5,2.5,3.2",
         "--trials", 40, "--horizon", 120, "--herd-n", 1000, "--seed", 42,
         "--out", out)
    return out


@pytest.fixture(scope="session")
def path_csv(data_dir):
    out = data_dir / "path.csv"
    _cli("path", "--alpha", 2.0, "--alpha-tilde", 2.0, "--horizon", 100_000,
         "--out", out)
    return out


@pytest.fixture(scope="session")
def trials_csv(data_dir):
    out = data_dir / "trials.csv"
    _cli("simulate", "--alpha", 2.0, "--alpha-tilde", 1.5, "--trials", 300,
         "--horizon", 400, "--seed", 42,
         "--out", data_dir / "summary.json", "--per-trial-out", out)
    return out


@pytest.fixture(scope="session")
def tau_csv(data_dir):
    out = data_dir / "tau.csv"
    _cli("tau", "--alpha", 2.0, "--alpha-tilde", 2.5, "--priors", "0.5,0.2",
         "--trials", 200, "--horizon", 400, "--seed", 42, "--out", out)
    return out


def _rgb(hex_color: str) -> np.ndarray:
    return np.array([int(hex_color[i:i + 2], 16) for i in (1, 3, 5)]) / 255.0


def _has_color(img: np.ndarray, hex_color: str, tol: float) -> bool:
    return bool((np.abs(img[..., :3] - _rgb(hex_color)).max(axis=-1) <= tol).any())


def _pixel_of(x, y, xlim, ylim):
    """Data point to (row, col) under the pinned style geometry."""
    rc = matplotlib.rc_params_from_file(str(plots._STYLE),
                                        use_default_template=False)
    width = rc["figure.figsize"][0] * rc["savefig.dpi"]
    height = rc["figure.figsize"][1] * rc["savefig.dpi"]
    left, right = rc["figure.subplot.left"], rc["figure.subplot.right"]
    bottom, top = rc["figure.subplot.bottom"], rc["figure.subplot.top"]
    col = (left + (right - left) * (x - xlim[0]) / (xlim[1] - xlim[0])) * width
    row = height - (bottom + (top - bottom) * (y - ylim[0]) / (ylim[1] - ylim[0])) * height
    return int(round(row)), int(round(col))


def test_phase_shows_exactly_three_regimes_with_boundary_lines(sweep_csv, tmp_path):
    out = tmp_path / "phase.png"
    summary = plots.render(plots.PlotSpec(str(sweep_csv), "phase", str(out)))
    assert summary["cells"] == 3
    assert summary["failed_cells"] == 0
    assert summary["regimes"] == ["AntiCondescending", "EfficientWindow",
                                  "OverCondescending"]

    img = mpimg.imread(out)
    for label in summary["regimes"]:
        assert _has_color(img, plots.REGIME_COLORS[label], 0.02), label
    for label in ("BoundaryZero", "BoundaryOne"):
        assert not _has_color(img, plots.REGIME_COLORS[label], 0.04), label

    # both boundary lines pass through x=1.7, away from any cell marker
    for point, color in (((1.7, 1.7), plots.BOUNDARY_EQUAL_COLOR),
                         ((1.7, 2.7), plots.BOUNDARY_PLUS_ONE_COLOR)):
        row, col = _pixel_of(*point, summary["xlim"], summary["ylim"])
        window = img[row - 5:row + 6, col - 5:col + 6, :3]
        deviation = np.abs(window - _rgb(color)).max(axis=-1).min()
        assert deviation <= 0.12, (point, color, deviation)


def test_path_loglog_slope_matches_decay_exponent(path_csv, tmp_path):
    out = tmp_path / "path.png"
    summary = plots.render(plots.PlotSpec(str(path_csv), "path_loglog", str(out)))
    assert out.stat().st_size > 0
    assert summary["reference_slope"] == -0.5
    assert summary["fit_window"] == [1000.0, 100000.0]
    assert abs(summary["fitted_slope"] - (-0.5)) <= 0.1


def test_rerender_is_byte_identical(sweep_csv, path_csv, tmp_path):
    for kind, src in (("phase", sweep_csv), ("path_loglog", path_csv)):
        first = tmp_path / f"{kind}_a.png"
        second = tmp_path / f"{kind}_b.png"
        plots.render(plots.PlotSpec(str(src), kind, str(first)))
        plots.render(plots.PlotSpec(str(src), kind, str(second)))
        assert first.read_bytes() == second.read_bytes()


def test_rendering_leaves_input_untouched(sweep_csv, tmp_path):
    before = sweep_csv.read_bytes()
    plots.render(plots.PlotSpec(str(sweep_csv), "phase", str(tmp_path / "p.png")))
    assert sweep_csv.read_bytes() == before


def test_missing_columns_are_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("alpha,alpha_tilde\n2.0,1.5\n")
    with pytest.raises(plots.SchemaError, match="missing columns") as exc:
        plots.render(plots.PlotSpec(str(bad), "phase", str(tmp_path / "p.png")))
    assert "regime" in str(exc.value)
    assert "eta_lower" in str(exc.value)


def test_empty_csv_is_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("n,r_h,r_tilde_h,one_minus_pi_tilde_h\n")
    with pytest.raises(plots.SchemaError, match="no data rows"):
        plots.render(plots.PlotSpec(str(empty), "path_loglog",
                                    str(tmp_path / "p.png")))


def test_wrong_count_histogram(trials_csv, tmp_path):
    out = tmp_path / "wrong.png"
    summary = plots.render(plots.PlotSpec(str(trials_csv), "wrong_count", str(out)))
    assert out.stat().st_size > 0
    assert summary["trials"] == 300
    assert 0.0 <= summary["mean_wrong"] <= summary["max_wrong"]


def test_tau_scaling_plot(tau_csv, tmp_path):
    out = tmp_path / "tau.png"
    summary = plots.render(plots.PlotSpec(str(tau_csv), "tau_scaling", str(out)))
    assert out.stat().st_size > 0
    assert summary["priors"] == [0.5, 0.2]
    assert len(summary["ratio_to_odds"]) == 2
    assert all(r > 0 for r in summary["ratio_to_odds"])


def test_cli_renders_and_reports(sweep_csv, tmp_path):
    out = tmp_path / "cli_phase.png"
    proc = subprocess.run(
        [sys.executable, str(PLOTS_PY), "--kind", "phase",
         "--in", str(sweep_csv), "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.stat().st_size > 0
    assert json.loads(proc.stdout)["cells"] == 3


def test_cli_schema_error_exits_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("prior,n_trials\n0.5,10\n")
    proc = subprocess.run(
        [sys.executable, str(PLOTS_PY), "--kind", "tau_scaling",
         "--in", str(bad), "--out", str(tmp_path / "t.png")],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "mean_tau" in proc.stderr
