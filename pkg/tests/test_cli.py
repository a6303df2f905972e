"""Subcomandos de la línea de comandos y ficheros que escriben."""

import json

import numpy as np
import pandas as pd
import pytest
import yaml

from certmenu.analysis import SWEEPS
from certmenu.cli import EXIT_OK, EXIT_USAGE, figure_tables, main, run_subcommand
from certmenu.config import load_config
from certmenu.exceptions import ConfigError
from certmenu.mechanism_solver import MECHANISM_COLUMNS


@pytest.fixture
def small_config(tmp_path):
    """Ejemplo lineal con una malla de 201 nodos."""
    path = tmp_path / "small.yaml"
    path.write_text(yaml.safe_dump({
        "model": {"gamma": 0.25},
        "attention": {"alpha": 1.0},
        "grid": {"theta_points": 201},
    }), encoding="utf-8")
    return path


def _run(config, out, *args):
    return main(["--config", str(config), "--output-dir", str(out), *args])


def test_benchmark_planner(small_config, tmp_path):
    out = tmp_path / "out"
    assert _run(small_config, out, "benchmark", "planner") == EXIT_OK
    frame = pd.read_csv(out / "benchmark_planner.csv")
    assert list(frame.columns) == MECHANISM_COLUMNS
    np.testing.assert_allclose(frame["v_good"], 0.75, atol=1e-12)
    summary = json.loads((out / "benchmark_planner.json").read_text(encoding="utf-8"))
    assert summary["label"] == "planner"
    assert summary["config"]["model.gamma"] == 0.25


def test_solve_is_deterministic(small_config, tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _run(small_config, first, "solve") == EXIT_OK
    assert _run(small_config, second, "solve") == EXIT_OK
    assert (first / "optimal_mechanism.csv").read_bytes() == \
        (second / "optimal_mechanism.csv").read_bytes()


def test_single_with_fixed_quality(small_config, tmp_path):
    out = tmp_path / "out"
    assert _run(small_config, out, "benchmark", "single", "--lam", "0.5") == EXIT_OK
    summary = json.loads((out / "benchmark_single.json").read_text(encoding="utf-8"))
    assert summary["lambda"] == 0.5
    assert summary["serving_intervals"][0][0] == pytest.approx(0.5, abs=1e-9)


def test_sweep_writes_tables(small_config, tmp_path):
    out = tmp_path / "out"
    assert _run(small_config, out, "sweep", "gamma", "--values", "0.1", "0.2") == EXIT_OK
    summary = pd.read_csv(out / "sweep_gamma_summary.csv")
    assert list(summary["value"]) == [0.1, 0.2]
    assert (out / "sweep_gamma.csv").is_file()


def test_compare_perfect(small_config, tmp_path):
    out = tmp_path / "out"
    assert _run(small_config, out, "compare-perfect") == EXIT_OK
    summary = json.loads((out / "compare_perfect.json").read_text(encoding="utf-8"))
    assert summary["dichotomy_holds"] is True


class TestFigures:

    def test_tables(self, linear_cfg):
        tables = figure_tables(linear_cfg)
        single = tables["fig1"]
        phi = single["phi"].to_numpy()
        np.testing.assert_allclose(single["v_lambda_1"], np.maximum(phi - 0.25, 0.0), atol=1e-15)
        np.testing.assert_allclose(single["v_lambda_0.5"], phi / 2.0, atol=1e-15)
        with np.errstate(divide="ignore"):
            expected = np.minimum(0.5 / np.sqrt(1.0 - phi), 1.0)
        np.testing.assert_allclose(tables["fig2a"]["lambda"], expected, atol=1e-4)

    def test_difference_column(self, linear_cfg):
        diff = figure_tables(linear_cfg)["fig3"]
        np.testing.assert_allclose(diff["delta"], diff["engagement_optimal"] - diff["engagement_perfect"])
        assert (diff.loc[diff["phi"] >= 0.76, "delta"].abs() <= 1e-9).all()

    def test_command(self, small_config, tmp_path):
        out = tmp_path / "out"
        assert _run(small_config, out, "figures") == EXIT_OK
        for name in ("fig1", "fig2a", "fig2b", "fig3"):
            assert (out / f"{name}.csv").is_file()
        quality = pd.read_csv(out / "fig2a.csv")
        assert list(quality.columns) == ["phi", "lambda"]
        assert len(quality) == 401
        phi = quality["phi"].to_numpy()
        with np.errstate(divide="ignore"):
            expected = np.minimum(0.5 / np.sqrt(1.0 - phi), 1.0)
        np.testing.assert_allclose(quality["lambda"], expected, atol=1e-4)


class TestErrors:

    def test_unknown_subcommand(self, small_config):
        with pytest.raises(SystemExit) as info:
            main(["--config", str(small_config), "explode"])
        assert info.value.code == 2

    def test_missing_config(self, tmp_path):
        assert _run(tmp_path / "absent.yaml", tmp_path, "solve") == EXIT_USAGE

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("model.gamma: 0.8\nattention.alpha: 1\ndist.theta_max: 0.7\n", encoding="utf-8")
        assert _run(path, tmp_path, "solve") == EXIT_USAGE
        assert "model.gamma" in capsys.readouterr().err

    def test_invalid_jobs(self, small_config, tmp_path):
        assert main(["--config", str(small_config), "--output-dir", str(tmp_path),
                     "--jobs", "0", "solve"]) == EXIT_USAGE


@pytest.mark.slow
def test_verify_reference_example(configs_dir, tmp_path):
    code = _run(configs_dir / "linear_running_example.yaml", tmp_path, "verify", "--probes", "8")
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert summary["failures"] == []


def test_run_subcommand_rejects_unknown_command(small_config):
    with pytest.raises(ConfigError, match="command"):
        run_subcommand("explode", load_config(small_config))


def test_pipeline_covers_every_sweep_and_figure(linear_cfg):
    import run_full_analysis as pipeline

    pasos = {tuple(argumentos) for argumentos, _ in pipeline.PASOS}
    esperados = {nombre for archivos in pipeline.ARCHIVOS_ESPERADOS.values() for nombre in archivos}
    for parametro in SWEEPS:
        assert ("sweep", parametro) in pasos
        assert f"sweep_{parametro}.csv" in esperados
    assert set(pipeline.ARCHIVOS_ESPERADOS["Figuras"]) == {f"{n}.csv" for n in figure_tables(linear_cfg)}
