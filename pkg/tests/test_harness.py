"""Tests of configuration resolution, experiment runners, file output, and
the command-line entry point."""
import csv
import json
import math

import pytest

from suvsim import (
    EXPERIMENT_DEFAULTS,
    ConfigError,
    Experiment,
    InvalidParameterError,
    NoiseKind,
    NoiseModel,
    PhysicsParams,
    Scheme,
    TrajectoryConfig,
    __version__,
    build_trajectory_config,
    effective_diffusion,
    make_config,
    parse_config_file,
    run_experiment,
    simulate_ensemble,
)
from suvsim.cli import build_parser, main
from suvsim.harness import MANIFEST_NAME
from suvsim.output import (
    ENSEMBLE_HEADER,
    format_value,
    sha256_file,
    write_ensemble_csv,
    write_json_atomic,
    write_trajectory_csv,
)


def test_parse_config_file_types_and_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# a comment line\n"
        "\n"
        "n_traj = 250\n"
        "tau = 0.5   # trailing comment\n"
        "noise = sbm\n"
        "output_dir = out\n"
    )
    values = parse_config_file(str(path))
    assert values == {
        "n_traj": 250,
        "tau": 0.5,
        "noise": NoiseKind.SBM,
        "output_dir": "out",
    }
    assert isinstance(values["n_traj"], int)


def test_parse_config_file_rejects_bad_lines(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n_traj 250\n")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config_file(str(bad))
    bad.write_text("\nbogus = 3\n")
    with pytest.raises(ConfigError, match="2: unknown setting 'bogus'"):
        parse_config_file(str(bad))
    bad.write_text("tau = fast\n")
    with pytest.raises(ConfigError, match="bad value for tau"):
        parse_config_file(str(bad))
    bad.write_text("dt = inf\n")
    with pytest.raises(ConfigError, match="bad value for dt"):
        parse_config_file(str(bad))
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config_file(str(tmp_path / "missing.cfg"))


def test_make_config_layers_defaults_file_and_overrides():
    cfg = make_config("fig1a")
    assert cfg.experiment is Experiment.FIG1A
    assert cfg.n_traj == 20000 and cfg.J == 2.0 and cfg.gamma == 0.5
    assert cfg.scheme is Scheme.SUV_COLORED and cfg.noise is NoiseKind.OU

    layered = make_config("fig1a", {"n_traj": 500, "tau": 0.25}, n_traj=100, master_seed=None)
    assert layered.n_traj == 100  # command line beats the file
    assert layered.tau == 0.25  # the file beats the defaults
    assert layered.master_seed == cfg.master_seed  # None means "not given"
    assert make_config("fig1a", noise="sbm").noise is NoiseKind.SBM


def test_make_config_rejects_bad_input():
    with pytest.raises(ConfigError, match="unknown experiment"):
        make_config("warp-drive")
    with pytest.raises(ConfigError, match="unknown setting"):
        make_config("fig1a", {"speed": 3})
    with pytest.raises(ConfigError):
        make_config("fig1a", master_seed=-1)
    with pytest.raises(ConfigError):
        make_config("fig1a", master_seed=2**64)
    with pytest.raises(ConfigError):
        make_config("fig1a", n_traj=0)
    with pytest.raises(ConfigError):
        make_config("fig1a", decimation=0)


def test_experiment_defaults_cover_every_preset():
    assert set(EXPERIMENT_DEFAULTS) == set(Experiment)
    for exp in Experiment:
        assert make_config(exp).experiment is exp
    fast, slow = make_config("fig1b"), make_config("fig1a")
    assert fast.G == 10.0 and fast.tau == 0.01
    assert make_config("gksl-check").scheme is Scheme.WHITE_ITO
    assert make_config("frozen-limit").noise is NoiseKind.FROZEN_SBM
    # The fast and slow noise presets share one white-noise diffusion scale.
    assert effective_diffusion(fast.G, fast.tau, fast.noise) == math.sqrt(2.0)
    assert effective_diffusion(slow.G, slow.tau, slow.noise) == math.sqrt(2.0)


def test_build_trajectory_config_fills_derived_couplings():
    cfg = make_config("fig1b")
    traj = build_trajectory_config(cfg)
    assert traj.params.Deff == math.sqrt(2.0)
    assert traj.params.D == 1.0  # G sqrt(tau) = 10 * 0.1
    assert traj.scheme is Scheme.SUV_COLORED and traj.seed == cfg.master_seed
    override = build_trajectory_config(cfg, scheme=Scheme.SSE, seed=42, z0=0.25)
    assert override.scheme is Scheme.SSE
    assert override.seed == 42 and override.z0 == 0.25


def test_build_trajectory_config_guards_scheme_noise_pairs():
    with pytest.raises(ConfigError, match="evolving noise kind"):
        build_trajectory_config(make_config("gksl-check"), noise=NoiseKind.FROZEN_OU)
    with pytest.raises(ConfigError, match="noise process"):
        build_trajectory_config(make_config("fig1a"), noise=NoiseKind.NONE)


def test_engine_rejects_colored_scheme_without_noise_process():
    cfg = TrajectoryConfig(
        params=PhysicsParams(J=2.0, G=1.0),
        noise=NoiseModel(kind=NoiseKind.NONE),
        dt=1e-3,
        T=0.01,
        z0=0.6,
        scheme=Scheme.SUV_COLORED,
        seed=1,
    )
    with pytest.raises(InvalidParameterError):
        simulate_ensemble(cfg, n_traj=1)


def test_format_value_round_trips_floats():
    assert format_value(None) == ""
    assert format_value("label") == "label"
    assert format_value(7) == "7"
    for x in (0.1, 1.0 / 3.0, 1e-17, -2.5e300):
        assert float(format_value(x)) == x


def _small_ensemble():
    cfg = TrajectoryConfig(
        params=PhysicsParams(J=2.0, G=1.0),
        noise=NoiseModel(kind=NoiseKind.OU, tau=1.0),
        dt=1e-3,
        T=0.02,
        z0=0.6,
        scheme=Scheme.SUV_COLORED,
        seed=5,
    )
    return simulate_ensemble(cfg, n_traj=6, decimation=5)


def test_ensemble_csv_round_trips_exact_floats(tmp_path):
    res = _small_ensemble()
    path = tmp_path / "ens.csv"
    write_ensemble_csv(str(path), res.summary)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ENSEMBLE_HEADER
    body = rows[1:]
    assert len(body) == res.summary.times.size
    for j, row in enumerate(body):
        assert float(row[0]) == res.summary.times[j]
        assert float(row[1]) == res.summary.mean_z[j]
        assert float(row[2]) == res.summary.stderr_z[j]
        assert float(row[5]) == res.summary.qv[j]


def test_trajectory_csv_leaves_field_column_empty_without_noise(tmp_path):
    path = tmp_path / "traj.csv"
    write_trajectory_csv(str(path), [0.0, 0.1], [0.6, 0.7], xi=None)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "z", "xi"]
    assert rows[1] == ["0.0", "0.6", ""]


def test_json_atomic_write_sorts_keys_and_cleans_up(tmp_path):
    path = tmp_path / "doc.json"
    write_json_atomic(str(path), {"b": 1, "a": 2})
    text = path.read_text()
    assert json.loads(text) == {"a": 2, "b": 1}
    assert text.index('"a"') < text.index('"b"')
    assert not (tmp_path / "doc.json.tmp").exists()


def test_run_experiment_manifest_checksums_and_round_trip(tmp_path):
    out = tmp_path / "out"
    cfg = make_config("frozen-limit", {"n_traj": 200, "T": 2.0}, output_dir=str(out))
    manifest = run_experiment(cfg)
    assert manifest["experiment"] == "frozen-limit"
    assert manifest["config"]["n_traj"] == 200
    assert manifest["files"]
    for name, digest in manifest["files"].items():
        assert sha256_file(str(out / name)) == digest
    assert json.loads((out / MANIFEST_NAME).read_text()) == manifest
    # The manifest's configuration echo rebuilds the identical config.
    flat = manifest["config"]
    rebuilt = make_config(
        flat["experiment"], {k: v for k, v in flat.items() if k != "experiment"}
    )
    assert rebuilt == cfg


def test_rerun_writes_byte_identical_artifacts(tmp_path):
    def run_into(d):
        cfg = make_config("frozen-limit", {"n_traj": 150, "T": 1.0}, output_dir=str(d))
        return run_experiment(cfg)

    m1 = run_into(tmp_path / "a")
    m2 = run_into(tmp_path / "b")
    assert m1["files"] == m2["files"]
    for name in m1["files"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


_SMOKE_OVERRIDES = {
    Experiment.FIG1A: {"n_traj": 100, "T": 0.1},
    Experiment.FIG1B: {"n_traj": 100, "T": 0.1},
    Experiment.BORN_SWEEP: {"n_traj": 50, "T": 0.5},
    Experiment.FDR_SWEEP: {"n_traj": 20, "T": 0.5},
    Experiment.WEAK_EQUIVALENCE: {"n_traj": 100, "T": 0.2},
    # dt must divide the lag grid of the rate fit (multiples of tau/4).
    Experiment.NOISE_VALIDATION: {"n_traj": 100, "tau": 0.5, "T": 2.0, "dt": 0.005},
    Experiment.FROZEN_LIMIT: {"n_traj": 100, "T": 1.0},
    Experiment.GKSL_CHECK: {"n_traj": 100, "T": 0.2},
}


@pytest.mark.parametrize("experiment", list(Experiment), ids=[e.value for e in Experiment])
def test_every_experiment_preset_runs(tmp_path, experiment):
    cfg = make_config(experiment, _SMOKE_OVERRIDES[experiment], output_dir=str(tmp_path))
    manifest = run_experiment(cfg)
    assert manifest["files"]
    for name in manifest["files"]:
        path = tmp_path / name
        assert path.exists() and path.stat().st_size > 0
    assert (tmp_path / MANIFEST_NAME).exists()


def test_single_trajectory_runs_dump_decimated_paths(tmp_path):
    cfg = make_config("fig1a", {"n_traj": 1, "T": 0.05}, output_dir=str(tmp_path))
    manifest = run_experiment(cfg)
    assert "fig1a_suv_trajectory.csv" in manifest["files"]
    assert "fig1a_sse_trajectory.csv" in manifest["files"]
    with open(tmp_path / "fig1a_suv_trajectory.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "z", "xi"]
    assert rows[1][2] != ""  # colored scheme records its field
    with open(tmp_path / "fig1a_sse_trajectory.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[1][2] == ""  # diffusive scheme has no field to record


def test_cli_runs_experiment_with_overrides(tmp_path, capsys):
    cfg_file = tmp_path / "small.cfg"
    cfg_file.write_text("n_traj = 120\nT = 1.0\n")
    out = tmp_path / "res"
    code = main(
        ["run", "frozen-limit", "--config", str(cfg_file), "--out", str(out), "--seed", "7"]
    )
    assert code == 0
    captured = capsys.readouterr()
    assert f"wrote {out}/frozen_born.csv" in captured.out
    assert f"wrote {out}/{MANIFEST_NAME}" in captured.out
    manifest = json.loads((out / MANIFEST_NAME).read_text())
    assert manifest["config"]["master_seed"] == 7
    assert manifest["config"]["n_traj"] == 120


def test_cli_reports_errors_on_stderr(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus = 1\n")
    code = main(["run", "fig1a", "--config", str(bad)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_version_and_argument_validation(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main([])  # a command is required
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "fig1a", "--noise", "none"])
