import subprocess
import sys

import numpy as np
import pytest

from bgk_lowrank.diagnostics import FieldSnapshot, mass
from bgk_lowrank.experiments import (
    ConfigError,
    DiagnosticsWriter,
    build_grids,
    build_params,
    initial_condition,
    load_checkpoint,
    main,
    parse_config,
    read_header,
    run_experiment,
    save_checkpoint,
    save_field,
    serialize_config,
)
from bgk_lowrank.lowrank import evaluate


def _toy_cfg(**kw):
    text = "experiment = toy1d1v\n" + "".join(f"{k} = {v}\n" for k, v in kw.items())
    return parse_config(text)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def test_parse_minimal_toy_defaults():
    cfg = _toy_cfg()
    assert cfg.x_axes == [(-6.0, 6.0, 128)]
    assert cfg.v_axes == [(-6.0, 6.0, 128)]
    assert cfg.integrator == "ips"
    assert cfg.rank == 10
    assert cfg.dt == 1e-3
    assert cfg.epsilon == 1.0


def test_parse_overrides_and_axis_keys():
    cfg = parse_config(
        """
        experiment = toy1d1v
        integrator = buc   # trailing comment
        rank = 4
        dt = 2e-3
        x.0.lower = -3
        x.0.upper = 3
        x.0.n = 32
        v.0.lower = -6
        v.0.upper = 6
        v.0.n = 16
        """
    )
    assert cfg.integrator == "buc"
    assert cfg.rank == 4
    assert cfg.x_axes == [(-3.0, 3.0, 32)]
    assert cfg.v_axes == [(-6.0, 6.0, 16)]


def test_parse_collects_all_errors():
    with pytest.raises(ConfigError) as err:
        parse_config(
            """
            experiment = toy1d1v
            rank = not_a_number
            bogus_key = 3
            dt 0.1
            """
        )
    msgs = "\n".join(err.value.errors)
    assert "rank" in msgs
    assert "bogus_key" in msgs
    assert "key = value" in msgs
    assert len(err.value.errors) == 3


def test_parse_requires_experiment():
    with pytest.raises(ConfigError):
        parse_config("rank = 3\n")


def test_parse_rejects_incomplete_axis():
    with pytest.raises(ConfigError) as err:
        parse_config("experiment = custom\nx.0.lower = 0\n")
    assert any("x.0" in e for e in err.value.errors)


def test_validate_rejects_odd_grid_and_bad_bounds():
    with pytest.raises(ConfigError) as err:
        parse_config(
            "experiment = custom\n"
            "x.0.lower = 1\nx.0.upper = 0\nx.0.n = 15\n"
            "v.0.lower = -1\nv.0.upper = 1\nv.0.n = 8\n"
        )
    msgs = "\n".join(err.value.errors)
    assert "upper must exceed lower" in msgs
    assert "even" in msgs


def test_cli_overrides_beat_config():
    cfg = parse_config("experiment = toy1d1v\nrank = 4\n",
                       overrides={"rank": 7, "theta": None})
    assert cfg.rank == 7
    assert cfg.theta == 1e-6  # None override is ignored


def test_shear2d2v_rank_depends_on_integrator():
    a = parse_config("experiment = shear2d2v\n")
    b = parse_config("experiment = shear2d2v\nintegrator = ips\n")
    assert a.integrator == "buc" and a.rank == 12
    assert b.rank == 32
    c = parse_config("experiment = shear2d2v\nintegrator = ips\nrank = 5\n")
    assert c.rank == 5


def test_serialize_round_trip():
    cfg = _toy_cfg(rank=3, dt=0.25, seed=11)
    again = parse_config(serialize_config(cfg))
    assert again == cfg


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------


def test_toy_initial_condition_mass_and_rank():
    cfg = _toy_cfg()
    xg, vg = build_grids(cfg)
    params = build_params(cfg, xg, vg)
    st = initial_condition(cfg, xg, vg)
    assert st.rank == 10
    assert abs(mass(st, params) - 1.0) <= 1e-10


def test_explosion_initial_condition():
    cfg = parse_config(
        "experiment = explosion2d2v\nx.0.lower = -3\nx.0.upper = 3\nx.0.n = 16\n"
        "x.1.lower = -3\nx.1.upper = 3\nx.1.n = 16\n"
        "v.0.lower = -6\nv.0.upper = 6\nv.0.n = 8\n"
        "v.1.lower = -6\nv.1.upper = 6\nv.1.n = 8\n"
    )
    xg, vg = build_grids(cfg)
    params = build_params(cfg, xg, vg)
    st = initial_condition(cfg, xg, vg)
    assert st.rank == 1
    assert abs(mass(st, params) - 1.0) <= 1e-10
    # density peaks at the origin bump
    from bgk_lowrank.diagnostics import density

    rho = density(st, params)
    assert np.argmax(rho) == xg.flat_index((8, 8))


def test_shear_initial_velocity_profile():
    cfg = parse_config(
        "experiment = shear3d3v\n"
        + "".join(
            f"x.{i}.lower = {lo}\nx.{i}.upper = 1\nx.{i}.n = 8\n"
            for i, lo in enumerate((0, -1, -1))
        )
        + "".join(f"v.{i}.lower = -6\nv.{i}.upper = 6\nv.{i}.n = 8\n" for i in range(3))
    )
    from bgk_lowrank.experiments import _shear_velocity_fields

    xg, _ = build_grids(cfg)
    u = _shear_velocity_fields(cfg, xg)
    # at r = 0 the axial velocity is v0 tanh(0.25/width) = 0.1 tanh(7.5)
    k = xg.flat_index((0, 4, 4))  # x2 = x3 = 0
    assert u[0][k] == pytest.approx(0.0999999382, abs=1e-8)
    # far outside the cylinder (r^2 = 2) the flow reverses
    k_out = xg.flat_index((0, 0, 0))
    assert u[0][k_out] == pytest.approx(-0.1, abs=1e-6)


def test_shear2d2v_initial_condition_mass():
    cfg = parse_config(
        "experiment = shear2d2v\n"
        + "".join(f"x.{i}.lower = 0\nx.{i}.upper = 1\nx.{i}.n = 16\n" for i in range(2))
        + "".join(f"v.{i}.lower = -6\nv.{i}.upper = 6\nv.{i}.n = 16\n" for i in range(2))
    )
    xg, vg = build_grids(cfg)
    params = build_params(cfg, xg, vg)
    st = initial_condition(cfg, xg, vg)
    assert st.rank <= cfg.rank
    assert abs(mass(st, params) - 1.0) <= 1e-4


# ---------------------------------------------------------------------------
# binary formats
# ---------------------------------------------------------------------------


def test_field_save_and_header(tmp_path):
    snap = FieldSnapshot("density", 0.5, (4, 6), np.arange(24.0))
    path = tmp_path / "field.dlrk"
    save_field(path, snap)
    h = read_header(path)
    assert h["kind"] == 1
    assert h["shape"] == (4, 6)
    assert h["version"] == 1


def test_checkpoint_round_trip(tmp_path):
    cfg = _toy_cfg(rank=3)
    cfg.x_axes = [(-6.0, 6.0, 16)]
    cfg.v_axes = [(-6.0, 6.0, 16)]
    xg, vg = build_grids(cfg)
    st = initial_condition(cfg, xg, vg)
    path = tmp_path / "checkpoint_00000012.dlrk"
    save_checkpoint(path, st, xg, vg)
    loaded, x_axes, v_axes = load_checkpoint(path)
    assert x_axes == [(-6.0, 6.0, 16)]
    assert v_axes == [(-6.0, 6.0, 16)]
    assert np.array_equal(evaluate(loaded), evaluate(st))


def test_read_header_rejects_other_files(tmp_path):
    path = tmp_path / "junk.dlrk"
    path.write_bytes(b"NOPE" + b"\0" * 64)
    with pytest.raises(ValueError):
        read_header(path)


# ---------------------------------------------------------------------------
# runs and CLI
# ---------------------------------------------------------------------------


def _small_toy_text(out, **kw):
    base = dict(
        integrator="buc", rank=6, rank_max=8, dt=1e-3, t_final=0.01,
        snapshot_every=5e-3, checkpoint_every=5e-3, output=out,
        record_timings="false",
    )
    base.update(kw)
    lines = ["experiment = toy1d1v"]
    lines += ["x.0.lower = -6", "x.0.upper = 6", "x.0.n = 32"]
    lines += ["v.0.lower = -6", "v.0.upper = 6", "v.0.n = 32"]
    lines += [f"{k} = {v}" for k, v in base.items()]
    return "\n".join(lines) + "\n"


def test_run_experiment_outputs(tmp_path):
    out = tmp_path / "out"
    cfg = parse_config(_small_toy_text(out))
    final, reports = run_experiment(cfg)
    assert len(reports) == 11
    csv = (out / "diagnostics.csv").read_text().splitlines()
    assert csv[0].startswith("step,time,rank,mass,momentum_1,energy")
    assert len(csv) == 12
    assert (out / "density_00000000.dlrk").exists()
    assert (out / "density_00000010.dlrk").exists()
    assert (out / "checkpoint_00000010.dlrk").exists()
    # mass drifts only at the truncation level over 10 steps
    m0 = float(csv[1].split(",")[3])
    m10 = float(csv[-1].split(",")[3])
    assert abs(m10 - m0) <= 1e-5


def test_run_is_deterministic_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(parse_config(_small_toy_text(a)))
    run_experiment(parse_config(_small_toy_text(b)))
    assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()
    assert (
        (a / "checkpoint_00000010.dlrk").read_bytes()
        == (b / "checkpoint_00000010.dlrk").read_bytes()
    )


def test_resume_matches_uninterrupted_run(tmp_path):
    full_out = tmp_path / "full"
    run_experiment(parse_config(_small_toy_text(full_out, t_final=0.02)))
    part_out = tmp_path / "part"
    cfg2 = parse_config(_small_toy_text(part_out, t_final=0.02))
    final2, reports2 = run_experiment(
        cfg2, resume=str(full_out / "checkpoint_00000010.dlrk")
    )
    assert reports2[0].step == 10
    assert reports2[-1].step == 20
    full_ck = (full_out / "checkpoint_00000020.dlrk").read_bytes()
    part_ck = (part_out / "checkpoint_00000020.dlrk").read_bytes()
    assert full_ck == part_ck


def test_cli_validate_and_run(tmp_path):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text(_small_toy_text(tmp_path / "cli_out", t_final=0.002))
    assert main(["validate", "--config", str(cfg_path)]) == 0
    assert main(["run", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "cli_out" / "diagnostics.csv").exists()
    ck = tmp_path / "cli_out" / "checkpoint_00000000.dlrk"
    assert main(["info", str(ck)]) == 0


def test_cli_reports_config_errors(tmp_path, capsys):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("experiment = toy1d1v\nrank = -1\n")
    assert main(["validate", "--config", str(cfg_path)]) == 1
    assert "rank" in capsys.readouterr().err


def test_cli_numerical_abort_exit_code(tmp_path):
    # a huge dt blows up the explicit integrator -> exit code 2
    cfg_path = tmp_path / "explode.cfg"
    cfg_path.write_text(
        _small_toy_text(tmp_path / "boom", dt=1000.0, t_final=2000.0,
                        epsilon=1e-9)
    )
    assert main(["run", "--config", str(cfg_path)]) == 2


def test_cli_info_rejects_missing_file(tmp_path):
    assert main(["info", str(tmp_path / "missing.dlrk")]) == 1


def test_console_entry_point_is_installed():
    proc = subprocess.run(
        ["bgk-lowrank", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "run" in proc.stdout and "validate" in proc.stdout


def test_diagnostics_writer_timing_toggle(tmp_path):
    from bgk_lowrank.integrators import StepReport

    path = tmp_path / "d.csv"
    w = DiagnosticsWriter(path, d_v=1, record_timings=False)
    w.write(StepReport(step=1, time=0.1, rank=2, mass=1.0, wall_ms=33.0),
            np.array([0.0]), 0.5)
    w.close()
    row = path.read_text().splitlines()[1].split(",")
    assert row[-1] == "0"
