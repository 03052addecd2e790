import json

import numpy as np
import pytest

from tunnelsplit.cli import (
    ConfigError,
    PRESETS,
    cmd_evolve,
    cmd_params,
    cmd_times,
    load_config,
    main,
    parse_config,
    preset_config,
    run_checks,
)

from conftest import K0


SMALL_BARRIER = {
    "potential": {"type": "rectangular", "V0_eV": 0.3,
                  "a_nm": 500.0, "b_nm": 505.0},
    "mass_me": 0.067,
    "packet": {"E_avg_eV": 0.25, "l0_nm": 7.5},
    "times_fs": [0.0, 200.0],
    "grids": {"k_points": 256, "dx_nm": 0.5},
}


def _cfg(doc=None):
    return parse_config(doc or SMALL_BARRIER)


def test_preset_catalogue():
    assert set(PRESETS) == {"paper-barrier", "paper-well", "paper-delta"}
    cfg = preset_config("paper-barrier")
    assert cfg.potential.v0 == 0.3
    assert cfg.k0 == pytest.approx(K0)
    with pytest.raises(ConfigError):
        preset_config("nope")


def test_config_validation_errors():
    bad = dict(SMALL_BARRIER, packet={"l0_nm": 7.5})
    with pytest.raises(ConfigError):
        parse_config(bad)
    bad = dict(SMALL_BARRIER,
               packet={"E_avg_eV": 0.25, "k0_per_nm": 0.6, "l0_nm": 7.5})
    with pytest.raises(ConfigError):
        parse_config(bad)
    bad = dict(SMALL_BARRIER, potential={"type": "triangle"})
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SMALL_BARRIER))
    cfg = load_config(str(path))
    assert cfg.k_points == 256
    assert cfg.times_fs == (0.0, 200.0)


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["params", "--config", str(bad)]) == 2
    assert main(["params", "--preset", "nope"]) == 2


def test_params_csv_content(tmp_path):
    (path,) = cmd_params(_cfg(), str(tmp_path))
    lines = [l for l in open(path) if not l.startswith("#")]
    header = lines[0].strip().split(",")
    assert header == ["k", "T", "R", "J", "F", "dJ_dk", "dF_dk", "Lam",
                      "dLam_dk"]
    rows = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    t_at_k0 = float(np.interp(K0, rows[:, 0], rows[:, 1]))
    assert t_at_k0 == pytest.approx(0.113, abs=1e-3)
    # symmetric barrier: F is 0 or pi mod 2pi everywhere
    f_mod = np.mod(rows[:, 4], 2.0 * np.pi)
    res = np.minimum(np.minimum(np.abs(f_mod), np.abs(f_mod - 2 * np.pi)),
                     np.abs(f_mod - np.pi))
    assert np.max(res) < 1e-8


def test_params_free_config(tmp_path):
    doc = dict(SMALL_BARRIER,
               potential={"type": "rectangular", "V0_eV": 0.0,
                          "a_nm": 500.0, "b_nm": 505.0})
    (path,) = cmd_params(parse_config(doc), str(tmp_path))
    lines = [l for l in open(path) if not l.startswith("#")][1:]
    rows = np.array([[float(v) for v in l.split(",")] for l in lines])
    assert np.allclose(rows[:, 1], 1.0, atol=1e-12)


def test_params_output_is_byte_stable(tmp_path):
    (p1,) = cmd_params(_cfg(), str(tmp_path / "a"))
    (p2,) = cmd_params(_cfg(), str(tmp_path / "b"))
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_evolve_writes_all_channels(tmp_path):
    paths = cmd_evolve(_cfg(), str(tmp_path))
    names = [p.rsplit("/", 1)[-1] for p in paths]
    # per time: full, tr, ref and the interference file
    assert len(paths) == 2 * 4
    assert sum("_full" in n for n in names) == 2
    assert sum("_interference" in n for n in names) == 2
    inter = [p for p in paths if "interference" in p][0]
    lines = [l for l in open(inter) if not l.startswith("#")][1:]
    rows = np.array([[float(v) for v in l.split(",")] for l in lines])
    assert np.max(rows[:, 2]) < 1e-10   # |full - tr - ref| column


def test_times_report_delta(tmp_path, capsys):
    doc = {
        "potential": {"type": "delta", "W_eV_nm": 0.05, "a_nm": 500.0},
        "mass_me": 0.067,
        "packet": {"E_avg_eV": 0.25, "l0_nm": 7.5},
        "times_fs": [0.0],
        "grids": {"k_points": 256, "dx_nm": 0.5},
    }
    paths = cmd_times(parse_config(doc), str(tmp_path), include_exact=False)
    out = capsys.readouterr().out
    assert "tau_tr_as           0.000000 fs" in out
    csv = [p for p in paths if p.endswith(".csv")][0]
    lines = [l for l in open(csv) if not l.startswith("#")]
    header = lines[0].strip().split(",")
    values = lines[1].strip().split(",")
    rec = dict(zip(header, values))
    assert float(rec["tau_tr_as"]) == 0.0
    assert float(rec["swpa_tr"]) > 0.0


def test_run_checks_negative_control():
    cfg = _cfg()
    ok = run_checks(cfg)
    assert all(r.passed for r in ok)
    corrupted = run_checks(cfg, corrupt_branch=True)
    bad = {r.name: r for r in corrupted}["odd-branch parity residual"]
    assert not bad.passed


def test_main_check_exit_code():
    doc = dict(SMALL_BARRIER, times_fs=[0.0])
    import tunnelsplit.cli as cli
    code = cli.cmd_check(parse_config(doc))
    assert code == 0
