"""End-to-end tests for the command-line front end."""

import json
from pathlib import Path

import pytest

from mnns import __version__
from mnns.cli import main
from mnns.config import ExperimentConfig
from mnns.presets import PRESETS, preset_text

RIESZ_SMALL = """\
command = "verify-riesz"
seed = 20260822

[verify-riesz]
fields = 6
"""


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"mnns {__version__}"


def test_no_subcommand_prints_help(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_every_preset_parses_and_validates():
    for name in PRESETS:
        cfg = ExperimentConfig.from_text(preset_text(name))
        cfg.validate()


def test_unknown_preset_lists_known_names(capsys):
    assert main(["preset", "warp-drive"]) == 2
    err = capsys.readouterr().err
    assert "unknown preset" in err
    for name in PRESETS:
        assert name in err


def test_preset_pipes_back_through_run(tmp_path, capsys):
    assert main(["preset", "aniso-demo"]) == 0
    text = capsys.readouterr().out
    cfg_path = write_config(tmp_path, text)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg_path, "--out", str(out)]) == 0
    assert "aniso-demo: PASS" in capsys.readouterr().out


def test_passing_run_writes_reports(tmp_path, capsys):
    cfg_path = write_config(tmp_path, RIESZ_SMALL)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg_path, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "verify-riesz"
    assert report["seed"] == 20260822
    assert report["passed"] is True
    assert "config_digest" in report and "wall_clock_seconds" in report
    csv_text = (out / "report.csv").read_text()
    assert len(csv_text.splitlines()) == len(report["cases"]) + 1
    line = capsys.readouterr().out
    assert "verify-riesz: PASS" in line


def test_report_json_is_canonical(tmp_path):
    cfg_path = write_config(tmp_path, RIESZ_SMALL)
    out = tmp_path / "out"
    main(["run", "--config", cfg_path, "--out", str(out)])
    text = (out / "report.json").read_text()
    parsed = json.loads(text)
    assert text == json.dumps(parsed, sort_keys=True, indent=2) + "\n"


def test_same_seed_reproduces_the_report(tmp_path):
    cfg_path = write_config(tmp_path, RIESZ_SMALL)
    reports = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        main(["run", "--config", cfg_path, "--out", str(out)])
        r = json.loads((out / "report.json").read_text())
        r.pop("wall_clock_seconds")
        reports.append(r)
    assert reports[0] == reports[1]


def test_seed_override(tmp_path):
    cfg_path = write_config(tmp_path, RIESZ_SMALL)
    out = tmp_path / "out"
    main(["run", "--config", cfg_path, "--out", str(out), "--seed", "5"])
    assert json.loads((out / "report.json").read_text())["seed"] == 5


def test_failing_check_exits_one(tmp_path, capsys):
    text = RIESZ_SMALL + "probe_budget = 0.1\n"
    cfg_path = write_config(tmp_path, text)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg_path, "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is False
    assert "verify-riesz: FAIL" in capsys.readouterr().out


def test_mid_compute_error_still_writes_a_report(tmp_path, capsys):
    text = """\
command = "local-solve"
seed = 0

[local-solve]
grid_size = 8
half_width = 3.141592653589793
amplitude = 1e6
nodes = 2
quad_nodes = 2
max_iter = 1
max_halvings = 1
"""
    cfg_path = write_config(tmp_path, text)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg_path, "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is False
    assert report["error"].startswith("ConvergenceError")
    assert "ConvergenceError" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text,needle",
    [
        ("command = [1]\n", "command must be one of"),
        ('command = "explode"\n', "command must be one of"),
        ('command = "verify-young"\nseed = -3\n', "seed"),
        ('command = "verify-young"\nbudget = 2\n', "unrecognized top-level key"),
        (
            'command = "verify-young"\n[verify-young]\ncases = 3\n',
            "does not accept key",
        ),
        (
            'command = "solve"\n[solve]\np = [3.0, 3.0]\nq = [6.0, 6.0]\n',
            "outside this solver's scope",
        ),
        (
            'command = "solve"\n[solve]\ngrid_size = 33\n',
            "grid_size must be even",
        ),
    ],
)
def test_config_diagnostics(tmp_path, capsys, text, needle):
    cfg_path = write_config(tmp_path, text)
    assert main(["run", "--config", cfg_path]) == 2
    err = capsys.readouterr().err
    assert "configuration error" in err and needle in err


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.toml")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_invalid_toml(tmp_path, capsys):
    cfg_path = write_config(tmp_path, "command = [unclosed\n")
    assert main(["run", "--config", cfg_path]) == 2
    assert "not valid TOML" in capsys.readouterr().err


def test_default_out_directory(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg_path = write_config(tmp_path, RIESZ_SMALL)
    assert main(["run", "--config", cfg_path]) == 0
    assert Path(tmp_path / "mnns-report" / "report.json").exists()
