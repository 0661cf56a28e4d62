import json

import pytest

from ellbrauer.cli import main
from ellbrauer.config import load_config
from ellbrauer.errors import ConfigInvalid
from ellbrauer.pipeline import EXAMPLE_CONFIGS, run_job
from ellbrauer.report import Report

F7_CONFIG = EXAMPLE_CONFIGS["6.4-F7"]


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigInvalid):
        load_config(F7_CONFIG + "\n[plotting]\nstyle = 'x'\n")


def test_unknown_nested_key_rejected():
    bad = F7_CONFIG.replace("[curve]", "[curve]\nC = 1")
    with pytest.raises(ConfigInvalid):
        load_config(bad)


def test_missing_required_tables():
    with pytest.raises(ConfigInvalid):
        load_config("[field]\nq = 3\nbase = 'F7'\n")


def test_bad_rho_rejected():
    bad = EXAMPLE_CONFIGS["6.1"].replace('rho = "w"', 'rho = "w + 1"')
    with pytest.raises(ConfigInvalid):
        run_job(load_config(bad))


def test_bad_element_expression():
    bad = F7_CONFIG.replace("B = 2", 'B = "__import__"')
    with pytest.raises(ConfigInvalid):
        run_job(load_config(bad))


def test_report_roundtrip_and_determinism():
    r1 = run_job(load_config(F7_CONFIG))
    r2 = run_job(load_config(F7_CONFIG))
    d1 = dict(r1.data)
    d2 = dict(r2.data)
    d1.pop("timing_seconds")
    d2.pop("timing_seconds")
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)
    back = Report.from_json(r1.to_json())
    assert back == r1
    assert Report.from_json(back.to_json()) == back


def test_cli_run_and_outputs(tmp_path, capsys):
    cfg = tmp_path / "job.toml"
    cfg.write_text(F7_CONFIG)
    out = tmp_path / "report.json"
    code = main(["run", str(cfg), "--output", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "case: split" in captured.out
    data = json.loads(out.read_text())
    assert data["schema_version"] == 1
    assert data["classification"]["case"] == "split"


def test_cli_run_json_flag(tmp_path, capsys):
    cfg = tmp_path / "job.toml"
    cfg.write_text(F7_CONFIG)
    assert main(["run", str(cfg), "--json"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["classification"]["case"] == "split"


def test_cli_verify_pass(capsys):
    assert main(["verify", "6.4-F7"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out


def test_cli_verify_unknown_example(capsys):
    assert main(["verify", "9.9"]) == 3


def test_cli_missing_config_file(capsys):
    assert main(["run", "/nonexistent/certainly.toml"]) == 3


def test_cli_config_error_exit_code(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[field]\nq = 4\nbase = 'F7'\n[curve]\nA = 0\nB = 2\n")
    assert main(["run", str(cfg)]) == 3


def test_cli_computational_error_exit_code(tmp_path):
    # F5 carries no primitive cube root of unity: the failure surfaces as a
    # computational error, not a config syntax error
    cfg = tmp_path / "nr.toml"
    cfg.write_text("[field]\nq = 3\nbase = 'F5'\n[curve]\nA = 0\nB = 2\n")
    assert main(["run", str(cfg)]) == 1


def test_cli_torsion_subcommand(tmp_path, capsys):
    cfg = tmp_path / "job.toml"
    cfg.write_text(F7_CONFIG)
    assert main(["torsion", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "case: split" in out and "P = " in out


def test_cli_pairing_subcommand(tmp_path, capsys):
    cfg = tmp_path / "job.toml"
    cfg.write_text(F7_CONFIG)
    assert main(["pairing", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "e(P, Q) = 2" in out


def test_cli_strict_flag_fails_on_caveats(tmp_path, capsys):
    cfg = tmp_path / "searchy.toml"
    cfg.write_text(EXAMPLE_CONFIGS["6.2-generic"])
    code = main(["run", str(cfg), "--strict"])
    assert code == 1  # search-bounded Mordell-Weil data carries a caveat


def test_search_mode_caveat_in_report():
    report = run_job(load_config(EXAMPLE_CONFIGS["6.2-generic"]))
    assert any("search" in c for c in report.caveats())


def test_verify_example_unknown():
    from ellbrauer.errors import UnknownExample
    from ellbrauer.pipeline import verify_example

    with pytest.raises(UnknownExample):
        verify_example("nope")
