import csv
import io
import json
from pathlib import Path

import pytest

from lw6 import cli
from lw6 import config as cfg

ROOT = Path(__file__).resolve().parents[1]
SCEN = ROOT / "scenarios"

QUICK_FLUX = ["--config", str(SCEN / "helical_flux.ini"), "--quick"]


def run(capsysbinary, *argv):
    code = cli.main(list(argv))
    out = capsysbinary.readouterr()
    return code, out.out, out.err.decode()


def test_config_error_reports_line(tmp_path, capsysbinary):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nname = x\n\n[charge]\ne = lots\n")
    code, _, err = run(capsysbinary, "verify", "--config", str(bad))
    assert code == 2 and "line 5" in err


@pytest.mark.parametrize("text", ["[nonsense]\nx = 1\n", "[charge]\nunknown = 1\n", "[trajectory]\nkind = spiral\n",
                                  "[quadrature]\nn_theta = 6,6\n", "[sweep]\nradii = 1,2,3\n"])
def test_invalid_configs(text):
    with pytest.raises(cfg.ConfigError):
        cfg.load(text)


def test_overrides_and_quick():
    sc = cfg.load("[charge]\ne = 2.0\n", ["charge.e=3.5", "flux.r=0.9"])
    assert sc["charge.e"] == 3.5 and sc["flux.r"] == 0.9
    quick = cfg.load("", quick=True)
    assert quick["quadrature.epsrel"] > cfg.load("")["quadrature.epsrel"]
    with pytest.raises(cfg.ConfigError):
        cfg.load("", ["charge.e"])


def test_help_config(capsys):
    assert cli.main(["--help-config"]) == 0
    text = capsys.readouterr().out
    for section in cfg.SCHEMA:
        assert f"[{section}]" in text
    assert "# table:" in text


def test_no_command_is_config_error(capsys):
    assert cli.main([]) == 2


def test_three_formats(capsysbinary):
    code, human, _ = run(capsysbinary, "run", *QUICK_FLUX, "--format", "human")
    assert code == 0 and b"p_rad" in human
    code, raw, _ = run(capsysbinary, "run", *QUICK_FLUX, "--format", "csv")
    assert code == 0 and b"\r\n" not in raw
    blocks = [b for b in raw.decode().split("# table: ") if b.strip()]
    for block in blocks:
        rows = list(csv.reader(io.StringIO(block.split("\n", 1)[1])))
        assert len({len(r) for r in rows if r}) == 1
    code, raw, _ = run(capsysbinary, "run", *QUICK_FLUX, "--format", "structured")
    data = json.loads(raw)
    assert code == 0 and data["status"] == "pass"
    assert data["meta"]["quick"] is True and "seconds" not in data["meta"]


def test_timings_opt_in(capsysbinary):
    _, raw, _ = run(capsysbinary, "run", *QUICK_FLUX, "--format", "structured", "--timings")
    assert "seconds" in json.loads(raw)["meta"]


def test_out_file(tmp_path, capsysbinary):
    target = tmp_path / "report.json"
    code, out, _ = run(capsysbinary, "flux", *QUICK_FLUX, "--format", "structured", "--out", str(target))
    assert code == 0 and out == b""
    assert json.loads(target.read_bytes())["task"] == "flux"


def test_failed_check_exit_3(capsysbinary, caplog):
    code, _, _ = run(capsysbinary, "run", *QUICK_FLUX, "--set", "tolerances.p_rad=1e-20")
    assert code == 3 and "check failed: flux/p_rad" in caplog.text


def test_non_convergence_exit_4(capsysbinary):
    code, _, err = run(capsysbinary, "run", *QUICK_FLUX, "--set", "quadrature.max_panels=1")
    assert code == 4 and "did not converge" in err


def test_missing_file_exit_2(capsysbinary):
    code, _, _ = run(capsysbinary, "verify", "--config", str(SCEN / "does_not_exist.ini"))
    assert code == 2


def test_simulate_constant_force(capsysbinary):
    code, raw, _ = run(capsysbinary, "run", "--config", str(SCEN / "constant_force.ini"), "--format", "structured")
    data = json.loads(raw)
    assert code == 0
    assert data["status"] == "pass"
    names = {row[1] for row in data["tables"]["checks"]["rows"]}
    assert {"constant_force_position", "constant_force_time", "max_drift"} <= names


def test_in_process_determinism(capsysbinary):
    first = run(capsysbinary, "run", "--config", str(SCEN / "free_uniform.ini"), "--format", "csv")
    second = run(capsysbinary, "run", "--config", str(SCEN / "free_uniform.ini"), "--format", "csv")
    assert first[0] == 0 and first[1] == second[1]
