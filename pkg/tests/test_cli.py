import io
import subprocess
import sys
from pathlib import Path
from types import SimpleNamespace

import pytest

from amsms.cli import (
    EXIT_OK, EXIT_SCENARIO, EXIT_USAGE, ScenarioError, cmd_at_console, main, parse_scenario,
    parse_scenario_text,
)
from amsms.sensing import AdcFrame

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden" / "report_round0.txt"


def test_parse_single_row():
    assert parse_scenario(DATA / "trespass_round.csv") == [AdcFrame(1023, 93, 1023, 646)]


def test_parse_empty():
    assert parse_scenario_text("") == []
    assert parse_scenario_text("# nothing\n\n") == []


def test_parse_repeat():
    frames = parse_scenario_text("0,1,2,3,4\nrepeat 2\n3, 5,6,7,8  # tail comment\n")
    assert frames == [AdcFrame(1, 2, 3, 4)] * 3 + [AdcFrame(5, 6, 7, 8)]


@pytest.mark.parametrize("text, lineno", [
    ("1,1024,0,0,0", 1),
    ("0,0,0,0,0\n\n0,1,1,1,1", 3),
    ("0,0,0,0", 1),
    ("0,a,0,0,0", 1),
    ("# c\nrepeat 3", 2),
    ("0,0,0,0,-1", 1),
])
def test_parse_errors_name_line(text, lineno):
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def run_cli(tmp_path, scenario, *extra):
    scen = tmp_path / "scenario.csv"
    scen.write_text(scenario)
    log, outbox = tmp_path / "report.txt", tmp_path / "outbox.tsv"
    code = main(["run", "--scenario", str(scen), "--dest-phone", "0800453947",
                 "--location", "Lab-A", "--log", str(log), "--outbox", str(outbox),
                 "--fixed-clock", "2013-06-01T10:15:00", *extra])
    return code, log, outbox


def test_run_trespass_scenario(tmp_path, capsys):
    code, log, outbox = run_cli(tmp_path, "0,1023,93,1023,646\n")
    assert code == EXIT_OK
    assert log.read_bytes() == GOLDEN.read_bytes()
    assert outbox.read_text() == (
        "1\t0800453947\tAMSMS Lab-A 2013-06-01T10:15:00 T=30C REF=100C STATUS=4 Trespassing\n")
    assert "rounds=1 alerts=1" in capsys.readouterr().out


def test_run_every_round(tmp_path):
    code, _, outbox = run_cli(tmp_path, "0,1023,93,1023,646\nrepeat 2\n", "--alert-mode", "every_round")
    assert code == EXIT_OK
    assert len(outbox.read_text().splitlines()) == 3


def test_run_sun_mode_changes_detection(tmp_path):
    # 1600 mV light reading: quiet indoors, trespass in sunlight
    scenario = "0,1023,0,1023,496\n"
    _, log, _ = run_cli(tmp_path, scenario)
    assert "Trespassing" not in log.read_text()
    _, log, _ = run_cli(tmp_path, scenario, "--light-mode", "sun")
    assert "Trespassing" in log.read_text()


def test_run_empty_scenario(tmp_path):
    code, log, outbox = run_cli(tmp_path, "")
    assert code == EXIT_OK
    assert log.read_bytes() == b""
    assert outbox.read_text() == ""


def test_run_bad_scenario(tmp_path, capsys):
    code, _, _ = run_cli(tmp_path, "1,1024,0,0,0\n")
    assert code == EXIT_SCENARIO
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "scenario error" in err[0] and "line 1" in err[0]


def test_run_missing_scenario(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope"), "--dest-phone", "1"]) == EXIT_SCENARIO
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def test_run_unwritable_log(tmp_path, capsys):
    code, _, _ = run_cli(tmp_path, "", "--log", str(tmp_path / "no" / "such" / "dir.txt"))
    assert code == 3
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "runtime error" in err[0]


@pytest.mark.parametrize("argv", [
    [], ["run"], ["run", "--scenario", "x"], ["run", "--scenario", "x", "--dest-phone", "abc"],
    ["run", "--scenario", "x", "--dest-phone", "1", "--alert-mode", "sometimes"],
    ["run", "--scenario", "x", "--dest-phone", "1", "--fixed-clock", "yesterday"],
])
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_USAGE
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def console(lines):
    out = io.StringIO()
    assert cmd_at_console(SimpleNamespace(operator="TH GSM"), io.StringIO(lines), out) == 0
    return out.getvalue().splitlines()


def test_console_session():
    assert console("AT\nAT+COPS?\nXYZ\n") == ["OK", '+COPS: 0,0,"TH GSM"', "OK", "ERROR"]


def test_console_sms_and_quit():
    out = console('AT+CMGF=1\nAT+CMGS="0800453947"\nhello^Z\n/quit\nAT\n')
    assert out == ["OK", ">", "+CMGS: 1", "OK"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "amsms", "at-console"], input="AT\n",
                          capture_output=True, text=True, timeout=30)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "OK"
