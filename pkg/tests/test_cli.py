from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from localzeta.cli import ConfigError, build_config, parse_box, parse_element, read_config_text, run_command
from localzeta.coeffs import get_field

LEMMA_CFG = """\
# lattice indicator on F^3 at q = 3
q = 3
N = 5
c_exp = 1
alpha_exp = 2
box = ball:0 ball:0 ball:0
"""


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def lemma_cfg(tmp_path):
    p = tmp_path / "lemma.cfg"
    p.write_text(LEMMA_CFG)
    return str(p)


def test_check_unramified_example():
    code, out, _ = run(["check-unramified", "--m", "2", "--q", "3", "--N", "5", "--c-exp", "1"])
    assert code == 0
    assert "pass" in out


def test_check_lemma_subpieces_example(lemma_cfg):
    code, out, _ = run(["check-lemma", "--config", lemma_cfg, "--mode", "subpieces"])
    assert code == 0
    assert "(4):" in out and "lemma certificate: pass" in out


def test_constants_example():
    code, out, _ = run(["constants", "--q", "4", "--all-satake-one"])
    assert code == 0
    assert "c_v = 4/7" in out


def test_failed_verification_exits_one():
    # c = zeta_4: the regularized unramified period is 1/2
    code, out, _ = run(["local-period", "--q", "3", "--N", "4", "--c-exp", "1"])
    assert code == 1


def test_divergent_period_is_a_failed_check():
    code, out, _ = run(["local-period", "--q", "3", "--N", "2", "--c-exp", "1"])
    assert code == 1 and "divergent" in out


def test_passing_period_exits_zero():
    code, _, _ = run(["local-period", "--q", "3", "--N", "3", "--c-exp", "1"])
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["constants", "--q", "6", "--all-satake-one"],
    ["check-unramified", "--q", "3", "--m", "3"],
    ["eval-zeta", "--q", "3", "--shift", "1/3"],
    ["check-lemma", "--config", "/nonexistent/lemma.cfg"],
])
def test_invalid_input_exits_two(argv):
    code, _, _ = run(argv)
    assert code == 2


def test_field_level_messages(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("q = 3\nbox = ball:0 cube:1\n")
    code, _, err = run(["eval-zeta", "--config", str(bad)])
    assert code == 2 and "box:" in err
    with pytest.raises(ConfigError, match="^colour:"):
        build_config({"q": "3", "colour": "red"})
    with pytest.raises(ConfigError, match="^sigma:"):
        build_config({"q": "3", "sigma": "1,2,3"})
    with pytest.raises(ConfigError, match="^q:"):
        build_config({})
    with pytest.raises(ConfigError, match="^t0:"):
        build_config({"q": "3", "t0": "1.5"})
    with pytest.raises(ConfigError, match="duplicate"):
        read_config_text("q = 3\nq = 5\n")


def test_parse_helpers():
    F = get_field(3, 5)
    assert parse_element(F, "1/2") == F.from_rational(0.5)
    assert parse_element(F, "zeta^2") == F.zeta(2)
    assert parse_element(F, "-3*zeta^1") == F.zeta(1) * -3
    assert parse_box("ball:-1 shell:0 ball:0 * 2") == ([("ball", -1), ("shell", 0), ("ball", 0)], "2")
    with pytest.raises(ConfigError):
        parse_element(F, "pi")


def test_reports_are_deterministic(lemma_cfg, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["check-lemma", "--config", lemma_cfg, "--report", str(a)])[0] == 0
    assert run(["check-lemma", "--config", lemma_cfg, "--report", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["schema"] == "localzeta.report/1"
    assert doc["config"]["q"] == 3
    assert "timing_seconds" not in doc
    assert [p["id"] for p in doc["result"]["pieces"]] == ["(1)", "(2)", "(3)"]


def test_timing_only_on_request():
    code, out, _ = run(["eval-zeta", "--q", "3", "--kind", "gl1", "--json", "--timing"])
    assert code == 0
    doc = json.loads(out)
    assert "timing_seconds" in doc
    assert "closed_form" in doc["result"]


def test_truncation_compare():
    assert run(["truncation-compare", "--q", "3", "--N", "5", "--c-exp", "1", "--kind", "gl2"])[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "localzeta", "constants", "--q", "4", "--all-satake-one"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "c_v = 4/7" in proc.stdout
