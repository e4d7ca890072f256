import json
import shutil
from pathlib import Path

import pytest

from hyll.cli import hyll_main, spi_main
from hyll.kernel.cert import dump_proof, load_proof
from hyll.parse import parse_goal, print_goal

DATA = Path(__file__).parent / "data"


def run(main, *argv, capsys):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# -- golden files


def test_goal_golden():
    text = (DATA / "s5.goal").read_text()
    assert print_goal(parse_goal(text)) == text
    assert parse_goal((DATA / "s5.hyll").read_text()) == parse_goal(text)


def test_certificate_golden():
    text = (DATA / "s5.proof").read_text()
    assert dump_proof(load_proof(text)) == text


# -- hyll


def test_prove_s5(capsys, tmp_path):
    cert = tmp_path / "s5.proof"
    code, out, _ = run(hyll_main, "prove", DATA / "s5.hyll", "--out", cert, capsys=capsys)
    assert code == 0 and "lf" in out
    code, out, _ = run(hyll_main, "check", cert, capsys=capsys)
    assert code == 0


def test_prove_structured(capsys):
    code, out, _ = run(hyll_main, "prove", DATA / "s5.hyll", "--format", "structured", capsys=capsys)
    doc = json.loads(out)
    assert code == 0 and doc["found"] and doc["phases"][0].startswith("active:")


def test_prove_absurd_fails(capsys):
    code, out, _ = run(hyll_main, "prove", DATA / "absurd.hyll", "--fuel", "6", capsys=capsys)
    assert code == 1 and "budget exhausted" in out


def test_prove_wrong_domain_is_s5_failure(capsys):
    code, _, _ = run(hyll_main, "prove", DATA / "s5.hyll", "--domain", "rates", "--fuel", "4",
                     capsys=capsys)
    assert code == 1


def test_fuel_from_env(capsys, monkeypatch):
    monkeypatch.setenv("HYLL_FUEL_DEFAULT", "1")
    code, out, _ = run(hyll_main, "prove", DATA / "s5.hyll", capsys=capsys)
    assert code == 1 and "1 decision" in out


def test_check_tampered_certificate(capsys, tmp_path):
    bad = tmp_path / "bad.proof"
    bad.write_text((DATA / "s5.proof").read_text().replace('"init"', '"topR"'))
    code, out, _ = run(hyll_main, "check", bad, capsys=capsys)
    assert code == 1


def test_parse_error_exit_2(capsys, tmp_path):
    f = tmp_path / "g.hyll"
    f.write_text("a @ u . ==> a @ u\n")
    code, _, err = run(hyll_main, "prove", f, capsys=capsys)
    assert code == 2 and "col" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, _ = run(hyll_main, "check", tmp_path / "nope", capsys=capsys)
    assert code == 2


def test_bad_option_exit_2(capsys):
    code, _, _ = run(hyll_main, "prove", DATA / "s5.hyll", "--domain", "reals", capsys=capsys)
    assert code == 2


def test_selftest_adequacy(capsys):
    code, out, _ = run(hyll_main, "selftest", "adequacy", capsys=capsys)
    assert code == 0 and "FAIL" not in out


def test_selftest_kernel_structured(capsys):
    code, out, _ = run(hyll_main, "selftest", "kernel", "--format", "structured", capsys=capsys)
    assert code == 0 and json.loads(out)["status"] == 0


# -- spi


def test_step_fig4(capsys):
    code, out, _ = run(spi_main, "step", DATA / "fig4.spi", capsys=capsys)
    assert code == 0 and "sync(x, 4, a)" in out


def test_encode_fig4(capsys):
    code, out, _ = run(spi_main, "encode", DATA / "fig4.spi", capsys=capsys)
    assert code == 0 and "dt -o" in out and "rt(x) @ [4]" in out


def test_simulate_then_certify(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    code, out, _ = run(spi_main, "simulate", DATA / "fig4.spi", "--seed", 3, "--certify",
                       "--out", trace, capsys=capsys)
    assert code == 0 and "certified: True" in out
    code, out, _ = run(spi_main, "certify", DATA / "fig4.spi", trace, "--phases", capsys=capsys)
    want = (DATA / "fig4.phases").read_text().splitlines()[:5]
    lines = [ln.strip() for ln in out.splitlines()]
    assert code == 0 and lines[1:6] == want


def test_certify_emits_kernel_proof(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    run(spi_main, "simulate", DATA / "fig4.spi", "--seed", 1, "--out", trace, capsys=capsys)
    cert = tmp_path / "t.proof"
    code, _, _ = run(spi_main, "certify", DATA / "fig4.spi", trace, "--emit", cert, capsys=capsys)
    assert code == 0
    code, _, _ = run(hyll_main, "check", cert, capsys=capsys)
    assert code == 0


def test_tampered_trace_rejected(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    run(spi_main, "simulate", DATA / "fig4.spi", "--seed", 3, "--out", trace, capsys=capsys)
    trace.write_text(trace.read_text().replace('"world": "[4]"', '"world": "[5]"'))
    code, out, err = run(spi_main, "certify", DATA / "fig4.spi", trace, capsys=capsys)
    assert code == 1 and "event 1" in out + err


def test_trace_rate_mismatch(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    run(spi_main, "simulate", DATA / "fig4.spi", "--seed", 3, "--out", trace, capsys=capsys)
    text = trace.read_text().replace('"x": "4"', '"x": "5"').replace('"rate": "4"', '"rate": "5"')
    text = text.replace("[4", "[5")
    trace.write_text(text)
    code, out, err = run(spi_main, "certify", DATA / "fig4.spi", trace, capsys=capsys)
    assert code == 1 and "trace says rate 5, program says 4" in out + err


def test_replications(capsys, tmp_path):
    out_base = tmp_path / "run"
    code, out, _ = run(spi_main, "simulate", DATA / "server.spi", "--seed", 2, "--runs", 3,
                       "--out", out_base, "--certify", capsys=capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["run.0", "run.1", "run.2"]


def test_spi_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.spi"
    f.write_text("run x!(a).\n")
    code, _, err = run(spi_main, "step", f, capsys=capsys)
    assert code == 2 and "error" in err


@pytest.mark.skipif(shutil.which("spi") is None, reason="console scripts not installed")
def test_console_script_exit_code():
    import subprocess
    r = subprocess.run(["spi", "step", str(DATA / "fig4.spi")], capture_output=True, text=True)
    assert r.returncode == 0
