import subprocess
import sys

import pytest

from qramkit.cli import EXIT_MISMATCH, EXIT_NOT_HALTED, EXIT_NOT_WELL_FORMED, EXIT_OK, EXIT_PARSE, main
from qramkit.qram import parse_qram
from qramkit.qrasp import OPCODES, parse_image

from corpus import QRAM_SOURCES, QRASP_SOURCES

COIN = "H Q[X0]\nX1 <- M Q[X0]\nWRITE X1\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_coin(tmp_path, capsys):
    code, out, _ = run(capsys, "run", write(tmp_path, "coin.qram", COIN))
    assert code == EXIT_OK and out == "0\t1/2\n1\t1/2\n"


def test_run_empty_program(tmp_path, capsys):
    code, out, _ = run(capsys, "run", write(tmp_path, "empty.qram", ""))
    assert code == EXIT_OK and out == "\t1\n"


def test_run_with_input_and_stats(tmp_path, capsys):
    f = write(tmp_path, "echo.qram", QRAM_SOURCES["echo"])
    code, out, _ = run(capsys, "run", f, "101", "--stats", "--cost", "const")
    lines = out.splitlines()
    assert code == EXIT_OK and lines[0].endswith("\t1")
    assert any(ln.startswith("# worst_case_time ") for ln in lines)


def test_sampling_is_byte_identical(tmp_path, capsys):
    f = write(tmp_path, "coin.qram", COIN)
    a = run(capsys, "run", f, "--shots", "1000", "--seed", "7")
    b = run(capsys, "run", f, "--shots", "1000", "--seed", "7")
    assert a == b and a[0] == EXIT_OK


def test_non_halting_mass_exits_two(tmp_path, capsys):
    f = write(tmp_path, "loop.qram", "X1 <- 1\nL: TRA L IF X1 > 0\n")
    code, _, err = run(capsys, "run", f, "--max-steps", "50")
    assert code == EXIT_NOT_HALTED and "warning" in err


def test_parse_failure_exits_one(tmp_path, capsys):
    code, _, err = run(capsys, "run", write(tmp_path, "bad.qram", "X1 <-\n"))
    assert code == EXIT_PARSE and err


def test_missing_file_exits_one(tmp_path, capsys):
    assert run(capsys, "run", str(tmp_path / "nope.qram"))[0] == EXIT_PARSE


def test_unknown_extension_exits_one(tmp_path, capsys):
    assert run(capsys, "run", write(tmp_path, "x.txt", COIN))[0] == EXIT_PARSE


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_PARSE


def test_run_qrasp_and_image(tmp_path, capsys):
    code, out, _ = run(capsys, "run", write(tmp_path, "c.qrasp", QRASP_SOURCES["coin"]))
    assert code == EXIT_OK and out == "0\t1/2\n1\t1/2\n"
    img = write(tmp_path, "h.qri", "9 0 11 0 4 9 7 9 0")
    code, out, _ = run(capsys, "run", img)
    assert code == EXIT_OK and out == "0\t1/2\n1\t1/2\n"


def test_compile_qrasp_to_qram_with_verify(tmp_path, capsys):
    src = write(tmp_path, "sum.qrasp", QRASP_SOURCES["sum"])
    dst = tmp_path / "sum.qram"
    code, _, err = run(capsys, "compile", src, "-o", str(dst), "--verify", "01,11", "--verify", "1")
    assert code == EXIT_OK and err.count("ok") == 3
    parse_qram(dst.read_text())


def test_compile_qram_to_qrasp_cnot_width(tmp_path, capsys):
    src = write(tmp_path, "c.qram", "CNOT Q[X1] Q[X2]\n")
    code, out, _ = run(capsys, "compile", src, "--verify", "")
    assert code == EXIT_OK and OPCODES["CNOT"] in parse_image(out).cells


def test_compile_malformed_exits_one(tmp_path, capsys):
    assert run(capsys, "compile", write(tmp_path, "b.qrasp", "FOO, 1\n"))[0] == EXIT_PARSE


@pytest.mark.parametrize("name, extra", [("shift", ["--k", "2"]), ("safe", []), ("postpone", [])])
def test_transform_verify_and_check(tmp_path, capsys, name, extra):
    src = write(tmp_path, "p.qram", QRAM_SOURCES["remeasure"])
    code, out, err = run(capsys, "transform", src, name, *extra, "--verify", ",1,01", "--check")
    assert code == EXIT_OK and "MISMATCH" not in err
    assert all("0 forbidden" in ln for ln in err.splitlines() if ln.startswith("# check"))
    parse_qram(out)


def test_transform_unknown_name(tmp_path, capsys):
    assert run(capsys, "transform", write(tmp_path, "p.qram", COIN), "fold")[0] == EXIT_PARSE


def test_transform_shift_needs_k(tmp_path, capsys):
    assert run(capsys, "transform", write(tmp_path, "p.qram", COIN), "shift")[0] == EXIT_PARSE


def test_export_and_validate(tmp_path, capsys):
    f = tmp_path / "copy.qtm"
    assert run(capsys, "export", "copy", "-o", str(f))[0] == EXIT_OK
    code, out, _ = run(capsys, "validate", str(f))
    fields = dict(ln.split("\t") for ln in out.splitlines())
    assert code == EXIT_OK and fields["defect"] == "0.0" and fields["normal_form"] == "True"
    assert fields["stationary"] == "True"


def test_validate_printed_inc_reports_defect(tmp_path, capsys):
    f = tmp_path / "inc.qtm"
    run(capsys, "export", "inc", "-o", str(f))
    code, out, _ = run(capsys, "validate", str(f))
    assert code == EXIT_NOT_WELL_FORMED and "defect\t1.0" in out


def test_validate_non_unitary(tmp_path, capsys):
    text = "STATES q qf\nTRACKS 1\nALPHABETS\n# 0 1\nSTART q\nFINAL qf\nRULES\nq (0) -> (0) q R 1/sqrt2\n"
    code, out, _ = run(capsys, "validate", write(tmp_path, "half.qtm", text))
    assert code == EXIT_NOT_WELL_FORMED and "defect\t0.5" in out


def test_validate_window_zero(tmp_path, capsys):
    f = tmp_path / "copy.qtm"
    run(capsys, "export", "copy", "-o", str(f))
    assert run(capsys, "validate", str(f), "--window", "0")[0] == EXIT_PARSE


def test_export_unknown(capsys):
    assert run(capsys, "export", "zap")[0] == EXIT_PARSE


def test_run_qtm(tmp_path, capsys):
    f = tmp_path / "copy.qtm"
    run(capsys, "export", "copy", "-o", str(f))
    code, out, _ = run(capsys, "run", str(f), "101", "--stats")
    assert code == EXIT_OK and out == "101\t1\n# p(10) 1\n"


def test_circuit(tmp_path, capsys):
    mats = tmp_path / "std.mat"
    mats.write_text("gate 1 1\n1/sqrt2 1/sqrt2\n1/sqrt2 -1/sqrt2\ngate 2 2\n1 0 0 0\n0 1 0 0\n0 0 0 1\n0 0 1 0\n")
    desc = write(tmp_path, "bell.cir", "1 0 2 0 1 -1\n0 -1\n0 1 -1\n0 -1\n")
    code, out, _ = run(capsys, "circuit", desc, str(mats), "0")
    assert code == EXIT_OK and out == "00\t1/2\n01\t0\n10\t0\n11\t1/2\n"
    code, out, _ = run(capsys, "circuit", desc, str(mats), "0", "--mode", "float")
    probs = dict(ln.split("\t") for ln in out.splitlines())
    assert code == EXIT_OK and float(probs["00"]) == pytest.approx(0.5)


def test_circuit_bad_input_exits_one(tmp_path, capsys):
    mats = write(tmp_path, "m.mat", "gate 1 1\n1 0\n0 1\n")
    desc = write(tmp_path, "c.cir", "1 0 -1 0 -1 0 -1 -1\n")
    assert run(capsys, "circuit", desc, mats, "11")[0] == EXIT_PARSE


def test_inputs_are_not_modified(tmp_path, capsys):
    f = write(tmp_path, "p.qram", QRAM_SOURCES["indirect"])
    before = open(f).read()
    run(capsys, "transform", f, "safe")
    run(capsys, "compile", f)
    assert open(f).read() == before


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "coin.qram", COIN)
    r = subprocess.run([sys.executable, "-m", "qramkit", "run", f], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "0\t1/2\n1\t1/2\n"


def test_verify_mismatch_exits_three(tmp_path, capsys, monkeypatch):
    import qramkit.cli as cli

    monkeypatch.setattr(cli, "make_address_safe", lambda p: parse_qram("X1 <- 1\nWRITE X1"))
    code, _, err = run(capsys, "transform", write(tmp_path, "p.qram", COIN), "safe", "--verify", "")
    assert code == EXIT_MISMATCH and "MISMATCH" in err
