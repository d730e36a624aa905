import json
import subprocess
import sys

import pytest

from davio_synth.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


EX3 = ["-f", "a b ^ b c ^ a !c", "--vars", "a,b,c"]


def test_parse_range():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("2,5..6") == [2, 5, 6]


def test_synth_json(capsys):
    code, out, _ = run(capsys, "synth", *EX3)
    data = json.loads(out)
    assert code == 0
    assert data["lattice"]["level_vars"] == ["a", "a", "b", "c"]
    assert data["swat_blocks"] == 10
    assert data["circuit"]["n_qubits"] == 9


def test_synth_symmetric_six_blocks(capsys):
    code, out, _ = run(capsys, "synth", "-f", "a b ^ b c ^ a c", "--vars", "a,b,c")
    assert code == 0 and json.loads(out)["swat_blocks"] == 6


@pytest.mark.parametrize("fmt,marker", [("dot", "digraph"), ("qasm", "qreg q[9]"), ("text", "leaves: 0 0 1 1 0")])
def test_synth_formats(capsys, fmt, marker):
    code, out, _ = run(capsys, "synth", *EX3, "--format", fmt)
    assert code == 0 and marker in out


def test_synth_style(capsys):
    code, out, _ = run(capsys, "synth", *EX3, "--style", "linear-nn", "--format", "qasm")
    assert code == 0 and "ccx" not in out and "swap" not in out


def test_sweep_table(capsys):
    code, out, _ = run(capsys, "sweep", "--layouts", "square,heavy-hex,triangular", "--n", "1..7")
    assert code == 0
    assert out.splitlines() == ["n,square,heavy_hex,triangular", "1,0,0,0", "2,4,4,0", "3,8,10,0",
                                "4,16,18,0", "5,24,28,0", "6,36,40,0", "7,48,54,0"]


def test_verify_trivial(capsys):
    code, out, _ = run(capsys, "verify", "-f", "0", "--vars", "a")
    assert code == 0 and out.startswith("PASS")


def test_verify_random_is_seeded(capsys):
    first = run(capsys, "verify", "--random", "5", "--n-vars", "3", "--seed", "7")
    second = run(capsys, "verify", "--random", "5", "--n-vars", "3", "--seed", "7")
    other = run(capsys, "verify", "--random", "5", "--n-vars", "3", "--seed", "8")
    assert first == second and first[0] == 0
    assert first[1] != other[1]


def test_verify_failure_exit_one(capsys, tmp_path):
    _, out, _ = run(capsys, "synth", "-f", "a b", "--vars", "a,b")
    path = tmp_path / "c.json"
    path.write_text(out)
    code, out, _ = run(capsys, "verify", "-f", "a ^ b", "--vars", "a,b", "--input", str(path))
    assert code == 1 and out.startswith("FAIL")


def test_usage_errors(capsys):
    assert run(capsys, "synth")[0] == 2
    assert run(capsys, "synth", "-f", "a ^ ^")[0] == 2
    assert run(capsys, "synth", "-f", "a q", "--vars", "a")[0] == 2
    assert run(capsys, "map", *EX3)[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "sweep", "--n", "0..3")[0] == 2


def test_level_budget_exit_three(capsys):
    code, _, err = run(capsys, "synth", *EX3, "--max-levels", "3")
    assert code == 3 and "budget" in err


def test_map_and_export_round_trip(capsys, tmp_path):
    _, out, _ = run(capsys, "synth", *EX3)
    synth = tmp_path / "s.json"
    synth.write_text(out)
    code, out, _ = run(capsys, "map", "--input", str(synth), "--layout", "heavy-hex", "--route")
    assert code == 0
    data = json.loads(out)
    assert data["report"]["bound_only"] is True
    assert data["report"]["total_swaps"] == sum(data["report"]["per_swat_swaps"])
    mapped = tmp_path / "m.json"
    mapped.write_text(out)
    for path in (synth, mapped):
        code, again, _ = run(capsys, "export", "--input", str(path))
        assert code == 0 and again == path.read_text()
    code, qasm, _ = run(capsys, "export", "--input", str(synth), "--format", "qasm")
    assert code == 0 and qasm.startswith("qreg")
    assert run(capsys, "export", "--input", str(synth), "--format", "csv")[0] == 2


def test_deterministic_output(capsys):
    assert run(capsys, "synth", *EX3) == run(capsys, "synth", *EX3)
    assert run(capsys, "map", *EX3, "--layout", "square") == run(capsys, "map", *EX3, "--layout", "square")


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "sweep", "layouts": ["square"], "n": "3..4"}))
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0 and out.splitlines() == ["n,square", "3,8", "4,16"]
    # command-line flags override the file
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--n", "2")
    assert out.splitlines() == ["n,square", "2,4"]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", "--n", "1..2", "-o", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("n,")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "davio_synth.cli", "verify", "-f", "a b", "--vars", "a,b"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")
