import json
from fractions import Fraction

import pytest

from ietkit import Iem, __version__, symmetric_pair
from ietkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_induce_word(capsys):
    code, out = run(capsys, "induce", "--word", "C B^3 (D^2 A^3 D)^2 B",
                    "--start", "ABDC/DACB", "--depth", "17")
    assert code == 0
    data = json.loads(out)
    assert data["tool"] == "ietkit" and data["version"] == __version__
    assert data["depth"] == 17
    assert data["cocycle_norm"] == 71
    assert data["config"]["seed"] == 0
    for block in data["blocks"]:
        assert set(block) == {"k", "time", "winner", "matrix"}


def test_induce_map_depth_zero(tmp_path, capsys):
    T = Iem(symmetric_pair("ABC"),
            {"A": Fraction(1, 2), "B": Fraction(1, 3), "C": Fraction(1, 6)})
    path = tmp_path / "map.json"
    path.write_text(json.dumps(T.to_json_dict()))
    code, out = run(capsys, "induce", "--map", str(path), "--depth", "0")
    assert code == 0
    data = json.loads(out)
    assert data["depth"] == 0 and data["blocks"] == []


def test_parse_error_exit_code(capsys):
    assert main(["induce", "--word", "Q Q", "--start", "AB/BA"]) == 2
    assert main(["induce", "--word", "A (B", "--start", "AB/BA"]) == 2
    assert main(["induce", "--start", "AB/BA"]) == 2  # neither word nor map


def test_csv_format(capsys):
    code, out = run(capsys, "induce", "--word", "A B A B", "--start", "AB/BA",
                    "--depth", "4", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "k,time,winner,matrix"


def test_determinism(capsys):
    args = ("diagnose", "--word", "C B^3 (D^2 A^3 D)^2 B", "--start", "ABDC/DACB",
            "--depth", "17", "--seed", "7", "--k-max", "3")
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second


def test_three_requires_reversing_permutation(capsys, tmp_path):
    T = Iem(symmetric_pair("ABCD"),
            {a: Fraction(1, 4) for a in "ABCD"})
    path = tmp_path / "map.json"
    path.write_text(json.dumps(T.to_json_dict()))
    assert main(["three", "--map", str(path)]) == 2


def test_three_report(capsys, tmp_path):
    T = Iem(symmetric_pair("ABC"),
            {"A": Fraction(355, 1000), "B": Fraction(113, 1000), "C": Fraction(532, 1000)})
    path = tmp_path / "map.json"
    path.write_text(json.dumps(T.to_json_dict()))
    code, out = run(capsys, "three", "--map", str(path), "--depth", "100",
                    "--k-max", "3")
    assert code == 0
    data = json.loads(out)
    hard = {k: v for k, v in data["checks"].items() if v is not None}
    assert all(hard.values())
    assert data["rotation"]["alpha"] == "215/371"


def test_verify_paper(capsys):
    code, out = run(capsys, "verify-paper")
    assert code == 0
    data = json.loads(out)
    assert data["all_ok"]
    names = [f["name"] for f in data["fixtures"]]
    assert any("block 4" in n for n in names)
    assert all(f["ok"] for f in data["fixtures"])


def test_class_dump(capsys):
    code, out = run(capsys, "class", "--start", "ABC/CBA")
    assert code == 0
    data = json.loads(out)
    assert data["vertex_count"] == 3 and data["arrow_count"] == 6
    code, out = run(capsys, "class", "--start", "ABDC/DACB")
    assert code == 0
    assert json.loads(out)["vertex_count"] == 7


def test_out_file(tmp_path, capsys):
    target = tmp_path / "artifact.json"
    code = main(["class", "--start", "AB/BA", "--out", str(target)])
    assert code == 0
    data = json.loads(target.read_text())
    assert data["vertex_count"] == 1 and data["arrow_count"] == 2
