import json
import pathlib

import pytest

from gvpa.cli import main

DATA = pathlib.Path(__file__).parent / "data"
TRAFFIC = str(DATA / "traffic.gvpa")

EXAMPLE3 = """
domain { 0, 1 }
vars { v }
acts { a }
init (v = 0) -> a.delta || assign(v, 1).delta with { v = 0 }
"""


@pytest.fixture()
def example3_file(tmp_path):
    path = tmp_path / "example3.gvpa"
    path.write_text(EXAMPLE3, encoding="utf-8")
    return str(path)


class TestValidate:
    def test_ok(self, capsys):
        assert main(["validate", TRAFFIC]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_input_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.gvpa"
        bad.write_text("domain { } acts { a } init delta with { }")
        assert main(["validate", str(bad)]) == 2

    def test_missing_file_exit_2(self):
        assert main(["validate", "/nonexistent.gvpa"]) == 2


class TestLts:
    def test_aut_header_on_stdout(self, capsys):
        assert main(["lts", TRAFFIC, "--format", "aut"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "des (0,9,6)"

    def test_dot_to_file(self, tmp_path, capsys):
        target = tmp_path / "traffic.dot"
        assert main(["lts", TRAFFIC, "--format", "dot",
                     "--out", str(target)]) == 0
        assert target.read_text().startswith("digraph")

    def test_resource_cap_exit_3(self, capsys):
        assert main(["lts", TRAFFIC, "--max-states", "2"]) == 3


class TestModelcheck:
    def test_true_formula_exit_0(self, capsys):
        assert main(["modelcheck", TRAFFIC, "--formula", "<drive> true"]) == 0
        assert capsys.readouterr().out.strip() == "true"

    def test_false_formula_exit_1(self, capsys):
        assert main(["modelcheck", TRAFFIC, "--formula", "(t = red)"]) == 1
        assert capsys.readouterr().out.strip() == "false"

    def test_formula_file(self, tmp_path, capsys):
        path = tmp_path / "prop.hml"
        path.write_text("[assign(t, red)] (t = red)")
        assert main(["modelcheck", TRAFFIC, "--formula-file", str(path)]) == 0

    def test_json_payload(self, capsys):
        assert main(["--json", "modelcheck", TRAFFIC,
                     "--formula", "set t := red . (t = red)"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload == {"verdict": True, "fragment": "HML^check+set",
                           "formula": "set t := red . (t = red)"}


class TestBisim:
    def test_stateless_reflexive_exit_0(self, capsys):
        assert main(["bisim", TRAFFIC, "--mode", "stateless",
                     "--left", "CAR", "--right", "CAR"]) == 0

    def test_strong_pair(self, example3_file):
        assert main(["bisim", example3_file, "--mode", "strong",
                     "--left", "(v = 0) -> a.delta",
                     "--right", "a.delta"]) == 0

    def test_stateless_false_includes_witness(self, example3_file, capsys):
        code = main(["--json", "bisim", example3_file, "--mode", "stateless",
                     "--left", "a.delta", "--right", "(v = 0) -> a.delta"])
        assert code == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["verdict"] is False
        assert payload["witness_formula"] == "set v := 1 . <a> true"
        assert payload["witness_valuation"] == "v=0"

    def test_state_based_with_valuation_flag(self, example3_file):
        # at v=0 the pair is bisimilar, at v=1 the condition silences the left
        assert main(["bisim", example3_file, "--mode", "state-based",
                     "--left", "(v = 0) -> a.delta", "--right", "a.delta",
                     "--valuation", "v=0"]) == 0
        assert main(["bisim", example3_file, "--mode", "state-based",
                     "--left", "(v = 0) -> a.delta", "--right", "a.delta",
                     "--valuation", "v=1"]) == 1


class TestDistinguish:
    def test_stateless_formula_rechecks_through_modelcheck(self, tmp_path, capsys):
        base = ("domain {{ 0, 1 }}\nvars {{ v }}\nacts {{ a }}\n"
                "init {root} with {{ v = 0 }}\n")
        pair_file = tmp_path / "pair.gvpa"
        pair_file.write_text(base.format(root="a.delta"))
        code = main(["distinguish", str(pair_file), "--mode", "stateless",
                     "--left", "a.delta", "--right", "(v = 0) -> a.delta"])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        formula, valuation = out[0], out[1].removeprefix("valuation: ")
        # the formula must hold at the left expression and fail at the right,
        # under the reported witness valuation
        left = tmp_path / "left.gvpa"
        left.write_text(base.format(root="a.delta")
                        .replace("v = 0 }", f"{valuation.replace('=', ' = ')} }}"))
        right = tmp_path / "right.gvpa"
        right.write_text(base.format(root="(v = 0) -> a.delta")
                         .replace("v = 0 }", f"{valuation.replace('=', ' = ')} }}"))
        capsys.readouterr()
        assert main(["modelcheck", str(left), "--formula", formula]) == 0
        assert main(["modelcheck", str(right), "--formula", formula]) == 1

    def test_identical_processes_exit_1(self, capsys):
        code = main(["distinguish", TRAFFIC, "--mode", "stateless",
                     "--left", "CAR", "--right", "CAR"])
        assert code == 1
        assert "no distinguishing formula" in capsys.readouterr().out

    def test_state_based_parallel_pair(self, example3_file, capsys):
        code = main(["distinguish", example3_file, "--mode", "state-based",
                     "--left", "(v = 0) -> a.delta || assign(v, 1).delta",
                     "--right", "a.delta || assign(v, 1).delta"])
        assert code == 0
        assert capsys.readouterr().out


class TestTranslate:
    def test_writes_files(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        formulas = tmp_path / "props.txt"
        formulas.write_text("(t = green)\n// comment\n<drive> true\n")
        code = main(["translate", TRAFFIC, "--out", str(out_dir),
                     "--formulas", str(formulas)])
        assert code == 0
        assert (out_dir / "traffic.mcrl2").exists()
        assert (out_dir / "traffic_prop1.mcf").read_text() \
            == "<value(t, green)>true\n"
        assert (out_dir / "traffic_prop2.mcf").read_text() == "<drive>true\n"

    def test_exports_both_aut_files(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["translate", TRAFFIC, "--out", str(out_dir)]) == 0
        source = (out_dir / "traffic.source.aut").read_text()
        translated = (out_dir / "traffic.translated.aut").read_text()
        assert source.splitlines()[0] == "des (0,9,6)"
        assert translated.splitlines()[0] == "des (0,15,6)"
        assert '"value(t,green)"' in translated


class TestVerifyTranslation:
    def test_traffic_all_pass(self, capsys):
        assert main(["verify-translation", TRAFFIC]) == 0
        out = capsys.readouterr().out
        assert "PASS variable-consistency" in out
        assert "FAIL" not in out

    def test_json_schema(self, capsys):
        assert main(["--json", "verify-translation", TRAFFIC]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["ok"] is True
        assert {c["name"] for c in payload["checks"]} >= {
            "variable-consistency", "structure-preservation",
            "bisimilarity-preservation"}


class TestJsonStability:
    def test_same_output_across_runs(self, capsys):
        main(["--json", "bisim", TRAFFIC, "--mode", "stateless",
              "--left", "CAR", "--right", "TLC"])
        first = capsys.readouterr().out
        main(["--json", "bisim", TRAFFIC, "--mode", "stateless",
              "--left", "CAR", "--right", "TLC"])
        second = capsys.readouterr().out
        assert first == second
