import json
import subprocess
import sys

import pytest

from brinv.catalog import BUILTIN, GermSpecFile, SpecError
from brinv.cli import main


def write_spec(path, **kw):
    data = {"variables": ["x", "y"], "phi": ["x^3 - y^2"], "omega": ["y", "x"], "label": "cusp"}
    data.update(kw)
    path.write_text(json.dumps(data))
    return path


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


class TestCompute:
    def test_cusp(self, tmp_path, capsys):
        code, out = run_json(capsys, ["compute", "--input", str(write_spec(tmp_path / "c.json"))])
        assert code == 0
        inv = out["report"]["invariants"]
        assert (inv["mu_br"], inv["mu_br_minus"], inv["gsv"], inv["tjurina"]) == (5, 4, 6, 2)
        assert set(out["report"]["residuals"]) == {f"R{i}" for i in range(1, 8)}

    def test_not_at_origin(self, tmp_path, capsys):
        code = main(["compute", "--input", str(write_spec(tmp_path / "c.json", phi=["x^3 - y^2 + 1"]))])
        assert code == 2
        assert "NotAGermAtOrigin" in capsys.readouterr().err

    def test_undetermined(self, tmp_path, capsys):
        spec = write_spec(tmp_path / "c.json", phi=[], omega=["x", "x"])
        code, out = run_json(capsys, ["compute", "--input", str(spec), "--max-jet", "8"])
        assert code == 3
        assert out["report"]["invariants"]["mu_omega"] == "undetermined"
        assert (out["escalatedFrom"], out["maxJetDegree"]) == (8, 16)

    def test_no_escalate(self, tmp_path, capsys):
        spec = write_spec(tmp_path / "c.json", phi=[], omega=["x", "x"])
        code, out = run_json(capsys, ["compute", "--input", str(spec), "--max-jet", "8", "--no-escalate"])
        assert code == 3 and "escalatedFrom" not in out and out["maxJetDegree"] == 8

    def test_parse_error(self, tmp_path, capsys):
        code = main(["compute", "--input", str(write_spec(tmp_path / "c.json", phi=["x^3 - z"]))])
        assert code == 2
        assert "unknown variable 'z'" in capsys.readouterr().err

    def test_bad_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["compute", "--input", str(p)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["compute", "--input", str(tmp_path / "nope.json")]) == 2

    def test_printed_sign_fails(self, tmp_path, capsys):
        code, out = run_json(capsys, ["compute", "--input", str(write_spec(tmp_path / "c.json")), "--relation-sign", "printed"])
        assert code == 1
        assert out["report"]["residuals"]["R1"] == 4

    def test_table_output(self, tmp_path, capsys):
        assert main(["compute", "--input", str(write_spec(tmp_path / "c.json"))]) == 0
        text = capsys.readouterr().out
        assert "mu_br" in text and "R4" in text

    def test_max_jet_from_file(self, tmp_path, capsys):
        spec = write_spec(tmp_path / "c.json", maxJetDegree=6)
        code, out = run_json(capsys, ["compute", "--input", str(spec)])
        assert code == 0 and out["maxJetDegree"] == 6


class TestVerify:
    def test_builtin(self, capsys):
        code, out = run_json(capsys, ["verify", "--catalog", "builtin"])
        assert code == 0
        assert out["summary"]["passed"] == len(BUILTIN)
        assert set(out["summary"]["R6"]) == {s.label for s in BUILTIN if len(s.phi) == 2}

    def test_printed_sign_residual_two_tau(self, capsys):
        code, out = run_json(capsys, ["verify", "--catalog", "builtin", "--relation-sign", "printed"])
        assert code == 1
        for e in out["entries"]:
            tau = e["report"]["invariants"]["tjurina"]
            assert e["report"]["residuals"]["R1"] == 2 * tau

    def test_empty_directory(self, tmp_path):
        assert main(["verify", "--catalog", str(tmp_path)]) == 2

    def test_missing_directory(self, tmp_path):
        assert main(["verify", "--catalog", str(tmp_path / "none")]) == 2

    def test_directory_with_invalid_entry(self, tmp_path, capsys):
        write_spec(tmp_path / "a.json")
        write_spec(tmp_path / "b.json", phi=["x + 1"], label="shifted")
        (tmp_path / "c.json").write_text("[]")
        code, out = run_json(capsys, ["verify", "--catalog", str(tmp_path)])
        assert code == 2
        statuses = [e["status"] for e in out["entries"]]
        assert statuses == ["passed", "invalid", "invalid"]

    def test_deterministic_and_parallel(self, capsys):
        _, first = run_json(capsys, ["verify"])
        _, second = run_json(capsys, ["verify"])
        _, par = run_json(capsys, ["verify", "--parallel", "2"])
        assert strip_timing(first) == strip_timing(second) == strip_timing(par)


class TestOracle:
    def test_colength(self, capsys):
        code, out = run_json(capsys, ["oracle", "colength", "x^3-y^2, x*y, y^3"])
        assert code == 0 and out["colength"] == 5 and out["certificate_degree"] >= 1

    def test_tor(self, capsys):
        code, out = run_json(capsys, ["oracle", "tor", "x^3-y^2", "y,x"])
        assert code == 0 and out == {"intersection": 1, "koszul": 1}

    def test_gb(self, capsys):
        code, out = run_json(capsys, ["oracle", "gb", "x^3-y^2, x*y"])
        assert code == 0 and out["basis"] == ["x*y", "x^3 - y^2", "y^3"]

    def test_vars_option(self, capsys):
        code, out = run_json(capsys, ["oracle", "gb", "x - y", "--vars", "y,x"])
        assert out["basis"] == ["y - x"]

    def test_parse_error(self, capsys):
        assert main(["oracle", "colength", "x^3-y^2, 2x", "--vars", "x,y"]) == 2


class TestSpecFile:
    def test_roundtrip(self):
        s = BUILTIN[0]
        assert GermSpecFile.from_dict(s.to_dict()) == s

    @pytest.mark.parametrize(
        "data",
        [
            {"variables": ["x", "x"], "phi": [], "omega": ["x", "x"]},
            {"variables": ["x", "y"], "phi": [], "omega": ["x"]},
            {"variables": ["1x"], "phi": [], "omega": ["1"]},
            {"variables": ["x"], "phi": []},
            {"variables": ["x"], "phi": [], "omega": ["x"], "maxJetDegree": 0},
        ],
    )
    def test_rejects(self, data):
        with pytest.raises(SpecError):
            GermSpecFile.from_dict(data)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "brinv", "oracle", "colength", "x, y"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("1 ")
