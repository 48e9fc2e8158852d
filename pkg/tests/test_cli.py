import json
import subprocess
import sys

import pytest

from kscert.cli import main
from kscert.exact import OMEGA
from kscert.rays import build_configuration


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound_default(capsys):
    code, out, _ = run(capsys, "bound", "--k", "1/5")
    cert = json.loads(out)
    assert code == 0
    assert (cert["classicalMax"], cert["quantumValue"], cert["violation"]) == ("63/5", "67/5", True)


def test_bound_outside_window(capsys):
    cert = json.loads(run(capsys, "bound", "--k", "1/2")[1])
    assert cert["violation"] is False
    cert = json.loads(run(capsys, "bound", "--k", "0")[1])
    assert (cert["classicalMax"], cert["quantumValue"], cert["violation"]) == ("21/1", "7/1", False)


def test_bound_weights_file(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({str(i): "1/1" for i in range(21)}))
    cert = json.loads(run(capsys, "bound", "--weights", str(path))[1])
    assert cert["classicalMax"] == "63/5"
    path.write_text(json.dumps({"0": "1/1"}))
    assert run(capsys, "bound", "--weights", str(path))[0] == 2
    path.write_text(json.dumps([str(i) for i in range(20)] + ["x"]))
    assert run(capsys, "bound", "--weights", str(path))[0] == 2


def test_malformed_rational_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--k", "one/five"])
    assert exc.value.code == 2


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify-all", "--frobnicate"])
    assert exc.value.code == 2


def test_colorings(capsys):
    out = json.loads(run(capsys, "colorings")[1])
    assert out["histogram"] == {"2": 72, "0": 9}


def test_graph(capsys):
    code, out, _ = run(capsys, "graph", "--format", "dot")
    assert code == 0
    assert out.count(" -- ") == 48 and out.count("[label=") == 21
    edges = json.loads(run(capsys, "graph", "--format", "json")[1])["edges"]
    assert len(edges) == 48


def test_sweep(capsys):
    out = json.loads(run(capsys, "sweep", "--k-min", "0", "--k-max", "1/2", "--steps", "8")[1])
    assert (out["lower"], out["upper"]) == ("1/8", "1/4")
    assert len(out["samples"]) == 9
    assert [r["violation"] for r in out["samples"]] == [False, False, False, True, False, False, False, False, False]
    assert out["endpoints"]["lower"]["relation"] == "equal"


def test_sweep_bad_range(capsys):
    assert run(capsys, "sweep", "--k-min", "1", "--k-max", "0")[0] == 2


def test_figures(capsys):
    out = json.loads(run(capsys, "figures", "--choice", "0,0,0,1")[1])
    assert len(out["panels"]) == 2
    with pytest.raises(SystemExit):
        main(["figures", "--choice", "0,0,3,1"])


def test_verify_all_passes_and_is_deterministic(capsys):
    code, first, _ = run(capsys, "verify-all")
    assert code == 0
    cert = json.loads(first)
    assert cert["overallPass"] is True
    assert run(capsys, "verify-all")[1] == first


def test_certificate_has_no_floats_outside_display(capsys):
    cert = json.loads(run(capsys, "verify-all")[1])

    def walk(x, path):
        if isinstance(x, float):
            raise AssertionError(f"float at {path}")
        if isinstance(x, dict):
            for k, v in x.items():
                if k != "display":
                    walk(v, path + [k])
        if isinstance(x, list):
            for i, v in enumerate(x):
                walk(v, path + [i])

    walk(cert, [])


def test_config_round_trip(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(build_configuration().to_json()))
    code, out, _ = run(capsys, "verify-all", "--config", str(path))
    assert code == 0
    assert json.loads(out)["overallPass"]


def test_tampered_config_fails(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(build_configuration().replace_ray(0, [0, 1, OMEGA]).to_json()))
    code, out, err = run(capsys, "verify-all", "--config", str(path))
    cert = json.loads(out)
    assert code == 1 and cert["overallPass"] is False
    assert cert["sections"]["sicMub"]["passed"] is False
    assert "sicMub" in err


def test_unreadable_config_exits_2(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run(capsys, "colorings", "--config", str(path))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kscert", "colorings"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["histogram"] == {"2": 72, "0": 9}
    proc = subprocess.run([sys.executable, "-m", "kscert", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_sweep_weighted(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(["2/1"] + ["1/1"] * 20))
    code, out, _ = run(capsys, "sweep", "--weights", str(path))
    assert code == 0 and json.loads(out)["quantum"]["state"] == "given"
