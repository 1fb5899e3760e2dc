import json
import subprocess
import sys

import numpy as np
import pytest

from opparallel.cli import main
from opparallel.cstar import ModuleElement
from opparallel.jsonio import dumps, matrix_to_dict


def write(path, obj):
    d = obj.to_dict() if isinstance(obj, ModuleElement) else matrix_to_dict(np.asarray(obj))
    path.write_text(dumps(d))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mats(tmp_path):
    return {
        "A": write(tmp_path / "A.json", np.diag([1.0, 0.0])),
        "B": write(tmp_path / "B.json", np.eye(2)),
        "e11": write(tmp_path / "e11.json", np.diag([1.0, 0.0])),
        "e22": write(tmp_path / "e22.json", np.diag([0.0, 1.0])),
        "N": write(tmp_path / "N.json", [[0.0, 1.0], [0.0, 0.0]]),
        "H": write(tmp_path / "H.json", np.diag([3.0, -1.0, 2.0])),
        "C3": write(tmp_path / "C3.json", np.eye(3)),
    }


def test_check_examples(capsys, mats):
    code, out, _ = run(capsys, "check", mats["A"], mats["B"])
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] is True
    assert rep["exact"]["lambda_star"] == {"re": 1.0, "im": 0.0} or abs(rep["exact"]["lambda_star"]["re"] - 1) <= 1e-9
    assert rep["tolerances"]["dec_rel"] == 1e-6
    assert run(capsys, "check", mats["A"], mats["A"])[0] == 0
    assert run(capsys, "check", mats["e11"], mats["e22"])[0] == 1


def test_check_eps(capsys, mats):
    code, out, _ = run(capsys, "check", mats["e11"], mats["e22"], "--eps", "0.5")
    assert code == 1 and json.loads(out)["eps"]["value"] == pytest.approx(1.0, abs=1e-7)
    assert run(capsys, "check", mats["A"], mats["A"], "--eps", "0")[0] == 0
    assert run(capsys, "check", mats["A"], mats["A"], "--eps", "1.5")[0] == 2


def test_input_errors(capsys, mats, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "check", str(bad), mats["B"])
    assert code == 2 and "error" in err
    assert run(capsys, "check", mats["A"], mats["C3"])[0] == 2
    assert run(capsys, "check", mats["A"], str(tmp_path / "missing.json"))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", mats["A"]])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_report_flag_and_tolerance_echo(capsys, mats, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "check", mats["A"], mats["B"], "--report", dest, "--dec-rel", "1e-5")
    assert code == 0 and out == ""
    rep = json.loads(dest.read_text())
    assert rep["tolerances"]["dec_rel"] == 1e-5 and rep["verdict"] is True
    # global flags also accepted before the subcommand
    code, out, _ = run(capsys, "--tol-opt", "1e-8", "check", mats["A"], mats["B"])
    assert json.loads(out)["tolerances"]["opt_tol"] == 1e-8


def test_analyze_identity_hermitian(capsys, mats):
    code, out, _ = run(capsys, "analyze", "--identity", mats["H"])
    rep = json.loads(out)
    assert code == 0
    chars = rep["identity_suite"]["characterizations"]
    assert len(chars) == 5 and all(v["satisfied"] for v in chars.values())


def test_analyze_identity_nilpotent(capsys, mats):
    code, out, _ = run(capsys, "analyze", "--identity", mats["N"])
    rep = json.loads(out)
    chars = rep["identity_suite"]["characterizations"]
    assert code == 0
    assert not any(v["satisfied"] for v in chars.values())
    # grid oracle for inf_mu ||N + mu I||
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    g = np.linspace(-2, 2, 201)
    mus = (g[:, None] + 1j * g[None, :]).ravel()
    inf = min(np.linalg.norm(N + mu * np.eye(2), 2) for mu in mus)
    assert rep["derivation"]["upper"] == pytest.approx(2 * inf, abs=1e-6)


def test_analyze_pair(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "parallel-pair", 4, 7, "--out", tmp_path)
    files = json.loads(out)["files"]
    code, out, _ = run(capsys, "analyze", *files)
    rep = json.loads(out)
    assert code == 0 and rep["path_agreement"] is True
    assert rep["characterizations"]["verdict"] is True
    assert run(capsys, "analyze", *files, files[0])[0] == 2


def test_module_command(capsys, tmp_path):
    x = ModuleElement(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    px = write(tmp_path / "x.json", x)
    code, out, _ = run(capsys, "module", px, px)
    rep = json.loads(out)
    assert code == 0 and all(c["satisfied"] for c in rep["characterizations"].values())
    e1 = write(tmp_path / "e1.json", ModuleElement(np.array([[1.0], [0.0]])))
    e2 = write(tmp_path / "e2.json", ModuleElement(np.array([[0.0], [1.0]])))
    code, out, _ = run(capsys, "module", e1, e2)
    rep = json.loads(out)
    assert code == 1 and not any(c["satisfied"] for c in rep["characterizations"].values())
    code, out, _ = run(capsys, "gen", "module-pair", 4, 3, "--k", 2, "--out", tmp_path)
    a, b = json.loads(out)["files"]
    code, out, _ = run(capsys, "module", a, b)
    rep = json.loads(out)
    assert code == 0 and rep["state_residual"] <= 1e-6
    assert run(capsys, "module", px, e1)[0] == 2


def test_gen_examples(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "parallel-pair", 4, 7, "--out", tmp_path)
    files = json.loads(out)["files"]
    assert code == 0 and len(files) == 2
    first = [open(f, "rb").read() for f in files]
    run(capsys, "gen", "parallel-pair", 4, 7, "--out", tmp_path)
    assert [open(f, "rb").read() for f in files] == first
    assert run(capsys, "check", *files)[0] == 0

    code, out, _ = run(capsys, "gen", "nilpotent", 3, 1, "--out", tmp_path)
    d = json.loads(open(json.loads(out)["files"][0]).read())
    N = np.array(d["re"]) + 1j * np.array(d.get("im", np.zeros((3, 3))))
    assert np.all(np.tril(N) == 0)

    code, out, _ = run(capsys, "gen", "unitary", 5, 9, "--out", tmp_path)
    d = json.loads(open(json.loads(out)["files"][0]).read())
    U = np.array(d["re"]) + 1j * np.array(d["im"])
    assert np.linalg.norm(U.conj().T @ U - np.eye(5), 2) <= 1e-10

    assert run(capsys, "gen", "bogus", 3, 1, "--out", tmp_path)[0] == 2
    assert run(capsys, "gen", "random", 0, 1, "--out", tmp_path)[0] == 2


def test_suite_command(capsys, tmp_path):
    code, out, err = run(capsys, "suite", "--seed", 42, "--cases", 2, "--max-dim", 4)
    rep = json.loads(out)
    assert code == 0 and rep["report"]["ok"] and "wall time" in err
    assert set(rep["report"]["families"]) == {"random", "parallel-pair", "normal", "nilpotent",
                                              "unitary-orbit", "module", "schatten"}
    code, out, _ = run(capsys, "suite", "--families", "schatten", "--cases", 20)
    rep = json.loads(out)["report"]
    assert code == 0 and rep["families"]["schatten"] == {"cases": 20, "passed": 20, "failed": 0}
    assert run(capsys, "suite", "--cases", 0)[0] == 2
    assert run(capsys, "suite", "--families", "nope")[0] == 2
    assert run(capsys, "suite", "--max-dim", 65)[0] == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "cases": 1, "max_dim": 3, "families": ["random"]}))
    code, out, _ = run(capsys, "suite", "--config", cfg)
    assert code == 0 and json.loads(out)["report"]["config"]["seed"] == 3
    cfg.write_text(json.dumps({"colour": 1}))
    assert run(capsys, "suite", "--config", cfg)[0] == 2


def test_check_output_is_deterministic(capsys, mats):
    outs = {run(capsys, "check", mats["A"], mats["B"], "--eps", "0.1")[1] for _ in range(2)}
    assert len(outs) == 1


def test_module_entry_point(tmp_path, mats):
    r = subprocess.run([sys.executable, "-m", "opparallel", "check", mats["e11"], mats["e22"]],
                       capture_output=True, text=True)
    assert r.returncode == 1 and json.loads(r.stdout)["verdict"] is False
