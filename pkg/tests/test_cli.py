import json
import os
import subprocess
import sys

import pytest

from conftest import DATA
from polyforge.cli import RunConfig, canonical_json, main
from polyforge.errors import InvalidRange
from polyforge.polytope import Polytope


def pres(name):
    return os.path.join(DATA, name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    line = out.strip().splitlines()[-1]
    assert canonical_json(json.loads(line)) == line
    return code, json.loads(line)


def test_verify_cgroup(capsys):
    code, rec = run_json(capsys, "verify-cgroup", pres("coxeter-433.pres"))
    assert code == 0 and rec["order"] == 384 and rec["schlafli"] == [4, 3, 3]
    code, out, _ = run(capsys, "verify-cgroup", pres("coxeter-43.pres"))
    assert code == 0 and "order 48" in out


def test_verify_rotation_presentation(capsys):
    code, rec = run_json(capsys, "verify-cgroup", pres("torus44-31-rotation.pres"))
    assert code == 0 and rec["order"] == 40 and rec["verdict"] == "Chiral"


def test_negative_and_malformed(capsys, tmp_path):
    assert run(capsys, "verify-cgroup", pres("not-cgroup-44.pres"))[0] == 1
    assert run(capsys, "verify-cgroup", str(tmp_path / "missing.pres"))[0] == 3
    bad = tmp_path / "bad.pres"
    bad.write_text("generators two\n")
    assert run(capsys, "verify-cgroup", str(bad))[0] == 3
    with pytest.raises(SystemExit) as e:
        main(["no-such-command"])
    assert e.value.code == 3


def test_budget_env_and_flag(capsys, monkeypatch):
    monkeypatch.setenv("POLYFORGE_MAX_COSETS", "10")
    assert run(capsys, "verify-cgroup", pres("coxeter-433.pres"))[0] == 2
    assert run(capsys, "--max-cosets", "100000", "verify-cgroup", pres("coxeter-433.pres"))[0] == 0
    assert run(capsys, "verify-cgroup", pres("coxeter-433.pres"), "--max-cosets", "100000")[0] == 0


def test_schlafli(capsys):
    code, rec = run_json(capsys, "schlafli", pres("coxeter-333.pres"))
    assert rec == {"schlafli": [3, 3, 3]}


def test_build_round_trip(capsys, tmp_path):
    out = tmp_path / "cube.json"
    assert run(capsys, "build", pres("coxeter-43.pres"), "-o", str(out))[0] == 0
    text = out.read_text()
    data = json.loads(text)
    assert canonical_json(data) + "\n" == text
    assert data["rank"] == 3
    code, rec = run_json(capsys, "analyze", str(out), "profile")
    assert rec["f_vector"] == [8, 12, 6] and rec["classification"] == "Regular"
    assert rec["zigzags"] == {"1": 6}
    dual_out = tmp_path / "oct.json"
    assert run(capsys, "dual", str(out), "-o", str(dual_out))[0] == 0
    code, rec = run_json(capsys, "analyze", str(dual_out), "profile")
    assert rec["f_vector"] == [6, 12, 8]


def test_build_dot(capsys):
    code, out, _ = run(capsys, "--output", "dot", "build", pres("coxeter-33.pres"))
    assert code == 0 and out.startswith("graph")


def test_toroid_analyze(capsys):
    code, rec = run_json(capsys, "toroid", "sq44", "3", "1", "--analyze")
    assert code == 0
    assert rec["chiral"] is True and rec["flags"] == 80
    assert rec["f_vector"] == [10, 20, 10] and rec["flag_orbits"] == 2
    assert "holes" in rec and "zigzags" in rec


def test_toroid_basis_and_cubic(capsys):
    code, rec = run_json(capsys, "toroid", "sq44", "--basis", "3", "1", "1", "3", "--analyze")
    assert rec["classification"] == "FullyTransitive" and rec["flags"] == 64
    code, rec = run_json(capsys, "toroid", "cubic", "4", "2", "1", "--analyze")
    assert rec["flags"] == 384
    assert run(capsys, "toroid", "sq44", "--basis", "1", "0", "0", "1")[0] == 1
    assert run(capsys, "toroid", "sq44", "--basis", "1", "2", "2", "4")[0] == 3
    assert run(capsys, "toroid", "pent55", "1", "2")[0] == 3


def test_analyze_medial_and_petrie(capsys, tmp_path):
    out = tmp_path / "simplex.json"
    run(capsys, "build", pres("coxeter-333.pres"), "-o", str(out))
    code, rec = run_json(capsys, "analyze", str(out), "medial", "--trivalent")
    assert rec["vertices"] == 20 and rec["arc_transitivity"] == 3 and rec["girth"] == 6
    code, rec = run_json(capsys, "analyze", str(out), "petrie")
    assert rec["all_acoptic"] and len({tuple(s["permutation"]) for s in rec["schemes"]}) == 24
    code, out_text, _ = run(capsys, "--output", "dot", "analyze", str(out), "medial")
    assert "shape=box" in out_text
    cube = tmp_path / "cube.json"
    run(capsys, "build", pres("coxeter-43.pres"), "-o", str(cube))
    assert run(capsys, "analyze", str(cube), "medial")[0] == 3


def test_analyze_rejects_non_polytope(capsys, tmp_path, cube):
    keep = cube.cover[2][:, 1] != 5
    broken = Polytope(3, (8, 12, 5), {1: cube.cover[1], 2: cube.cover[2][keep]})
    bad = tmp_path / "bad.json"
    bad.write_text(canonical_json(broken.to_json()))
    code, rec = run_json(capsys, "analyze", str(bad), "profile")
    assert code == 1 and rec == {"polytope": False, "violation": "diamond"}
    bad.write_text(json.dumps({"rank": 2}))
    assert run(capsys, "analyze", str(bad), "profile")[0] == 3
    bad.write_text("not json")
    assert run(capsys, "analyze", str(bad), "profile")[0] == 3


def test_quotient(capsys, tmp_path):
    out = tmp_path / "hemi.json"
    code, rec = run_json(capsys, "quotient", pres("coxeter-43.pres"),
                         "--subgroup", "g0 g1 g2 g0 g1 g2 g0 g1 g2", "-o", str(out))
    assert code == 0 and rec["f_vector"] == [4, 6, 3] and rec["semisparse"]
    assert json.loads(out.read_text())["rank"] == 3
    code, rec = run_json(capsys, "quotient", pres("coxeter-43.pres"), "--subgroup", "g0")
    assert code == 1 and rec["failed_condition"] == "C1{phi=e, i=0}"


def test_semisparse_scan(capsys):
    code, out, _ = run(capsys, "semisparse-scan", pres("torus44-20.pres"))
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 106
    for line in lines:
        assert canonical_json(json.loads(line)) == line


def test_amalgamate(capsys):
    code, rec = run_json(capsys, "amalgamate", "--chiral", "--facet", "torus44 1 3",
                         "--vertex-figure", "torus44 1 3")
    assert code == 0 and rec["status"] == "Finite" and rec["order"] == 2000
    code, rec = run_json(capsys, "amalgamate", "--facet", "coxeter 3 3", "--vertex-figure",
                         "coxeter 3 4")
    assert rec["order"] == 384
    code, rec = run_json(capsys, "amalgamate", "--facet", "torus44 3 0",
                         "--vertex-figure", pres("hemicube.pres"))
    assert code == 1 and rec["status"] == "Degenerate"
    code, rec = run_json(capsys, "--max-cosets", "5000", "amalgamate", "--facet", "coxeter 4 3",
                         "--vertex-figure", "coxeter 3 4")
    assert code == 2 and rec["status"] == "ExceedsLimit"
    assert run(capsys, "amalgamate", "--facet", "coxeter 4 3", "--vertex-figure", "coxeter 4 3")[0] == 1
    assert run(capsys, "amalgamate", "--facet", "tri36 2 0", "--vertex-figure", "coxeter 6 3")[0] == 3


def test_enantiomorph(capsys, tmp_path):
    out = tmp_path / "mirror.pres"
    assert run(capsys, "enantiomorph", pres("torus44-31-rotation.pres"), "-o", str(out))[0] == 0
    code, rec = run_json(capsys, "verify-cgroup", str(out))
    assert rec["order"] == 40 and rec["verdict"] == "Chiral"
    code, rec = run_json(capsys, "enantiomorph", pres("rotation-43.pres"))
    assert rec["verdict"] == "DirectlyRegular"


def test_deterministic_output(capsys):
    a = run(capsys, "--json", "toroid", "sq44", "3", "1", "--analyze")
    b = run(capsys, "--json", "toroid", "sq44", "3", "1", "--analyze")
    assert a == b


def test_run_config_bounds():
    with pytest.raises(InvalidRange):
        RunConfig(0, 10, "text")


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "polyforge.cli", "verify-cgroup", pres("coxeter-33.pres")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "order 24" in r.stdout
