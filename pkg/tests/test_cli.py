import json

import pytest

from p1n.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_clifford_5d(capsys):
    code, out, _ = run(capsys, "verify", "clifford", "--set", "5d")
    report = json.loads(out)
    assert code == 0 and report["pass"] is True
    assert report["command"] == "verify clifford"
    assert report["result"] == {"dim": 4, "matrices": 5}
    assert {"name", "pass", "residual"} == set(report["items"][0])


def test_verify_clifford_8d_records_failed_product(capsys):
    code, out, _ = run(capsys, "verify", "clifford", "--set", "8d")
    names = {it["name"]: it["pass"] for it in json.loads(out)["items"]}
    assert code == 0
    assert names["Gamma=-i*Gamma1...Gamma6"] and names["Gamma0!=Gamma1*Gamma2*Gamma3*Gamma4"]


def test_verify_kdp(capsys):
    code, out, _ = run(capsys, "verify", "kdp", "--rep", "15", "--trials", "2")
    report = json.loads(out)
    assert code == 0
    assert report["result"]["beta5_sq_diag"] == [1] * 4 + [0] * 6 + [1] * 4 + [0]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--equation", "kdp15")
    result = json.loads(out)["result"]
    assert code == 0
    assert result["label"] == "D+(1/2,1/2) + D-(1/2,1/2) | redundant: D(1,0) + D(0,1) + D(0,0)"
    assert result["ptc"] is True


def test_fw_exit_codes(capsys):
    code, out, _ = run(capsys, "fw", "--equation", "dirac8", "--momentum", "1,2,0,-1", "--kappa", "2")
    assert code == 0 and json.loads(out)["result"]["energy"] == pytest.approx(10 ** 0.5)
    code, _, _ = run(capsys, "fw", "--equation", "kdp15", "--momentum", "1,0.5,-0.3,2", "--kappa", "1.2")
    assert code == 2
    code, _, _ = run(capsys, "fw", "--equation", "kdp15", "--momentum", "1,0.5,-0.3,2",
                     "--kappa", "1.2", "--form", "corrected")
    assert code == 0


def test_fw_at_rest_is_identity(capsys):
    code, out, _ = run(capsys, "fw", "--equation", "dirac4", "--momentum", "0,0,0,0")
    assert code == 0 and json.loads(out)["result"]["U_is_identity"] is True


def test_commutators_small(capsys):
    code, out, _ = run(capsys, "commutators", "--n", "2", "--spin", "dirac", "--grid-points", "16",
                       "--extent", "8", "--states", "1")
    assert code == 0 and json.loads(out)["pass"] is True
    code, _, _ = run(capsys, "commutators", "--n", "2", "--spin", "dirac", "--grid-points", "16",
                     "--extent", "8", "--states", "1", "--mutate")
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "classify", "--equation", "bogus")[0] == 1
    assert run(capsys, "verify", "clifford", "--set", "9d")[0] == 1
    assert run(capsys, "fw", "--equation", "dirac4", "--momentum", "1,2")[0] == 1
    assert run(capsys, "fw", "--equation", "dirac4", "--momentum", "0,0,0,0", "--kappa", "-1")[0] == 1
    assert run(capsys, "evolve", "--state", "/nonexistent", "--time", "1")[0] == 1


def test_state_pipeline(tmp_path, capsys):
    state = tmp_path / "g.bin"
    later = tmp_path / "h.bin"
    code, _, _ = run(capsys, "gaussian", "--n", "4", "--grid-points", "16", "--extent", "3.5",
                     "--center", "0,0,0,2", "--sigma", "0.4", "--output-state", str(state))
    assert code == 0 and state.exists()
    code, out, _ = run(capsys, "evolve", "--state", str(state), "--time", "1.5",
                       "--output-state", str(later))
    assert code == 0 and json.loads(out)["result"]["norm"] == pytest.approx(1.0)
    code, before, _ = run(capsys, "spectrum", "--state", str(state), "--bins", "16")
    code2, after, _ = run(capsys, "spectrum", "--state", str(later), "--bins", "16")
    assert code == code2 == 0
    assert before.splitlines()[0] == "m_sq,s3,t3,rho"
    assert before == after


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert main(["-o", str(target), "verify", "clifford"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["pass"] is True
