import json
from pathlib import Path

import pytest

from glhbench.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


class TestBuild:
    @pytest.mark.parametrize("enc", ["unary", "one_hot"])
    def test_accept(self, capsys, tmp_path, enc):
        code, rep, _ = run(capsys, "build", DATA / "circuit_accept.json", "--encoding", enc,
                           "--pre-idle", 3, "--out", tmp_path)
        assert code == 0
        res = rep["result"]
        assert res["thresholds"]["valid"]
        inst = json.loads((tmp_path / "instance.json").read_text())
        assert {"hamiltonian", "metadata", "circuit"} <= set(inst)
        assert (tmp_path / "guide.json").exists()

    def test_build_then_decide(self, capsys, tmp_path):
        run(capsys, "build", DATA / "circuit_reject.json", "--pre-idle", 2, "--out", tmp_path)
        code, rep, _ = run(capsys, "decide", tmp_path / "instance.json", tmp_path / "guide.json", "--seed", 5)
        assert code == 0
        assert rep["result"]["reports"]["qpe"]["decision"] == "No"

    def test_cap_flag(self, capsys):
        code, rep, err = run(capsys, "build", DATA / "circuit_accept.json", "--cap-qubits", 3)
        assert code == 2 and rep is None and "error" in err

    def test_cap_env(self, capsys, monkeypatch):
        monkeypatch.setenv("GLHBENCH_CAP_QUBITS", "3")
        code, _, _ = run(capsys, "build", DATA / "circuit_accept.json")
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "build", tmp_path / "nope.json")
        assert code == 2 and "cannot read" in err

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\"gates\": []}")
        assert run(capsys, "build", bad)[0] == 2


class TestPrep:
    @pytest.mark.parametrize("name", ["scss.json", "sigma_scess.json"])
    def test_synthesized(self, capsys, name):
        code, rep, _ = run(capsys, "prep", DATA / name)
        assert code == 0
        assert rep["result"]["synthesized"]
        assert rep["result"]["verification"]["infidelity"] <= 1e-7

    def test_unsupported_family(self, capsys):
        code, rep, _ = run(capsys, "prep", DATA / "mps.json")
        assert code == 0
        assert not rep["result"]["synthesized"]
        assert rep["result"]["message"].startswith("unsupported")


class TestDecide:
    @pytest.mark.parametrize("which,expected", [("yes", "Yes"), ("no", "No")])
    def test_both_routes(self, capsys, which, expected):
        code, rep, _ = run(capsys, "decide", DATA / f"gap_{which}.json", DATA / f"gap_{which}_guide.json",
                           "--route", "both", "--seed", 1)
        assert code == 0
        res = rep["result"]
        assert res["agreement"]
        assert res["reports"]["qpe"]["decision"] == res["reports"]["classical"]["decision"] == expected

    def test_deterministic(self, capsys):
        args = ("decide", DATA / "gap_yes.json", DATA / "gap_yes_guide.json", "--seed", 3)
        _, a, _ = run(capsys, *args)
        _, b, _ = run(capsys, *args)
        a.pop("timing"), b.pop("timing")
        assert a == b

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        run(capsys, "decide", DATA / "gap_no.json", DATA / "gap_no_guide.json", "--out", target)
        assert json.loads(target.read_text())["command"] == "decide"

    def test_missing_thresholds(self, capsys, tmp_path):
        inst = json.loads((DATA / "gap_yes.json").read_text())
        bare = tmp_path / "bare.json"
        bare.write_text(json.dumps(inst["hamiltonian"]))
        assert run(capsys, "decide", bare, DATA / "gap_yes_guide.json")[0] == 2
        code, rep, _ = run(capsys, "decide", bare, DATA / "gap_yes_guide.json", "--a", -0.4, "--b", 0.0)
        assert code == 0 and rep["result"]["warnings"]


class TestVerify:
    def test_known(self, capsys):
        code, rep, _ = run(capsys, "verify", "geometric", "--seed", 2)
        assert code == 0 and rep["result"]["passed"]

    def test_unknown(self, capsys):
        assert run(capsys, "verify", "nope")[0] == 2


class TestGauss:
    def test_check(self, capsys):
        code, rep, _ = run(capsys, "gauss-energy", DATA / "gaussian_covariance.json",
                           DATA / "gaussian_hamiltonian.json", "--check")
        assert code == 0
        assert rep["result"]["error"] <= 1e-8


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["build", str(DATA / "circuit_accept.json"), "--cap-qubits", "0"]) == 2
