import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from ietgroup.cli import JobSpec, main, run
from ietgroup.serialize import iet_from_json, parse_iet_document

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def _json(capsys, argv):
    code = main([*argv, "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    assert out["exit_code"] == code
    return code, out


def test_member_rank3_is_negative_with_obstruction(capsys):
    code = main(["member", "--class", "g1", str(CORPUS / "reversal_rank3.json")])
    text = capsys.readouterr().out
    assert code == 1
    assert "obstruction" in text and "p'[2,3] = 1/4" in text


def test_saf_on_identity(capsys):
    code, out = _json(capsys, ["saf", str(CORPUS / "identity_q2.json")])
    assert code == 0 and out["saf"]["p"] == []


def test_factor_on_rank2(capsys):
    code, out = _json(capsys, ["factor", str(CORPUS / "reversal_rank2.json")])
    assert code == 0 and out["verified"]
    parts = {k: iet_from_json(v) for k, v in out["factorization"].items()}
    assert parts["g"].r <= 2


def test_member_gper(capsys):
    assert main(["member", "--class", "gper", str(CORPUS / "reversal_rational.json")]) == 0
    assert main(["member", "--class", "gper", str(CORPUS / "rotation_sqrt2.json")]) == 1


def test_order_and_rank(capsys):
    code, out = _json(capsys, ["order", str(CORPUS / "reversal_rational.json")])
    assert code == 0 and out["order"] == 6
    code, out = _json(capsys, ["order", str(CORPUS / "rotation_sqrt2.json")])
    assert code == 1 and out["order"] is None
    code, out = _json(capsys, ["rank", str(CORPUS / "reversal_rank3.json")])
    assert out["rank"] == 3


def test_induce_adjoins(capsys):
    code, out = _json(capsys, ["induce", str(CORPUS / "rotation_sqrt2.json"), "--left", "0", "--right", "sqrt(3)/3"])
    assert code == 0 and out["saf_preserved"] and out["induced_in_G1"] is False
    assert [e["name"] for e in out["context"]["entries"]] == ["1", "sqrt(2)", "sqrt(3)"]
    assert out["keane"]["verdict"] == "satisfied"


def test_compose_output_parses(capsys):
    path = str(CORPUS / "rotation_sqrt2.json")
    code, out = _json(capsys, ["compose", path, path])
    assert code == 0
    assert iet_from_json(out["result"]).r == 2


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.json")), ids=lambda p: p.stem)
def test_check_passes_on_corpus(path, capsys):
    code, out = _json(capsys, ["check", str(path)])
    assert code == 0 and out["passed"]


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"context": {"kind": "rational"}, "length": "1", "lengths": ["1/2", "2/5"], "perm": [2, 1]}')
    code, out = _json(capsys, ["saf", str(bad)])
    assert code == 2 and "residual 1/10" in out["message"]
    assert main(["saf", str(tmp_path / "missing.json")]) == 2
    assert main(["compose", str(bad)]) == 2
    capsys.readouterr()


def test_undecided_exit_code(capsys):
    code = main(["induce", str(CORPUS / "rotation_sqrt2.json"), "--left", "0", "--right", "1/1000",
                 "--induce-cap", "5"])
    assert code == 3
    assert "CapExceeded" in capsys.readouterr().err


def test_exit_codes_deterministic():
    job = JobSpec("member", [str(CORPUS / "reversal_rank3.json")], {"class": "g1"})
    assert {run(job).code for _ in range(3)} == {1}


def test_batch(tmp_path):
    for p in CORPUS.glob("*.json"):
        shutil.copy(p, tmp_path)
    code = main(["rank", "--batch", str(tmp_path), "--format", "json"])
    assert code == 0
    outs = sorted((tmp_path / "results").glob("*.rank.json"))
    assert len(outs) == len(list(CORPUS.glob("*.json")))
    assert all(json.loads(p.read_text())["exit_code"] == 0 for p in outs)
    # results land outside the input glob, so a rerun sees the same inputs
    assert main(["rank", "--batch", str(tmp_path)]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ietgroup", "rank", str(CORPUS / "reversal_rank2.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "rank = 2"


def test_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO((CORPUS / "identity_q2.json").read_text()))
    assert main(["rank", "-"]) == 0
    assert capsys.readouterr().out.strip() == "rank = 1"
    assert parse_iet_document((CORPUS / "identity_q2.json").read_text()).is_identity()
