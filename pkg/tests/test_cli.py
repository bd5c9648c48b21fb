import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import pytest

from cantor_uniform.cli import BUILD_SCHEMA, parse_point, run

SPECS = Path(__file__).resolve().parent.parent / "specs"
OMEGA0 = str(SPECS / "omega0.json")
DECAY = str(SPECS / "all_decay.json")


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_omega0_exact(capsys):
    code, out, _ = call(capsys, "classify", OMEGA0)
    assert code == 0
    assert out.strip() == ('{"in_omega_b":true,"delta_star":"1/3","N":1,"uniform":true,'
                           '"c":"243","in_moduli_standard":true}')


def test_classify_non_uniform(capsys):
    code, out, _ = call(capsys, "classify", DECAY)
    assert code == 0
    assert json.loads(out)["uniform"] is False


def test_classify_delta_with_infinite_N(capsys):
    code, _, err = call(capsys, "classify", OMEGA0, "--delta", "1/2")
    assert code == 3 and "infinite" in err


def test_build_json_schema_and_csv_parity(capsys):
    code, out, _ = call(capsys, "build", OMEGA0, "--depth", 4)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, BUILD_SCHEMA)
    assert len(doc["leaves"]) == 16 and len(doc["gaps"]) == 15
    code, text, _ = call(capsys, "build", OMEGA0, "--depth", 4, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    as_json = {(r["depth"], r["path"], r["lo_num"], r["lo_den"], r["hi_num"], r["hi_den"])
               for r in doc["leaves"] + doc["gaps"]}
    as_csv = {(int(r["depth"]), r["path"], *(int(r[k]) for k in
               ("lo_num", "lo_den", "hi_num", "hi_den"))) for r in rows}
    assert as_json == as_csv


def test_witness_case1(capsys, tmp_path):
    svg = tmp_path / "w.svg"
    code, out, _ = call(capsys, "witness", OMEGA0, "--a", "0.5,1", "--b", "2,2", "--svg", svg)
    assert code == 0
    doc = json.loads(out)
    assert doc["case"] == "Case1" and doc["report"]["pass"] is True
    assert svg.read_text().startswith("<?xml")


def test_witness_rational_points(capsys):
    code, out, _ = call(capsys, "witness", OMEGA0, "--a", "1/4,1/1000", "--b", "1/4,-1/1000")
    assert code == 0
    assert json.loads(out)["case"].startswith("Case4")


def test_witness_on_non_uniform_spec(capsys):
    code, _, err = call(capsys, "witness", DECAY, "--a", "0.5,1", "--b", "2,2")
    assert code == 3 and err


def test_witness_point_on_set(capsys):
    code, _, _ = call(capsys, "witness", OMEGA0, "--a", "0.25,0", "--b", "2,2")
    assert code == 3


def test_adversary(capsys):
    code, out, _ = call(capsys, "adversary", DECAY, "--c", "1", "--cutoff", "12")
    assert code == 0
    doc = json.loads(out)
    assert doc["params"] == {"N": 3, "L": 4, "K": 2, "M": 81}
    assert doc["enumeration"]["verdict"] == "NoCurve"
    assert all(f["holds"] for f in doc["families"].values())


def test_adversary_on_uniform_spec(capsys):
    code, _, err = call(capsys, "adversary", OMEGA0, "--c", "1")
    assert code == 3
    assert "spec is uniform (N(ω,1/3)=1)" in err


def test_oracle(capsys):
    code, out, _ = call(capsys, "oracle", OMEGA0, "--a", "0.5,0.1", "--b", "0.5,-0.1",
                        "--depth", 6)
    assert code == 0
    doc = json.loads(out)
    assert doc["lower"] == pytest.approx(1.0) and doc["upper"] == pytest.approx(1.0)


def test_distance(capsys):
    code, out, _ = call(capsys, "distance", OMEGA0, str(SPECS / "half.json"))
    assert code == 0
    assert json.loads(out)["d"] == pytest.approx(math.log(4 / 3), abs=1e-12)


def test_render_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert call(capsys, "render", OMEGA0, "--depth", 5, "--out", a)[0] == 0
    assert call(capsys, "render", OMEGA0, "--depth", 5, "--out", b)[0] == 0
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b'viewBox="0 -1 1 2"' in data and b"\r" not in data
    assert data.count(b"<rect") == sum(2**k for k in range(6))


def test_stdout_is_deterministic(capsys):
    argv = ("witness", OMEGA0, "--a", "0.3,0.2", "--b", "0.7,-0.05")
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


@pytest.mark.parametrize("argv", [
    (),
    ("frobnicate",),
    ("build", OMEGA0),
    ("build", OMEGA0, "--depth", "-1"),
    ("witness", OMEGA0, "--a", "1,2,3", "--b", "0,1"),
    ("witness", OMEGA0, "--a", "0.5,1", "--b", "2,2", "--samples", "0"),
    ("classify", "/nonexistent/spec.json"),
    ("adversary", DECAY, "--c", "1/2"),
])
def test_usage_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 1


def test_invalid_spec(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"prefix": [], "tail": {"pattern": [{"kind": "fixed", "q": "3/2"}]}}')
    code, _, err = call(capsys, "classify", bad)
    assert code == 2 and "invalid spec" in err
    bad.write_text("{not json")
    assert call(capsys, "classify", bad)[0] == 2


def test_parse_point():
    assert parse_point("1/4, -1/1000") == complex(0.25, -0.001)
    assert parse_point("0.5,1") == complex(0.5, 1)


def test_verification_failure_exit_code(capsys, monkeypatch):
    from cantor_uniform import witness
    from cantor_uniform.errors import VerificationFailed

    def broken(*args, **kwargs):
        raise VerificationFailed("forced")

    monkeypatch.setattr(witness, "build_witness", broken)
    code, _, err = call(capsys, "witness", OMEGA0, "--a", "0.5,1", "--b", "2,2")
    assert code == 4 and "forced" in err
