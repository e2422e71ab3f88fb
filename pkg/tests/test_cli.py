import json
import subprocess
import sys

import jsonschema
import pytest

from childsel.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_IO, EXIT_OK, main

TCA = "bundled:ecoli_tca_glyoxylate.rn"

ASSIGNMENT = {
    "type": "object",
    "required": ["assignment"],
    "properties": {"assignment": {"type": "object", "additionalProperties": {"type": "string"}}},
}
CLASSIFICATION = {
    "type": "object",
    "required": ["selection", "det", "behavior", "G", "B", "cycles"],
    "properties": {
        "selection": ASSIGNMENT,
        "det": {"type": "integer"},
        "behavior": {"enum": ["good", "bad", "zero"]},
        "G": {"type": ["integer", "null"]},
        "B": {"type": ["integer", "null"]},
        "cycles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["vertices", "badness"],
                "properties": {
                    "vertices": {"type": "array", "items": {"type": "string"}},
                    "badness": {"enum": ["good", "bad"]},
                },
            },
        },
    },
}
RATE_MAP = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["reaction", "metabolite", "value"],
        "properties": {"value": {"type": "number", "exclusiveMinimum": 0}},
    },
}
PAIR = {
    "type": "object",
    "required": ["m_b", "j1_child", "j2_child", "a", "b", "xi"],
    "properties": {
        "m_b": {"type": "string"},
        "j1_child": {"type": "string"},
        "j2_child": {"type": "string"},
        "a": {"type": "integer"},
        "b": {"type": "integer"},
        "xi": {"type": "string", "pattern": r"^\d+\*r\[[^,\]]+,[^\]]+\] - \d+\*r\[[^,\]]+,[^\]]+\]$"},
        "witness": {
            "type": "object",
            "required": ["rates_plus", "rates_minus", "det_plus", "det_minus"],
            "properties": {"rates_plus": RATE_MAP, "rates_minus": RATE_MAP},
        },
    },
}
NETWORK = {
    "type": "object",
    "required": ["metabolites", "reactions", "S"],
    "properties": {
        "metabolites": {"type": "array", "items": {"type": "string"}},
        "reactions": {
            "type": "array",
            "items": {"type": "object", "required": ["label", "inputs", "outputs"]},
        },
        "S": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_summary(capsys):
    code, out, _ = run(capsys, "validate", "bundled:example1.rn")
    assert code == EXIT_OK
    assert "3 metabolites, 3 reactions" in out


def test_validate_json(capsys):
    code, out, _ = run(capsys, "validate", "bundled:example2.rn", "--json")
    data = json.loads(out)
    jsonschema.validate(data, NETWORK)
    assert data["S"] == [[-1, 1, 0], [-1, -1, 0], [1, 0, -1]]


def test_autocatalysis_diagnostic(tmp_path, capsys):
    f = tmp_path / "bad.rn"
    f.write_text("ok: B -> C\nj: A -> A\n")
    code, _, err = run(capsys, "validate", str(f))
    assert code == EXIT_INVALID
    assert f"{f}:2: AutocatalysisError" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.rn"))
    assert code == EXIT_IO
    assert "cannot read" in err
    code, _, _ = run(capsys, "count", "bundled:nope.rn")
    assert code == EXIT_IO


@pytest.mark.parametrize(
    "name, count, tally",
    [
        ("example1.rn", 1, "good 0, bad 1, zero 0"),
        ("example2.rn", 1, "good 1, bad 0, zero 0"),
        ("ecoli_tca_glyoxylate.rn", 2, "good 1, bad 1, zero 0"),
    ],
)
def test_classify_tallies(capsys, name, count, tally):
    code, out, _ = run(capsys, "classify", f"bundled:{name}", "--check-identity")
    assert code == EXIT_OK
    assert f"child selections: {count}\n" in out
    assert f"tally: {tally}\n" in out
    assert f"verified for {count} selections" in out


def test_classify_verbose_lists_cycles(capsys):
    _, out, _ = run(capsys, "classify", TCA, "--verbose")
    assert "cycle OAA-17-CIT-18-ICT-26-Glyoxylate-27-MAL-23 (bad)" in out
    assert "cycle OAA-17-CIT-18-ICT-26-SUC-21-FUM-22-MAL-23 (bad)" in out


def test_classify_force(capsys):
    _, out, _ = run(capsys, "classify", TCA, "--force", "ICT=26")
    assert "tally: good 0, bad 1, zero 0" in out
    code, _, err = run(capsys, "classify", TCA, "--force", "ICT=17")
    assert code == EXIT_INVALID and "infeasible" in err
    code, _, _ = run(capsys, "classify", TCA, "--force", "XYZ=17")
    assert code == EXIT_INVALID


def test_limit_flags_truncation(capsys):
    _, out, _ = run(capsys, "classify", TCA, "--limit", "1")
    assert "classified: 1 (truncated by --limit)" in out


def test_budget_exit_code(tmp_path, capsys, monkeypatch):
    import childsel.cycles as cycles

    monkeypatch.setattr(cycles.classify, "__kwdefaults__", {"counts": True, "bound": 1, "graph": None})
    code, out, _ = run(capsys, "classify", "bundled:example1.rn", "--check-identity")
    assert code == EXIT_BUDGET
    assert "1 skipped" in out


@pytest.mark.parametrize(
    "target, expected",
    [(TCA, "2"), ("bundled:example2.rn", "1"), (None, "0")],
)
def test_count(tmp_path, capsys, target, expected):
    if target is None:
        f = tmp_path / "abc.rn"
        f.write_text("1: A + B -> C\n")
        target = str(f)
    code, out, _ = run(capsys, "count", target)
    assert code == EXIT_OK and out == expected + "\n"


def test_bifurcations_text(capsys):
    _, out, _ = run(capsys, "bifurcations", TCA)
    assert "ξ = 1·r[19,ICT] − 1·r[26,ICT]" in out
    _, out, _ = run(capsys, "bifurcations", "bundled:example1.rn")
    assert "no pairs found" in out


def test_bifurcations_witness(capsys):
    _, out, _ = run(capsys, "bifurcations", TCA, "--witness", "1e-3", "--json")
    data = json.loads(out)
    (pair,) = data["pairs"]
    w = pair["witness"]
    assert w["det_plus"] * w["det_minus"] < 0


def test_witness_epsilon_validated(capsys):
    with pytest.raises(SystemExit):
        main(["bifurcations", TCA, "--witness", "0"])


def test_json_shapes(capsys):
    _, out, _ = run(capsys, "classify", TCA, "--json", "--verbose")
    data = json.loads(out)
    assert data["tallies"] == {"good": 1, "bad": 1, "zero": 0}
    for c in data["classifications"]:
        jsonschema.validate(c, CLASSIFICATION)
    _, out, _ = run(capsys, "bifurcations", TCA, "--json", "--witness", "1e-3")
    data = json.loads(out)
    for p in data["pairs"]:
        jsonschema.validate(p, PAIR)
    assert data["pairs"][0]["xi"] == "1*r[19,ICT] - 1*r[26,ICT]"
    _, out, _ = run(capsys, "count", TCA, "--json")
    assert json.loads(out) == {"count": 2}


def _ring_file(tmp_path):
    lines = []
    for i in range(5):
        lines.append(f"c{i}: A{i} -> A{(i + 1) % 5}")
        lines.append(f"b{i}: A{i} + A{(i + 2) % 5} -> A{(i + 1) % 5}")
        lines += [f"x{i}_{k}: A{i} ->" for k in range(3)]
    f = tmp_path / "ring.rn"
    f.write_text("\n".join(lines) + "\n")
    return str(f)


def _cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "childsel.cli", *argv], capture_output=True, check=True
    ).stdout


def test_output_is_byte_identical(tmp_path):
    ring = _ring_file(tmp_path)
    for argv in (
        ("classify", ring, "--verbose", "--check-identity"),
        ("bifurcations", ring, "--json"),
    ):
        first = _cli(*argv)
        assert _cli(*argv) == first
        assert _cli(*argv, "--threads", "3") == first
