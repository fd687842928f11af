# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Tests of the command line front end."""

import json
from pathlib import Path

import pytest

from pypcl import cli
from pypcl.cli import (
    TIME_LIMITS,
    CorpusEntry,
    CorpusResult,
    builtin_corpora,
    main,
    parse_corpus,
    run_entry,
    time_limit,
)
from pypcl.search import Budget

MODEL = {
    "worlds": ["x", "y"],
    "neighbourhoods": {"x": [["y"]]},
    "valuation": {"p": ["y"], "q": ["y"]},
    "root": "x",
}


def _json_output(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().out)


def test_prove_provable(capsys: pytest.CaptureFixture[str]) -> None:
    """Test proving a theorem."""
    assert main(["prove", "p > p"]) == 0
    out = capsys.readouterr().out
    assert "status: provable" in out
    assert "logic: PCL" in out


def test_prove_refutable(capsys: pytest.CaptureFixture[str]) -> None:
    """Test refuting contraposition with a verified countermodel."""
    assert main(["prove", "(p > q) -> (~q > ~p)", "--format", "json"]) == 1
    report = _json_output(capsys)
    assert report["status"] == "refutable"
    assert report["verified"] is True
    assert report["model"]["root"] == "x0"


def test_prove_refutable_absolute(capsys: pytest.CaptureFixture[str]) -> None:
    """Test that refutations in absoluteness logics report the branch only."""
    assert main(["prove", "p", "--logic", "PA", "--format", "json"]) == 1
    report = _json_output(capsys)
    assert report["model"] is None
    assert report["branch"]["root"] == "x0"


def test_prove_unknown(capsys: pytest.CaptureFixture[str]) -> None:
    """Test running out of budget."""
    assert main(["prove", "p > p", "--max-nodes", "1"]) == 2  # noqa: PLR2004
    assert "reason: node budget of 1 exhausted" in capsys.readouterr().out


def test_prove_formula_sources(tmp_path: Path) -> None:
    """Test reading the formula from the option or from a file."""
    path = tmp_path / "formula.txt"
    path.write_text("p -> p\n", encoding="utf-8")
    assert main(["prove", "--file", str(path)]) == 0
    assert main(["prove", "--formula", "p"]) == 1
    assert main(["prove", "p", "--formula", "p"]) == 64  # noqa: PLR2004
    assert main(["prove"]) == 64  # noqa: PLR2004
    assert main(["prove", "--file", str(tmp_path / "missing.txt")]) == 64  # noqa: PLR2004


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["prove", "p > p", "--logic", "PX"],
        ["prove", "p >"],
        ["prove", "p > p", "--format", "xml"],
        ["prove", "p > p", "--max-nodes", "0"],
        ["prove", "p > p", "--timeout", "-1"],
        ["enumerate", "p", "--max-worlds", "0"],
        ["corpus", "--builtin", "--time-limit", "0"],
    ],
)
def test_usage_errors(argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
    """Test that invalid input exits with the usage status."""
    assert main(argv) == 64  # noqa: PLR2004
    assert "pypcl: " in capsys.readouterr().err


def test_unknown_logic_message(capsys: pytest.CaptureFixture[str]) -> None:
    """Test the message of an unknown logic."""
    main(["prove", "p > p", "--logic", "PX"])
    assert "pypcl: Unknown logic 'PX'" in capsys.readouterr().err


def test_prove_trace(capsys: pytest.CaptureFixture[str]) -> None:
    """Test streaming the search trace."""
    assert main(["prove", "p > p", "-vv"]) == 0
    lines = [json.loads(line) for line in capsys.readouterr().err.splitlines() if line.startswith("{")]
    assert lines[0]["event"] == "rule"
    assert lines[0]["rule"] == "RCond"
    assert [line["step"] for line in lines] == list(range(len(lines)))


def test_check_proof(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test checking the proof object of a prove report."""
    assert main(["prove", "(p > q) & (p > r) -> (p & q) > r", "--format", "json"]) == 0
    report = capsys.readouterr().out
    path = tmp_path / "proof.json"
    path.write_text(report, encoding="utf-8")
    assert main(["check-proof", str(path)]) == 0
    assert "valid: True" in capsys.readouterr().out

    proof = json.loads(report)["proof"]
    proof["nodes"][1]["rule"] = "T"
    path.write_text(json.dumps(proof), encoding="utf-8")
    assert main(["check-proof", str(path)]) == 1
    assert "valid: False" in capsys.readouterr().out

    path.write_text("{", encoding="utf-8")
    assert main(["check-proof", str(path)]) == 64  # noqa: PLR2004
    path.write_text(json.dumps({"logic": "PCL"}), encoding="utf-8")
    assert main(["check-proof", str(path)]) == 64  # noqa: PLR2004


def test_check_model(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test evaluating formulas in a model file."""
    path = tmp_path / "model.json"
    path.write_text(json.dumps(MODEL), encoding="utf-8")
    assert main(["check-model", str(path), "p > q"]) == 0
    assert main(["check-model", str(path), "r > q"]) == 0
    assert main(["check-model", str(path), "p > q", "--world", "y"]) == 0
    assert main(["check-model", str(path), "p"]) == 1
    capsys.readouterr()
    assert main(["check-model", str(path), "p > q", "--logic", "PN", "--format", "json"]) == 1
    report = _json_output(capsys)
    assert report["holds"] is True
    assert report["frame"] == ["Normality fails at y"]
    assert main(["check-model", str(path), "p", "--world", "z"]) == 64  # noqa: PLR2004


def test_check_model_malformed(tmp_path: Path) -> None:
    """Test rejecting malformed model files."""
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"worlds": ["x"], "neighbourhoods": {"x": [[]]}}), encoding="utf-8")
    assert main(["check-model", str(path), "p"]) == 64  # noqa: PLR2004
    path.write_text(json.dumps({"worlds": "x"}), encoding="utf-8")
    assert main(["check-model", str(path), "p"]) == 64  # noqa: PLR2004
    assert main(["check-model", str(tmp_path / "missing.json"), "p"]) == 64  # noqa: PLR2004


def test_enumerate(capsys: pytest.CaptureFixture[str]) -> None:
    """Test searching small countermodels."""
    assert main(["enumerate", "p > p", "--max-worlds", "2"]) == 0
    assert "model: None" in capsys.readouterr().out
    assert main(["enumerate", "(p > q) -> (p & r) > q", "--max-worlds", "3", "--format", "json"]) == 1
    report = _json_output(capsys)
    assert report["max_worlds"] == 3  # noqa: PLR2004
    assert report["model"]["root"] == "w0"


def test_parse_corpus() -> None:
    """Test reading corpus lines."""
    text = "# logic\tformula\texpected\tname\n\nPCL\tp > p\tprovable\tID\nPN\tp\trefutable\nPCL\tp > p\n"
    entries = parse_corpus(text, "test.tsv")
    assert entries[0] == CorpusEntry("test.tsv", 3, "PCL", "p > p", "provable", "ID")
    assert entries[1] == CorpusEntry("test.tsv", 4, "PN", "p", "refutable")
    assert isinstance(entries[2], CorpusResult)
    assert not entries[2].passed
    assert entries[2].status == "malformed"
    assert entries[2].entry.line == 5  # noqa: PLR2004


def test_run_entry() -> None:
    """Test deciding single corpus entries."""
    budget = Budget()
    assert run_entry(CorpusEntry("t", 1, "PCL", "p > p", "provable"), budget).passed
    assert run_entry(CorpusEntry("t", 1, "PCL", "p > p", "unknown-ok"), budget).passed
    result = run_entry(CorpusEntry("t", 1, "PCL", "p", "provable"), budget)
    assert not result.passed
    assert result.status == "refutable"
    result = run_entry(CorpusEntry("t", 1, "PX", "p", "provable"), budget)
    assert result.status == "error"
    assert result.detail == "Unknown logic 'PX'"
    result = run_entry(CorpusEntry("t", 1, "PCL", "p > p", "unknown-ok"), Budget(max_nodes=1))
    assert result.passed
    assert result.status == "unknown"


def test_time_limit() -> None:
    """Test the per-file time limits of corpus entries."""
    assert dict(TIME_LIMITS) == {"axioms.tsv": 10.0, "derived.tsv": 30.0}
    assert time_limit("axioms.tsv") == 10.0  # noqa: PLR2004
    assert time_limit(str(Path("some") / "dir" / "derived.tsv")) == 30.0  # noqa: PLR2004
    assert time_limit("non_theorems.tsv") is None
    assert time_limit("axioms.tsv", 2.5) == 2.5  # noqa: PLR2004


def test_run_entry_over_time_limit(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that a right verdict reached too slowly fails."""
    clock = iter(range(0, 1_000_000, 100))
    monkeypatch.setattr(cli.time, "monotonic", lambda: next(clock))
    entry = CorpusEntry("axioms.tsv", 1, "PCL", "p", "refutable")
    result = run_entry(entry, Budget(), 5.0)
    assert result.status == "refutable"
    assert not result.passed
    assert result.detail.endswith("over the 5s limit")
    assert result.elapsed > 5.0  # noqa: PLR2004

    result = run_entry(entry, Budget())
    assert result.passed
    assert result.detail == ""

def test_corpus(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test running a corpus file."""
    path = tmp_path / "small.tsv"
    path.write_text("PCL\tp > p\tprovable\tID\nPCL\tp > q\trefutable\n", encoding="utf-8")
    assert main(["corpus", str(path)]) == 0
    out = capsys.readouterr().out
    assert "2/2 passed" in out
    assert out.startswith("PASS  ")

    path.write_text("PCL\tp > p\trefutable\nnot a line\n", encoding="utf-8")
    assert main(["corpus", str(path), "--format", "json"]) == 1
    report = _json_output(capsys)
    assert report["total"] == 2  # noqa: PLR2004
    assert report["failed"] == 2  # noqa: PLR2004
    assert [r["status"] for r in report["results"]] == ["provable", "malformed"]

    assert main(["corpus"]) == 64  # noqa: PLR2004
    assert main(["corpus", str(path), "--jobs", "0"]) == 64  # noqa: PLR2004


def test_builtin_corpora() -> None:
    """Test the shipped corpus files."""
    corpora = builtin_corpora()
    assert set(corpora) == {"axioms.tsv", "derived.tsv", "non_theorems.tsv"}
    for name, text in corpora.items():
        entries = parse_corpus(text, name)
        assert entries
        assert all(isinstance(entry, CorpusEntry) for entry in entries)


@pytest.mark.slow
def test_builtin_corpus_run() -> None:
    """Test that every shipped corpus line gets its expected verdict."""
    assert main(["corpus", "--builtin", "--jobs", "2"]) == 0


_TIMED = [
    entry
    for name in TIME_LIMITS
    for entry in parse_corpus(builtin_corpora()[name], name)
    if isinstance(entry, CorpusEntry)
]


@pytest.mark.slow
@pytest.mark.parametrize("entry", _TIMED, ids=lambda entry: f"{entry.source}:{entry.line}")
def test_builtin_corpus_time_limits(entry: CorpusEntry) -> None:
    """Test that axioms are proved within 10 seconds and derived formulas within 30."""
    limit = time_limit(entry.source)
    assert limit is not None
    result = run_entry(entry, Budget(), limit)
    assert result.passed, result.detail
    assert result.status == "provable"
    assert result.elapsed <= limit
