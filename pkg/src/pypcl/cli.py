# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Command line front end: ``pypcl prove|check-model|enumerate|check-proof|corpus``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, replace
from importlib.resources import files
from multiprocessing import Pool
from pathlib import Path, PurePath
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, NoReturn

from .calculus import Logic, check_derivation, proof_from_json, proof_to_json
from .countermodel import extract_model, model_invariant_report
from .exceptions import ModelError, PclError, PclStatus, RuleError
from .formula import parse_formula
from .search import Budget, Provable, Refutable, SearchOutcome, Unknown, prove
from .semantics import NeighbourhoodModel, check_frame, enumerate_countermodel, forces

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Sequence

_LOGGER = logging.getLogger(__name__)

EXPECTATIONS = ("provable", "refutable", "unknown-ok")

TIME_LIMITS = MappingProxyType({"axioms.tsv": 10.0, "derived.tsv": 30.0})
"""Seconds each entry of a corpus file may take, by file name"""


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors with the usage exit status."""

    def error(self: Self, message: str) -> NoReturn:
        """Raise instead of exiting with argparse's own status."""
        self.print_usage(sys.stderr)
        raise PclError(message)


def argparser() -> argparse.ArgumentParser:
    """Build the argument parser of the ``pypcl`` command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress to stderr; twice to also stream the search trace",
    )

    logic = argparse.ArgumentParser(add_help=False)
    logic.add_argument("--logic", default="PCL", help="logic name, e.g. PCL or PTU")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-nodes", type=int, default=Budget.max_nodes)
    budget.add_argument("--max-labels", type=int, default=Budget.max_labels)
    budget.add_argument("--timeout", type=float, default=None, help="seconds per search")

    parser = _Parser(prog="pypcl", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cmd = commands.add_parser(
        "prove", parents=[common, logic, budget], help="decide a formula"
    )
    cmd.add_argument("formula", nargs="?", help="formula text")
    cmd.add_argument("--formula", dest="formula_option", metavar="TEXT")
    cmd.add_argument("--file", type=Path, help="read the formula from a file")
    cmd.set_defaults(handler=cmd_prove)

    cmd = commands.add_parser(
        "check-model", parents=[common, logic], help="evaluate a formula in a model"
    )
    cmd.add_argument("model", type=Path, help="model JSON file")
    cmd.add_argument("formula", help="formula text")
    cmd.add_argument("--world", help="world to evaluate at, defaults to the model root")
    cmd.set_defaults(handler=cmd_check_model)

    cmd = commands.add_parser(
        "enumerate", parents=[common, logic], help="search small countermodels"
    )
    cmd.add_argument("formula", help="formula text")
    cmd.add_argument("--max-worlds", type=int, default=3)
    cmd.set_defaults(handler=cmd_enumerate)

    cmd = commands.add_parser(
        "check-proof", parents=[common], help="check a proof object"
    )
    cmd.add_argument("proof", type=Path, help="proof JSON file")
    cmd.set_defaults(handler=cmd_check_proof)

    cmd = commands.add_parser(
        "corpus", parents=[common, budget], help="run provability corpora"
    )
    cmd.add_argument("files", nargs="*", type=Path, help="corpus TSV files")
    cmd.add_argument("--builtin", action="store_true", help="run the shipped corpora")
    cmd.add_argument("--jobs", type=int, default=1, help="worker processes")
    cmd.add_argument(
        "--time-limit",
        type=float,
        default=None,
        help="seconds each entry may take, overriding the per-file limits",
    )
    cmd.set_defaults(handler=cmd_corpus)
    return parser


def _budget(args: argparse.Namespace) -> Budget:
    try:
        return Budget(args.max_nodes, args.max_labels, args.timeout)
    except (TypeError, ValueError) as exc:
        raise PclError(str(exc)) from None


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read {path}: {exc.strerror}"
        raise PclError(msg) from None


def _load_json(path: Path) -> Any:  # noqa: ANN401
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc}"
        raise PclError(msg) from None


def _emit(report: dict[str, Any], args: argparse.Namespace) -> None:
    if args.format == "json":
        print(json.dumps(report, indent=2))  # noqa: T201
        return
    for key, value in report.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value)  # noqa: PLW2901
        print(f"{key}: {value}")  # noqa: T201


def _refutation(outcome: Refutable) -> dict[str, Any]:
    """Describe a refutation, with its countermodel when the logic has one."""
    if not outcome.has_model:
        return {"model": None, "branch": outcome.leaf.to_json()}
    model, realization = extract_model(outcome.leaf, outcome.logic)
    report = model_invariant_report(model, outcome.leaf, realization)
    verified = (
        bool(report)
        and not forces(model, model.root, outcome.formula)  # type: ignore[arg-type]
        and bool(check_frame(model, outcome.logic))
    )
    if report.first is not None:
        _LOGGER.warning("countermodel check failed: %s", report.first)
    return {"model": model.to_json(), "verified": verified}


def _outcome_report(outcome: SearchOutcome) -> dict[str, Any]:
    report: dict[str, Any] = {
        "formula": str(outcome.formula),
        "logic": outcome.logic.name,
        "status": type(outcome).__name__.lower(),
        "stats": outcome.stats.to_json(),
    }
    if isinstance(outcome, Provable):
        report["proof"] = proof_to_json(outcome.derivation, outcome.logic)
    elif isinstance(outcome, Refutable):
        report.update(_refutation(outcome))
    elif isinstance(outcome, Unknown):
        report["reason"] = outcome.reason
    return report


def _status(outcome: SearchOutcome) -> PclStatus:
    if isinstance(outcome, Provable):
        return PclStatus.PROVABLE
    if isinstance(outcome, Refutable):
        return PclStatus.REFUTABLE
    return PclStatus.UNKNOWN


def cmd_prove(args: argparse.Namespace) -> PclStatus:
    """Run a proof search and report the proof, the countermodel or the exhausted budget."""
    texts = [t for t in (args.formula, args.formula_option) if t is not None]
    if args.file is not None:
        texts.append(_read(args.file).strip())
    if len(texts) != 1:
        msg = "Give exactly one formula, as an argument, with --formula or with --file"
        raise PclError(msg)
    logic = Logic.from_name(args.logic)
    outcome = prove(parse_formula(texts[0]), logic, _budget(args))
    if args.verbose >= 2:  # noqa: PLR2004
        for event in outcome.trace:
            print(json.dumps(event.to_json()), file=sys.stderr)  # noqa: T201
    _emit(_outcome_report(outcome), args)
    return _status(outcome)


def cmd_check_model(args: argparse.Namespace) -> PclStatus:
    """Evaluate a formula at a world of a model and check the frame conditions."""
    model = NeighbourhoodModel.from_json(_load_json(args.model))
    logic = Logic.from_name(args.logic)
    f = parse_formula(args.formula)
    world = args.world if args.world is not None else model.root
    if world is None:
        msg = "The model has no root, give --world"
        raise ModelError(msg)
    holds = forces(model, world, f)
    frame = check_frame(model, logic)
    _emit(
        {
            "formula": str(f),
            "world": world,
            "holds": holds,
            "frame": [str(v) for v in frame.violations],
        },
        args,
    )
    return PclStatus.PROVABLE if holds and frame else PclStatus.REFUTABLE


def cmd_enumerate(args: argparse.Namespace) -> PclStatus:
    """Search small models for a countermodel; exits 1 when one is found."""
    logic = Logic.from_name(args.logic)
    f = parse_formula(args.formula)
    try:
        model = enumerate_countermodel(f, logic, args.max_worlds)
    except ValueError as exc:
        raise PclError(str(exc)) from None
    _emit(
        {
            "formula": str(f),
            "logic": logic.name,
            "max_worlds": args.max_worlds,
            "model": None if model is None else model.to_json(),
        },
        args,
    )
    return PclStatus.PROVABLE if model is None else PclStatus.REFUTABLE


def cmd_check_proof(args: argparse.Namespace) -> PclStatus:
    """Check a proof object produced by ``prove --format json``."""
    obj = _load_json(args.proof)
    if isinstance(obj, dict) and "proof" in obj:
        obj = obj["proof"]
    logic, derivation = proof_from_json(obj)
    try:
        check_derivation(derivation, logic)
    except RuleError as exc:
        _emit({"valid": False, "error": str(exc)}, args)
        return PclStatus.REFUTABLE
    _emit({"valid": True, "logic": logic.name, "nodes": derivation.size}, args)
    return PclStatus.PROVABLE


@dataclass(frozen=True)
class CorpusEntry:
    """One line of a corpus file."""

    source: str
    line: int
    logic: str
    formula: str
    expected: str
    name: str = ""


@dataclass(frozen=True)
class CorpusResult:
    """The verdict on one corpus line."""

    entry: CorpusEntry
    passed: bool
    status: str
    elapsed: float
    detail: str = ""

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the result."""
        return {
            "source": self.entry.source,
            "line": self.entry.line,
            "name": self.entry.name,
            "logic": self.entry.logic,
            "formula": self.entry.formula,
            "expected": self.entry.expected,
            "status": self.status,
            "passed": self.passed,
            "elapsed": round(self.elapsed, 6),
            "detail": self.detail,
        }


def parse_corpus(text: str, source: str = "<corpus>") -> list[CorpusEntry | CorpusResult]:
    """Parse a tab separated corpus: ``logic, formula, expected[, name]`` per line.

    Blank lines and lines starting with ``#`` are skipped. Malformed lines are
    returned as failed results so a run can report them and go on.
    """
    entries: list[CorpusEntry | CorpusResult] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [part.strip() for part in raw.split("\t")]
        if len(fields) in (3, 4) and fields[2] in EXPECTATIONS:
            entries.append(CorpusEntry(source, number, *fields))
            continue
        bad = CorpusEntry(source, number, "", line, "", "")
        entries.append(
            CorpusResult(bad, passed=False, status="malformed", elapsed=0.0, detail=line)
        )
    return entries


def builtin_corpora() -> dict[str, str]:
    """Get the shipped corpus files, by name."""
    folder = files("pypcl") / "corpus"
    return {
        item.name: item.read_text(encoding="utf-8")
        for item in sorted(folder.iterdir(), key=lambda item: item.name)
        if item.name.endswith(".tsv")
    }


def time_limit(source: str, override: float | None = None) -> float | None:
    """Get the seconds an entry of a corpus file may take, ``None`` for no limit."""
    if override is not None:
        return override
    return TIME_LIMITS.get(PurePath(source).name)


def run_entry(entry: CorpusEntry, budget: Budget, limit: float | None = None) -> CorpusResult:
    """Decide one corpus entry and check the verdict, countermodel included.

    :param entry: The corpus entry
    :type entry: CorpusEntry
    :param budget: The search budget
    :type budget: Budget
    :param limit: Seconds the entry may take; slower verdicts fail, and the
        search stops there if the budget sets no earlier time limit
    :type limit: float | None
    :returns: The verdict
    :rtype: CorpusResult
    """
    if limit is not None and (budget.wall_clock is None or budget.wall_clock > limit):
        budget = replace(budget, wall_clock=limit)
    started = time.monotonic()
    try:
        outcome = prove(parse_formula(entry.formula), Logic.from_name(entry.logic), budget)
    except PclError as exc:
        return CorpusResult(entry, False, "error", time.monotonic() - started, str(exc))
    status = type(outcome).__name__.lower()
    detail = ""
    if entry.expected == "unknown-ok":
        passed = status in ("provable", "unknown")
    else:
        passed = status == entry.expected
    if passed and isinstance(outcome, Refutable) and outcome.has_model:
        verified = _refutation(outcome)["verified"]
        if not verified:
            passed, detail = False, "countermodel failed verification"
    if isinstance(outcome, Unknown):
        detail = outcome.reason
    elapsed = time.monotonic() - started
    if passed and limit is not None and elapsed > limit:
        passed, detail = False, f"took {elapsed:.1f}s, over the {limit:g}s limit"
    return CorpusResult(entry, passed, status, elapsed, detail)


def _run_packed(job: tuple[CorpusEntry, Budget, float | None]) -> CorpusResult:
    return run_entry(*job)


def cmd_corpus(args: argparse.Namespace) -> PclStatus:
    """Run corpus files and print one verdict per line plus a summary."""
    sources: dict[str, str] = {str(path): _read(path) for path in args.files}
    if args.builtin:
        sources.update(builtin_corpora())
    if not sources:
        msg = "Give corpus files or --builtin"
        raise PclError(msg)
    if args.jobs < 1:
        msg = "--jobs must be >= 1"
        raise PclError(msg)
    if args.time_limit is not None and args.time_limit <= 0:
        msg = "--time-limit must be positive"
        raise PclError(msg)
    budget = _budget(args)
    parsed = [item for name, text in sources.items() for item in parse_corpus(text, name)]
    jobs = [
        (item, budget, time_limit(item.source, args.time_limit))
        for item in parsed
        if isinstance(item, CorpusEntry)
    ]
    if args.jobs > 1:
        with Pool(args.jobs) as pool:
            done = iter(pool.map(_run_packed, jobs))
    else:
        done = map(_run_packed, jobs)
    results = [item if isinstance(item, CorpusResult) else next(done) for item in parsed]

    failed = sum(1 for result in results if not result.passed)
    if args.format == "json":
        print(  # noqa: T201
            json.dumps(
                {
                    "results": [result.to_json() for result in results],
                    "total": len(results),
                    "failed": failed,
                },
                indent=2,
            )
        )
    else:
        for result in results:
            entry = result.entry
            print(  # noqa: T201
                f"{'PASS' if result.passed else 'FAIL'}  {entry.source}:{entry.line}  "
                f"{entry.logic:<4} {entry.name or entry.formula}  "
                f"{entry.expected} -> {result.status}  {result.elapsed:.3f}s"
                + (f"  ({result.detail})" if result.detail else "")
            )
        print(f"{len(results) - failed}/{len(results)} passed")  # noqa: T201
    return PclStatus.PROVABLE if failed == 0 else PclStatus.REFUTABLE


def _configure_logging(verbosity: int) -> None:
    if verbosity <= 0:
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if verbosity == 1 else logging.DEBUG,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ``pypcl`` command and return its exit status."""
    try:
        args = argparser().parse_args(argv)
        _configure_logging(args.verbose)
        return int(args.handler(args))
    except PclError as exc:
        print(f"pypcl: {exc}", file=sys.stderr)  # noqa: T201
        return int(exc.status)
