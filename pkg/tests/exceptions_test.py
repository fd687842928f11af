# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Tests of the exception classes."""

from pypcl import exceptions


def test_undefined_status() -> None:
    """Test creating a status code outside of the known ones."""
    status = exceptions.PclStatus(123)
    assert status == 123  # noqa: PLR2004
    assert status.name == "UNDEFINED"
    assert status.description == "Unknown status"
    assert str(status) == "Unknown status (123)."


def test_known_status() -> None:
    """Test the exit codes of the verdicts."""
    assert exceptions.PclStatus.PROVABLE == 0
    assert exceptions.PclStatus.REFUTABLE == 1
    assert exceptions.PclStatus.UNKNOWN == 2  # noqa: PLR2004
    assert exceptions.PclStatus.USAGE == 64  # noqa: PLR2004


def test_error_status() -> None:
    """Test that every error maps to the usage status."""
    assert exceptions.PclError().status == exceptions.PclStatus.USAGE
    assert exceptions.UnknownLogicError("PX").status == 64  # noqa: PLR2004


def test_parse_error() -> None:
    """Test the position of a parse error."""
    err = exceptions.ParseError("Expected a formula", 7)
    assert err.position == 7  # noqa: PLR2004
    assert str(err) == "Expected a formula (at char 7)"


def test_unknown_logic_error() -> None:
    """Test the message of an unknown logic error."""
    err = exceptions.UnknownLogicError("PX")
    assert err.name == "PX"
    assert str(err) == "Unknown logic 'PX'"


def test_rule_error() -> None:
    """Test the node path of a rule error."""
    assert str(exceptions.RuleError((), "no rule")) == "Invalid derivation at node root: no rule"
    err = exceptions.RuleError((0, 1), "premise mismatch")
    assert err.path == (0, 1)
    assert err.condition == "premise mismatch"
    assert str(err) == "Invalid derivation at node 0/1: premise mismatch"


def test_not_saturated_error() -> None:
    """Test listing the unmet conditions."""
    err = exceptions.NotSaturatedError(("RBar", "LCondStar"))
    assert err.unmet == ("RBar", "LCondStar")
    assert str(err) == "The branch is not saturated, unmet conditions: RBar, LCondStar"
