# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""PCL exceptions."""

from __future__ import annotations

from enum import Enum
from sys import version_info

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self


class PclStatus(int, Enum):
    """Status codes reported by the command line front end."""

    PROVABLE = (0, "The formula is provable in the selected logic")
    REFUTABLE = (1, "The formula is refutable in the selected logic")
    UNKNOWN = (2, "The search budget was exhausted before a verdict")
    USAGE = (64, "The input or the configuration is invalid")

    UNDEFINED = (-1, "Unknown status")

    _description_: str

    @property
    def description(self: Self) -> str:
        """Get the status description."""
        return self._description_

    def __new__(cls: type[Self], value: int, description: str = "") -> Self:
        """Create a new PclStatus object."""
        obj = int.__new__(cls, value)
        obj._value_ = value
        obj._description_ = description
        return obj

    @classmethod
    def _missing_(cls: type[Self], value: object) -> PclStatus:
        # Return an `UNDEFINED` status but keep the actual value
        unknown_enum_val = int.__new__(cls, value)  # type: ignore[call-overload]
        unknown_enum_val._name_ = PclStatus.UNDEFINED.name
        unknown_enum_val._value_ = value
        unknown_enum_val._description_ = PclStatus.UNDEFINED.description
        return unknown_enum_val

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.description} ({self.value})."


class PclError(Exception):
    """The base for all PCL exceptions."""

    STATUS: PclStatus = PclStatus.USAGE

    @property
    def status(self: Self) -> PclStatus:
        """Get the exit status associated with the exception."""
        return PclStatus(self.STATUS)


class ParseError(PclError):
    """The formula text could not be parsed."""

    def __init__(self: Self, message: str, position: int) -> None:
        """Initialise the exception with the offending character position."""
        self.position = position
        super().__init__(f"{message} (at char {position})")


class LabelError(PclError):
    """A label, a labelled formula or a branch is malformed."""


class UnknownLogicError(PclError):
    """The logic name is not one of the supported lattice points."""

    def __init__(self: Self, name: str) -> None:
        """Initialise the exception with the rejected name."""
        self.name = name
        super().__init__(f"Unknown logic {name!r}")


class RuleError(PclError):
    """A derivation node does not match the rule it claims to apply."""

    def __init__(self: Self, path: tuple[int, ...], condition: str) -> None:
        """Initialise the exception.

        :param path: The child indices leading from the root to the node
        :type path: tuple[int, ...]
        :param condition: The violated condition
        :type condition: str
        """
        self.path = path
        self.condition = condition
        where = "/".join(str(i) for i in path) or "root"
        super().__init__(f"Invalid derivation at node {where}: {condition}")


class ModelError(PclError):
    """A neighbourhood model violates its structural invariants."""


class RealizationError(PclError):
    """A realization is not total on the labels it is applied to."""


class NotSaturatedError(PclError):
    """A branch is not saturated, so no countermodel can be read off it."""

    def __init__(self: Self, unmet: tuple[str, ...]) -> None:
        """Initialise the exception with the unmet saturation conditions."""
        self.unmet = unmet
        super().__init__(
            "The branch is not saturated, unmet conditions: " + ", ".join(unmet)
        )


class UnsupportedLogicError(PclError):
    """The requested operation is not available for the logic."""


class SerialisationError(PclError):
    """A JSON document does not describe the expected object."""
