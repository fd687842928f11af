# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""The conditional language: syntax trees, parser, printer and metrics."""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from sys import version_info
from typing import TYPE_CHECKING, Any, ClassVar

import pyparsing as pp

from .exceptions import ParseError, SerialisationError

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Callable


class Formula(ABC):
    """The base for all formulas of the conditional language."""

    __slots__ = ()

    @property
    @abstractmethod
    def children(self: Self) -> tuple[Formula, ...]:
        """Get the immediate subformulas."""

    def __str__(self: Self) -> str:
        """Render the formula in the concrete syntax."""
        return render_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    """A propositional atom."""

    name: str

    def __post_init__(self: Self) -> None:
        """Validate the atom name.

        :raises ValueError: If the name is not an identifier or is a keyword
        """
        if not isinstance(self.name, str) or not _ATOM_NAME.fullmatch(self.name):
            msg = f"Invalid atom name {self.name!r}"
            raise ValueError(msg)
        if self.name in _KEYWORDS:
            msg = f"Atom name {self.name!r} is a reserved keyword"
            raise ValueError(msg)

    @property
    def children(self: Self) -> tuple[Formula, ...]:
        """Get the immediate subformulas."""
        return ()


@dataclass(frozen=True)
class Bottom(Formula):
    """The falsum constant."""

    @property
    def children(self: Self) -> tuple[Formula, ...]:
        """Get the immediate subformulas."""
        return ()


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    SYMBOL: ClassVar[str] = ""
    OP: ClassVar[str] = ""

    @property
    def children(self: Self) -> tuple[Formula, ...]:
        """Get the immediate subformulas."""
        return (self.left, self.right)

    def __hash__(self: Self) -> int:
        """Hash the tree, computed once per node."""
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((type(self), self.left, self.right))
            self.__dict__["_hash"] = cached
        return cached

    def __getstate__(self: Self) -> dict[str, Any]:
        """Get the pickled state, without the cached hash."""
        return {k: v for k, v in self.__dict__.items() if k != "_hash"}


# eq=False keeps the cached __hash__ and the __eq__ of _Binary.


@dataclass(frozen=True, eq=False)
class And(_Binary):
    """Conjunction."""

    SYMBOL: ClassVar[str] = "&"
    OP: ClassVar[str] = "and"


@dataclass(frozen=True, eq=False)
class Or(_Binary):
    """Disjunction."""

    SYMBOL: ClassVar[str] = "|"
    OP: ClassVar[str] = "or"


@dataclass(frozen=True, eq=False)
class Implies(_Binary):
    """Material implication."""

    SYMBOL: ClassVar[str] = "->"
    OP: ClassVar[str] = "implies"


@dataclass(frozen=True, eq=False)
class Cond(_Binary):
    """The conditional ``left > right``."""

    SYMBOL: ClassVar[str] = ">"
    OP: ClassVar[str] = "cond"


BOTTOM = Bottom()


def negate(f: Formula) -> Formula:
    """Build ``~f``, which is sugar for ``f -> false``."""
    return Implies(f, BOTTOM)


def top() -> Formula:
    """Build ``true``, which is sugar for ``false -> false``."""
    return Implies(BOTTOM, BOTTOM)


# Parsing

_ATOM_NAME = re.compile(r"[a-z][a-z0-9_]*")
_KEYWORDS = frozenset({"true", "false"})

pp.ParserElement.enable_packrat()


def _fold_not(toks: pp.ParseResults) -> Formula:
    group = list(toks[0])
    result: Formula = group[-1]
    for _ in group[:-1]:
        result = negate(result)
    return result


def _left_folder(cls: type[_Binary]) -> Callable[[pp.ParseResults], Formula]:
    def fold(toks: pp.ParseResults) -> Formula:
        operands = list(toks[0])[0::2]
        result: Formula = operands[0]
        for operand in operands[1:]:
            result = cls(result, operand)
        return result

    return fold


def _fold_implies(toks: pp.ParseResults) -> Formula:
    operands = list(toks[0])[0::2]
    result: Formula = operands[-1]
    for operand in reversed(operands[:-1]):
        result = Implies(operand, result)
    return result


def _fold_cond(s: str, loc: int, toks: pp.ParseResults) -> Formula:
    operands = list(toks[0])[0::2]
    if len(operands) != 2:  # noqa: PLR2004
        msg = "nested '>' must be parenthesised"
        raise pp.ParseFatalException(s, loc, msg)
    return Cond(operands[0], operands[1])


def _build_grammar() -> pp.ParserElement:
    true_kw = pp.Keyword("true").set_parse_action(lambda: top())
    false_kw = pp.Keyword("false").set_parse_action(lambda: BOTTOM)
    atom = pp.Regex(r"(?!(?:true|false)\b)[a-z][a-z0-9_]*").set_parse_action(
        lambda toks: Atom(toks[0])
    )
    operand = (true_kw | false_kw | atom).set_name("atom")
    return pp.infix_notation(
        operand,
        [
            (pp.Literal("~"), 1, pp.OpAssoc.RIGHT, _fold_not),
            (pp.Literal("&"), 2, pp.OpAssoc.LEFT, _left_folder(And)),
            (pp.Literal("|"), 2, pp.OpAssoc.LEFT, _left_folder(Or)),
            (pp.Literal(">"), 2, pp.OpAssoc.LEFT, _fold_cond),
            (pp.Literal("->"), 2, pp.OpAssoc.RIGHT, _fold_implies),
        ],
    )


_GRAMMAR = _build_grammar()


def parse_formula(text: str) -> Formula:
    """Parse a formula.

    Binding strength, tightest first: ``~``, ``&``, ``|``, ``>``, ``->``.
    ``->`` associates to the right and ``>`` does not associate at all.

    :param text: The formula text
    :type text: str
    :returns: The formula tree
    :rtype: Formula
    :raises ParseError: If the text is not a well-formed formula
    """
    if not isinstance(text, str):
        msg = f"Expected instance of str, got text={type(text)}"
        raise TypeError(msg)

    try:
        return _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise ParseError(exc.msg, exc.loc) from None


# Printing

_STRENGTH: dict[type[Formula], int] = {
    Implies: 1,
    Cond: 2,
    Or: 3,
    And: 4,
}
_ATOMIC_STRENGTH = 5


def _strength(f: Formula) -> int:
    return _STRENGTH.get(type(f), _ATOMIC_STRENGTH)


def render_formula(f: Formula) -> str:
    """Render a formula so that :func:`parse_formula` reads it back unchanged."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if not isinstance(f, _Binary):
        msg = f"Expected instance of Formula, got f={type(f)}"
        raise TypeError(msg)

    own = _strength(f)
    if isinstance(f, Implies):
        left_min, right_min = own + 1, own
    elif isinstance(f, Cond):
        left_min, right_min = own + 1, own + 1
    else:
        left_min, right_min = own, own + 1

    def wrap(child: Formula, minimum: int) -> str:
        text = render_formula(child)
        return text if _strength(child) >= minimum else f"({text})"

    return f"{wrap(f.left, left_min)} {f.SYMBOL} {wrap(f.right, right_min)}"


# Metrics


def conditional_degree(f: Formula) -> int:
    """Get the nesting depth of the conditional operator."""
    if isinstance(f, _Binary):
        inner = max(conditional_degree(f.left), conditional_degree(f.right))
        return inner + 1 if isinstance(f, Cond) else inner
    return 0


def formula_size(f: Formula) -> int:
    """Get the number of symbols occurring in the formula."""
    return 1 + sum(formula_size(child) for child in f.children)


def formula_weight(f: Formula) -> int:
    """Get the weight of a formula.

    Atoms and ``false`` weigh 1, a Boolean connective adds 1 to the weight of
    its operands and the conditional adds 3.
    """
    if isinstance(f, _Binary):
        extra = 3 if isinstance(f, Cond) else 1
        return formula_weight(f.left) + formula_weight(f.right) + extra
    return 1


def subformulas(f: Formula) -> tuple[Formula, ...]:
    """List the distinct subformulas, operands before the formulas using them."""
    seen: dict[Formula, None] = {}

    def visit(g: Formula) -> None:
        if g in seen:
            return
        for child in g.children:
            visit(child)
        seen[g] = None

    visit(f)
    return tuple(seen)


def atoms(f: Formula) -> tuple[str, ...]:
    """List the atom names of a formula in first occurrence order."""
    return tuple(g.name for g in subformulas(f) if isinstance(g, Atom))


# JSON

_BINARY_BY_OP: dict[str, type[_Binary]] = {
    cls.OP: cls for cls in (And, Or, Implies, Cond)
}


def formula_to_json(f: Formula) -> dict[str, Any]:
    """Encode a formula as nested ``{"op": ..., "args": [...]}`` objects."""
    if isinstance(f, Atom):
        return {"op": "atom", "args": [f.name]}
    if isinstance(f, Bottom):
        return {"op": "false", "args": []}
    if isinstance(f, _Binary):
        return {"op": f.OP, "args": [formula_to_json(c) for c in f.children]}
    msg = f"Expected instance of Formula, got f={type(f)}"
    raise TypeError(msg)


def formula_from_json(obj: Any) -> Formula:  # noqa: ANN401
    """Decode a formula produced by :func:`formula_to_json`.

    :raises SerialisationError: If the object is not a formula encoding
    """
    if not isinstance(obj, dict) or not isinstance(obj.get("args"), list):
        msg = f"Not a formula object: {obj!r}"
        raise SerialisationError(msg)

    op, args = obj.get("op"), obj["args"]
    try:
        if op == "atom" and len(args) == 1:
            return Atom(args[0])
        if op == "false" and not args:
            return BOTTOM
        if op in _BINARY_BY_OP and len(args) == 2:  # noqa: PLR2004
            return _BINARY_BY_OP[op](*(formula_from_json(a) for a in args))
    except ValueError as exc:
        raise SerialisationError(str(exc)) from None

    msg = f"Unknown formula operator {op!r} with {len(args)} arguments"
    raise SerialisationError(msg)
