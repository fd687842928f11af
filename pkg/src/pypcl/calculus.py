# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""The labelled calculi: logics, rule tables, derivations and the proof checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING, Any

from ._internals.rules import (
    PRIORITY,
    RuleId,
    RuleInstance,
    RuleKind,
    RuleMismatch,
    SequentIndex,
    candidates,
    closing_instance,
    instantiate,
)
from .exceptions import LabelError, RuleError, SerialisationError, UnknownLogicError
from .sequent import Sequent, labelled_from_json, parse_label

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Iterator

    from .sequent import Branch, Label, LabelledFormula

__all__ = [
    "SUPPORTED_LOGICS",
    "Derivation",
    "Flag",
    "Logic",
    "ProofStep",
    "RuleId",
    "RuleInstance",
    "RuleKind",
    "applicable_instances",
    "check_derivation",
    "proof_from_json",
    "proof_to_json",
    "realise",
    "rule_table",
]


class Flag(str, Enum):
    """The frame conditions extending PCL."""

    N = "N"
    T = "T"
    W = "W"
    C = "C"
    U = "U"
    A = "A"


_IMPLIED: dict[Flag, Flag] = {Flag.C: Flag.W, Flag.W: Flag.T, Flag.T: Flag.N}
_CHAIN = (Flag.C, Flag.W, Flag.T, Flag.N)


@dataclass(frozen=True)
class Logic:
    """A point of the preferential family: PCL plus a set of frame conditions."""

    flags: frozenset[Flag] = frozenset()

    def __post_init__(self: Self) -> None:
        """Close the flags under the implications between frame conditions."""
        flags = {Flag(flag) for flag in self.flags}
        for flag in _CHAIN:
            if flag in flags and flag in _IMPLIED:
                flags.add(_IMPLIED[flag])
        object.__setattr__(self, "flags", frozenset(flags))

    @property
    def name(self: Self) -> str:
        """Get the lattice name of the logic, e.g. ``PTU``."""
        chain = next((flag.value for flag in _CHAIN if flag in self.flags), "")
        if Flag.A in self.flags:
            suffix = "A"
        elif Flag.U in self.flags:
            suffix = "U"
        else:
            suffix = ""
        return f"P{chain}{suffix}" if chain or suffix else "PCL"

    @property
    def absolute(self: Self) -> bool:
        """Check whether the logic assumes absoluteness."""
        return Flag.A in self.flags

    @property
    def uniform(self: Self) -> bool:
        """Check whether the logic's frames are uniform (absoluteness included)."""
        return Flag.U in self.flags or Flag.A in self.flags

    def has(self: Self, flag: Flag) -> bool:
        """Check whether the logic includes a frame condition."""
        return flag in self.flags

    def _covered(self: Self) -> frozenset[Flag]:
        return self.flags | {Flag.U} if self.absolute else self.flags

    def is_below(self: Self, other: Logic) -> bool:
        """Check whether ``other`` extends this logic in the lattice."""
        return self._covered() <= other._covered()

    @classmethod
    def from_name(cls: type[Self], name: str) -> Logic:
        """Get a lattice point by name.

        :raises UnknownLogicError: If the name is not one of the supported logics
        """
        try:
            return SUPPORTED_LOGICS[name]
        except (KeyError, TypeError):
            raise UnknownLogicError(str(name)) from None

    def __str__(self: Self) -> str:
        """To string."""
        return self.name


def _preset(*flags: Flag) -> Logic:
    return Logic(frozenset(flags))


SUPPORTED_LOGICS: MappingProxyType[str, Logic] = MappingProxyType(
    {
        logic.name: logic
        for logic in (
            _preset(),
            _preset(Flag.N),
            _preset(Flag.T),
            _preset(Flag.W),
            _preset(Flag.C),
            _preset(Flag.U),
            _preset(Flag.N, Flag.U),
            _preset(Flag.T, Flag.U),
            _preset(Flag.W, Flag.U),
            _preset(Flag.C, Flag.U),
            _preset(Flag.A),
            _preset(Flag.N, Flag.A),
            _preset(Flag.T, Flag.A),
            _preset(Flag.W, Flag.A),
            _preset(Flag.C, Flag.A),
        )
    }
)
"""The 15 logics of the preferential family, by name"""


_BASE_RULES = frozenset(
    {
        RuleId.INIT,
        RuleId.BOT_L,
        RuleId.L_AND,
        RuleId.R_AND,
        RuleId.L_OR,
        RuleId.R_OR,
        RuleId.L_IMP,
        RuleId.R_IMP,
        RuleId.L_FORALL,
        RuleId.R_FORALL,
        RuleId.L_EXISTS,
        RuleId.R_EXISTS,
        RuleId.R_COND,
        RuleId.L_COND,
        RuleId.R_BAR,
        RuleId.L_BAR,
        RuleId.REF,
        RuleId.TR,
        RuleId.L_SUBSET,
    }
)

_FLAG_RULES: dict[Flag, frozenset[RuleId]] = {
    Flag.N: frozenset({RuleId.N, RuleId.ZERO}),
    Flag.T: frozenset({RuleId.T}),
    Flag.W: frozenset({RuleId.W}),
    Flag.C: frozenset({RuleId.C, RuleId.SINGLE, RuleId.REPL1, RuleId.REPL2}),
    Flag.U: frozenset({RuleId.UNIF1, RuleId.UNIF2}),
    # Absoluteness entails uniformity, Abs1/Abs2 saturation already meets Unif1/Unif2
    Flag.A: frozenset({RuleId.ABS1, RuleId.ABS2, RuleId.UNIF1, RuleId.UNIF2}),
}


def rule_table(logic: Logic, *, search: bool = False) -> frozenset[RuleId]:
    """Get the rules of the calculus for a logic.

    :param logic: The logic
    :type logic: Logic
    :param search: Whether to get the search variant, with LCondStar in place of
        LCond and with MonForall
    :type search: bool
    :returns: The rule identifiers
    :rtype: frozenset[RuleId]
    """
    rules = set(_BASE_RULES)
    for flag in logic.flags:
        rules |= _FLAG_RULES[flag]
    if search:
        rules.discard(RuleId.L_COND)
        rules |= {RuleId.L_COND_STAR, RuleId.MON_FORALL}
    return frozenset(rules)


@dataclass(frozen=True, eq=False)
class Derivation:
    """A derivation tree; each node is a sequent with the rule applied to it."""

    sequent: Sequent
    instance: RuleInstance
    children: tuple[Derivation, ...] = ()

    def __repr__(self: Self) -> str:
        """Repr the object."""
        return f"<{self.__class__.__name__} = {self.instance.rule.value}, {self.size} nodes>"

    def walk(self: Self) -> Iterator[tuple[tuple[int, ...], Derivation]]:
        """Iterate over the nodes in pre-order, with their paths from the root."""
        stack: list[tuple[tuple[int, ...], Derivation]] = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            stack.extend(
                (path + (i,), child) for i, child in reversed(list(enumerate(node.children)))
            )

    @property
    def size(self: Self) -> int:
        """Get the number of nodes."""
        return sum(1 for _ in self.walk())

    @property
    def height(self: Self) -> int:
        """Get the number of nodes on the longest branch."""
        return max(len(path) for path, _ in self.walk()) + 1

    def is_valid(self: Self, logic: Logic) -> bool:
        """Check the derivation against the calculus of a logic."""
        try:
            check_derivation(self, logic)
        except RuleError:
            return False
        return True


def applicable_instances(branch: Branch, logic: Logic) -> list[RuleInstance]:
    """List the rule instances the search may apply to a branch, in strategy order.

    Instances whose saturation condition already holds on the branch are left
    out, so an empty list means the branch is closed or saturated.
    """
    if closing_instance(branch.current) is not None:
        return []
    return list(candidates(SequentIndex(branch), rule_table(logic, search=True), PRIORITY))


def check_derivation(d: Derivation, logic: Logic) -> None:
    """Check a derivation independently of how it was produced.

    Every node must apply a rule of the logic (LCond and LCondStar are both
    accepted), its children must be exactly the premises the rule yields and
    every label a rule introduces must be new on the branch leading to it.

    :param d: The derivation
    :type d: Derivation
    :param logic: The logic
    :type logic: Logic
    :raises RuleError: Naming the first offending node and the violated condition
    """
    allowed = rule_table(logic) | rule_table(logic, search=True)
    stack: list[tuple[tuple[int, ...], Derivation, frozenset[Label]]] = [
        ((), d, d.sequent.labels)
    ]
    while stack:
        path, node, seen = stack.pop()
        inst = node.instance
        if inst.rule not in allowed:
            msg = f"rule {inst.rule} is not available in {logic.name}"
            raise RuleError(path, msg)
        for label in inst.fresh:
            if label in seen:
                msg = f"label {label} is not fresh on the branch"
                raise RuleError(path, msg)
        try:
            expected = instantiate(
                inst.rule, node.sequent, inst.principal, inst.fresh, inst.subject
            ).premises
        except RuleMismatch as exc:
            raise RuleError(path, f"{inst.rule}: {exc}") from None

        if len(expected) != len(node.children):
            msg = f"{inst.rule} yields {len(expected)} premises, found {len(node.children)}"
            raise RuleError(path, msg)
        for i, (premise, child) in enumerate(zip(expected, node.children)):
            if premise != child.sequent:
                msg = f"premise {i} of {inst.rule} differs from the child sequent"
                raise RuleError(path, msg)
            stack.append((path + (i,), child, seen | child.sequent.labels))


@dataclass(frozen=True)
class ProofStep:
    """A rule application in a hand-written derivation, without its sequents."""

    rule: RuleId
    principal: tuple[LabelledFormula, ...] = ()
    fresh: tuple[Label, ...] = ()
    subject: Label | None = None
    children: tuple[ProofStep, ...] = field(default=())


def realise(root: Sequent, step: ProofStep) -> Derivation:
    """Turn a proof script into a derivation by computing every sequent.

    :raises RuleError: If a step does not apply to the sequent it is given
    """

    def build(path: tuple[int, ...], sequent: Sequent, step: ProofStep) -> Derivation:
        try:
            inst = instantiate(step.rule, sequent, step.principal, step.fresh, step.subject)
        except RuleMismatch as exc:
            raise RuleError(path, f"{step.rule}: {exc}") from None
        if len(inst.premises) != len(step.children):
            msg = f"{step.rule} yields {len(inst.premises)} premises, the script has {len(step.children)}"
            raise RuleError(path, msg)
        return Derivation(
            sequent,
            inst,
            tuple(
                build(path + (i,), premise, child)
                for i, (premise, child) in enumerate(zip(inst.premises, step.children))
            ),
        )

    return build((), root, step)


def proof_to_json(d: Derivation, logic: Logic) -> dict[str, Any]:
    """Encode a derivation as a proof object with a flat node list.

    Node 0 is the root; ``children`` refer to positions in ``nodes``.
    """
    nodes: list[dict[str, Any]] = []
    ids: dict[int, int] = {}
    for _, node in d.walk():
        ids[id(node)] = len(nodes)
        nodes.append({"sequent": node.sequent.to_json(), **node.instance.to_json()})
    for _, node in d.walk():
        nodes[ids[id(node)]]["children"] = [ids[id(child)] for child in node.children]
    return {"logic": logic.name, "root": d.sequent.to_json(), "nodes": nodes}


def proof_from_json(obj: Any) -> tuple[Logic, Derivation]:  # noqa: ANN401
    """Decode a proof object produced by :func:`proof_to_json`.

    The decoded rule instances carry no premises; :func:`check_derivation`
    recomputes them.

    :raises SerialisationError: If the object is not a proof encoding
    :raises UnknownLogicError: If the logic is not supported
    """
    try:
        logic = Logic.from_name(obj["logic"])
        raw = obj["nodes"]
        built: dict[int, Derivation] = {}
        for position in range(len(raw) - 1, -1, -1):
            entry = raw[position]
            children = entry.get("children", [])
            if any(not isinstance(c, int) or c <= position or c not in built for c in children):
                msg = f"node {position} has invalid children {children!r}"
                raise SerialisationError(msg)
            subject = entry.get("subject")
            inst = RuleInstance(
                RuleId(entry["rule"]),
                tuple(labelled_from_json(f) for f in entry.get("principal", [])),
                tuple(parse_label(label) for label in entry.get("fresh", [])),
                None if subject is None else parse_label(subject),
            )
            built[position] = Derivation(
                Sequent.from_json(entry["sequent"]),
                inst,
                tuple(built[c] for c in children),
            )
        root = built[0]
    except (KeyError, TypeError, ValueError, LabelError) as exc:
        msg = f"Malformed proof object: {exc}"
        raise SerialisationError(msg) from None
    if root.sequent != Sequent.from_json(obj["root"]):
        msg = "The root sequent does not match node 0"
        raise SerialisationError(msg)
    return logic, root
