# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Labels, labelled formulas, sequents and branches."""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from functools import cached_property
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING, Any, Union

from .exceptions import LabelError, SerialisationError
from .formula import Formula, Implies, formula_from_json, formula_to_json, formula_weight

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Iterable, Mapping


@dataclass(frozen=True)
class WorldLabel:
    """A world label ``x<index>``."""

    index: int

    def __str__(self: Self) -> str:
        """To string."""
        return f"x{self.index}"

    @property
    def sort_key(self: Self) -> tuple[int, int]:
        """Get the key ordering labels by creation index."""
        return (0, self.index)


@dataclass(frozen=True)
class NbhdLabel:
    """A neighbourhood label ``a<index>``, or the singleton ``{x}`` when ``of`` is set."""

    index: int
    of: WorldLabel | None = None

    def __str__(self: Self) -> str:
        """To string."""
        if self.of is not None:
            return f"{{{self.of}}}"
        return f"a{self.index}"

    @property
    def is_singleton(self: Self) -> bool:
        """Check whether the label denotes a singleton neighbourhood."""
        return self.of is not None

    @property
    def sort_key(self: Self) -> tuple[int, int]:
        """Get the key ordering labels by creation index."""
        if self.of is not None:
            return (2, self.of.index)
        return (1, self.index)


Label = Union[WorldLabel, NbhdLabel]


def singleton(x: WorldLabel) -> NbhdLabel:
    """Get the singleton neighbourhood label ``{x}``."""
    return NbhdLabel(-1, x)


_LABEL_RE = re.compile(r"x(\d+)|a(\d+)|\{x(\d+)\}")


def parse_label(text: str) -> Label:
    """Parse the textual form of a label.

    :raises LabelError: If the text is not ``x<n>``, ``a<n>`` or ``{x<n>}``
    """
    match = _LABEL_RE.fullmatch(text) if isinstance(text, str) else None
    if match is None:
        msg = f"Malformed label {text!r}"
        raise LabelError(msg)
    world, nbhd, single = match.groups()
    if world is not None:
        return WorldLabel(int(world))
    if nbhd is not None:
        return NbhdLabel(int(nbhd))
    return singleton(WorldLabel(int(single)))


def _world(text: str) -> WorldLabel:
    label = parse_label(text)
    if not isinstance(label, WorldLabel):
        msg = f"Expected a world label, got {text!r}"
        raise LabelError(msg)
    return label


def _nbhd(text: str) -> NbhdLabel:
    label = parse_label(text)
    if not isinstance(label, NbhdLabel):
        msg = f"Expected a neighbourhood label, got {text!r}"
        raise LabelError(msg)
    return label


def _swap_world(label: WorldLabel, old: WorldLabel, new: WorldLabel) -> WorldLabel:
    return new if label == old else label


def _swap_in_nbhd(label: NbhdLabel, old: WorldLabel, new: WorldLabel) -> NbhdLabel:
    if label.of == old:
        return singleton(new)
    return label


class LabelledFormula(ABC):
    """The base for relational atoms and labelled formulas."""

    __slots__ = ()

    KIND: str = ""
    RELATIONAL: bool = False

    @property
    @abstractmethod
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula, singleton tags included."""

    @abstractmethod
    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""

    @abstractmethod
    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""

    @abstractmethod
    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""

    @cached_property
    def sort_key(self: Self) -> str:
        """Get a total, run independent ordering key."""
        return str(self)


def _nbhd_labels(a: NbhdLabel) -> tuple[Label, ...]:
    return (a, a.of) if a.of is not None else (a,)


@dataclass(frozen=True)
class InN(LabelledFormula):
    """The relational atom ``a in N(x)``."""

    nbhd: NbhdLabel
    world: WorldLabel

    KIND = "in_n"
    RELATIONAL = True

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.nbhd} in N({self.world})"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return (*_nbhd_labels(self.nbhd), self.world)

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(
            self,
            nbhd=_swap_in_nbhd(self.nbhd, old, new),
            world=_swap_world(self.world, old, new),
        )

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""
        return replace(self, nbhd=new if self.nbhd == old else self.nbhd)

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {"kind": self.KIND, "nbhd": str(self.nbhd), "world": str(self.world)}


@dataclass(frozen=True)
class MemberOf(LabelledFormula):
    """The relational atom ``x in a``."""

    world: WorldLabel
    nbhd: NbhdLabel

    KIND = "member"
    RELATIONAL = True

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.world} in {self.nbhd}"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return (self.world, *_nbhd_labels(self.nbhd))

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(
            self,
            world=_swap_world(self.world, old, new),
            nbhd=_swap_in_nbhd(self.nbhd, old, new),
        )

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""
        return replace(self, nbhd=new if self.nbhd == old else self.nbhd)

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {"kind": self.KIND, "world": str(self.world), "nbhd": str(self.nbhd)}


@dataclass(frozen=True)
class SubsetOf(LabelledFormula):
    """The relational atom ``sub <= sup``."""

    sub: NbhdLabel
    sup: NbhdLabel

    KIND = "subset"
    RELATIONAL = True

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.sub} sub {self.sup}"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return (*_nbhd_labels(self.sub), *_nbhd_labels(self.sup))

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(
            self,
            sub=_swap_in_nbhd(self.sub, old, new),
            sup=_swap_in_nbhd(self.sup, old, new),
        )

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""
        return replace(
            self,
            sub=new if self.sub == old else self.sub,
            sup=new if self.sup == old else self.sup,
        )

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {"kind": self.KIND, "sub": str(self.sub), "sup": str(self.sup)}


@dataclass(frozen=True)
class At(LabelledFormula):
    """The world formula ``x : A``."""

    world: WorldLabel
    formula: Formula

    KIND = "at"

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.world} : {self.formula}"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return (self.world,)

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(self, world=_swap_world(self.world, old, new))

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:  # noqa: ARG002
        """Replace every occurrence of a neighbourhood label."""
        return self

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {
            "kind": self.KIND,
            "world": str(self.world),
            "formula": formula_to_json(self.formula),
        }


@dataclass(frozen=True)
class _Forces(LabelledFormula):
    nbhd: NbhdLabel
    formula: Formula

    QUANTIFIER = ""

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.nbhd} |={self.QUANTIFIER} {self.formula}"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return _nbhd_labels(self.nbhd)

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(self, nbhd=_swap_in_nbhd(self.nbhd, old, new))

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""
        return replace(self, nbhd=new if self.nbhd == old else self.nbhd)

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {
            "kind": self.KIND,
            "nbhd": str(self.nbhd),
            "formula": formula_to_json(self.formula),
        }


@dataclass(frozen=True)
class ForcesAll(_Forces):
    """Universal local forcing ``a |=A A``."""

    KIND = "forces_all"
    QUANTIFIER = "A"


@dataclass(frozen=True)
class ForcesSome(_Forces):
    """Existential local forcing ``a |=E A``."""

    KIND = "forces_some"
    QUANTIFIER = "E"


@dataclass(frozen=True)
class CondAt(LabelledFormula):
    """The labelled conditional ``x |=[a] A | B``."""

    world: WorldLabel
    nbhd: NbhdLabel
    antecedent: Formula
    consequent: Formula

    KIND = "cond_at"

    def __str__(self: Self) -> str:
        """To string."""
        return f"{self.world} |=[{self.nbhd}] ({self.antecedent}) | ({self.consequent})"

    @property
    def labels(self: Self) -> tuple[Label, ...]:
        """Get the labels occurring in the formula."""
        return (self.world, *_nbhd_labels(self.nbhd))

    @property
    def local_implication(self: Self) -> Formula:
        """Get ``A -> B``, the formula the witnessing neighbourhood forces universally."""
        return Implies(self.antecedent, self.consequent)

    def substitute_world(self: Self, old: WorldLabel, new: WorldLabel) -> Self:
        """Replace every occurrence of a world label."""
        return replace(
            self,
            world=_swap_world(self.world, old, new),
            nbhd=_swap_in_nbhd(self.nbhd, old, new),
        )

    def substitute_nbhd(self: Self, old: NbhdLabel, new: NbhdLabel) -> Self:
        """Replace every occurrence of a neighbourhood label."""
        return replace(self, nbhd=new if self.nbhd == old else self.nbhd)

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the formula as a JSON object."""
        return {
            "kind": self.KIND,
            "world": str(self.world),
            "nbhd": str(self.nbhd),
            "antecedent": formula_to_json(self.antecedent),
            "consequent": formula_to_json(self.consequent),
        }


def labelled_from_json(obj: Any) -> LabelledFormula:  # noqa: ANN401
    """Decode a labelled formula produced by :meth:`LabelledFormula.to_json`.

    :raises SerialisationError: If the object is not a labelled formula encoding
    """
    try:
        kind = obj["kind"]
        if kind == InN.KIND:
            return InN(_nbhd(obj["nbhd"]), _world(obj["world"]))
        if kind == MemberOf.KIND:
            return MemberOf(_world(obj["world"]), _nbhd(obj["nbhd"]))
        if kind == SubsetOf.KIND:
            return SubsetOf(_nbhd(obj["sub"]), _nbhd(obj["sup"]))
        if kind == At.KIND:
            return At(_world(obj["world"]), formula_from_json(obj["formula"]))
        if kind == ForcesAll.KIND:
            return ForcesAll(_nbhd(obj["nbhd"]), formula_from_json(obj["formula"]))
        if kind == ForcesSome.KIND:
            return ForcesSome(_nbhd(obj["nbhd"]), formula_from_json(obj["formula"]))
        if kind == CondAt.KIND:
            return CondAt(
                _world(obj["world"]),
                _nbhd(obj["nbhd"]),
                formula_from_json(obj["antecedent"]),
                formula_from_json(obj["consequent"]),
            )
    except (KeyError, TypeError, LabelError) as exc:
        msg = f"Malformed labelled formula {obj!r}: {exc}"
        raise SerialisationError(msg) from None

    msg = f"Unknown labelled formula kind in {obj!r}"
    raise SerialisationError(msg)


def labelled_weight(f: LabelledFormula) -> tuple[int, int]:
    """Get the lexicographic weight of a labelled formula.

    The first component is the weight of the pure part (``A|B`` weighs
    ``w(A) + w(B) + 2``), the second the weight of the label: world labels
    weigh 0 and neighbourhood labels 1. Relational atoms weigh ``(0, 0)``.
    """
    if isinstance(f, At):
        return (formula_weight(f.formula), 0)
    if isinstance(f, _Forces):
        return (formula_weight(f.formula), 1)
    if isinstance(f, CondAt):
        return (formula_weight(f.antecedent) + formula_weight(f.consequent) + 2, 0)
    return (0, 0)


def substitute_world(
    f: LabelledFormula, old: WorldLabel, new: WorldLabel
) -> LabelledFormula:
    """Replace a world label everywhere in ``f``, singleton tags included."""
    return f.substitute_world(old, new)


def substitute_nbhd(
    f: LabelledFormula, old: NbhdLabel, new: NbhdLabel
) -> LabelledFormula:
    """Replace a neighbourhood label everywhere in ``f``."""
    return f.substitute_nbhd(old, new)


def labels_of(formulas: Iterable[LabelledFormula]) -> frozenset[Label]:
    """Collect the labels occurring in some labelled formulas."""
    return frozenset(label for f in formulas for label in f.labels)


def _sorted(formulas: Iterable[LabelledFormula]) -> list[LabelledFormula]:
    return sorted(formulas, key=lambda f: f.sort_key)


@dataclass(frozen=True)
class Sequent:
    """A sequent ``antecedent => succedent`` over sets of labelled formulas."""

    antecedent: frozenset[LabelledFormula] = frozenset()
    succedent: frozenset[LabelledFormula] = frozenset()

    def __post_init__(self: Self) -> None:
        """Normalise both sides to frozensets and validate them."""
        antecedent = frozenset(self.antecedent)
        succedent = frozenset(self.succedent)
        for f in antecedent | succedent:
            if not isinstance(f, LabelledFormula):
                msg = f"Expected instance of LabelledFormula, got {type(f)}"
                raise TypeError(msg)
        relational = [f for f in succedent if f.RELATIONAL]
        if relational:
            msg = f"Relational atom {relational[0]} may only occur in an antecedent"
            raise LabelError(msg)
        object.__setattr__(self, "antecedent", antecedent)
        object.__setattr__(self, "succedent", succedent)

    def __str__(self: Self) -> str:
        """To string."""
        left = ", ".join(str(f) for f in _sorted(self.antecedent))
        right = ", ".join(str(f) for f in _sorted(self.succedent))
        return f"{left} => {right}".strip()

    @property
    def labels(self: Self) -> frozenset[Label]:
        """Get every label occurring in the sequent."""
        return labels_of(self.antecedent | self.succedent)

    def with_formulas(
        self: Self,
        *,
        remove_left: Iterable[LabelledFormula] = (),
        add_left: Iterable[LabelledFormula] = (),
        remove_right: Iterable[LabelledFormula] = (),
        add_right: Iterable[LabelledFormula] = (),
    ) -> Sequent:
        """Build a sequent by removing and then adding formulas on either side."""
        return Sequent(
            (self.antecedent - frozenset(remove_left)) | frozenset(add_left),
            (self.succedent - frozenset(remove_right)) | frozenset(add_right),
        )

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the sequent as a JSON object with sorted sides."""
        return {
            "antecedent": [f.to_json() for f in _sorted(self.antecedent)],
            "succedent": [f.to_json() for f in _sorted(self.succedent)],
        }

    @classmethod
    def from_json(cls: type[Self], obj: Any) -> Self:  # noqa: ANN401
        """Decode a sequent produced by :meth:`to_json`.

        :raises SerialisationError: If the object is not a sequent encoding
        """
        if not isinstance(obj, dict):
            msg = f"Not a sequent object: {obj!r}"
            raise SerialisationError(msg)
        try:
            return cls(
                frozenset(labelled_from_json(f) for f in obj["antecedent"]),
                frozenset(labelled_from_json(f) for f in obj["succedent"]),
            )
        except (KeyError, TypeError, LabelError) as exc:
            msg = f"Malformed sequent: {exc}"
            raise SerialisationError(msg) from None


@dataclass(frozen=True)
class GenerationEdge:
    """The edge ``parent generates child`` of the label generation tree."""

    parent: Label
    child: Label
    rule: str = ""
    """The name of the rule introducing ``child``, when known"""


class FormulaOrder:
    """Immutable ranking of labelled formulas by first appearance on one branch.

    Each branch owns its order and extending a branch extends a copy, so the
    ranks on one branch never depend on its siblings. Ranks decide which of
    several pending instances fires first.
    """

    __slots__ = ("_ranks",)

    def __init__(self: Self, formulas: Iterable[LabelledFormula] = ()) -> None:
        """Rank the given formulas, in their textual order."""
        self._ranks: Mapping[LabelledFormula, int] = MappingProxyType(
            {f: rank for rank, f in enumerate(_sorted(set(formulas)))}
        )

    def extended(self: Self, formulas: Iterable[LabelledFormula]) -> FormulaOrder:
        """Get the order ranking also the not yet ranked formulas, after all others."""
        fresh = [f for f in set(formulas) if f not in self._ranks]
        if not fresh:
            return self
        ranks = dict(self._ranks)
        for f in _sorted(fresh):
            ranks[f] = len(ranks)
        order = FormulaOrder()
        order._ranks = MappingProxyType(ranks)  # noqa: SLF001
        return order

    def rank(self: Self, f: LabelledFormula) -> int:
        """Get the rank of a formula, unranked formulas come last."""
        return self._ranks.get(f, len(self._ranks))

    def __len__(self: Self) -> int:
        """Get the number of ranked formulas."""
        return len(self._ranks)


@dataclass(frozen=True, eq=False)
class Branch:
    """A branch of a backward search: the current sequent and its history.

    ``down_gamma`` and ``down_delta`` hold every formula that occurred in an
    antecedent, respectively a succedent, from the root to ``current``.
    """

    current: Sequent
    down_gamma: frozenset[LabelledFormula]
    down_delta: frozenset[LabelledFormula]
    root: WorldLabel = WorldLabel(0)
    parents: Mapping[Label, Label] = field(default_factory=lambda: MappingProxyType({}))
    creation: Mapping[Label, int] = field(default_factory=lambda: MappingProxyType({}))
    origins: Mapping[Label, str] = field(default_factory=lambda: MappingProxyType({}))
    """The rule that introduced each generated label, when known"""
    labels: frozenset[Label] = frozenset()
    next_world: int = 0
    next_nbhd: int = 0
    order: FormulaOrder = field(
        default_factory=FormulaOrder, compare=False, repr=False, hash=False
    )
    """The formula ranks of this branch, ordering candidate instances"""

    def __post_init__(self: Self) -> None:
        """Validate the history invariants."""
        if not self.current.antecedent <= self.down_gamma:
            msg = "The current antecedent must be contained in down_gamma"
            raise LabelError(msg)
        if not self.current.succedent <= self.down_delta:
            msg = "The current succedent must be contained in down_delta"
            raise LabelError(msg)

    @classmethod
    def start(cls: type[Self], sequent: Sequent, root: WorldLabel | None = None) -> Self:
        """Start a branch whose only sequent is ``sequent``."""
        labels = sequent.labels
        worlds = [label.index for label in labels if isinstance(label, WorldLabel)]
        nbhds = [
            label.index
            for label in labels
            if isinstance(label, NbhdLabel) and not label.is_singleton
        ]
        if root is None:
            root = WorldLabel(min(worlds, default=0))
        return cls(
            current=sequent,
            down_gamma=sequent.antecedent,
            down_delta=sequent.succedent,
            root=root,
            labels=labels | {root},
            creation=MappingProxyType({root: 0}),
            next_world=max(worlds, default=-1) + 1 if worlds else root.index + 1,
            next_nbhd=max(nbhds, default=-1) + 1,
            order=FormulaOrder(sequent.antecedent | sequent.succedent),
        )

    @classmethod
    def initial(cls: type[Self], f: Formula) -> Self:
        """Start a branch at ``=> x0 : f``."""
        root = WorldLabel(0)
        return cls.start(Sequent(frozenset(), frozenset({At(root, f)})), root)

    def fresh_world(self: Self, offset: int = 0) -> WorldLabel:
        """Get a world label not yet used on the branch."""
        return WorldLabel(self.next_world + offset)

    def fresh_nbhd(self: Self, offset: int = 0) -> NbhdLabel:
        """Get a neighbourhood label not yet used on the branch."""
        return NbhdLabel(self.next_nbhd + offset)

    def unreachable_labels(self: Self) -> frozenset[Label]:
        """Get the plain labels the generation tree does not connect to the root."""
        missing = set()
        for label in self.labels:
            if isinstance(label, NbhdLabel) and label.is_singleton:
                continue
            node: Label = label
            seen = {node}
            while node != self.root and node in self.parents:
                node = self.parents[node]
                if node in seen:
                    break
                seen.add(node)
            if node != self.root:
                missing.add(label)
        return frozenset(missing)

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the branch as a JSON object."""
        edges = sorted(
            self.parents.items(), key=lambda item: self.creation.get(item[0], 0)
        )
        return {
            "root": str(self.root),
            "current": self.current.to_json(),
            "down_gamma": [f.to_json() for f in _sorted(self.down_gamma)],
            "down_delta": [f.to_json() for f in _sorted(self.down_delta)],
            "generation": [
                {
                    "parent": str(parent),
                    "child": str(child),
                    "index": self.creation.get(child, 0),
                }
                for child, parent in edges
            ],
        }


def extend_branch(
    b: Branch, premise: Sequent, new_edges: Iterable[GenerationEdge] = ()
) -> Branch:
    """Move a branch to one of the premises of a rule applied to its current sequent.

    :param b: The branch
    :type b: Branch
    :param premise: The premise becoming the current sequent
    :type premise: Sequent
    :param new_edges: The generation edges of the labels the rule introduced
    :type new_edges: Iterable[GenerationEdge]
    :returns: The extended branch
    :rtype: Branch
    :raises LabelError: If an edge would give a label a second parent
    """
    parents = dict(b.parents)
    creation = dict(b.creation)
    origins = dict(b.origins)
    for edge in new_edges:
        if edge.child in parents or edge.child == b.root:
            msg = f"Label {edge.child} already has a parent in the generation tree"
            raise LabelError(msg)
        if edge.parent not in b.labels:
            msg = f"Generation parent {edge.parent} does not occur on the branch"
            raise LabelError(msg)
        parents[edge.child] = edge.parent
        creation[edge.child] = len(creation)
        if edge.rule:
            origins[edge.child] = edge.rule

    new_formulas = (premise.antecedent - b.down_gamma) | (
        premise.succedent - b.down_delta
    )
    new_labels = labels_of(new_formulas) - b.labels
    next_world = max(
        [b.next_world]
        + [label.index + 1 for label in new_labels if isinstance(label, WorldLabel)]
    )
    next_nbhd = max(
        [b.next_nbhd]
        + [
            label.index + 1
            for label in new_labels
            if isinstance(label, NbhdLabel) and not label.is_singleton
        ]
    )
    return Branch(
        current=premise,
        down_gamma=b.down_gamma | premise.antecedent,
        down_delta=b.down_delta | premise.succedent,
        root=b.root,
        parents=MappingProxyType(parents),
        creation=MappingProxyType(creation),
        origins=MappingProxyType(origins),
        labels=b.labels | new_labels,
        next_world=next_world,
        next_nbhd=next_nbhd,
        order=b.order.extended(new_formulas),
    )
