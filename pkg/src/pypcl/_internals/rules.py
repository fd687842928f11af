# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from sys import version_info
from typing import TYPE_CHECKING, Any, Callable

from pypcl.formula import And, Atom, Bottom, Cond, Formula, Implies, Or
from pypcl.sequent import (
    At,
    CondAt,
    ForcesAll,
    ForcesSome,
    GenerationEdge,
    InN,
    Label,
    LabelledFormula,
    MemberOf,
    NbhdLabel,
    Sequent,
    SubsetOf,
    WorldLabel,
    singleton,
)

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Collection, Iterable, Iterator

    from pypcl.sequent import Branch


class RuleKind(str, Enum):
    """How a rule takes part in the search strategy."""

    CLOSURE = "closure"
    STATIC = "static"
    DYNAMIC = "dynamic"


class RuleId(str, Enum):
    """The rules of the labelled calculi."""

    INIT = ("init", "Atom on both sides", RuleKind.CLOSURE)
    BOT_L = ("BotL", "Falsum in the antecedent", RuleKind.CLOSURE)
    L_AND = ("LAnd", "Left conjunction")
    R_AND = ("RAnd", "Right conjunction")
    L_OR = ("LOr", "Left disjunction")
    R_OR = ("ROr", "Right disjunction")
    L_IMP = ("LImp", "Left implication")
    R_IMP = ("RImp", "Right implication")
    L_FORALL = ("LForall", "Left universal local forcing")
    R_FORALL = ("RForall", "Right universal local forcing", RuleKind.DYNAMIC, "world")
    L_EXISTS = ("LExists", "Left existential local forcing", RuleKind.DYNAMIC, "world")
    R_EXISTS = ("RExists", "Right existential local forcing")
    R_COND = ("RCond", "Right conditional", RuleKind.DYNAMIC, "nbhd")
    L_COND = ("LCond", "Left conditional")
    L_COND_STAR = ("LCondStar", "Left conditional keeping the forcing formula")
    R_BAR = ("RBar", "Right labelled conditional")
    L_BAR = ("LBar", "Left labelled conditional", RuleKind.DYNAMIC, "nbhd")
    REF = ("Ref", "Reflexivity of inclusion")
    TR = ("Tr", "Transitivity of inclusion")
    L_SUBSET = ("LSubset", "Membership along inclusion")
    MON_FORALL = ("MonForall", "Universal forcing along inclusion")
    N = ("N", "Normality", RuleKind.DYNAMIC, "nbhd")
    ZERO = ("Zero", "Non-emptiness", RuleKind.DYNAMIC, "world")
    T = ("T", "Total reflexivity", RuleKind.DYNAMIC, "nbhd")
    W = ("W", "Weak centering")
    SINGLE = ("Single", "Membership in the own singleton")
    C = ("C", "Centering")
    REPL1 = ("Repl1", "Replacement towards the singleton member")
    REPL2 = ("Repl2", "Replacement towards the singleton owner")
    UNIF1 = ("Unif1", "Uniformity, inner union", RuleKind.DYNAMIC, "nbhd")
    UNIF2 = ("Unif2", "Uniformity, outer union", RuleKind.DYNAMIC, "nbhd")
    ABS1 = ("Abs1", "Absoluteness, downwards")
    ABS2 = ("Abs2", "Absoluteness, upwards")

    _description_: str
    _kind_: RuleKind
    _fresh_: str | None

    def __new__(
        cls: type[Self],
        value: str,
        description: str = "",
        kind: RuleKind = RuleKind.STATIC,
        fresh: str | None = None,
    ) -> Self:
        """Create a new RuleId object."""
        obj = str.__new__(cls, value)
        obj._value_ = value
        obj._description_ = description
        obj._kind_ = kind
        obj._fresh_ = fresh
        return obj

    @property
    def description(self: Self) -> str:
        """Get the rule description."""
        return self._description_

    @property
    def kind(self: Self) -> RuleKind:
        """Get the strategy class of the rule."""
        return self._kind_

    @property
    def fresh(self: Self) -> str | None:
        """Get the sort of the label the rule introduces (``world``/``nbhd``), if any."""
        return self._fresh_

    def __str__(self: Self) -> str:
        """To string."""
        return self.value


@dataclass(frozen=True)
class RuleInstance:
    """A backward application of a rule to a conclusion sequent."""

    rule: RuleId
    principal: tuple[LabelledFormula, ...] = ()
    fresh: tuple[Label, ...] = ()
    subject: Label | None = None
    premises: tuple[Sequent, ...] = ()
    edges: tuple[GenerationEdge, ...] = ()

    def __str__(self: Self) -> str:
        """To string."""
        parts = [str(f) for f in self.principal]
        if self.subject is not None:
            parts.append(f"@{self.subject}")
        parts.extend(f"!{label}" for label in self.fresh)
        return f"{self.rule.value}[{'; '.join(parts)}]"

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the instance, without its premises."""
        return {
            "rule": self.rule.value,
            "principal": [f.to_json() for f in self.principal],
            "fresh": [str(label) for label in self.fresh],
            "subject": None if self.subject is None else str(self.subject),
        }


class RuleMismatch(Exception):  # noqa: N818
    """Raised when a rule does not apply to a conclusion as claimed."""


def _need(condition: bool, msg: str) -> None:  # noqa: FBT001
    if not condition:
        raise RuleMismatch(msg)


def _take(principal: tuple[LabelledFormula, ...], *kinds: type) -> tuple[Any, ...]:
    _need(
        len(principal) == len(kinds)
        and all(isinstance(f, kind) for f, kind in zip(principal, kinds)),
        "principal formulas do not have the shape "
        + ", ".join(kind.__name__ for kind in kinds),
    )
    return principal


def _in(f: LabelledFormula, side: frozenset[LabelledFormula], where: str) -> None:
    _need(f in side, f"{f} is not in the {where}")


def _at(f: LabelledFormula, connective: type[Formula]) -> At:
    _need(
        isinstance(f, At) and isinstance(f.formula, connective),
        f"{f} is not a world formula with main connective {connective.__name__}",
    )
    return f  # type: ignore[return-value]


def _fresh(
    conclusion: Sequent, fresh: tuple[Label, ...], sort: str | None
) -> Label | None:
    if sort is None:
        _need(not fresh, "the rule introduces no labels")
        return None
    _need(len(fresh) == 1, "the rule introduces exactly one label")
    label = fresh[0]
    if sort == "world":
        _need(isinstance(label, WorldLabel), f"{label} is not a world label")
    else:
        _need(
            isinstance(label, NbhdLabel) and not label.is_singleton,
            f"{label} is not a plain neighbourhood label",
        )
    _need(label not in conclusion.labels, f"label {label} is not fresh")
    return label


_Expansion = tuple[tuple[Sequent, ...], tuple[GenerationEdge, ...]]


def _keep(s: Sequent, *added: LabelledFormula) -> _Expansion:
    return (s.with_formulas(add_left=added),), ()


def _world_atom_retarget(f: LabelledFormula, old: WorldLabel, new: WorldLabel) -> LabelledFormula:
    if isinstance(f, At):
        return At(new, f.formula)
    if isinstance(f, MemberOf):
        return MemberOf(new, f.nbhd)
    if isinstance(f, InN):
        return InN(f.nbhd, new)
    msg = f"{f} is not atomic at {old}"
    raise RuleMismatch(msg)


def subject_world(f: LabelledFormula) -> WorldLabel | None:
    """Get the world a replacement rule may rewrite, for formulas atomic at a world."""
    if isinstance(f, At):
        return f.world if isinstance(f.formula, Atom) else None
    if isinstance(f, MemberOf):
        return f.world
    if isinstance(f, InN):
        return f.world
    return None


def _expand(  # noqa: C901, PLR0911, PLR0912, PLR0915
    rule: RuleId,
    s: Sequent,
    p: tuple[LabelledFormula, ...],
    fresh: tuple[Label, ...],
    subject: Label | None,
) -> _Expansion:
    gamma, delta = s.antecedent, s.succedent
    new = _fresh(s, fresh, rule.fresh)
    if rule not in (RuleId.REF, RuleId.N, RuleId.T):
        _need(subject is None, "the rule takes no subject label")

    if rule is RuleId.INIT:
        (f,) = _take(p, At)
        _need(isinstance(f.formula, Atom), f"{f} is not atomic")
        _in(f, gamma, "antecedent")
        _in(f, delta, "succedent")
        return (), ()
    if rule is RuleId.BOT_L:
        (f,) = _take(p, At)
        _need(isinstance(f.formula, Bottom), f"{f} is not falsum")
        _in(f, gamma, "antecedent")
        return (), ()

    if rule is RuleId.L_AND:
        f = _at(_take(p, At)[0], And)
        _in(f, gamma, "antecedent")
        x, g = f.world, f.formula
        return (s.with_formulas(remove_left=[f], add_left=[At(x, g.left), At(x, g.right)]),), ()
    if rule is RuleId.R_AND:
        f = _at(_take(p, At)[0], And)
        _in(f, delta, "succedent")
        x, g = f.world, f.formula
        return (
            s.with_formulas(remove_right=[f], add_right=[At(x, g.left)]),
            s.with_formulas(remove_right=[f], add_right=[At(x, g.right)]),
        ), ()
    if rule is RuleId.L_OR:
        f = _at(_take(p, At)[0], Or)
        _in(f, gamma, "antecedent")
        x, g = f.world, f.formula
        return (
            s.with_formulas(remove_left=[f], add_left=[At(x, g.left)]),
            s.with_formulas(remove_left=[f], add_left=[At(x, g.right)]),
        ), ()
    if rule is RuleId.R_OR:
        f = _at(_take(p, At)[0], Or)
        _in(f, delta, "succedent")
        x, g = f.world, f.formula
        return (s.with_formulas(remove_right=[f], add_right=[At(x, g.left), At(x, g.right)]),), ()
    if rule is RuleId.L_IMP:
        f = _at(_take(p, At)[0], Implies)
        _in(f, gamma, "antecedent")
        x, g = f.world, f.formula
        return (
            s.with_formulas(remove_left=[f], add_right=[At(x, g.left)]),
            s.with_formulas(remove_left=[f], add_left=[At(x, g.right)]),
        ), ()
    if rule is RuleId.R_IMP:
        f = _at(_take(p, At)[0], Implies)
        _in(f, delta, "succedent")
        x, g = f.world, f.formula
        return (
            s.with_formulas(add_left=[At(x, g.left)], remove_right=[f], add_right=[At(x, g.right)]),
        ), ()

    if rule is RuleId.L_FORALL:
        m, f = _take(p, MemberOf, ForcesAll)
        _need(m.nbhd == f.nbhd, "membership and forcing disagree on the neighbourhood")
        _in(m, gamma, "antecedent")
        _in(f, gamma, "antecedent")
        return _keep(s, At(m.world, f.formula))
    if rule is RuleId.R_FORALL:
        (f,) = _take(p, ForcesAll)
        _in(f, delta, "succedent")
        return (
            s.with_formulas(
                add_left=[MemberOf(new, f.nbhd)],
                remove_right=[f],
                add_right=[At(new, f.formula)],
            ),
        ), (GenerationEdge(f.nbhd, new),)
    if rule is RuleId.L_EXISTS:
        (f,) = _take(p, ForcesSome)
        _in(f, gamma, "antecedent")
        return (
            s.with_formulas(remove_left=[f], add_left=[MemberOf(new, f.nbhd), At(new, f.formula)]),
        ), (GenerationEdge(f.nbhd, new),)
    if rule is RuleId.R_EXISTS:
        m, f = _take(p, MemberOf, ForcesSome)
        _need(m.nbhd == f.nbhd, "membership and forcing disagree on the neighbourhood")
        _in(m, gamma, "antecedent")
        _in(f, delta, "succedent")
        return (s.with_formulas(add_right=[At(m.world, f.formula)]),), ()

    if rule is RuleId.R_COND:
        f = _at(_take(p, At)[0], Cond)
        _in(f, delta, "succedent")
        x, g = f.world, f.formula
        return (
            s.with_formulas(
                add_left=[InN(new, x), ForcesSome(new, g.left)],
                remove_right=[f],
                add_right=[CondAt(x, new, g.left, g.right)],
            ),
        ), (GenerationEdge(x, new),)
    if rule in (RuleId.L_COND, RuleId.L_COND_STAR):
        n, f = _take(p, InN, At)
        f = _at(f, Cond)
        _need(n.world == f.world, "the neighbourhood does not belong to the world")
        _in(n, gamma, "antecedent")
        _in(f, gamma, "antecedent")
        a, g = n.nbhd, f.formula
        witness = [CondAt(f.world, a, g.left, g.right)]
        if rule is RuleId.L_COND_STAR:
            witness.append(ForcesSome(a, g.left))
        return (
            s.with_formulas(add_right=[ForcesSome(a, g.left)]),
            s.with_formulas(add_left=witness),
        ), ()
    if rule is RuleId.R_BAR:
        n, sub, f = _take(p, InN, SubsetOf, CondAt)
        _need(n.world == f.world, "the neighbourhood does not belong to the world")
        _need(sub.sub == n.nbhd and sub.sup == f.nbhd, "the inclusion does not link the neighbourhoods")
        _in(n, gamma, "antecedent")
        _in(sub, gamma, "antecedent")
        _in(f, delta, "succedent")
        c = n.nbhd
        return (
            s.with_formulas(add_right=[ForcesSome(c, f.antecedent)]),
            s.with_formulas(add_right=[ForcesAll(c, f.local_implication)]),
        ), ()
    if rule is RuleId.L_BAR:
        (f,) = _take(p, CondAt)
        _in(f, gamma, "antecedent")
        return (
            s.with_formulas(
                remove_left=[f],
                add_left=[
                    InN(new, f.world),
                    SubsetOf(new, f.nbhd),
                    ForcesSome(new, f.antecedent),
                    ForcesAll(new, f.local_implication),
                ],
            ),
        ), (GenerationEdge(f.world, new),)

    if rule is RuleId.REF:
        _take(p)
        _need(isinstance(subject, NbhdLabel), "the rule needs a neighbourhood subject")
        return _keep(s, SubsetOf(subject, subject))  # type: ignore[arg-type]
    if rule is RuleId.TR:
        first, second = _take(p, SubsetOf, SubsetOf)
        _need(first.sup == second.sub, "the inclusions do not chain")
        _in(first, gamma, "antecedent")
        _in(second, gamma, "antecedent")
        return _keep(s, SubsetOf(first.sub, second.sup))
    if rule is RuleId.L_SUBSET:
        m, sub = _take(p, MemberOf, SubsetOf)
        _need(m.nbhd == sub.sub, "the membership does not match the inclusion")
        _in(m, gamma, "antecedent")
        _in(sub, gamma, "antecedent")
        return _keep(s, MemberOf(m.world, sub.sup))
    if rule is RuleId.MON_FORALL:
        sub, f = _take(p, SubsetOf, ForcesAll)
        _need(sub.sup == f.nbhd, "the inclusion does not match the forcing")
        _in(sub, gamma, "antecedent")
        _in(f, gamma, "antecedent")
        return _keep(s, ForcesAll(sub.sub, f.formula))

    if rule in (RuleId.N, RuleId.T):
        _take(p)
        _need(isinstance(subject, WorldLabel), "the rule needs a world subject")
        added: list[LabelledFormula] = [InN(new, subject)]  # type: ignore[arg-type]
        if rule is RuleId.T:
            added.append(MemberOf(subject, new))  # type: ignore[arg-type]
        return (s.with_formulas(add_left=added),), (GenerationEdge(subject, new),)  # type: ignore[arg-type]
    if rule is RuleId.ZERO:
        (n,) = _take(p, InN)
        _in(n, gamma, "antecedent")
        return (s.with_formulas(add_left=[MemberOf(new, n.nbhd)]),), (
            GenerationEdge(n.nbhd, new),
        )
    if rule is RuleId.W:
        (n,) = _take(p, InN)
        _in(n, gamma, "antecedent")
        return _keep(s, MemberOf(n.world, n.nbhd))
    if rule is RuleId.SINGLE:
        (n,) = _take(p, InN)
        _need(n.nbhd == singleton(n.world), f"{n} is not a singleton neighbourhood of its world")
        _in(n, gamma, "antecedent")
        return _keep(s, MemberOf(n.world, n.nbhd))
    if rule is RuleId.C:
        (n,) = _take(p, InN)
        _in(n, gamma, "antecedent")
        single = singleton(n.world)
        return _keep(s, InN(single, n.world), SubsetOf(single, n.nbhd))
    if rule in (RuleId.REPL1, RuleId.REPL2):
        m, f = _take(p, MemberOf, LabelledFormula)
        _need(m.nbhd.of is not None, f"{m} is not a membership in a singleton")
        _in(m, gamma, "antecedent")
        _in(f, gamma, "antecedent")
        member, owner = m.world, m.nbhd.of
        source, target = (owner, member) if rule is RuleId.REPL1 else (member, owner)
        _need(subject_world(f) == source, f"{f} is not atomic at {source}")
        return _keep(s, _world_atom_retarget(f, source, target))  # type: ignore[arg-type]

    if rule in (RuleId.UNIF1, RuleId.UNIF2):
        n1, m1, n2, m2 = _take(p, InN, MemberOf, InN, MemberOf)
        _need(m1.nbhd == n1.nbhd and m2.nbhd == n2.nbhd, "the memberships do not match the neighbourhoods")
        if rule is RuleId.UNIF1:
            _need(n2.world == m1.world, "the second neighbourhood must belong to the member")
            owner = n1.world
        else:
            _need(n2.world == n1.world, "both neighbourhoods must belong to the same world")
            owner = m1.world
        for f in (n1, m1, n2, m2):
            _in(f, gamma, "antecedent")
        return (s.with_formulas(add_left=[InN(new, owner), MemberOf(m2.world, new)]),), (  # type: ignore[arg-type]
            GenerationEdge(owner, new),
        )
    if rule in (RuleId.ABS1, RuleId.ABS2):
        n1, m1, n2 = _take(p, InN, MemberOf, InN)
        _need(m1.nbhd == n1.nbhd, "the membership does not match the neighbourhood")
        for f in (n1, m1, n2):
            _in(f, gamma, "antecedent")
        if rule is RuleId.ABS1:
            _need(n2.world == n1.world, "both neighbourhoods must belong to the same world")
            return _keep(s, InN(n2.nbhd, m1.world))
        _need(n2.world == m1.world, "the second neighbourhood must belong to the member")
        return _keep(s, InN(n2.nbhd, n1.world))

    msg = f"unsupported rule {rule}"  # pragma: no cover
    raise RuleMismatch(msg)  # pragma: no cover


def instantiate(
    rule: RuleId,
    conclusion: Sequent,
    principal: Iterable[LabelledFormula] = (),
    fresh: Iterable[Label] = (),
    subject: Label | None = None,
) -> RuleInstance:
    """Apply a rule backwards to a conclusion.

    :raises RuleMismatch: If the rule does not apply as described
    """
    principal = tuple(principal)
    fresh = tuple(fresh)
    premises, edges = _expand(rule, conclusion, principal, fresh, subject)
    edges = tuple(replace(edge, rule=rule.value) for edge in edges)
    return RuleInstance(rule, principal, fresh, subject, premises, edges)


# Saturation filtered instance generation.


_LEFT_LISTS: dict[type[LabelledFormula], str] = {
    InN: "in_n",
    MemberOf: "members",
    SubsetOf: "subsets",
    At: "at_left",
    ForcesAll: "all_left",
    ForcesSome: "some_left",
    CondAt: "cond_left",
}
_RIGHT_LISTS: dict[type[LabelledFormula], str] = {
    At: "at_right",
    ForcesAll: "all_right",
    ForcesSome: "some_right",
    CondAt: "cond_right",
}
_GROUPS = ("nbhds_of", "members_of", "supersets_of", "all_left_of", "some_right_of", "atomic_at")


def _left_groups(f: LabelledFormula) -> Iterator[tuple[str, Label]]:
    if isinstance(f, InN):
        yield "nbhds_of", f.world
    elif isinstance(f, MemberOf):
        yield "members_of", f.nbhd
    elif isinstance(f, SubsetOf):
        yield "supersets_of", f.sub
    elif isinstance(f, ForcesAll):
        yield "all_left_of", f.nbhd
    world = subject_world(f)
    if world is not None:
        yield "atomic_at", world


def _right_groups(f: LabelledFormula) -> Iterator[tuple[str, Label]]:
    if isinstance(f, ForcesSome):
        yield "some_right_of", f.nbhd


class SequentIndex:
    """Lookup tables over the current sequent and the history of a branch.

    Every list, grouped ones included, keeps the formulas in branch rank order.
    """

    in_n: list[InN]
    members: list[MemberOf]
    subsets: list[SubsetOf]
    at_left: list[At]
    all_left: list[ForcesAll]
    some_left: list[ForcesSome]
    cond_left: list[CondAt]
    at_right: list[At]
    all_right: list[ForcesAll]
    some_right: list[ForcesSome]
    cond_right: list[CondAt]
    nbhds_of: dict[WorldLabel, list[InN]]
    members_of: dict[NbhdLabel, list[MemberOf]]
    supersets_of: dict[NbhdLabel, list[SubsetOf]]
    all_left_of: dict[NbhdLabel, list[ForcesAll]]
    some_right_of: dict[NbhdLabel, list[ForcesSome]]
    atomic_at: dict[WorldLabel, list[LabelledFormula]]

    def __init__(self: Self, branch: Branch) -> None:
        """Index a branch."""
        self._bind(branch)
        for name in (*_LEFT_LISTS.values(), *_RIGHT_LISTS.values()):
            setattr(self, name, [])
        for name in _GROUPS:
            setattr(self, name, {})
        for f in sorted(self.gamma, key=self._key):
            self._add(f, left=True, ordered=False)
        for f in sorted(self.delta, key=self._key):
            self._add(f, left=False, ordered=False)

    def _bind(self: Self, branch: Branch) -> None:
        self.branch = branch
        self.gamma = branch.current.antecedent
        self.delta = branch.current.succedent
        self.down_gamma = branch.down_gamma
        self.down_delta = branch.down_delta
        self._rank = branch.order.rank

    def _key(self: Self, f: LabelledFormula) -> tuple[int, str]:
        return (self._rank(f), f.sort_key)

    def _slots(self: Self, f: LabelledFormula, *, left: bool) -> Iterator[list[Any]]:
        name = (_LEFT_LISTS if left else _RIGHT_LISTS).get(type(f))
        if name is not None:
            yield getattr(self, name)
        for group, key in (_left_groups(f) if left else _right_groups(f)):
            yield getattr(self, group).setdefault(key, [])

    def _add(self: Self, f: LabelledFormula, *, left: bool, ordered: bool) -> None:
        for bucket in self._slots(f, left=left):
            if ordered:
                bisect.insort(bucket, f, key=self._key)
            else:
                bucket.append(f)

    def _remove(self: Self, f: LabelledFormula, *, left: bool) -> None:
        name = (_LEFT_LISTS if left else _RIGHT_LISTS).get(type(f))
        if name is not None:
            getattr(self, name).remove(f)
        for group, key in (_left_groups(f) if left else _right_groups(f)):
            grouped = getattr(self, group)
            grouped[key].remove(f)
            if not grouped[key]:
                del grouped[key]

    def advance(self: Self, branch: Branch) -> SequentIndex:
        """Index a branch extending the indexed one, reusing the tables.

        :param branch: A result of :func:`~pypcl.sequent.extend_branch` on the
            indexed branch, or on a branch extending it
        :type branch: Branch
        :returns: The index of ``branch``; this index is left unchanged
        :rtype: SequentIndex
        """
        index = SequentIndex.__new__(SequentIndex)
        index._bind(branch)  # noqa: SLF001
        for name in (*_LEFT_LISTS.values(), *_RIGHT_LISTS.values()):
            setattr(index, name, list(getattr(self, name)))
        for name in _GROUPS:
            setattr(index, name, {k: list(v) for k, v in getattr(self, name).items()})
        for f in self.gamma - index.gamma:
            index._remove(f, left=True)  # noqa: SLF001
        for f in self.delta - index.delta:
            index._remove(f, left=False)  # noqa: SLF001
        for f in index.gamma - self.gamma:
            index._add(f, left=True, ordered=True)  # noqa: SLF001
        for f in index.delta - self.delta:
            index._add(f, left=False, ordered=True)  # noqa: SLF001
        return index

    @cached_property
    def current_nbhds(self: Self) -> list[NbhdLabel]:
        """Get the neighbourhood labels of the current sequent, by creation index."""
        return sorted(
            (label for label in self.branch.current.labels if isinstance(label, NbhdLabel)),
            key=lambda label: label.sort_key,
        )

    @cached_property
    def history_worlds(self: Self) -> list[WorldLabel]:
        """Get the world labels of the whole branch, by creation index."""
        return sorted(
            (label for label in self.branch.labels if isinstance(label, WorldLabel)),
            key=lambda label: label.sort_key,
        )

    def generated_by(self: Self, label: Label, rules: Collection[RuleId]) -> bool:
        """Check whether one of ``rules`` introduced ``label`` on the branch."""
        return self.branch.origins.get(label) in rules

    def has_member_satisfying(
        self: Self, nbhd: NbhdLabel, formula: Formula, side: frozenset[LabelledFormula]
    ) -> bool:
        """Check whether some ``y in nbhd`` has ``y : formula`` in ``side``."""
        return any(At(m.world, formula) in side for m in self.members_of.get(nbhd, ()))


def _propositional(index: SequentIndex, rule: RuleId) -> Iterator[tuple[LabelledFormula, ...]]:
    dg, dd = index.down_gamma, index.down_delta
    if rule is RuleId.L_AND:
        for f in index.at_left:
            g = f.formula
            if isinstance(g, And) and not (At(f.world, g.left) in dg and At(f.world, g.right) in dg):
                yield (f,)
    elif rule is RuleId.R_OR:
        for f in index.at_right:
            g = f.formula
            if isinstance(g, Or) and not (At(f.world, g.left) in dd and At(f.world, g.right) in dd):
                yield (f,)
    elif rule is RuleId.R_IMP:
        for f in index.at_right:
            g = f.formula
            if isinstance(g, Implies) and not (At(f.world, g.left) in dg and At(f.world, g.right) in dd):
                yield (f,)
    elif rule is RuleId.L_OR:
        for f in index.at_left:
            g = f.formula
            if isinstance(g, Or) and not (At(f.world, g.left) in dg or At(f.world, g.right) in dg):
                yield (f,)
    elif rule is RuleId.R_AND:
        for f in index.at_right:
            g = f.formula
            if isinstance(g, And) and not (At(f.world, g.left) in dd or At(f.world, g.right) in dd):
                yield (f,)
    elif rule is RuleId.L_IMP:
        for f in index.at_left:
            g = f.formula
            if isinstance(g, Implies) and not (At(f.world, g.right) in dg or At(f.world, g.left) in dd):
                yield (f,)


def _inclusion(index: SequentIndex, rule: RuleId) -> Iterator[tuple[LabelledFormula, ...]]:
    gamma = index.gamma
    if rule is RuleId.TR:
        for first in index.subsets:
            for second in index.supersets_of.get(first.sup, ()):
                if SubsetOf(first.sub, second.sup) not in gamma:
                    yield (first, second)
    elif rule is RuleId.L_SUBSET:
        for m in index.members:
            for sub in index.supersets_of.get(m.nbhd, ()):
                if MemberOf(m.world, sub.sup) not in gamma:
                    yield (m, sub)
    elif rule is RuleId.MON_FORALL:
        for sub in index.subsets:
            for f in index.all_left_of.get(sub.sup, ()):
                if ForcesAll(sub.sub, f.formula) not in gamma:
                    yield (sub, f)


def _forcing(index: SequentIndex, rule: RuleId) -> Iterator[tuple[LabelledFormula, ...]]:
    if rule is RuleId.L_FORALL:
        for f in index.all_left:
            for m in index.members_of.get(f.nbhd, ()):
                if At(m.world, f.formula) not in index.down_gamma:
                    yield (m, f)
    elif rule is RuleId.R_EXISTS:
        for f in index.some_right:
            for m in index.members_of.get(f.nbhd, ()):
                if At(m.world, f.formula) not in index.down_delta:
                    yield (m, f)
    elif rule is RuleId.L_EXISTS:
        for f in index.some_left:
            if not index.has_member_satisfying(f.nbhd, f.formula, index.down_gamma):
                yield (f,)
    elif rule is RuleId.R_FORALL:
        for f in index.all_right:
            if not index.has_member_satisfying(f.nbhd, f.formula, index.down_delta):
                yield (f,)


def _conditional(index: SequentIndex, rule: RuleId) -> Iterator[tuple[LabelledFormula, ...]]:  # noqa: C901
    gamma, dg, dd = index.gamma, index.down_gamma, index.down_delta
    if rule is RuleId.R_COND:
        for f in index.at_right:
            g = f.formula
            if not isinstance(g, Cond):
                continue
            if not any(
                ForcesSome(n.nbhd, g.left) in dg
                and CondAt(f.world, n.nbhd, g.left, g.right) in index.delta
                for n in index.nbhds_of.get(f.world, ())
            ):
                yield (f,)
    elif rule in (RuleId.L_COND_STAR, RuleId.L_COND):
        for f in index.at_left:
            g = f.formula
            if not isinstance(g, Cond):
                continue
            for n in index.nbhds_of.get(f.world, ()):
                some = ForcesSome(n.nbhd, g.left)
                witness = CondAt(f.world, n.nbhd, g.left, g.right) in dg
                if rule is RuleId.L_COND_STAR:
                    witness = witness and some in dg
                if not (some in dd or witness):
                    yield (n, f)
    elif rule is RuleId.R_BAR:
        for f in index.cond_right:
            for n in index.nbhds_of.get(f.world, ()):
                sub = SubsetOf(n.nbhd, f.nbhd)
                if sub not in gamma:
                    continue
                if not (
                    ForcesSome(n.nbhd, f.antecedent) in index.delta
                    or ForcesAll(n.nbhd, f.local_implication) in dd
                ):
                    yield (n, sub, f)
    elif rule is RuleId.L_BAR:
        for f in index.cond_left:
            if not any(
                SubsetOf(n.nbhd, f.nbhd) in gamma
                and ForcesSome(n.nbhd, f.antecedent) in dg
                and ForcesAll(n.nbhd, f.local_implication) in gamma
                for n in index.nbhds_of.get(f.world, ())
            ):
                yield (f,)


# Neighbourhoods these rules introduce are never premises of them again.
_UNIFORMITY = (RuleId.UNIF1, RuleId.UNIF2)


def _frame(index: SequentIndex, rule: RuleId) -> Iterator[tuple[LabelledFormula, ...]]:  # noqa: C901, PLR0912
    gamma = index.gamma
    if rule is RuleId.ZERO:
        for n in index.in_n:
            if n.nbhd in index.members_of:
                continue
            if n.nbhd in index.some_right_of or n.nbhd in index.all_left_of:
                yield (n,)
    elif rule is RuleId.W:
        for n in index.in_n:
            if MemberOf(n.world, n.nbhd) not in gamma:
                yield (n,)
    elif rule is RuleId.SINGLE:
        for n in index.in_n:
            if n.nbhd == singleton(n.world) and MemberOf(n.world, n.nbhd) not in gamma:
                yield (n,)
    elif rule is RuleId.C:
        for n in index.in_n:
            single = singleton(n.world)
            if InN(single, n.world) not in gamma or SubsetOf(single, n.nbhd) not in gamma:
                yield (n,)
    elif rule in (RuleId.REPL1, RuleId.REPL2):
        for m in index.members:
            owner = m.nbhd.of
            if owner is None or owner == m.world:
                continue
            source, target = (owner, m.world) if rule is RuleId.REPL1 else (m.world, owner)
            for f in index.atomic_at.get(source, ()):
                if _world_atom_retarget(f, source, target) not in gamma:
                    yield (m, f)
    elif rule in _UNIFORMITY:
        for n1 in index.in_n:
            if index.generated_by(n1.nbhd, _UNIFORMITY):
                continue
            for m1 in index.members_of.get(n1.nbhd, ()):
                second = n1.world if rule is RuleId.UNIF2 else m1.world
                owner = m1.world if rule is RuleId.UNIF2 else n1.world
                for n2 in index.nbhds_of.get(second, ()):
                    if index.generated_by(n2.nbhd, _UNIFORMITY):
                        continue
                    for m2 in index.members_of.get(n2.nbhd, ()):
                        if not any(
                            MemberOf(m2.world, c.nbhd) in gamma
                            for c in index.nbhds_of.get(owner, ())
                        ):
                            yield (n1, m1, n2, m2)
    elif rule in (RuleId.ABS1, RuleId.ABS2):
        for n1 in index.in_n:
            for m1 in index.members_of.get(n1.nbhd, ()):
                if rule is RuleId.ABS1:
                    for n2 in index.nbhds_of.get(n1.world, ()):
                        if InN(n2.nbhd, m1.world) not in gamma:
                            yield (n1, m1, n2)
                else:
                    for n2 in index.nbhds_of.get(m1.world, ()):
                        if InN(n2.nbhd, n1.world) not in gamma:
                            yield (n1, m1, n2)


def _subjects(index: SequentIndex, rule: RuleId) -> Iterator[Label]:
    if rule is RuleId.REF:
        for a in index.current_nbhds:
            if SubsetOf(a, a) not in index.gamma:
                yield a
    elif rule is RuleId.N:
        for x in index.history_worlds:
            if not index.nbhds_of.get(x):
                yield x
    elif rule is RuleId.T:
        for x in index.history_worlds:
            if not any(MemberOf(x, n.nbhd) in index.gamma for n in index.nbhds_of.get(x, ())):
                yield x


_Generator = Callable[[SequentIndex, RuleId], "Iterator[tuple[LabelledFormula, ...]]"]

_GENERATORS: dict[RuleId, _Generator] = {
    **dict.fromkeys(
        (RuleId.L_AND, RuleId.R_OR, RuleId.R_IMP, RuleId.L_OR, RuleId.R_AND, RuleId.L_IMP),
        _propositional,
    ),
    **dict.fromkeys((RuleId.TR, RuleId.L_SUBSET, RuleId.MON_FORALL), _inclusion),
    **dict.fromkeys(
        (RuleId.L_FORALL, RuleId.R_EXISTS, RuleId.L_EXISTS, RuleId.R_FORALL), _forcing
    ),
    **dict.fromkeys(
        (RuleId.R_COND, RuleId.L_COND, RuleId.L_COND_STAR, RuleId.R_BAR, RuleId.L_BAR),
        _conditional,
    ),
    **dict.fromkeys(
        (
            RuleId.ZERO,
            RuleId.W,
            RuleId.SINGLE,
            RuleId.C,
            RuleId.REPL1,
            RuleId.REPL2,
            RuleId.UNIF1,
            RuleId.UNIF2,
            RuleId.ABS1,
            RuleId.ABS2,
        ),
        _frame,
    ),
}

LINEAR_STATIC: tuple[RuleId, ...] = (
    RuleId.REF,
    RuleId.L_AND,
    RuleId.R_OR,
    RuleId.R_IMP,
    RuleId.TR,
    RuleId.L_SUBSET,
    RuleId.MON_FORALL,
    RuleId.L_FORALL,
    RuleId.R_EXISTS,
    RuleId.W,
    RuleId.SINGLE,
    RuleId.C,
    RuleId.REPL1,
    RuleId.REPL2,
    RuleId.ABS1,
    RuleId.ABS2,
)
"""Static rules with a single premise, fired before anything else."""

PRIORITY: tuple[RuleId, ...] = (
    *LINEAR_STATIC,
    RuleId.L_OR,
    RuleId.R_AND,
    RuleId.L_IMP,
    RuleId.R_BAR,
    RuleId.R_COND,
    RuleId.L_COND_STAR,
    RuleId.L_COND,
    RuleId.L_EXISTS,
    RuleId.R_FORALL,
    RuleId.L_BAR,
    RuleId.T,
    RuleId.N,
    RuleId.ZERO,
    RuleId.UNIF1,
    RuleId.UNIF2,
)
"""The order in which the search tries the rules."""


def plans(
    index: SequentIndex, rules: Collection[RuleId], order: Iterable[RuleId] = PRIORITY
) -> Iterator[RuleInstance]:
    """Generate the instances whose saturation condition is not met, unexpanded.

    The instances carry no premises; :func:`instantiate` computes them.

    :param index: The indexed branch
    :type index: SequentIndex
    :param rules: The rules available in the logic
    :type rules: Collection[RuleId]
    :param order: The rules to try, in order
    :type order: Iterable[RuleId]
    """
    branch = index.branch
    for rule in order:
        if rule not in rules:
            continue
        fresh: tuple[Label, ...] = ()
        if rule.fresh == "world":
            fresh = (branch.fresh_world(),)
        elif rule.fresh == "nbhd":
            fresh = (branch.fresh_nbhd(),)
        if rule in (RuleId.REF, RuleId.N, RuleId.T):
            for subject in _subjects(index, rule):
                yield RuleInstance(rule, (), fresh, subject)
            continue
        for principal in _GENERATORS[rule](index, rule):
            yield RuleInstance(rule, principal, fresh)


def candidates(
    index: SequentIndex, rules: Collection[RuleId], order: Iterable[RuleId] = PRIORITY
) -> Iterator[RuleInstance]:
    """Generate the instances whose saturation condition is not met, in strategy order.

    :param index: The indexed branch
    :type index: SequentIndex
    :param rules: The rules available in the logic
    :type rules: Collection[RuleId]
    :param order: The rules to try, in order
    :type order: Iterable[RuleId]
    """
    conclusion = index.branch.current
    for plan in plans(index, rules, order):
        yield instantiate(plan.rule, conclusion, plan.principal, plan.fresh, plan.subject)


def closing_instance(s: Sequent) -> RuleInstance | None:
    """Get an init or BotL instance closing the sequent, if there is one."""
    closers = [
        f
        for f in s.antecedent
        if isinstance(f, At)
        and (isinstance(f.formula, Bottom) or (isinstance(f.formula, Atom) and f in s.succedent))
    ]
    if not closers:
        return None
    f = min(closers, key=lambda f: f.sort_key)
    rule = RuleId.BOT_L if isinstance(f, At) and isinstance(f.formula, Bottom) else RuleId.INIT
    return RuleInstance(rule, (f,))
