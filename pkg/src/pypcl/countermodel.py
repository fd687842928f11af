# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Countermodels read off saturated branches."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING

from .calculus import Flag, Logic
from .exceptions import NotSaturatedError, RealizationError, UnsupportedLogicError
from .formula import Atom
from .search import is_saturated
from .semantics import NeighbourhoodModel, satisfies
from .sequent import (
    At,
    InN,
    MemberOf,
    NbhdLabel,
    SubsetOf,
    WorldLabel,
    labels_of,
)

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Iterable, Mapping

    from .semantics import Neighbourhood, World
    from .sequent import Branch, Label, LabelledFormula

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Realization:
    """Maps from world labels to worlds and from neighbourhood labels to world sets.

    A singleton label ``{x}`` always denotes the set holding the world of ``x``.
    """

    world_map: Mapping[WorldLabel, World]
    nbhd_map: Mapping[NbhdLabel, Neighbourhood]

    def __post_init__(self: Self) -> None:
        """Freeze the maps."""
        object.__setattr__(self, "world_map", MappingProxyType(dict(self.world_map)))
        object.__setattr__(
            self,
            "nbhd_map",
            MappingProxyType({a: frozenset(alpha) for a, alpha in self.nbhd_map.items()}),
        )

    def world(self: Self, x: WorldLabel) -> World:
        """Get the world of a world label.

        :raises RealizationError: If the label is not mapped
        """
        try:
            return self.world_map[x]
        except KeyError:
            msg = f"Realization is not defined on {x}"
            raise RealizationError(msg) from None

    def nbhd(self: Self, a: NbhdLabel) -> Neighbourhood:
        """Get the world set of a neighbourhood label.

        :raises RealizationError: If the label is not mapped
        """
        if a.of is not None:
            return frozenset({self.world(a.of)})
        try:
            return self.nbhd_map[a]
        except KeyError:
            msg = f"Realization is not defined on {a}"
            raise RealizationError(msg) from None

    def missing(self: Self, labels: Iterable[Label]) -> frozenset[Label]:
        """Get the labels the realization is not defined on."""
        missing: set[Label] = set()
        for label in labels:
            if isinstance(label, WorldLabel):
                if label not in self.world_map:
                    missing.add(label)
            elif label.of is not None:
                if label.of not in self.world_map:
                    missing.add(label)
            elif label not in self.nbhd_map:
                missing.add(label)
        return frozenset(missing)


class _Classes:
    """Union-find over world labels, smallest index as representative."""

    def __init__(self: Self, worlds: Iterable[WorldLabel]) -> None:
        self.parent = {x: x for x in worlds}

    def find(self: Self, x: WorldLabel) -> WorldLabel:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self: Self, x: WorldLabel, y: WorldLabel) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            low, high = sorted((rx, ry), key=lambda label: label.index)
            self.parent[high] = low


def extract_model(leaf: Branch, logic: Logic) -> tuple[NeighbourhoodModel, Realization]:
    """Build the countermodel of a saturated branch.

    Worlds are the world labels of the branch (their classes under ``y in {x}``
    for centering logics), ``N(x)`` collects the member sets of the
    neighbourhood labels of ``x`` and an atom holds where the branch assumes it.

    :param leaf: The saturated branch
    :type leaf: Branch
    :param logic: The logic the branch was saturated for
    :type logic: Logic
    :returns: The model and the realization interpreting the branch in it
    :rtype: tuple[NeighbourhoodModel, Realization]
    :raises UnsupportedLogicError: For absoluteness logics
    :raises NotSaturatedError: If the branch is closed or not saturated
    """
    if logic.absolute:
        msg = f"Countermodel extraction is not available for {logic.name}"
        raise UnsupportedLogicError(msg)
    report = is_saturated(leaf, logic)
    if report.closed:
        raise NotSaturatedError(("the branch is closed",))
    if not report.saturated:
        raise NotSaturatedError(tuple(rule.value for rule in report.unmet_rules))

    gamma = leaf.down_gamma
    labels = labels_of(gamma | leaf.down_delta) | {leaf.root}
    worlds = sorted(
        (label for label in labels if isinstance(label, WorldLabel)),
        key=lambda label: label.index,
    )
    classes = _Classes(worlds)
    if logic.has(Flag.C):
        for f in gamma:
            if isinstance(f, MemberOf) and f.nbhd.of is not None:
                classes.union(f.world, f.nbhd.of)
    world_map = {x: str(classes.find(x)) for x in worlds}
    model_worlds = list(dict.fromkeys(world_map[x] for x in worlds))
    if len(model_worlds) < len(worlds):
        _LOGGER.debug("%d world labels collapse into %d classes", len(worlds), len(model_worlds))

    members: dict[NbhdLabel, set[World]] = {}
    owners: dict[NbhdLabel, list[WorldLabel]] = {}
    for f in sorted(gamma, key=lambda f: f.sort_key):
        if isinstance(f, MemberOf):
            members.setdefault(f.nbhd, set()).add(world_map[f.world])
        elif isinstance(f, InN):
            owners.setdefault(f.nbhd, []).append(f.world)
            members.setdefault(f.nbhd, set())

    plain = sorted(
        (label for label in labels if isinstance(label, NbhdLabel) and label.of is None),
        key=lambda label: label.index,
    )
    nbhd_map: dict[NbhdLabel, Neighbourhood] = {
        a: frozenset(members[a]) for a in plain if members.get(a)
    }
    extra: dict[World, set[Neighbourhood]] = {}
    for a in plain:
        if a in nbhd_map:
            continue
        if logic.uniform:
            nbhd_map[a] = _borrow(a, owners, nbhd_map, world_map, model_worlds[0])
            _LOGGER.debug("memberless %s realised by %s", a, sorted(nbhd_map[a]))
            continue
        fresh = f"u{len(extra)}"
        model_worlds.append(fresh)
        extra[fresh] = {frozenset({fresh})}
        nbhd_map[a] = frozenset({fresh})
        _LOGGER.debug("memberless %s realised by the fresh world %s", a, fresh)

    neighbourhoods: dict[World, set[Neighbourhood]] = {w: set() for w in model_worlds}
    realization = Realization(world_map, nbhd_map)
    for f in gamma:
        if isinstance(f, InN):
            neighbourhoods[world_map[f.world]].add(realization.nbhd(f.nbhd))
    for w, family in extra.items():
        neighbourhoods.setdefault(w, set()).update(family)

    valuation: dict[str, set[World]] = {}
    for f in gamma:
        if isinstance(f, At) and isinstance(f.formula, Atom):
            valuation.setdefault(f.formula.name, set()).add(world_map[f.world])

    model = NeighbourhoodModel(
        worlds=tuple(model_worlds),
        neighbourhoods={w: frozenset(family) for w, family in neighbourhoods.items()},
        valuation={name: frozenset(ext) for name, ext in valuation.items()},
        root=world_map[leaf.root],
    )
    return model, realization


def _borrow(
    a: NbhdLabel,
    owners: Mapping[NbhdLabel, list[WorldLabel]],
    nbhd_map: Mapping[NbhdLabel, Neighbourhood],
    world_map: Mapping[WorldLabel, World],
    default: World,
) -> Neighbourhood:
    """Pick a denotation for a memberless label of a uniformity logic.

    A fresh world would change the union of the owner's neighbourhoods, so
    the smallest nonempty neighbourhood of the same world is reused, or the
    owner's own singleton when there is none.
    """
    homes = {world_map[x] for x in owners.get(a, ())}
    if not homes:
        return frozenset({default})
    reused = [
        alpha
        for b, alpha in nbhd_map.items()
        if any(world_map[x] in homes for x in owners.get(b, ()))
    ]
    if reused:
        return min(reused, key=lambda alpha: (len(alpha), sorted(alpha)))
    return frozenset({min(homes)})


@dataclass(frozen=True)
class InvariantViolation:
    """A claim of the countermodel construction failing for one formula."""

    claim: str
    formula: LabelledFormula
    detail: str = ""

    def __str__(self: Self) -> str:
        """To string."""
        detail = f": {self.detail}" if self.detail else ""
        return f"{self.claim} claim fails for {self.formula}{detail}"


@dataclass(frozen=True)
class InvariantReport:
    """The outcome of :func:`model_invariant_report`; true when every claim holds."""

    violations: tuple[InvariantViolation, ...] = ()

    @property
    def first(self: Self) -> InvariantViolation | None:
        """Get the first violated claim, if any."""
        return self.violations[0] if self.violations else None

    def __bool__(self: Self) -> bool:
        """Truth value of the report."""
        return not self.violations


def model_invariant_report(
    m: NeighbourhoodModel, leaf: Branch, realization: Realization
) -> InvariantReport:
    """Check that a model built from a branch realises the whole branch.

    Claims are checked in order: inclusions ``a sub b`` denote set inclusions,
    every formula of the cumulative antecedent is satisfied, every formula of
    the cumulative succedent is falsified, and world labels sharing a world
    never disagree on an atom.

    :raises RealizationError: If the realization misses a label of the branch
    """
    violations: list[InvariantViolation] = []
    gamma = sorted(leaf.down_gamma, key=lambda f: f.sort_key)
    delta = sorted(leaf.down_delta, key=lambda f: f.sort_key)
    missing = realization.missing(labels_of(leaf.down_gamma | leaf.down_delta))
    if missing:
        msg = f"Realization is not defined on {', '.join(sorted(map(str, missing)))}"
        raise RealizationError(msg)

    for f in gamma:
        if isinstance(f, SubsetOf) and not realization.nbhd(f.sub) <= realization.nbhd(f.sup):
            violations.append(
                InvariantViolation(
                    "inclusion",
                    f,
                    f"{sorted(realization.nbhd(f.sub))} is not contained in {sorted(realization.nbhd(f.sup))}",
                )
            )
    violations.extend(
        InvariantViolation("antecedent", f, "not satisfied")
        for f in gamma
        if not satisfies(m, realization, f)
    )
    violations.extend(
        InvariantViolation("succedent", f, "satisfied")
        for f in delta
        if satisfies(m, realization, f)
    )

    assumed: dict[tuple[World, str], WorldLabel] = {}
    for f in gamma:
        if isinstance(f, At) and isinstance(f.formula, Atom):
            assumed.setdefault((realization.world(f.world), f.formula.name), f.world)
    for f in delta:
        if isinstance(f, At) and isinstance(f.formula, Atom):
            other = assumed.get((realization.world(f.world), f.formula.name))
            if other is not None and other != f.world:
                violations.append(
                    InvariantViolation(
                        "representative", f, f"{other} and {f.world} share a world"
                    )
                )
    return InvariantReport(tuple(violations))
