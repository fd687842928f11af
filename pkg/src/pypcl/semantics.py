# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Finite neighbourhood models and the forcing relation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING, Any

from ._internals.smt import find_countermodel
from .calculus import Flag, Logic
from .exceptions import ModelError, RealizationError
from .formula import And, Atom, Bottom, Cond, Formula, Implies, Or, subformulas
from .sequent import (
    At,
    CondAt,
    ForcesAll,
    ForcesSome,
    InN,
    MemberOf,
    SubsetOf,
)

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Iterable, Mapping

    from .countermodel import Realization
    from .sequent import LabelledFormula, Sequent

_LOGGER = logging.getLogger(__name__)

World = str
Neighbourhood = frozenset[World]


@dataclass(frozen=True, eq=False)
class NeighbourhoodModel:
    """A finite neighbourhood model ``<W, N, [[.]]>``.

    Worlds are identified by strings. ``neighbourhoods`` maps a world to the
    family of its neighbourhoods; worlds without an entry have none.
    ``valuation`` maps an atom name to the worlds where it holds; absent
    atoms hold nowhere.
    """

    worlds: tuple[World, ...]
    neighbourhoods: Mapping[World, frozenset[Neighbourhood]]
    valuation: Mapping[str, frozenset[World]]
    root: World | None = None
    _cache: dict[Formula, frozenset[World]] = field(
        default_factory=dict, init=False, repr=False
    )

    def __post_init__(self: Self) -> None:
        """Normalise the fields and validate the model invariants.

        :raises ModelError: If a neighbourhood is empty or mentions an unknown world
        """
        worlds = tuple(dict.fromkeys(self.worlds))
        if not worlds:
            msg = "A model needs at least one world"
            raise ModelError(msg)
        known = frozenset(worlds)
        neighbourhoods: dict[World, frozenset[Neighbourhood]] = {}
        for world, family in self.neighbourhoods.items():
            if world not in known:
                msg = f"Neighbourhoods given for unknown world {world!r}"
                raise ModelError(msg)
            normalised = frozenset(frozenset(alpha) for alpha in family)
            for alpha in normalised:
                if not alpha:
                    msg = f"Empty neighbourhood of world {world!r}"
                    raise ModelError(msg)
                if not alpha <= known:
                    msg = f"Neighbourhood of {world!r} mentions unknown worlds {sorted(alpha - known)}"
                    raise ModelError(msg)
            neighbourhoods[world] = normalised
        valuation: dict[str, frozenset[World]] = {}
        for name, extension in self.valuation.items():
            extension = frozenset(extension)  # noqa: PLW2901
            if not extension <= known:
                msg = f"Valuation of {name!r} mentions unknown worlds {sorted(extension - known)}"
                raise ModelError(msg)
            valuation[name] = extension
        if self.root is not None and self.root not in known:
            msg = f"Root {self.root!r} is not a world of the model"
            raise ModelError(msg)
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "neighbourhoods", MappingProxyType(neighbourhoods))
        object.__setattr__(self, "valuation", MappingProxyType(valuation))

    def __repr__(self: Self) -> str:
        """Get the string representation of the model."""
        return f"<{self.__class__.__name__} = {len(self.worlds)} worlds, root {self.root}>"

    def nbhds(self: Self, world: World) -> frozenset[Neighbourhood]:
        """Get ``N(world)``."""
        return self.neighbourhoods.get(world, frozenset())

    def truth_set(self: Self, f: Formula) -> frozenset[World]:
        """Get the worlds forcing ``f``."""
        cached = self._cache.get(f)
        if cached is not None:
            return cached
        universe = frozenset(self.worlds)
        for g in subformulas(f):
            if g in self._cache:
                continue
            if isinstance(g, Atom):
                value = self.valuation.get(g.name, frozenset())
            elif isinstance(g, Bottom):
                value = frozenset()
            elif isinstance(g, And):
                value = self._cache[g.left] & self._cache[g.right]
            elif isinstance(g, Or):
                value = self._cache[g.left] | self._cache[g.right]
            elif isinstance(g, Implies):
                value = (universe - self._cache[g.left]) | self._cache[g.right]
            elif isinstance(g, Cond):
                antecedent = self._cache[g.left]
                implication = (universe - antecedent) | self._cache[g.right]
                value = frozenset(
                    x for x in self.worlds if self._cond_holds(x, antecedent, implication)
                )
            else:  # pragma: no cover
                msg = f"Unsupported formula {g!r}"
                raise TypeError(msg)
            self._cache[g] = value
        return self._cache[f]

    def _cond_holds(
        self: Self, x: World, antecedent: frozenset[World], implication: frozenset[World]
    ) -> bool:
        family = self.nbhds(x)
        return all(
            any(
                beta <= alpha and beta & antecedent and beta <= implication
                for beta in family
            )
            for alpha in family
            if alpha & antecedent
        )

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the model as a JSON object."""
        return {
            "worlds": list(self.worlds),
            "neighbourhoods": {
                world: sorted(sorted(alpha) for alpha in self.nbhds(world))
                for world in self.worlds
                if self.nbhds(world)
            },
            "valuation": {
                name: sorted(extension)
                for name, extension in sorted(self.valuation.items())
            },
            "root": self.root,
        }

    @classmethod
    def from_json(cls: type[Self], obj: Any) -> Self:  # noqa: ANN401
        """Decode a model from its JSON object.

        :raises ModelError: If the object is malformed or violates the model invariants
        """
        try:
            worlds = obj["worlds"]
            neighbourhoods = obj.get("neighbourhoods", {})
            valuation = obj.get("valuation", {})
            root = obj.get("root")
            if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
                msg = "'worlds' must be a list of strings"
                raise ModelError(msg)
            return cls(
                worlds=tuple(worlds),
                neighbourhoods={
                    str(world): frozenset(frozenset(map(str, alpha)) for alpha in family)
                    for world, family in neighbourhoods.items()
                },
                valuation={
                    str(name): frozenset(map(str, extension))
                    for name, extension in valuation.items()
                },
                root=None if root is None else str(root),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            msg = f"Malformed model: {exc}"
            raise ModelError(msg) from None


def forces_some(m: NeighbourhoodModel, alpha: Iterable[World], f: Formula) -> bool:
    """Check ``alpha |=E f``: some member of ``alpha`` forces ``f``."""
    return not m.truth_set(f).isdisjoint(alpha)


def forces_all(m: NeighbourhoodModel, alpha: Iterable[World], f: Formula) -> bool:
    """Check ``alpha |=A f``: every member of ``alpha`` forces ``f``."""
    return m.truth_set(f).issuperset(alpha)


def forces(m: NeighbourhoodModel, w: World, f: Formula) -> bool:
    """Check whether world ``w`` of model ``m`` forces ``f``.

    :param m: The model
    :type m: NeighbourhoodModel
    :param w: The world
    :type w: str
    :param f: The formula
    :type f: Formula
    :returns: True if ``w`` forces ``f``
    :rtype: bool
    :raises ModelError: If ``w`` is not a world of ``m``
    """
    if w not in m.worlds:
        msg = f"Unknown world {w!r}"
        raise ModelError(msg)
    return w in m.truth_set(f)


@dataclass(frozen=True)
class FrameViolation:
    """A frame condition failing at a world."""

    condition: str
    world: World
    witness: tuple[str, ...] = ()

    def __str__(self: Self) -> str:
        """To string."""
        detail = f" ({', '.join(self.witness)})" if self.witness else ""
        return f"{self.condition} fails at {self.world}{detail}"


@dataclass(frozen=True)
class FrameReport:
    """The outcome of :func:`check_frame`; true when nothing is violated."""

    logic: Logic
    violations: tuple[FrameViolation, ...] = ()

    @property
    def conditions(self: Self) -> tuple[str, ...]:
        """Get the violated condition names, without repetitions."""
        return tuple(dict.fromkeys(v.condition for v in self.violations))

    def __bool__(self: Self) -> bool:
        """Truth value of the report."""
        return not self.violations


def _show(alpha: Neighbourhood) -> str:
    return "{" + ", ".join(sorted(alpha)) + "}"


def _reachable(m: NeighbourhoodModel, x: World) -> Iterable[tuple[Neighbourhood, World]]:
    for alpha in sorted(m.nbhds(x), key=sorted):
        for y in sorted(alpha):
            yield alpha, y


def check_frame(m: NeighbourhoodModel, logic: Logic) -> FrameReport:  # noqa: C901
    """Check a model against the frame conditions of a logic.

    Uniformity and absoluteness are checked in their local form: for every
    ``y`` in some neighbourhood of ``x``.
    """
    violations: list[FrameViolation] = []
    for x in m.worlds:
        family = m.nbhds(x)
        if logic.has(Flag.N) and not family:
            violations.append(FrameViolation("Normality", x))
        if logic.has(Flag.T) and not any(x in alpha for alpha in family):
            violations.append(FrameViolation("Total reflexivity", x))
        if logic.has(Flag.W):
            violations.extend(
                FrameViolation("Weak centering", x, (_show(alpha),))
                for alpha in sorted(family, key=sorted)
                if x not in alpha
            )
        if logic.has(Flag.C) and frozenset({x}) not in family:
            violations.append(FrameViolation("Centering", x))
        if logic.has(Flag.U) and not logic.absolute:
            union = frozenset().union(*family)
            for alpha, y in _reachable(m, x):
                if frozenset().union(*m.nbhds(y)) != union:
                    violations.append(FrameViolation("Uniformity", x, (_show(alpha), y)))
        if logic.absolute:
            for alpha, y in _reachable(m, x):
                if m.nbhds(y) != family:
                    violations.append(FrameViolation("Absoluteness", x, (_show(alpha), y)))
    return FrameReport(logic, tuple(violations))


def satisfies(m: NeighbourhoodModel, realization: Realization, f: LabelledFormula) -> bool:  # noqa: PLR0911
    """Check ``m |= f`` for a labelled formula under a realization."""
    if isinstance(f, InN):
        return realization.nbhd(f.nbhd) in m.nbhds(realization.world(f.world))
    if isinstance(f, MemberOf):
        return realization.world(f.world) in realization.nbhd(f.nbhd)
    if isinstance(f, SubsetOf):
        return realization.nbhd(f.sub) <= realization.nbhd(f.sup)
    if isinstance(f, At):
        return forces(m, realization.world(f.world), f.formula)
    if isinstance(f, ForcesAll):
        return forces_all(m, realization.nbhd(f.nbhd), f.formula)
    if isinstance(f, ForcesSome):
        return forces_some(m, realization.nbhd(f.nbhd), f.formula)
    if isinstance(f, CondAt):
        alpha = realization.nbhd(f.nbhd)
        return any(
            beta <= alpha
            and forces_some(m, beta, f.antecedent)
            and forces_all(m, beta, f.local_implication)
            for beta in m.nbhds(realization.world(f.world))
        )
    msg = f"Unsupported labelled formula {f!r}"
    raise TypeError(msg)


def satisfies_sequent(m: NeighbourhoodModel, realization: Realization, s: Sequent) -> bool:
    """Check ``m |= s`` under a realization.

    :raises RealizationError: If the realization misses a label of ``s``
    """
    missing = realization.missing(s.labels)
    if missing:
        msg = f"Realization is not defined on {', '.join(sorted(map(str, missing)))}"
        raise RealizationError(msg)
    return any(not satisfies(m, realization, f) for f in s.antecedent) or any(
        satisfies(m, realization, f) for f in s.succedent
    )


def enumerate_countermodel(
    f: Formula, logic: Logic, max_worlds: int = 3
) -> NeighbourhoodModel | None:
    """Search models of ``logic`` with up to ``max_worlds`` worlds for one falsifying ``f``.

    Sizes are tried in increasing order, so the model returned is as small as
    possible. Its root is the world where ``f`` fails. The search is complete
    for every size but its cost grows doubly exponentially with
    ``max_worlds``; 4 is a practical ceiling.

    :param f: The formula
    :type f: Formula
    :param logic: The logic whose frame conditions the model must meet
    :type logic: Logic
    :param max_worlds: The largest number of worlds to try
    :type max_worlds: int
    :returns: A countermodel, or ``None`` if there is none up to the bound
    :rtype: NeighbourhoodModel | None
    :raises ValueError: If ``max_worlds`` is not positive
    """
    if max_worlds < 1:
        msg = "max_worlds must be >= 1"
        raise ValueError(msg)
    for size in range(1, max_worlds + 1):
        _LOGGER.info("searching countermodels of %s in %s with %d worlds", f, logic, size)
        found = find_countermodel(f, logic, size)
        if found is None:
            continue
        model = NeighbourhoodModel(**found)
        if forces(model, model.root, f) or not check_frame(model, logic):  # type: ignore[arg-type]
            msg = f"Solver model does not falsify {f} in {logic}"
            raise ModelError(msg)
        return model
    return None
