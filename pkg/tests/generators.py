# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Seeded generators of random formulas and models."""

from __future__ import annotations

import random
from itertools import combinations

from pypcl.calculus import Flag, Logic
from pypcl.formula import BOTTOM, And, Atom, Cond, Formula, Implies, Or, formula_size
from pypcl.semantics import NeighbourhoodModel

ATOMS = ("p", "q", "r")


def random_formula(rng: random.Random, depth: int, *, atoms: tuple[str, ...] = ATOMS) -> Formula:
    """Draw a formula of at most the given depth."""
    if depth <= 0 or rng.random() < 0.2:  # noqa: PLR2004
        if rng.random() < 0.1:  # noqa: PLR2004
            return BOTTOM
        return Atom(rng.choice(atoms))
    cls = rng.choice((And, Or, Implies, Cond, Cond))
    return cls(random_formula(rng, depth - 1, atoms=atoms), random_formula(rng, depth - 1, atoms=atoms))


def random_formulas(seed: int, count: int, depth: int = 3) -> list[Formula]:
    """Draw ``count`` formulas from a seeded generator."""
    rng = random.Random(seed)
    return [random_formula(rng, depth) for _ in range(count)]


def sized_formulas(seed: int, count: int, max_size: int) -> list[Formula]:
    """Draw ``count`` distinct formulas of at most ``max_size`` symbols."""
    rng = random.Random(seed)
    found: dict[Formula, None] = {}
    while len(found) < count:
        f = random_formula(rng, 4)
        if formula_size(f) <= max_size:
            found[f] = None
    return list(found)


def random_model(rng: random.Random, size: int) -> NeighbourhoodModel:
    """Draw a model with ``size`` worlds, without any frame condition."""
    worlds = tuple(f"w{i}" for i in range(size))
    subsets = [
        frozenset(c) for r in range(1, size + 1) for c in combinations(worlds, r)
    ]
    neighbourhoods = {
        w: frozenset(s for s in subsets if rng.random() < 0.3)  # noqa: PLR2004
        for w in worlds
    }
    valuation = {
        atom: frozenset(w for w in worlds if rng.random() < 0.5)  # noqa: PLR2004
        for atom in ATOMS
    }
    return NeighbourhoodModel(
        worlds=worlds, neighbourhoods=neighbourhoods, valuation=valuation, root=worlds[0]
    )


def frame_model(rng: random.Random, size: int, logic: Logic) -> NeighbourhoodModel:
    """Draw a model with ``size`` worlds meeting the frame conditions of a non-absolute logic.

    Uniform logics get the whole model as a neighbourhood of every world.
    """
    m = random_model(rng, size)
    universe = frozenset(m.worlds)
    neighbourhoods = {}
    for w in m.worlds:
        family = set(m.nbhds(w))
        if logic.has(Flag.W):
            family = {alpha | {w} for alpha in family}
        if logic.has(Flag.C):
            family.add(frozenset({w}))
        if (logic.has(Flag.T) or logic.has(Flag.N)) and not family:
            family.add(frozenset({w}) if rng.random() < 0.5 else universe)  # noqa: PLR2004
        if logic.has(Flag.T) and not any(w in alpha for alpha in family):
            family.add(universe)
        if logic.uniform:
            family.add(universe)
        neighbourhoods[w] = frozenset(family)
    return NeighbourhoodModel(
        worlds=m.worlds, neighbourhoods=neighbourhoods, valuation=m.valuation, root=m.root
    )
