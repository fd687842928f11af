# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html

from __future__ import annotations

import logging
from itertools import combinations
from sys import version_info
from typing import TYPE_CHECKING, Any

import z3

from pypcl.calculus import Flag
from pypcl.formula import And, Atom, Bottom, Cond, Implies, Or, subformulas

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from collections.abc import Iterable

    from pypcl.calculus import Logic
    from pypcl.formula import Formula

_LOGGER = logging.getLogger(__name__)


def _all(terms: Iterable[z3.BoolRef]) -> z3.BoolRef:
    terms = list(terms)
    if not terms:
        return z3.BoolVal(True)
    return terms[0] if len(terms) == 1 else z3.And(terms)


def _any(terms: Iterable[z3.BoolRef]) -> z3.BoolRef:
    terms = list(terms)
    if not terms:
        return z3.BoolVal(False)
    return terms[0] if len(terms) == 1 else z3.Or(terms)


class _Encoding:
    """Boolean encoding of the models of a fixed size.

    ``n[x, S]`` states that the world set ``S`` is a neighbourhood of ``x``;
    each subformula gets one truth variable per world.
    """

    def __init__(self: Self, size: int) -> None:
        self.size = size
        self.worlds = range(size)
        self.subsets = [
            frozenset(c)
            for r in range(1, size + 1)
            for c in combinations(self.worlds, r)
        ]
        self.solver = z3.Solver()
        self.nbhd = {
            (x, s): z3.Bool(f"n_{x}_{'_'.join(map(str, sorted(s)))}")
            for x in self.worlds
            for s in self.subsets
        }
        self.atoms: dict[tuple[str, int], z3.BoolRef] = {}
        self.truth: dict[tuple[Formula, int], z3.BoolRef] = {}

    def some(self: Self, s: frozenset[int], f: Formula) -> z3.BoolRef:
        return _any(self.truth[f, y] for y in sorted(s))

    def every_implies(self: Self, s: frozenset[int], a: Formula, b: Formula) -> z3.BoolRef:
        return _all(z3.Implies(self.truth[a, y], self.truth[b, y]) for y in sorted(s))

    def encode(self: Self, f: Formula) -> None:
        for k, g in enumerate(subformulas(f)):
            for w in self.worlds:
                self.truth[g, w] = self._term(g, w, k)

    def _term(self: Self, g: Formula, w: int, k: int) -> z3.BoolRef:
        if isinstance(g, Atom):
            var = z3.Bool(f"v_{g.name}_{w}")
            self.atoms[g.name, w] = var
            return var
        if isinstance(g, Bottom):
            return z3.BoolVal(False)
        if isinstance(g, And):
            return z3.And(self.truth[g.left, w], self.truth[g.right, w])
        if isinstance(g, Or):
            return z3.Or(self.truth[g.left, w], self.truth[g.right, w])
        if isinstance(g, Implies):
            return z3.Implies(self.truth[g.left, w], self.truth[g.right, w])
        if isinstance(g, Cond):
            holds = z3.Bool(f"c_{k}_{w}")
            self.solver.add(holds == self._cond(g, w))
            return holds
        msg = f"Unsupported formula {g!r}"  # pragma: no cover
        raise TypeError(msg)  # pragma: no cover

    def _cond(self: Self, g: Cond, x: int) -> z3.BoolRef:
        return _all(
            z3.Implies(
                z3.And(self.nbhd[x, alpha], self.some(alpha, g.left)),
                _any(
                    z3.And(
                        self.nbhd[x, beta],
                        self.some(beta, g.left),
                        self.every_implies(beta, g.left, g.right),
                    )
                    for beta in self.subsets
                    if beta <= alpha
                ),
            )
            for alpha in self.subsets
        )

    def _covers(self: Self, x: int, z: int) -> z3.BoolRef:
        return _any(self.nbhd[x, s] for s in self.subsets if z in s)

    def frame(self: Self, logic: Logic) -> None:
        add = self.solver.add
        for x in self.worlds:
            own = [s for s in self.subsets if x in s]
            if logic.has(Flag.N):
                add(_any(self.nbhd[x, s] for s in self.subsets))
            if logic.has(Flag.T):
                add(_any(self.nbhd[x, s] for s in own))
            if logic.has(Flag.W):
                add(*(z3.Not(self.nbhd[x, s]) for s in self.subsets if x not in s))
            if logic.has(Flag.C):
                add(self.nbhd[x, frozenset({x})])
            for s in self.subsets:
                for y in sorted(s):
                    if logic.absolute:
                        same = _all(self.nbhd[x, t] == self.nbhd[y, t] for t in self.subsets)
                    elif logic.has(Flag.U):
                        same = _all(self._covers(x, z) == self._covers(y, z) for z in self.worlds)
                    else:
                        continue
                    add(z3.Implies(self.nbhd[x, s], same))

    def decode(self: Self, model: z3.ModelRef) -> dict[str, Any]:
        def true(term: z3.BoolRef) -> bool:
            return z3.is_true(model.eval(term, model_completion=True))

        name = [f"w{x}" for x in self.worlds]
        neighbourhoods = {
            name[x]: frozenset(
                frozenset(name[y] for y in s)
                for s in self.subsets
                if true(self.nbhd[x, s])
            )
            for x in self.worlds
        }
        valuation: dict[str, set[str]] = {}
        for (atom, w), var in self.atoms.items():
            extension = valuation.setdefault(atom, set())
            if true(var):
                extension.add(name[w])
        return {
            "worlds": tuple(name),
            "neighbourhoods": {w: family for w, family in neighbourhoods.items() if family},
            "valuation": {atom: frozenset(ext) for atom, ext in valuation.items()},
            "root": name[0],
        }


def find_countermodel(f: Formula, logic: Logic, size: int) -> dict[str, Any] | None:
    """Look for a model of ``logic`` with exactly ``size`` worlds where ``w0`` falsifies ``f``.

    Returns the keyword arguments of a ``NeighbourhoodModel``, or ``None``.
    """
    enc = _Encoding(size)
    enc.encode(f)
    enc.frame(logic)
    enc.solver.add(z3.Not(enc.truth[f, 0]))
    result = enc.solver.check()
    _LOGGER.debug("%d worlds, %d subsets: %s", size, len(enc.subsets), result)
    if result != z3.sat:
        return None
    return enc.decode(enc.solver.model())
