# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Hand-written derivations of axioms (CM), (N), (T) and (U1).

Each derivation is kept as a :class:`~pypcl.calculus.ProofStep` script and
realised against ``=> x0 : F``, so every intermediate sequent is computed by
the rules rather than transcribed.
"""

from __future__ import annotations

from dataclasses import dataclass
from sys import version_info
from types import MappingProxyType
from typing import TYPE_CHECKING

from .calculus import Logic, ProofStep, RuleId, realise
from .formula import BOTTOM, And, Atom, Cond, Implies, negate, top
from .sequent import (
    At,
    CondAt,
    ForcesAll,
    ForcesSome,
    InN,
    MemberOf,
    NbhdLabel,
    Sequent,
    SubsetOf,
    WorldLabel,
)

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from .calculus import Derivation
    from .formula import Formula
    from .sequent import Label, LabelledFormula

__all__ = ["REPLAYS", "Replay"]

x0, x1, x2, x3 = (WorldLabel(i) for i in range(4))
a0, a1, a2, a3 = (NbhdLabel(i) for i in range(4))
p, q, r = Atom("p"), Atom("q"), Atom("r")


def _step(
    rule: RuleId,
    *principal: LabelledFormula,
    fresh: Label | None = None,
    subject: Label | None = None,
    then: tuple[ProofStep, ...] = (),
) -> ProofStep:
    return ProofStep(rule, principal, () if fresh is None else (fresh,), subject, then)


def _init(x: WorldLabel, f: Formula) -> ProofStep:
    return _step(RuleId.INIT, At(x, f))


def _bot(x: WorldLabel) -> ProofStep:
    return _step(RuleId.BOT_L, At(x, BOTTOM))


@dataclass(frozen=True)
class Replay:
    """A named derivation script for a formula in a logic."""

    name: str
    logic: Logic
    formula: Formula
    script: ProofStep

    @property
    def root(self: Self) -> Sequent:
        """Get the end sequent ``=> x0 : formula``."""
        return Sequent(frozenset(), frozenset({At(x0, self.formula)}))

    def derivation(self: Self) -> Derivation:
        """Realise the script into a derivation.

        :raises RuleError: If a step does not apply
        """
        return realise(self.root, self.script)


def _cautious_monotonicity() -> Replay:
    pq, pr = Cond(p, q), Cond(p, r)
    p_and_q = And(p, q)
    goal = Cond(p_and_q, r)
    f = Implies(And(pq, pr), goal)
    target = CondAt(x0, a0, p_and_q, r)

    left = _step(
        RuleId.L_EXISTS,
        ForcesSome(a0, p_and_q),
        fresh=x1,
        then=(
            _step(
                RuleId.R_EXISTS,
                MemberOf(x1, a0),
                ForcesSome(a0, p),
                then=(_step(RuleId.L_AND, At(x1, p_and_q), then=(_init(x1, p),)),),
            ),
        ),
    )
    inner_left = _step(
        RuleId.L_EXISTS,
        ForcesSome(a1, p),
        fresh=x1,
        then=(
            _step(
                RuleId.R_EXISTS,
                MemberOf(x1, a1),
                ForcesSome(a1, p),
                then=(_init(x1, p),),
            ),
        ),
    )
    exists_half = _step(
        RuleId.L_EXISTS,
        ForcesSome(a2, p),
        fresh=x1,
        then=(
            _step(
                RuleId.L_SUBSET,
                MemberOf(x1, a2),
                SubsetOf(a2, a1),
                then=(
                    _step(
                        RuleId.L_FORALL,
                        MemberOf(x1, a1),
                        ForcesAll(a1, Implies(p, q)),
                        then=(
                            _step(
                                RuleId.R_EXISTS,
                                MemberOf(x1, a2),
                                ForcesSome(a2, p_and_q),
                                then=(
                                    _step(
                                        RuleId.R_AND,
                                        At(x1, p_and_q),
                                        then=(
                                            _init(x1, p),
                                            _step(
                                                RuleId.L_IMP,
                                                At(x1, Implies(p, q)),
                                                then=(_init(x1, p), _init(x1, q)),
                                            ),
                                        ),
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    forall_half = _step(
        RuleId.R_FORALL,
        ForcesAll(a2, Implies(p_and_q, r)),
        fresh=x1,
        then=(
            _step(
                RuleId.R_IMP,
                At(x1, Implies(p_and_q, r)),
                then=(
                    _step(
                        RuleId.L_AND,
                        At(x1, p_and_q),
                        then=(
                            _step(
                                RuleId.L_FORALL,
                                MemberOf(x1, a2),
                                ForcesAll(a2, Implies(p, r)),
                                then=(
                                    _step(
                                        RuleId.L_IMP,
                                        At(x1, Implies(p, r)),
                                        then=(_init(x1, p), _init(x1, r)),
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    inner_right = _step(
        RuleId.L_BAR,
        CondAt(x0, a1, p, r),
        fresh=a2,
        then=(
            _step(
                RuleId.TR,
                SubsetOf(a2, a1),
                SubsetOf(a1, a0),
                then=(
                    _step(
                        RuleId.R_BAR,
                        InN(a2, x0),
                        SubsetOf(a2, a0),
                        target,
                        then=(exists_half, forall_half),
                    ),
                ),
            ),
        ),
    )
    right = _step(
        RuleId.L_BAR,
        CondAt(x0, a0, p, q),
        fresh=a1,
        then=(
            _step(
                RuleId.L_COND,
                InN(a1, x0),
                At(x0, pr),
                then=(inner_left, inner_right),
            ),
        ),
    )
    script = _step(
        RuleId.R_IMP,
        At(x0, f),
        then=(
            _step(
                RuleId.L_AND,
                At(x0, And(pq, pr)),
                then=(
                    _step(
                        RuleId.R_COND,
                        At(x0, goal),
                        fresh=a0,
                        then=(
                            _step(
                                RuleId.L_COND,
                                InN(a0, x0),
                                At(x0, pq),
                                then=(left, right),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    return Replay("CM", Logic.from_name("PCL"), f, script)


def _normality() -> Replay:
    tt = top()
    absurd = Cond(tt, BOTTOM)
    f = negate(absurd)

    left = _step(
        RuleId.ZERO,
        InN(a0, x0),
        fresh=x1,
        then=(
            _step(
                RuleId.R_EXISTS,
                MemberOf(x1, a0),
                ForcesSome(a0, tt),
                then=(_step(RuleId.R_IMP, At(x1, tt), then=(_bot(x1),)),),
            ),
        ),
    )
    right = _step(
        RuleId.L_BAR,
        CondAt(x0, a0, tt, BOTTOM),
        fresh=a1,
        then=(
            _step(
                RuleId.L_EXISTS,
                ForcesSome(a1, tt),
                fresh=x1,
                then=(
                    _step(
                        RuleId.L_FORALL,
                        MemberOf(x1, a1),
                        ForcesAll(a1, Implies(tt, BOTTOM)),
                        then=(
                            _step(
                                RuleId.L_IMP,
                                At(x1, Implies(tt, BOTTOM)),
                                then=(
                                    _step(RuleId.R_IMP, At(x1, tt), then=(_bot(x1),)),
                                    _bot(x1),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    script = _step(
        RuleId.R_IMP,
        At(x0, f),
        then=(
            _step(
                RuleId.N,
                subject=x0,
                fresh=a0,
                then=(
                    _step(
                        RuleId.L_COND,
                        InN(a0, x0),
                        At(x0, absurd),
                        then=(left, right),
                    ),
                ),
            ),
        ),
    )
    return Replay("N", Logic.from_name("PN"), f, script)


def _total_reflexivity() -> Replay:
    absurd = Cond(p, BOTTOM)
    f = Implies(p, negate(absurd))

    left = _step(
        RuleId.R_EXISTS,
        MemberOf(x0, a0),
        ForcesSome(a0, p),
        then=(_init(x0, p),),
    )
    right = _step(
        RuleId.L_BAR,
        CondAt(x0, a0, p, BOTTOM),
        fresh=a1,
        then=(
            _step(
                RuleId.L_EXISTS,
                ForcesSome(a1, p),
                fresh=x1,
                then=(
                    _step(
                        RuleId.L_FORALL,
                        MemberOf(x1, a1),
                        ForcesAll(a1, negate(p)),
                        then=(
                            _step(
                                RuleId.L_IMP,
                                At(x1, negate(p)),
                                then=(_init(x1, p), _bot(x1)),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    script = _step(
        RuleId.R_IMP,
        At(x0, f),
        then=(
            _step(
                RuleId.R_IMP,
                At(x0, negate(absurd)),
                then=(
                    _step(
                        RuleId.T,
                        subject=x0,
                        fresh=a0,
                        then=(
                            _step(
                                RuleId.L_COND,
                                InN(a0, x0),
                                At(x0, absurd),
                                then=(left, right),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    return Replay("T", Logic.from_name("PT"), f, script)


def _uniformity() -> Replay:
    not_p = negate(p)
    empty = Cond(not_p, BOTTOM)
    goal = Cond(negate(empty), BOTTOM)
    f = Implies(empty, goal)

    def refute_not_p(x: WorldLabel) -> ProofStep:
        """Close ``x : ~p`` on the right when ``x : ~p`` is also on the left."""
        return _step(
            RuleId.R_IMP,
            At(x, not_p),
            then=(_step(RuleId.L_IMP, At(x, not_p), then=(_init(x, p), _bot(x))),),
        )

    exists_half = _step(
        RuleId.R_EXISTS,
        MemberOf(x2, a2),
        ForcesSome(a2, not_p),
        then=(refute_not_p(x2),),
    )
    forall_half = _step(
        RuleId.L_BAR,
        CondAt(x0, a2, not_p, BOTTOM),
        fresh=a3,
        then=(
            _step(
                RuleId.L_EXISTS,
                ForcesSome(a3, not_p),
                fresh=x3,
                then=(
                    _step(
                        RuleId.L_FORALL,
                        MemberOf(x3, a3),
                        ForcesAll(a3, negate(not_p)),
                        then=(
                            _step(
                                RuleId.L_IMP,
                                At(x3, negate(not_p)),
                                then=(refute_not_p(x3), _bot(x3)),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    witness = _step(
        RuleId.R_COND,
        At(x1, empty),
        fresh=a1,
        then=(
            _step(
                RuleId.L_EXISTS,
                ForcesSome(a1, not_p),
                fresh=x2,
                then=(
                    _step(
                        RuleId.UNIF1,
                        InN(a0, x0),
                        MemberOf(x1, a0),
                        InN(a1, x1),
                        MemberOf(x2, a1),
                        fresh=a2,
                        then=(
                            _step(
                                RuleId.L_COND,
                                InN(a2, x0),
                                At(x0, empty),
                                then=(exists_half, forall_half),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    script = _step(
        RuleId.R_IMP,
        At(x0, f),
        then=(
            _step(
                RuleId.R_COND,
                At(x0, goal),
                fresh=a0,
                then=(
                    _step(
                        RuleId.L_EXISTS,
                        ForcesSome(a0, negate(empty)),
                        fresh=x1,
                        then=(
                            _step(
                                RuleId.L_IMP,
                                At(x1, negate(empty)),
                                then=(witness, _bot(x1)),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
    return Replay("U1", Logic.from_name("PU"), f, script)


REPLAYS: MappingProxyType[str, Replay] = MappingProxyType(
    {
        replay.name: replay
        for replay in (
            _cautious_monotonicity(),
            _normality(),
            _total_reflexivity(),
            _uniformity(),
        )
    }
)
"""The derivation scripts, by axiom name"""
