# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Randomised soundness checks of the rules and of the search verdicts."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING

import pytest

from pypcl import (
    Budget,
    Logic,
    Provable,
    Realization,
    Refutable,
    check_frame,
    enumerate_countermodel,
    extract_model,
    forces,
    model_invariant_report,
    prove,
    satisfies_sequent,
)
from pypcl._internals.rules import RuleId, RuleKind, instantiate
from pypcl.calculus import SUPPORTED_LOGICS, applicable_instances, rule_table
from pypcl.formula import BOTTOM, And, Atom, Cond, Implies, Or
from pypcl.sequent import (
    At,
    Branch,
    CondAt,
    ForcesAll,
    ForcesSome,
    InN,
    Label,
    LabelledFormula,
    MemberOf,
    NbhdLabel,
    Sequent,
    SubsetOf,
    WorldLabel,
    extend_branch,
    singleton,
)

from .generators import frame_model, random_formulas, random_model

if TYPE_CHECKING:
    from collections.abc import Iterator

    from pypcl import NeighbourhoodModel
    from pypcl._internals.rules import RuleInstance

PCL = Logic()
NON_ABSOLUTE = [name for name, logic in SUPPORTED_LOGICS.items() if not logic.absolute]


def _instances(seed: int, count: int, steps: int) -> list[tuple[Sequent, RuleInstance]]:
    """Walk random branches of the search and collect the rule instances met."""
    rng = random.Random(seed)
    found = []
    for f in random_formulas(seed, count, depth=2):
        branch = Branch.initial(f)
        for _ in range(steps):
            instances = applicable_instances(branch, PCL)
            if not instances:
                break
            inst = instances[0]
            found.append((branch.current, inst))
            premise = rng.choice(inst.premises)
            branch = extend_branch(branch, premise, inst.edges)
    return found


def _subsets(m: NeighbourhoodModel) -> list[frozenset[str]]:
    return [
        frozenset(c) for r in range(1, len(m.worlds) + 1) for c in combinations(m.worlds, r)
    ]


def _realization(rng: random.Random, m: NeighbourhoodModel, s: Sequent) -> Realization:
    subsets = _subsets(m)
    worlds = {label: rng.choice(m.worlds) for label in s.labels if isinstance(label, WorldLabel)}
    nbhds = {
        label: rng.choice(subsets)
        for label in s.labels
        if isinstance(label, NbhdLabel) and not label.is_singleton
    }
    return Realization(worlds, nbhds)


def _extensions(m: NeighbourhoodModel, r: Realization, inst: RuleInstance) -> Iterator[Realization]:
    if not inst.fresh:
        yield r
        return
    (label,) = inst.fresh
    if isinstance(label, WorldLabel):
        for w in m.worlds:
            yield Realization({**r.world_map, label: w}, r.nbhd_map)
    else:
        for alpha in _subsets(m):
            yield Realization(r.world_map, {**r.nbhd_map, label: alpha})


def test_rules_preserve_falsity() -> None:
    """Test that a falsified conclusion always leaves a falsified premise.

    Rules introducing a label may pick its denotation.
    """
    rng = random.Random(11)
    falsified = 0
    for conclusion, inst in _instances(seed=5, count=30, steps=8):
        for _ in range(4):
            m = random_model(rng, 3)
            for _ in range(4):
                r = _realization(rng, m, conclusion)
                if satisfies_sequent(m, r, conclusion):
                    continue
                falsified += 1
                assert inst.premises, f"{inst} closes a falsifiable sequent"
                assert any(
                    not satisfies_sequent(m, extended, premise)
                    for extended in _extensions(m, r, inst)
                    for premise in inst.premises
                ), f"{inst} is unsound on {m.to_json()}"
    assert falsified > 0


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_verdicts_agree_with_models(seed: int) -> None:
    """Test search verdicts against countermodel enumeration and extraction."""
    for f in random_formulas(seed, 15, depth=2):
        outcome = prove(f, PCL, Budget(max_nodes=20_000))
        if isinstance(outcome, Provable):
            assert enumerate_countermodel(f, PCL, max_worlds=2) is None, str(f)
        elif isinstance(outcome, Refutable):
            m, realization = extract_model(outcome.leaf, PCL)
            assert not forces(m, m.root, f), str(f)
            assert check_frame(m, PCL)
            assert model_invariant_report(m, outcome.leaf, realization), str(f)


x0, x1, x2 = WorldLabel(0), WorldLabel(1), WorldLabel(2)
a0, a1, a2 = NbhdLabel(0), NbhdLabel(1), NbhdLabel(2)
p, q = Atom("p"), Atom("q")


@dataclass(frozen=True)
class _Template:
    """A conclusion a rule applies to; relational atoms are listed parents first."""

    left: tuple[LabelledFormula, ...]
    right: tuple[LabelledFormula, ...]
    principal: tuple[LabelledFormula, ...] = ()
    fresh: tuple[Label, ...] = ()
    subject: Label | None = None

    def instance(self: _Template, rule: RuleId) -> tuple[Sequent, RuleInstance]:
        """Apply the rule to the conclusion."""
        conclusion = Sequent(frozenset(self.left), frozenset(self.right))
        return conclusion, instantiate(rule, conclusion, self.principal, self.fresh, self.subject)


_UNIF_CHAIN = (InN(a0, x0), MemberOf(x1, a0), InN(a1, x1), MemberOf(x2, a1))
_UNIF_FAN = (InN(a0, x0), MemberOf(x1, a0), InN(a1, x0), MemberOf(x2, a1))

TEMPLATES: dict[RuleId, _Template] = {
    RuleId.INIT: _Template((At(x0, p),), (At(x0, p), At(x0, q)), (At(x0, p),)),
    RuleId.BOT_L: _Template((At(x0, BOTTOM),), (At(x0, q),), (At(x0, BOTTOM),)),
    RuleId.L_AND: _Template((At(x0, And(p, q)),), (At(x0, q),), (At(x0, And(p, q)),)),
    RuleId.R_AND: _Template((At(x0, q),), (At(x0, And(p, q)),), (At(x0, And(p, q)),)),
    RuleId.L_OR: _Template((At(x0, Or(p, q)),), (At(x0, p),), (At(x0, Or(p, q)),)),
    RuleId.R_OR: _Template((), (At(x0, Or(p, q)),), (At(x0, Or(p, q)),)),
    RuleId.L_IMP: _Template((At(x0, Implies(p, q)),), (At(x0, q),), (At(x0, Implies(p, q)),)),
    RuleId.R_IMP: _Template((At(x0, q),), (At(x0, Implies(p, q)),), (At(x0, Implies(p, q)),)),
    RuleId.L_FORALL: _Template(
        (MemberOf(x1, a0), ForcesAll(a0, p)), (At(x1, q),), (MemberOf(x1, a0), ForcesAll(a0, p))
    ),
    RuleId.R_FORALL: _Template(
        (InN(a0, x0),), (ForcesAll(a0, p),), (ForcesAll(a0, p),), (x1,)
    ),
    RuleId.L_EXISTS: _Template(
        (InN(a0, x0), ForcesSome(a0, p)), (At(x0, q),), (ForcesSome(a0, p),), (x1,)
    ),
    RuleId.R_EXISTS: _Template(
        (MemberOf(x1, a0),), (ForcesSome(a0, p),), (MemberOf(x1, a0), ForcesSome(a0, p))
    ),
    RuleId.R_COND: _Template((), (At(x0, Cond(p, q)),), (At(x0, Cond(p, q)),), (a0,)),
    RuleId.L_COND: _Template(
        (InN(a0, x0), At(x0, Cond(p, q))), (At(x0, q),), (InN(a0, x0), At(x0, Cond(p, q)))
    ),
    RuleId.L_COND_STAR: _Template(
        (InN(a0, x0), At(x0, Cond(p, q))), (At(x0, q),), (InN(a0, x0), At(x0, Cond(p, q)))
    ),
    RuleId.R_BAR: _Template(
        (InN(a1, x0), SubsetOf(a1, a0)),
        (CondAt(x0, a0, p, q),),
        (InN(a1, x0), SubsetOf(a1, a0), CondAt(x0, a0, p, q)),
    ),
    RuleId.L_BAR: _Template(
        (InN(a0, x0), CondAt(x0, a0, p, q)), (At(x0, q),), (CondAt(x0, a0, p, q),), (a1,)
    ),
    RuleId.REF: _Template((InN(a0, x0),), (At(x0, p),), subject=a0),
    RuleId.TR: _Template(
        (SubsetOf(a0, a1), SubsetOf(a1, a2)), (At(x0, p),), (SubsetOf(a0, a1), SubsetOf(a1, a2))
    ),
    RuleId.L_SUBSET: _Template(
        (MemberOf(x1, a0), SubsetOf(a0, a1)), (At(x1, p),), (MemberOf(x1, a0), SubsetOf(a0, a1))
    ),
    RuleId.MON_FORALL: _Template(
        (SubsetOf(a0, a1), ForcesAll(a1, p)), (At(x0, p),), (SubsetOf(a0, a1), ForcesAll(a1, p))
    ),
    RuleId.N: _Template((At(x0, q),), (At(x0, p),), fresh=(a0,), subject=x0),
    RuleId.T: _Template((At(x0, q),), (At(x0, p),), fresh=(a0,), subject=x0),
    RuleId.ZERO: _Template((InN(a0, x0),), (At(x0, p),), (InN(a0, x0),), (x1,)),
    RuleId.W: _Template((InN(a0, x0),), (At(x0, p),), (InN(a0, x0),)),
    RuleId.SINGLE: _Template(
        (InN(singleton(x0), x0),), (At(x0, p),), (InN(singleton(x0), x0),)
    ),
    RuleId.C: _Template((InN(a0, x0),), (At(x0, p),), (InN(a0, x0),)),
    RuleId.REPL1: _Template(
        (MemberOf(x1, singleton(x0)), At(x0, p)),
        (At(x1, p),),
        (MemberOf(x1, singleton(x0)), At(x0, p)),
    ),
    RuleId.REPL2: _Template(
        (MemberOf(x1, singleton(x0)), At(x1, p)),
        (At(x0, p),),
        (MemberOf(x1, singleton(x0)), At(x1, p)),
    ),
    RuleId.UNIF1: _Template(_UNIF_CHAIN, (At(x0, p),), _UNIF_CHAIN, (a2,)),
    RuleId.UNIF2: _Template(_UNIF_FAN, (At(x0, p),), _UNIF_FAN, (a2,)),
}


def _guided_realization(
    rng: random.Random, m: NeighbourhoodModel, template: _Template, s: Sequent
) -> Realization:
    """Pick denotations that make the relational atoms of a template likely to hold."""
    subsets = _subsets(m)
    worlds: dict[WorldLabel, str] = {}
    nbhds: dict[NbhdLabel, frozenset[str]] = {}

    def world(x: WorldLabel) -> str:
        return worlds.setdefault(x, rng.choice(m.worlds))

    def nbhd(a: NbhdLabel) -> frozenset[str]:
        if a.of is not None:
            return frozenset({world(a.of)})
        return nbhds.setdefault(a, rng.choice(subsets))

    for f in template.left:
        if isinstance(f, InN) and not f.nbhd.is_singleton and f.nbhd not in nbhds:
            family = sorted(m.nbhds(world(f.world)), key=sorted)
            if family:
                nbhds[f.nbhd] = rng.choice(family)
        elif isinstance(f, MemberOf) and f.world not in worlds:
            worlds[f.world] = rng.choice(sorted(nbhd(f.nbhd)))
        elif isinstance(f, SubsetOf) and f.sub not in nbhds:
            sup = sorted(nbhd(f.sup))
            nbhds[f.sub] = frozenset(rng.sample(sup, rng.randint(1, len(sup))))
    for label in s.labels:
        if isinstance(label, WorldLabel):
            world(label)
        else:
            nbhd(label)
    return Realization(worlds, nbhds)


def _rule_cases() -> list[tuple[str, RuleId]]:
    cases = []
    for name in NON_ABSOLUTE:
        logic = Logic.from_name(name)
        rules = rule_table(logic) | rule_table(logic, search=True)
        cases.extend((name, rule) for rule in sorted(rules, key=lambda rule: rule.value))
    return cases


def test_templates_cover_rules() -> None:
    """Test that every rule of the non-absolute logics has a sampling template."""
    assert {rule for _, rule in _rule_cases()} <= set(TEMPLATES)


def _check_rule(name: str, rule: RuleId, models: int, per_model: int) -> int:
    logic = Logic.from_name(name)
    template = TEMPLATES[rule]
    conclusion, inst = template.instance(rule)
    rng = random.Random(f"{name}/{rule.value}")
    falsified = 0
    for _ in range(models):
        m = frame_model(rng, 3, logic)
        assert check_frame(m, logic), m.to_json()
        for _ in range(per_model):
            r = _guided_realization(rng, m, template, conclusion)
            if satisfies_sequent(m, r, conclusion):
                continue
            falsified += 1
            assert inst.premises, f"{inst} closes a falsifiable sequent in {name}"
            assert any(
                not satisfies_sequent(m, extended, premise)
                for extended in _extensions(m, r, inst)
                for premise in inst.premises
            ), f"{inst} is unsound in {name} on {m.to_json()}"
    return falsified


@pytest.mark.parametrize(
    ("name", "rule"), [case for case in _rule_cases() if case[0] in ("PCL", "PCU")]
)
def test_rule_templates_sound(name: str, rule: RuleId) -> None:
    """Test each rule of two lattice corners on a few frame models."""
    falsified = _check_rule(name, rule, models=5, per_model=10)
    if rule.kind is not RuleKind.CLOSURE:
        assert falsified > 0


@pytest.mark.slow
@pytest.mark.parametrize(("name", "rule"), _rule_cases())
def test_rule_templates_sound_sampled(name: str, rule: RuleId) -> None:
    """Test every rule of every non-absolute logic on 1000 samples of frame models."""
    falsified = _check_rule(name, rule, models=50, per_model=20)
    if rule.kind is not RuleKind.CLOSURE:
        assert falsified > 0


@pytest.mark.slow
@pytest.mark.parametrize("name", NON_ABSOLUTE)
def test_verdicts_agree_with_three_world_models(name: str) -> None:
    """Test that no theorem has a countermodel of up to three worlds in any non-absolute logic."""
    logic = Logic.from_name(name)
    for f in random_formulas(4, 15, depth=2):
        outcome = prove(f, logic, Budget(max_nodes=20_000))
        if isinstance(outcome, Provable):
            assert enumerate_countermodel(f, logic, max_worlds=3) is None, str(f)
        elif isinstance(outcome, Refutable):
            m, _ = extract_model(outcome.leaf, logic)
            assert not forces(m, m.root, f), str(f)
            assert check_frame(m, logic), str(f)
