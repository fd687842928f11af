# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Terminating backward proof search."""

from __future__ import annotations

import logging
import time
from abc import ABC
from dataclasses import dataclass, field
from sys import version_info
from typing import TYPE_CHECKING, Any

from ._internals.rules import (
    LINEAR_STATIC,
    PRIORITY,
    RuleId,
    RuleInstance,
    RuleKind,
    RuleMismatch,
    SequentIndex,
    candidates,
    closing_instance,
    instantiate,
    plans,
)
from .calculus import Derivation, Logic, rule_table
from .sequent import Branch, Sequent, extend_branch

if version_info < (3, 11):  # pragma: no cover
    from typing_extensions import Self
else:  # pragma: no cover
    from typing import Self

if TYPE_CHECKING:  # pragma: no cover
    from .formula import Formula

_LOGGER = logging.getLogger(__name__)

_BRANCHING_STATIC = (RuleId.L_OR, RuleId.R_AND, RuleId.L_IMP, RuleId.R_BAR)
_AFTER_LINEAR = tuple(rule for rule in PRIORITY if rule not in LINEAR_STATIC)


@dataclass(frozen=True)
class Budget:
    """Resource limits of a single search."""

    max_nodes: int = 200_000
    max_labels: int = 5_000
    wall_clock: float | None = None
    """Seconds, or ``None`` for no time limit"""

    def __post_init__(self: Self) -> None:
        """Validate the limits."""
        for name in ("max_nodes", "max_labels"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                msg = f"Expected instance of int, got {name}={type(value)}"
                raise TypeError(msg)
            if value < 1:
                msg = f"{name} must be >= 1"
                raise ValueError(msg)
        if self.wall_clock is not None and self.wall_clock <= 0:
            msg = "wall_clock must be > 0"
            raise ValueError(msg)


@dataclass(frozen=True)
class SearchStats:
    """Counters of a finished search."""

    nodes: int
    labels: int
    depth: int
    elapsed: float

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the counters."""
        return {
            "nodes": self.nodes,
            "labels": self.labels,
            "depth": self.depth,
            "elapsed": round(self.elapsed, 6),
        }


@dataclass(frozen=True)
class TraceEvent:
    """A rule firing recorded by the search."""

    step: int
    depth: int
    instance: RuleInstance
    pending_static: tuple[RuleId, ...] = ()
    """Static rules with unsaturated instances when a dynamic rule fired"""

    @property
    def rule(self: Self) -> RuleId:
        """Get the rule that fired."""
        return self.instance.rule

    @property
    def kind(self: Self) -> RuleKind:
        """Get the strategy class of the rule that fired."""
        return self.instance.rule.kind

    def to_json(self: Self) -> dict[str, Any]:
        """Encode the event as a JSON object."""
        return {
            "event": "rule",
            "step": self.step,
            "depth": self.depth,
            "rule": self.rule.value,
            "kind": self.kind.value,
            "instance": str(self.instance),
            "pending_static": [rule.value for rule in self.pending_static],
        }


@dataclass(frozen=True)
class SearchOutcome(ABC):
    """The result of :func:`prove`."""

    formula: Formula
    logic: Logic
    stats: SearchStats
    trace: tuple[TraceEvent, ...] = field(repr=False)


@dataclass(frozen=True)
class Provable(SearchOutcome):
    """Every branch closed."""

    derivation: Derivation = field(repr=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class Refutable(SearchOutcome):
    """A branch ended in a saturated sequent."""

    leaf: Branch = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def has_model(self: Self) -> bool:
        """Check whether a countermodel can be read off the leaf for this logic."""
        return not self.logic.absolute


@dataclass(frozen=True)
class Unknown(SearchOutcome):
    """The budget ran out first."""

    reason: str = ""


class _Node:
    __slots__ = ("children", "instance", "sequent")

    def __init__(self: Self, sequent: Sequent) -> None:
        self.sequent = sequent
        self.instance: RuleInstance | None = None
        self.children: list[_Node] = []


class _BudgetExhausted(Exception):  # noqa: N818
    pass


class _Search:
    def __init__(self: Self, f: Formula, logic: Logic, budget: Budget) -> None:
        self.formula = f
        self.logic = logic
        self.budget = budget
        self.rules = rule_table(logic, search=True)
        self.nodes = 1
        self.max_labels = 1
        self.max_depth = 0
        self.trace: list[TraceEvent] = []
        self.started = time.monotonic()
        self.deadline = (
            None if budget.wall_clock is None else self.started + budget.wall_clock
        )

    def _stats(self: Self) -> SearchStats:
        return SearchStats(
            self.nodes, self.max_labels, self.max_depth, time.monotonic() - self.started
        )

    def _charge(self: Self, branch: Branch, depth: int) -> None:
        self.nodes += 1
        self.max_labels = max(self.max_labels, len(branch.labels))
        self.max_depth = max(self.max_depth, depth)
        if self.nodes > self.budget.max_nodes:
            msg = f"node budget of {self.budget.max_nodes} exhausted"
            raise _BudgetExhausted(msg)
        if len(branch.labels) > self.budget.max_labels:
            msg = f"label budget of {self.budget.max_labels} exhausted"
            raise _BudgetExhausted(msg)
        if self.deadline is not None and time.monotonic() > self.deadline:
            msg = f"time budget of {self.budget.wall_clock}s exhausted"
            raise _BudgetExhausted(msg)

    def _fire(
        self: Self,
        inst: RuleInstance,
        depth: int,
        pending: tuple[RuleId, ...] = (),
    ) -> None:
        event = TraceEvent(len(self.trace), depth, inst, pending)
        self.trace.append(event)
        if _LOGGER.isEnabledFor(logging.DEBUG):
            _LOGGER.debug("step %d depth %d: %s", event.step, depth, inst)

    def _pending_static(self: Self, index: SequentIndex) -> tuple[RuleId, ...]:
        return tuple(
            rule
            for rule in (*_BRANCHING_STATIC, RuleId.L_COND_STAR)
            if next(plans(index, self.rules, (rule,)), None) is not None
        )

    def _apply_linear(
        self: Self, index: SequentIndex, node: _Node, depth: int
    ) -> tuple[SequentIndex, _Node, int, bool] | None:
        """Fire every pending single-premise static instance in a row.

        Returns ``None`` if there was none, otherwise the new position and
        whether the chain ended in a closed sequent.
        """
        batch = list(plans(index, self.rules, LINEAR_STATIC))
        if not batch:
            return None
        for planned in batch:
            branch = index.branch
            current = branch.current
            try:
                inst = instantiate(
                    planned.rule, current, planned.principal, (), planned.subject
                )
            except RuleMismatch:
                continue
            (premise,) = inst.premises
            if (premise.antecedent - current.antecedent) <= branch.down_gamma and (
                premise.succedent - current.succedent
            ) <= branch.down_delta:
                continue
            node.instance = inst
            self._fire(inst, depth)
            index = index.advance(extend_branch(branch, premise, inst.edges))
            child = _Node(premise)
            node.children.append(child)
            node, depth = child, depth + 1
            self._charge(index.branch, depth)
            closing = closing_instance(premise)
            if closing is not None:
                node.instance = closing
                return index, node, depth, True
        return index, node, depth, False

    def run(self: Self) -> SearchOutcome:
        root_index = SequentIndex(Branch.initial(self.formula))
        root = _Node(root_index.branch.current)
        stack: list[tuple[SequentIndex, _Node, int]] = [(root_index, root, 0)]
        try:
            while stack:
                index, node, depth = stack.pop()
                leaf = self._expand(index, node, depth, stack)
                if leaf is not None:
                    return self._finish(Refutable, leaf=leaf)
        except _BudgetExhausted as exc:
            return self._finish(Unknown, reason=str(exc))
        return self._finish(Provable, derivation=_freeze(root))

    def _expand(
        self: Self,
        index: SequentIndex,
        node: _Node,
        depth: int,
        stack: list[tuple[SequentIndex, _Node, int]],
    ) -> Branch | None:
        """Develop one branch until it closes, splits or saturates."""
        while True:
            closing = closing_instance(index.branch.current)
            if closing is not None:
                node.instance = closing
                return None

            linear = self._apply_linear(index, node, depth)
            if linear is not None:
                index, node, depth, closed = linear
                if closed:
                    return None
                continue

            planned = next(plans(index, self.rules, _AFTER_LINEAR), None)
            if planned is None:
                return index.branch

            branch = index.branch
            inst = instantiate(
                planned.rule, branch.current, planned.principal, planned.fresh, planned.subject
            )
            pending = self._pending_static(index) if inst.rule.kind is RuleKind.DYNAMIC else ()
            node.instance = inst
            self._fire(inst, depth, pending)
            children = [_Node(premise) for premise in inst.premises]
            node.children.extend(children)
            indexes = [
                index.advance(extend_branch(branch, premise, inst.edges))
                for premise in inst.premises
            ]
            for child_index in indexes:
                self._charge(child_index.branch, depth + 1)
            if len(children) == 1:
                index, node, depth = indexes[0], children[0], depth + 1
                continue
            stack.extend(
                (i, c, depth + 1) for i, c in reversed(list(zip(indexes, children)))
            )
            return None

    def _finish(self: Self, cls: type[SearchOutcome], **extra: Any) -> SearchOutcome:  # noqa: ANN401
        stats = self._stats()
        outcome = cls(self.formula, self.logic, stats, tuple(self.trace), **extra)
        _LOGGER.info(
            "%s in %s: %s after %d nodes, %d labels, %.3fs",
            self.formula,
            self.logic.name,
            cls.__name__.lower(),
            stats.nodes,
            stats.labels,
            stats.elapsed,
        )
        return outcome


def _freeze(root: _Node) -> Derivation:
    """Convert the mutable search tree into a derivation, bottom-up."""
    order: list[_Node] = []
    stack = [root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(node.children)
    built: dict[int, Derivation] = {}
    for node in reversed(order):
        assert node.instance is not None  # noqa: S101
        built[id(node)] = Derivation(
            node.sequent, node.instance, tuple(built[id(c)] for c in node.children)
        )
    return built[id(root)]


def prove(f: Formula, logic: Logic, budget: Budget | None = None) -> SearchOutcome:
    """Search for a derivation of ``=> x0 : f``.

    :param f: The formula
    :type f: Formula
    :param logic: The logic
    :type logic: Logic
    :param budget: The resource limits, defaults to :class:`Budget()`
    :type budget: Budget | None
    :returns: :class:`Provable`, :class:`Refutable` or, when the budget runs
        out, :class:`Unknown`
    :rtype: SearchOutcome
    """
    return _Search(f, logic, budget or Budget()).run()


def is_closed(s: Sequent) -> bool:
    """Check whether a sequent is an initial sequent."""
    return closing_instance(s) is not None


@dataclass(frozen=True)
class SaturationReport:
    """Whether a branch is saturated, and which conditions fail if not."""

    closed: bool
    unmet: tuple[RuleInstance, ...] = ()

    @property
    def saturated(self: Self) -> bool:
        """Check the branch is open and every saturation condition holds."""
        return not self.closed and not self.unmet

    @property
    def unmet_rules(self: Self) -> tuple[RuleId, ...]:
        """Get the rules whose saturation condition fails, without repetitions."""
        return tuple(dict.fromkeys(inst.rule for inst in self.unmet))

    def __bool__(self: Self) -> bool:
        """Truth value of the report."""
        return self.saturated


def is_saturated(branch: Branch, logic: Logic) -> SaturationReport:
    """Check a branch against the saturation conditions of the search rules."""
    if is_closed(branch.current):
        return SaturationReport(closed=True)
    index = SequentIndex(branch)
    return SaturationReport(
        closed=False,
        unmet=tuple(candidates(index, rule_table(logic, search=True), PRIORITY)),
    )


def search_trace(outcome: SearchOutcome) -> tuple[TraceEvent, ...]:
    """Get the rule firings of a search, in order."""
    return outcome.trace
