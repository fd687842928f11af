# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Tests of neighbourhood models and their frame conditions."""

import random

import pytest

from pypcl import (
    Logic,
    NeighbourhoodModel,
    Realization,
    check_frame,
    enumerate_countermodel,
    forces,
    parse_formula,
    satisfies_sequent,
)
from pypcl.exceptions import ModelError, RealizationError
from pypcl.formula import BOTTOM, Implies
from pypcl.semantics import FrameViolation, forces_all, forces_some, satisfies
from pypcl.sequent import (
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

from .generators import random_formula, random_model

x0, x1 = WorldLabel(0), WorldLabel(1)
a0, a1 = NbhdLabel(0), NbhdLabel(1)


def _model(worlds: str, neighbourhoods: dict, valuation: dict, root: str | None = None) -> NeighbourhoodModel:
    return NeighbourhoodModel(
        worlds=tuple(worlds),
        neighbourhoods={w: {frozenset(alpha) for alpha in family} for w, family in neighbourhoods.items()},
        valuation={atom: frozenset(ext) for atom, ext in valuation.items()},
        root=root,
    )


def test_forces_witness() -> None:
    """Test a conditional with a witnessing neighbourhood."""
    m = _model("xy", {"x": ["y"]}, {"p": "y", "q": "y"})
    assert forces(m, "x", parse_formula("p > q"))
    assert forces(m, "x", parse_formula("r > q"))
    assert not forces(m, "x", parse_formula("p"))
    assert forces(m, "y", parse_formula("p & q"))
    assert forces(m, "y", parse_formula("p > false"))


def test_forces_counterexample() -> None:
    """Test a conditional without a witnessing neighbourhood."""
    m = _model("xyz", {"x": ["yz"]}, {"p": "yz", "q": "y"})
    assert not forces(m, "x", parse_formula("p > q"))
    assert forces(m, "x", parse_formula("p > p"))
    assert forces(m, "x", parse_formula("~(p > q)"))


def test_forces_nested_neighbourhoods() -> None:
    """Test that a smaller neighbourhood can witness a larger one."""
    m = _model("xyz", {"x": ["yz", "y"]}, {"p": "yz", "q": "y"})
    assert forces(m, "x", parse_formula("p > q"))
    assert not forces(m, "x", parse_formula("p > ~q"))


def test_forces_unknown_world() -> None:
    """Test evaluating at a world outside the model."""
    m = _model("x", {}, {})
    with pytest.raises(ModelError, match="Unknown world 'y'"):
        forces(m, "y", parse_formula("p"))


def test_local_forcing_duality() -> None:
    """Test that universal forcing is the dual of existential forcing."""
    rng = random.Random(3)
    for _ in range(50):
        m = random_model(rng, 3)
        f = random_formula(rng, 2)
        for alpha in {alpha for w in m.worlds for alpha in m.nbhds(w)}:
            assert forces_all(m, alpha, f) == (not forces_some(m, alpha, Implies(f, BOTTOM)))


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"worlds": (), "neighbourhoods": {}, "valuation": {}}, "at least one world"),
        ({"worlds": ("x",), "neighbourhoods": {"y": set()}, "valuation": {}}, "unknown world"),
        ({"worlds": ("x",), "neighbourhoods": {"x": {frozenset()}}, "valuation": {}}, "Empty neighbourhood"),
        ({"worlds": ("x",), "neighbourhoods": {"x": {frozenset("y")}}, "valuation": {}}, "unknown worlds"),
        ({"worlds": ("x",), "neighbourhoods": {}, "valuation": {"p": {"y"}}}, "unknown worlds"),
        ({"worlds": ("x",), "neighbourhoods": {}, "valuation": {}, "root": "y"}, "Root 'y'"),
    ],
)
def test_model_invariants(kwargs: dict, message: str) -> None:
    """Test rejecting malformed models."""
    with pytest.raises(ModelError, match=message):
        NeighbourhoodModel(**kwargs)


def test_model_json() -> None:
    """Test the JSON encoding of models."""
    m = _model("xy", {"x": ["y", "xy"]}, {"p": "y"}, root="x")
    obj = m.to_json()
    assert obj == {
        "worlds": ["x", "y"],
        "neighbourhoods": {"x": [["x", "y"], ["y"]]},
        "valuation": {"p": ["y"]},
        "root": "x",
    }
    decoded = NeighbourhoodModel.from_json(obj)
    assert decoded.worlds == m.worlds
    assert dict(decoded.neighbourhoods) == dict(m.neighbourhoods)
    assert dict(decoded.valuation) == dict(m.valuation)
    assert decoded.root == "x"
    assert repr(m) == "<NeighbourhoodModel = 2 worlds, root x>"


@pytest.mark.parametrize(
    "obj",
    [
        {},
        {"worlds": "xy"},
        {"worlds": ["x"], "neighbourhoods": []},
        {"worlds": ["x"], "neighbourhoods": {"x": [[]]}},
    ],
)
def test_model_json_malformed(obj: dict) -> None:
    """Test rejecting malformed model objects."""
    with pytest.raises(ModelError):
        NeighbourhoodModel.from_json(obj)


def test_check_frame() -> None:
    """Test the frame conditions."""
    empty = _model("x", {}, {})
    report = check_frame(empty, Logic.from_name("PN"))
    assert not report
    assert report.violations == (FrameViolation("Normality", "x"),)
    assert str(report.violations[0]) == "Normality fails at x"
    assert check_frame(empty, Logic())

    centered = _model("xy", {"x": ["x", "xy"], "y": ["y"]}, {})
    assert check_frame(centered, Logic.from_name("PC"))

    off_center = _model("xy", {"x": ["y"], "y": ["y"]}, {})
    report = check_frame(off_center, Logic.from_name("PW"))
    assert report.conditions == ("Total reflexivity", "Weak centering")
    assert str(report.violations[1]) == "Weak centering fails at x ({y})"


def test_check_frame_uniformity() -> None:
    """Test uniformity and absoluteness."""
    m = _model("xy", {"x": ["y"], "y": ["x", "xy"]}, {})
    report = check_frame(m, Logic.from_name("PU"))
    assert report.conditions == ("Uniformity",)
    assert report.violations[0] == FrameViolation("Uniformity", "x", ("{y}", "y"))
    uniform = _model("xy", {"x": ["y", "x"], "y": ["xy"]}, {})
    assert check_frame(uniform, Logic.from_name("PU"))
    report = check_frame(uniform, Logic.from_name("PA"))
    assert report.conditions == ("Absoluteness",)
    assert "Uniformity" not in check_frame(m, Logic.from_name("PA")).conditions


def test_satisfies_labelled() -> None:
    """Test satisfaction of labelled formulas under a realization."""
    m = _model("xyz", {"x": ["yz", "y"]}, {"p": "yz", "q": "y"})
    r = Realization({x0: "x", x1: "y"}, {a0: {"y", "z"}, a1: {"y"}})
    assert satisfies(m, r, InN(a0, x0))
    assert not satisfies(m, r, InN(a0, x1))
    assert satisfies(m, r, MemberOf(x1, a1))
    assert satisfies(m, r, SubsetOf(a1, a0))
    assert not satisfies(m, r, SubsetOf(a0, a1))
    assert satisfies(m, r, ForcesAll(a0, parse_formula("p")))
    assert not satisfies(m, r, ForcesAll(a0, parse_formula("q")))
    assert satisfies(m, r, ForcesSome(a0, parse_formula("q")))
    assert satisfies(m, r, CondAt(x0, a0, parse_formula("p"), parse_formula("q")))
    assert not satisfies(m, r, CondAt(x0, a0, parse_formula("p"), parse_formula("~q")))
    assert satisfies(m, r, At(x1, parse_formula("p & q")))


def test_satisfies_sequent() -> None:
    """Test satisfaction of sequents."""
    m = _model("xy", {"x": ["y"]}, {"p": "x"})
    r = Realization({x0: "x"}, {a0: {"x"}})
    p = parse_formula("p")
    assert satisfies_sequent(m, r, Sequent(frozenset(), frozenset({At(x0, p)})))
    assert satisfies_sequent(m, r, Sequent(frozenset({InN(a0, x0)}), frozenset()))
    assert not satisfies_sequent(m, r, Sequent(frozenset({At(x0, p)}), frozenset()))
    with pytest.raises(RealizationError, match="not defined on x1"):
        satisfies_sequent(m, r, Sequent(frozenset(), frozenset({At(x1, p)})))


@pytest.mark.parametrize("text", ["p > p", "p -> p", "(p > q) & (p > r) -> (p & q) > r"])
def test_enumerate_valid(text: str) -> None:
    """Test that valid formulas have no small countermodels."""
    assert enumerate_countermodel(parse_formula(text), Logic(), max_worlds=2) is None


def test_enumerate_countermodel() -> None:
    """Test finding a countermodel of strengthening."""
    f = parse_formula("(p > q) -> (p & r) > q")
    m = enumerate_countermodel(f, Logic(), max_worlds=3)
    assert m is not None
    assert m.root is not None
    assert not forces(m, m.root, f)
    assert check_frame(m, Logic())


@pytest.mark.parametrize(
    ("text", "logic"),
    [
        ("~(true > false)", "PCL"),
        ("p -> ~(p > false)", "PN"),
        ("(p > q) -> (p -> q)", "PT"),
        ("p & q -> p > q", "PW"),
        ("(~p > false) -> ~(~p > false) > false", "PCL"),
    ],
)
def test_enumerate_frame(text: str, logic: str) -> None:
    """Test that countermodels meet the frame conditions of the logic."""
    f = parse_formula(text)
    m = enumerate_countermodel(f, Logic.from_name(logic), max_worlds=2)
    assert m is not None
    assert not forces(m, m.root, f)
    assert check_frame(m, Logic.from_name(logic))


@pytest.mark.parametrize(
    ("text", "logic"),
    [
        ("~(true > false)", "PN"),
        ("p -> ~(p > false)", "PT"),
        ("(p > q) -> (p -> q)", "PW"),
        ("p & q -> p > q", "PC"),
    ],
)
def test_enumerate_frame_axioms(text: str, logic: str) -> None:
    """Test that each frame condition validates its axiom on small models."""
    assert enumerate_countermodel(parse_formula(text), Logic.from_name(logic), max_worlds=2) is None


def test_enumerate_bound() -> None:
    """Test rejecting a non-positive bound."""
    with pytest.raises(ValueError, match="max_worlds must be >= 1"):
        enumerate_countermodel(parse_formula("p"), Logic(), max_worlds=0)
    m = enumerate_countermodel(parse_formula("p"), Logic(), max_worlds=1)
    assert m is not None
    assert m.worlds == ("w0",)
    assert m.root == "w0"
