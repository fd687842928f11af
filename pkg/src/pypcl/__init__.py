# Copyright (c) 2024 pypcl project. Released under AGPL-3.0
# license. Refer to the LICENSE file for details or visit:
# https://www.gnu.org/licenses/agpl-3.0.en.html
"""Decision procedures for the preferential family of conditional logics."""

from __future__ import annotations

from .calculus import SUPPORTED_LOGICS, Derivation, Logic, check_derivation
from .countermodel import Realization, extract_model, model_invariant_report
from .formula import Formula, parse_formula, render_formula
from .search import Budget, Provable, Refutable, Unknown, prove
from .semantics import (
    NeighbourhoodModel,
    check_frame,
    enumerate_countermodel,
    forces,
    satisfies_sequent,
)

__all__ = [
    "SUPPORTED_LOGICS",
    "Budget",
    "Derivation",
    "Formula",
    "Logic",
    "NeighbourhoodModel",
    "Provable",
    "Realization",
    "Refutable",
    "Unknown",
    "check_derivation",
    "check_frame",
    "enumerate_countermodel",
    "extract_model",
    "forces",
    "model_invariant_report",
    "parse_formula",
    "prove",
    "render_formula",
    "satisfies_sequent",
]
