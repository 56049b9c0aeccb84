"""Satisfiability toolkit for graded modal logic over the 32 frame classes."""

from .formula import Formula, parse, render
from .kripke import FrameClass, KripkeStructure, PointedStructure, check, evaluate, frame_properties
from .normal_form import normalize, to_formula
from .solver import SolverOptions, decide
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "Formula",
    "FrameClass",
    "KripkeStructure",
    "PointedStructure",
    "SolverOptions",
    "Verdict",
    "check",
    "decide",
    "evaluate",
    "frame_properties",
    "normalize",
    "parse",
    "render",
    "to_formula",
]
