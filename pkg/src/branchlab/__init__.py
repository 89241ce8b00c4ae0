"""Exact computations with automorphism groups of rooted trees and their finite quotients."""

__version__ = "0.1.0"

from .config import BudgetExceeded, element_budget
from .permgroup import PermGroup
from .portrait import Portrait
from .selfsimilar import GRIGORCHUK, RecursionTable, Word, grigorchuk_table
from .tree import DegreeSequence
from .treegroup import TreeGroup
from .wreathtower import TowerGroup, TowerSpec, build_tower

__all__ = [
    "BudgetExceeded",
    "DegreeSequence",
    "GRIGORCHUK",
    "Portrait",
    "PermGroup",
    "RecursionTable",
    "TowerGroup",
    "TowerSpec",
    "TreeGroup",
    "Word",
    "build_tower",
    "element_budget",
    "grigorchuk_table",
]
