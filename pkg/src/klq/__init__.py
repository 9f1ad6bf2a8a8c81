"""Targeted parabolic Kazhdan-Lusztig basis elements without recursion."""

from .coxeter import (
    CoxeterSystem, GroupElement, affine_a, build_system, canonical_word, type_a,
    word_to_element,
)
from .engine import EngineOptions, KLResult, compute_target
from .laurent import LaurentPoly

__all__ = [
    "CoxeterSystem", "GroupElement", "affine_a", "build_system", "canonical_word",
    "type_a", "word_to_element", "EngineOptions", "KLResult", "compute_target",
    "LaurentPoly",
]

__version__ = "0.1.0"
