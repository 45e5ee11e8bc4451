"""Finite involutive nondegenerate set-theoretic solutions of the braid
relation: validation, isomorph-free enumeration, classification, structure
groups, constructions, link colorings and T-structures."""

from ._accel import backend
from .constructions import (
    AbelianGroup,
    Endomorphism,
    affine_solution,
    assemble_union,
    cyclic_solution,
    permutation_solution,
    right_extension,
    solve_linear_pairs,
    trivial_solution,
    twisted_union,
)
from .core import (
    CanonicalKey,
    FMap,
    Permutation,
    SolutionTable,
    canonical_form,
    derived_maps,
    from_f_table,
    is_isomorphic,
    r_fixed_points,
    relabel,
    validate,
)
from .enumeration import all_solutions, enumerate_keys, enumerate_solutions
from .taxonomy import classify, summary_row, summary_table

__all__ = [
    "AbelianGroup",
    "CanonicalKey",
    "Endomorphism",
    "FMap",
    "Permutation",
    "SolutionTable",
    "affine_solution",
    "all_solutions",
    "assemble_union",
    "backend",
    "canonical_form",
    "classify",
    "cyclic_solution",
    "derived_maps",
    "enumerate_keys",
    "enumerate_solutions",
    "from_f_table",
    "is_isomorphic",
    "permutation_solution",
    "r_fixed_points",
    "relabel",
    "right_extension",
    "solve_linear_pairs",
    "summary_row",
    "summary_table",
    "trivial_solution",
    "twisted_union",
    "validate",
]

__version__ = "0.1.0"
