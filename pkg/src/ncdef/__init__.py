"""Exact computations for quantum deformations of projective three-space."""

from .exactlin import DualScalar, PrimeScalar, SparseMatrix, nullspace, rank, rank_mod_p, rref, solve
from .multilinear import Tensor, TensorSubspace, contract_front, cyc_shift, supercyclic_sum
from .quadalg import QuadraticAlgebra, hilbert_function, polynomial_dims, zhang_twist
from .poisson import (
    LinearVectorField,
    OneForm,
    Poly,
    QuadBracket,
    bracket_from_oneform,
    decompose_unimodular,
    is_poisson,
    is_unimodular,
    oneform_from_bracket,
    relative_invariants,
)
from .superpot import cy_report, derived_relations, find_twist
from .cgg import DerivationPair, e3_pair, star, star_presentation, validate_pair
from .families import FAMILIES, TABLE1, instance, orbit_dimension, sample_params, verify_family

__version__ = "0.1.0"

__all__ = [
    "DualScalar", "PrimeScalar", "SparseMatrix", "nullspace", "rank", "rank_mod_p", "rref", "solve",
    "Tensor", "TensorSubspace", "contract_front", "cyc_shift", "supercyclic_sum",
    "QuadraticAlgebra", "hilbert_function", "polynomial_dims", "zhang_twist",
    "LinearVectorField", "OneForm", "Poly", "QuadBracket", "bracket_from_oneform", "decompose_unimodular",
    "is_poisson", "is_unimodular", "oneform_from_bracket", "relative_invariants",
    "cy_report", "derived_relations", "find_twist",
    "DerivationPair", "e3_pair", "star", "star_presentation", "validate_pair",
    "FAMILIES", "TABLE1", "instance", "orbit_dimension", "sample_params", "verify_family",
]
