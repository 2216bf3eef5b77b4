"""Representations of the inhomogeneous de Sitter algebra P(1,4) and its P(1,n) generalizations.

Exact Clifford and Kemmer-Duffin-Petiau matrix sets, representation
classification, Foldy-Wouthuysen transforms, momentum-grid generator
realizations and the variable-mass spectrum.
"""
from .classify import RepContent, classify, equation_spec, is_ptc_pattern
from .clifford import (GammaSet, SpinTensor, build_gamma_5d, build_gamma_8d, build_gamma_generic,
                       check_product_constraint, spin_isospin_split, spin_tensor, verify_clifford)
from .exact import ExactMatrix, ExactScalar, MetricSignature, anticommutator, commutator, kron
from .kdp import BetaSet, build_beta15, build_beta6, covariance_check, kdp_hamiltonian, verify_kdp

__version__ = "0.1.0"

__all__ = [
    "BetaSet", "ExactMatrix", "ExactScalar", "GammaSet", "MetricSignature", "RepContent", "SpinTensor",
    "anticommutator", "build_beta15", "build_beta6", "build_gamma_5d", "build_gamma_8d",
    "build_gamma_generic", "check_product_constraint", "classify", "commutator", "covariance_check",
    "equation_spec", "is_ptc_pattern", "kdp_hamiltonian", "kron", "spin_isospin_split", "spin_tensor",
    "verify_clifford", "verify_kdp",
]
