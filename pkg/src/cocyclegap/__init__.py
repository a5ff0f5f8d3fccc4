"""Finite-group 2-cocycles, twisted regular representations and tensor norm gaps."""

__version__ = "0.1.0"

from .rings import FiniteRing, RingError
from .groups import (
    CapExceeded,
    IndexedGroup,
    ProductGroup,
    Subgroup,
    VectorGroup,
    Word,
    generator_tuple,
    generator_words,
    linear_subgroup,
    sl2_enumerate,
    translation_subgroup,
)
from .cocycles import (
    Character,
    CoboundaryCertificate,
    PhaseCocycle,
    character_compose,
    coboundary_decide,
    coboundary_of,
    cocycle_identity_check,
    extend_to_semidirect,
    phase_family,
    restrict,
    standard_phase_cocycle,
    symmetry_test,
    symplectic_cocycle,
    tensor_cocycle,
)
from .snf import smith_normal_form, solve_mod
from .projective import GenPermOperator, ProjectiveRep, TensorSumOperator, regular_rep, tensor_sum
from .spectral import GapBound, NormEstimate, gap_bound, norm_dense, norm_power

__all__ = [name for name in dir() if not name.startswith("_")]
